#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scriptmind {

enum class Errc {
  // corpus
  MalformedRecord,
  DuplicateCaseId,
  UnknownSpeaker,
  EmptyText,
  BadFormat,
  UnknownCode,
  NonScammerUtterance,
  LengthMismatch,
  DegenerateMarginals,
  // sequence analysis
  EmptySbs,
  ZeroTotal,
  // csid
  NotScamCase,
  NotBenignCase,
  EmptySide,
  TooFewCases,
  IoError,
  MalformedLine,
  // evaluation
  Timeout,
  TransportError,
  AuthError,
  RetriesExhausted,
  FailedParse,
  EmptyInput,
  NonNumericJudgeOutput,
  OutOfRange,
  ConstantVector,
  // statistics
  IncompleteData,
  TooFewSubjects,
  SingletonGroup,
  DegenerateGroups,
  // experiment
  SessionComplete,
  OutOfOrderStage,
  LikertOutOfRange,
  NoCompletedSessions,
  UnknownSession,
  // general
  InvalidArgument,
  ConfigError,
  OutputExists,
};

std::string_view to_string(Errc code) noexcept;

// All library failures are reported as scriptmind::Error. `where` carries the
// location (file:line, case/turn, session id) when one is known.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message, std::string where = {});

  Errc code() const noexcept { return code_; }
  const std::string& where() const noexcept { return where_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
  std::string where_;
};

}  // namespace scriptmind
