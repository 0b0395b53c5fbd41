#include "scriptmind/error.hpp"

namespace scriptmind {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedRecord: return "MalformedRecord";
    case Errc::DuplicateCaseId: return "DuplicateCaseId";
    case Errc::UnknownSpeaker: return "UnknownSpeaker";
    case Errc::EmptyText: return "EmptyText";
    case Errc::BadFormat: return "BadFormat";
    case Errc::UnknownCode: return "UnknownCode";
    case Errc::NonScammerUtterance: return "NonScammerUtterance";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::DegenerateMarginals: return "DegenerateMarginals";
    case Errc::EmptySbs: return "EmptySbs";
    case Errc::ZeroTotal: return "ZeroTotal";
    case Errc::NotScamCase: return "NotScamCase";
    case Errc::NotBenignCase: return "NotBenignCase";
    case Errc::EmptySide: return "EmptySide";
    case Errc::TooFewCases: return "TooFewCases";
    case Errc::IoError: return "IoError";
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::Timeout: return "Timeout";
    case Errc::TransportError: return "TransportError";
    case Errc::AuthError: return "AuthError";
    case Errc::RetriesExhausted: return "RetriesExhausted";
    case Errc::FailedParse: return "FailedParse";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::NonNumericJudgeOutput: return "NonNumericJudgeOutput";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::ConstantVector: return "ConstantVector";
    case Errc::IncompleteData: return "IncompleteData";
    case Errc::TooFewSubjects: return "TooFewSubjects";
    case Errc::SingletonGroup: return "SingletonGroup";
    case Errc::DegenerateGroups: return "DegenerateGroups";
    case Errc::SessionComplete: return "SessionComplete";
    case Errc::OutOfOrderStage: return "OutOfOrderStage";
    case Errc::LikertOutOfRange: return "LikertOutOfRange";
    case Errc::NoCompletedSessions: return "NoCompletedSessions";
    case Errc::UnknownSession: return "UnknownSession";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ConfigError: return "ConfigError";
    case Errc::OutputExists: return "OutputExists";
  }
  return "Unknown";
}

namespace {

std::string compose(Errc code, const std::string& message, const std::string& where) {
  std::string out(to_string(code));
  if (!where.empty()) {
    out += " at ";
    out += where;
  }
  if (!message.empty()) {
    out += ": ";
    out += message;
  }
  return out;
}

}  // namespace

Error::Error(Errc code, std::string message, std::string where)
    : std::runtime_error(compose(code, message, where)),
      code_(code),
      detail_(std::move(message)),
      where_(std::move(where)) {}

}  // namespace scriptmind
