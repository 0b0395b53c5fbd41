#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scriptmind/corpus.hpp"
#include "scriptmind/prompt.hpp"

namespace scriptmind {

/// One prefix-to-continuation instance. Scam instances carry the gold next
/// scammer utterance and a templated intent rationale; benign ones carry
/// neither.
struct CsidInstance {
  std::string instance_id;
  Label label = Label::scam;
  std::vector<std::string> context;
  std::optional<std::string> next_utterance;
  std::optional<std::string> rationale;
  std::string source_case;
  std::size_t cut_index = 0;  // turn index of the last context utterance

  friend bool operator==(const CsidInstance&, const CsidInstance&) = default;
};

/// Where a conversation may be cut into an instance.
struct SegmentationPolicy {
  /// Minimum number of utterances (either speaker) before the cut.
  std::size_t min_context = 1;
  /// Candidate turns (labeled scammer turns for scam cases, caller turns for
  /// benign ones) that must precede a cut. Scam cases need at least one, the
  /// source of the "current intent" half of the rationale.
  std::size_t min_predecessors = 1;
};

/// "Current criminal intent: ... Expected next criminal intent: ..." rendered
/// from taxonomy descriptions. UnknownCode if either code is not in `taxonomy`.
std::string render_rationale(const IntentCode& current, const IntentCode& next, const Taxonomy& taxonomy,
                             const PromptTemplates& templates = PromptTemplates::defaults());

/// Scam instances of one case, ordered by cut position. `sbs` are the case's
/// records; only primary intents are used.
std::vector<CsidInstance> segment_case(const ScamCase& sc, std::span<const SbsRecord> sbs,
                                       const SegmentationPolicy& policy, const Taxonomy& taxonomy,
                                       const PromptTemplates& templates = PromptTemplates::defaults());

/// Benign instances: the same cut rule applied to the caller's (scammer-role)
/// turns, without continuation or rationale.
std::vector<CsidInstance> make_benign_instances(std::span<const ScamCase> benign_cases,
                                                const SegmentationPolicy& policy);

struct CsidBuild {
  std::vector<CsidInstance> scam;
  std::vector<CsidInstance> benign;
};

/// Segments every case of the corpus; `jobs` > 1 runs cases in parallel with
/// an order-preserving merge.
CsidBuild build_csid(const Corpus& corpus, const SegmentationPolicy& policy,
                     const PromptTemplates& templates = PromptTemplates::defaults(), unsigned jobs = 1);

/// 1:1 class balance. The larger side is downsampled uniformly at random
/// (seeded); output is the scam block then the benign block, each in source
/// order.
std::vector<CsidInstance> balance_dataset(std::span<const CsidInstance> scam, std::span<const CsidInstance> benign,
                                          std::uint64_t seed);

struct DatasetSplit {
  std::vector<std::string> train;  // instance ids, dataset order
  std::vector<std::string> test;
  std::vector<std::string> train_cases;
  std::vector<std::string> test_cases;
  std::uint64_t seed = 0;
};

/// Case-level split stratified by label: within each label, round(n * f)
/// seeded-shuffled cases go to test.
DatasetSplit split_dataset(std::span<const CsidInstance> instances, double test_fraction, std::uint64_t seed);

struct PromptRendering {
  std::string system;
  std::string user;
  std::string expected_output;  // single compact JSON object
};

PromptRendering render_prompt(const CsidInstance& inst,
                              const PromptTemplates& templates = PromptTemplates::defaults());

/// JSONL: {"id","label","context","next_utterance"?,"rationale"?,"source_case","cut_index"}.
std::string serialize_instance(const CsidInstance& inst);
CsidInstance parse_instance(std::string_view line, std::string_view where = {});
void write_dataset(std::span<const CsidInstance> instances, const std::filesystem::path& path);
std::vector<CsidInstance> read_dataset(const std::filesystem::path& path);

}  // namespace scriptmind
