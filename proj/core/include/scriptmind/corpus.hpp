#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scriptmind {

enum class Speaker { user, scammer };
enum class Scenario { prosecutor_impersonation, benign_police_summons, other };
enum class Label { scam, non_scam };

std::string_view to_string(Speaker s) noexcept;
std::string_view to_string(Scenario s) noexcept;
std::string_view to_string(Label l) noexcept;
std::optional<Speaker> parse_speaker(std::string_view s) noexcept;
std::optional<Scenario> parse_scenario(std::string_view s) noexcept;
std::optional<Label> parse_label(std::string_view s) noexcept;

/// A node of the five-stage crime-script taxonomy. Identity is (stage, step);
/// the description is carried along for rendering and never compared.
struct IntentCode {
  int stage = 0;
  int step = 0;
  std::string description;

  friend bool operator==(const IntentCode& a, const IntentCode& b) noexcept {
    return a.stage == b.stage && a.step == b.step;
  }
  friend std::strong_ordering operator<=>(const IntentCode& a, const IntentCode& b) noexcept {
    if (auto c = a.stage <=> b.stage; c != 0) return c;
    return a.step <=> b.step;
  }
};

/// Canonical token, e.g. "5-(2)".
std::string format_code(const IntentCode& code);

class Taxonomy {
 public:
  static constexpr int kStageCount = 5;

  Taxonomy() = default;
  explicit Taxonomy(std::vector<IntentCode> codes);

  /// JSONL, one {"stage", "step", "description"} object per line.
  static Taxonomy parse(std::istream& in, std::string_view source = "<taxonomy>");
  static Taxonomy load(const std::filesystem::path& path);

  const IntentCode* find(int stage, int step) const noexcept;
  const std::vector<IntentCode>& codes() const noexcept { return codes_; }
  std::size_t size() const noexcept { return codes_.size(); }

 private:
  std::vector<IntentCode> codes_;  // sorted by (stage, step)
};

/// Accepts "5-(2)" and the bare "5-2" form. BadFormat for anything else,
/// UnknownCode when well-formed but absent from the taxonomy.
IntentCode parse_intent_code(std::string_view token, const Taxonomy& taxonomy);

struct Utterance {
  std::string case_id;
  std::size_t turn_index = 0;
  Speaker speaker = Speaker::user;
  std::string text;

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

struct ScamCase {
  std::string case_id;
  Scenario scenario = Scenario::other;
  Label label = Label::scam;
  std::vector<Utterance> utterances;

  friend bool operator==(const ScamCase&, const ScamCase&) = default;
};

/// One annotated scammer turn as it appears in the source data, possibly
/// carrying several intents.
struct RawAnnotation {
  std::string case_id;
  std::size_t turn_index = 0;
  std::vector<IntentCode> intents;
};

struct SbsRecord {
  std::string case_id;
  std::size_t turn_index = 0;
  IntentCode intent;
  bool primary = true;  // first-listed intent of its turn

  friend bool operator==(const SbsRecord& a, const SbsRecord& b) noexcept {
    return a.case_id == b.case_id && a.turn_index == b.turn_index && a.intent == b.intent &&
           a.primary == b.primary;
  }
};

struct Corpus {
  std::vector<ScamCase> cases;
  std::vector<SbsRecord> sbs;
  Taxonomy taxonomy;

  const ScamCase* find_case(std::string_view case_id) const noexcept;
  /// SBS records of one case in (turn, listing) order.
  std::vector<SbsRecord> sbs_for(std::string_view case_id) const;
};

bool operator==(const Corpus& a, const Corpus& b);

/// Newline-delimited cases. Input order of cases is preserved and every
/// structural invariant is enforced; the first violation aborts with the line
/// number in Error::where().
Corpus parse_corpus(std::istream& in, const Taxonomy& taxonomy, std::string_view source = "<corpus>");
Corpus parse_corpus_file(const std::filesystem::path& path, const Taxonomy& taxonomy);

/// Inverse of parse_corpus: annotations are regrouped per turn in listing order.
std::string serialize_corpus(const Corpus& corpus);

/// Expands multi-intent annotations into one record per intent, in utterance
/// order; the first-listed intent of each turn is flagged primary. `cases` is
/// used to check that every entry references a scammer turn.
std::vector<SbsRecord> normalize_sbs(std::span<const RawAnnotation> raw, std::span<const ScamCase> cases);

struct Violation {
  std::string case_id;
  std::optional<std::size_t> turn_index;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool empty() const noexcept { return violations.empty(); }
};

ValidationReport validate_corpus(const Corpus& corpus);

/// Chance-corrected agreement between two aligned label lists.
double cohen_kappa(std::span<const IntentCode> labels_a, std::span<const IntentCode> labels_b);

/// Aligns the primary intents of two annotations of the same corpus on
/// (case_id, turn_index); turns annotated by only one side are skipped.
std::pair<std::vector<IntentCode>, std::vector<IntentCode>> align_primary_intents(const Corpus& a,
                                                                                   const Corpus& b);

}  // namespace scriptmind
