#include <map>

#include "scriptmind/corpus.hpp"
#include "scriptmind/error.hpp"

namespace scriptmind {

double cohen_kappa(std::span<const IntentCode> labels_a, std::span<const IntentCode> labels_b) {
  if (labels_a.size() != labels_b.size()) {
    throw Error(Errc::LengthMismatch, "rater label lists differ in length");
  }
  if (labels_a.empty()) {
    throw Error(Errc::LengthMismatch, "rater label lists are empty");
  }
  const double n = static_cast<double>(labels_a.size());

  std::map<IntentCode, double> marg_a;
  std::map<IntentCode, double> marg_b;
  double agree = 0.0;
  for (std::size_t i = 0; i < labels_a.size(); ++i) {
    marg_a[labels_a[i]] += 1.0;
    marg_b[labels_b[i]] += 1.0;
    if (labels_a[i] == labels_b[i]) agree += 1.0;
  }
  const double p_o = agree / n;
  double p_e = 0.0;
  for (const auto& [label, count] : marg_a) {
    auto it = marg_b.find(label);
    if (it != marg_b.end()) p_e += (count / n) * (it->second / n);
  }

  // p_e == 1 only when both raters use one identical label throughout.
  if (p_e >= 1.0) {
    if (p_o >= 1.0) return 1.0;
    throw Error(Errc::DegenerateMarginals, "chance agreement is 1");
  }
  return (p_o - p_e) / (1.0 - p_e);
}

}  // namespace scriptmind
