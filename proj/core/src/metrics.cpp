#include <fmt/format.h>

#include "scriptmind/error.hpp"
#include "scriptmind/eval.hpp"

namespace scriptmind {

DetectionMetrics metrics_from_counts(std::size_t tp, std::size_t tn, std::size_t fp, std::size_t fn) {
  DetectionMetrics m;
  m.tp = tp;
  m.tn = tn;
  m.fp = fp;
  m.fn = fn;
  m.n = tp + tn + fp + fn;
  if (m.n == 0) throw Error(Errc::EmptyInput, "no predictions to score");
  const double n = static_cast<double>(m.n);
  m.accuracy = static_cast<double>(tp + tn) / n;
  m.fp_rate = static_cast<double>(fp) / n;
  m.fn_rate = static_cast<double>(fn) / n;
  const std::size_t f1_den = 2 * tp + fp + fn;
  m.f1 = f1_den == 0 ? 0.0 : static_cast<double>(2 * tp) / static_cast<double>(f1_den);
  return m;
}

DetectionMetrics score_detection(std::span<const Prediction> preds, std::span<const Label> golds) {
  if (preds.size() != golds.size()) {
    throw Error(Errc::LengthMismatch, fmt::format("{} predictions for {} gold labels", preds.size(), golds.size()));
  }
  if (preds.empty()) throw Error(Errc::EmptyInput, "no predictions to score");
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool gold_scam = golds[i] == Label::scam;
    const bool failed = preds[i].status == ParseStatus::failed;
    const bool said_scam = failed ? !gold_scam : preds[i].label == Label::scam;
    if (gold_scam) {
      said_scam ? ++tp : ++fn;
    } else {
      said_scam ? ++fp : ++tn;
    }
  }
  return metrics_from_counts(tp, tn, fp, fn);
}

}  // namespace scriptmind
