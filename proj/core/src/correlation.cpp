#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "json_util.hpp"
#include "scriptmind/error.hpp"
#include "scriptmind/eval.hpp"
#include "scriptmind/stats.hpp"

namespace scriptmind {

CorrelationReport pearson(std::span<const double> x, std::span<const double> y, std::string pair_name) {
  if (x.size() != y.size()) {
    throw Error(Errc::LengthMismatch, fmt::format("{} vs {} values", x.size(), y.size()), pair_name);
  }
  if (x.size() < 3) throw Error(Errc::EmptyInput, fmt::format("{} pairs, need at least 3", x.size()), pair_name);
  const double mx = stats::mean(x);
  const double my = stats::mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(Errc::ConstantVector, "correlation with a constant vector", pair_name);

  CorrelationReport r;
  r.n = x.size();
  r.pair_name = std::move(pair_name);
  r.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = static_cast<double>(r.n) - 2.0;
  if (std::fabs(r.r) == 1.0) {
    r.p_value = 0.0;
  } else {
    const double t = r.r * std::sqrt(df / (1.0 - r.r * r.r));
    r.p_value = stats::t_two_sided(t, df);
  }
  return r;
}

std::vector<HumanRating> read_human_ratings(const std::filesystem::path& path) {
  const auto text = detail::read_file(path);
  std::istringstream in(text);
  std::string line;
  std::vector<HumanRating> out;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::is_blank(line)) continue;
    const auto where = detail::location(path.string(), lineno);
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      cells.push_back(detail::trim(std::string_view(line).substr(start, comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!header_seen) {
      header_seen = true;
      if (cells.size() < 3 || cells[0] != "instance_id" || cells[1] != "rater_id") {
        throw Error(Errc::MalformedLine, "expected header instance_id,rater_id,score_1_to_7[,target]", where);
      }
      continue;
    }
    if (cells.size() != 3 && cells.size() != 4) throw Error(Errc::MalformedLine, "expected 3 or 4 columns", where);
    HumanRating r;
    r.instance_id = cells[0];
    r.rater_id = cells[1];
    try {
      std::size_t used = 0;
      r.score = std::stoi(cells[2], &used);
      if (used != cells[2].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(Errc::MalformedLine, "score must be an integer", where);
    }
    if (r.score < 1 || r.score > 7) throw Error(Errc::OutOfRange, "score must be in 1..7", where);
    if (cells.size() == 4 && !cells[3].empty()) {
      if (cells[3] == "next_utterance") {
        r.target = JudgeTarget::next_utterance;
      } else if (cells[3] == "rationale") {
        r.target = JudgeTarget::rationale;
      } else {
        throw Error(Errc::MalformedLine, "target must be next_utterance or rationale", where);
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::map<std::string, double> human_scores(std::span<const HumanRating> ratings, JudgeTarget target) {
  std::map<std::string, std::pair<double, int>> acc;
  for (const auto& r : ratings) {
    if (r.target && *r.target != target) continue;
    auto& [sum, count] = acc[r.instance_id];
    sum += (r.score - 1) / 6.0;
    ++count;
  }
  std::map<std::string, double> out;
  for (const auto& [id, sc] : acc) out.emplace(id, sc.first / sc.second);
  return out;
}

}  // namespace scriptmind
