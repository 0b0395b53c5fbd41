#include <algorithm>
#include <cstdint>

#include "scriptmind/experiment/session.hpp"
#include "scriptmind/rng.hpp"

namespace scriptmind::experiment {

namespace {

std::size_t idx(AgeBand b) { return static_cast<std::size_t>(b); }
std::size_t idx(Condition c) { return static_cast<std::size_t>(c); }

}  // namespace

Condition ConditionAssigner::assign(AgeBand band) {
  const auto& row = counts_[idx(band)];
  const auto band_min = *std::min_element(row.begin(), row.end());
  std::vector<Condition> pool;
  for (auto c : kConditions) {
    if (row[idx(c)] == band_min) pool.push_back(c);
  }
  std::size_t global_min = SIZE_MAX;
  for (auto c : pool) global_min = std::min(global_min, total(c));
  std::erase_if(pool, [&](Condition c) { return total(c) != global_min; });

  const auto key = mix_seed(mix_seed(seed_, idx(band)), arrivals_);
  const Condition chosen = pool[key % pool.size()];
  record(band, chosen);
  return chosen;
}

void ConditionAssigner::record(AgeBand band, Condition c) {
  ++counts_[idx(band)][idx(c)];
  ++arrivals_;
}

std::size_t ConditionAssigner::count(AgeBand band, Condition c) const { return counts_[idx(band)][idx(c)]; }

std::size_t ConditionAssigner::total(Condition c) const {
  std::size_t n = 0;
  for (const auto& row : counts_) n += row[idx(c)];
  return n;
}

}  // namespace scriptmind::experiment
