#pragma once

// Property checkers shared by the unit tests and the acceptance binary. Each
// returns an empty string when the property holds, otherwise a description.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "radarclass/evaluation.hpp"

namespace radarclass::props {

inline std::string split_partition(std::size_t n, const SplitResult& s) {
  std::vector<int> seen(n, 0);
  for (auto i : s.train) {
    if (i >= n) return "train index out of range";
    ++seen[i];
  }
  for (auto i : s.test) {
    if (i >= n) return "test index out of range";
    ++seen[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i] != 1) return "record " + std::to_string(i) + " appears " + std::to_string(seen[i]) + " times";
  }
  return {};
}

/// Per-class test count is floor or ceil of N_c * fraction, capped so every
/// class keeps a training record, and the total is round(N * fraction) as far
/// as those bounds allow.
inline std::string split_stratified(std::span<const MaterialClass> labels, double fraction,
                                    const SplitResult& s) {
  std::array<std::size_t, kNumClasses> all{}, test{};
  for (auto l : labels) ++all[static_cast<std::size_t>(class_code(l))];
  for (auto i : s.test) ++test[static_cast<std::size_t>(class_code(labels[i]))];
  std::size_t min_total = 0, max_total = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (all[c] == 1) {
      if (test[c] != 0) return "singleton class placed in test";
      continue;
    }
    const double exact = static_cast<double>(all[c]) * fraction;
    const auto lo = static_cast<std::size_t>(std::floor(exact + 1e-9));
    const auto hi = static_cast<std::size_t>(std::ceil(exact - 1e-9));
    if (all[c] == 0) continue;
    min_total += std::min(lo, all[c] - 1);
    max_total += std::min(hi, all[c] - 1);
    if (test[c] < std::min(lo, all[c] - 1) || test[c] > std::min(hi, all[c] - 1)) {
      return "class " + std::to_string(c) + " has " + std::to_string(test[c]) + " of " +
             std::to_string(all[c]) + " in test";
    }
  }
  const auto target = std::clamp(
      static_cast<std::size_t>(std::llround(static_cast<double>(labels.size()) * fraction)), min_total, max_total);
  if (s.test.size() != target) {
    return "test size " + std::to_string(s.test.size()) + " != " + std::to_string(target);
  }
  return {};
}

}  // namespace radarclass::props
