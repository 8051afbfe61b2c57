#pragma once

#include <cstdint>
#include <string>

#include "vaq/catalog.hpp"

namespace vaq::bench {

struct CalibrationResult {
  double threshold = 0.0;
  std::int64_t achieved = 0;
  // False when duplicate-distance plateaus made the target unreachable and
  // the nearest achievable count was returned instead.
  bool within_tolerance = true;
};

// Binary search over the range threshold against the brute-force oracle
// until |count - target| <= max(1, 2% of target).
CalibrationResult calibrate_threshold(const Catalog &catalog,
                                      const std::string &relation,
                                      const std::string &column,
                                      const storage::VectorValue &query,
                                      std::int64_t target_count);

std::int64_t fraction_target(const Catalog &catalog,
                             const std::string &relation, double fraction);

}  // namespace vaq::bench
