#include "vaq/calibrate.hpp"

#include <algorithm>
#include <cmath>

#include "vaq/hnsw.hpp"

namespace vaq::bench {

std::int64_t fraction_target(const Catalog &catalog,
                             const std::string &relation, double fraction) {
  if (!(fraction > 0.0) || fraction > 1.0)
    throw UsageError("selectivity fraction must be in (0, 1]");
  const auto rows =
      static_cast<std::int64_t>(catalog.relation(relation).row_count());
  return std::max<std::int64_t>(1, std::llround(fraction * static_cast<double>(rows)));
}

CalibrationResult calibrate_threshold(const Catalog &catalog,
                                      const std::string &relation,
                                      const std::string &column,
                                      const storage::VectorValue &query,
                                      std::int64_t target_count) {
  const auto &rel = catalog.relation(relation);
  const auto rows = static_cast<std::int64_t>(rel.row_count());
  if (target_count < 1 || target_count > rows)
    throw DataError("calibration target " + std::to_string(target_count) +
                    " outside [1, " + std::to_string(rows) + "]");

  auto count_at = [&](double d) {
    return static_cast<std::int64_t>(
        vindex::brute_force_range(rel, column, query.components, d)
            .row_ids.size());
  };

  // Find an upper bound by doubling, then bisect.
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 80 && count_at(hi) < target_count; ++i) hi *= 2.0;

  const std::int64_t tolerance =
      std::max<std::int64_t>(1, std::llround(0.02 * static_cast<double>(target_count)));

  CalibrationResult best;
  best.threshold = hi;
  best.achieved = count_at(hi);
  for (int i = 0; i < 64; ++i) {
    const double mid = 0.5 * (lo + hi);
    const auto c = count_at(mid);
    if (c >= 1 &&
        (std::llabs(c - target_count) < std::llabs(best.achieved - target_count) ||
         (std::llabs(c - target_count) == std::llabs(best.achieved - target_count) &&
          c >= target_count && mid < best.threshold))) {
      best.threshold = mid;
      best.achieved = c;
    }
    if (std::llabs(c - target_count) <= tolerance && c >= 1) break;
    if (c < target_count)
      lo = mid;
    else
      hi = mid;
  }
  best.within_tolerance =
      std::llabs(best.achieved - target_count) <= tolerance;
  return best;
}

}  // namespace vaq::bench
