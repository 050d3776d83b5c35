#pragma once

// Brute-force reference solver. Uses only check_assignment and
// objective_vector, never the search or propagation code.

#include <cstddef>
#include <optional>

#include "cbc/optimizer.hpp"

namespace cbc {

inline constexpr double kDefaultOracleCap = 1e6;

struct OracleResult {
  std::optional<Assignment> best;
  std::optional<ObjectiveVector> best_vector;
  std::size_t valid_count = 0;
  std::size_t enumerated = 0;
};

/// Enumerates the Cartesian product of the domains in odometer order (last
/// task fastest); the first maximal assignment wins ties. Throws LimitError
/// when the product exceeds `cap`.
OracleResult enumerate_optimal(const DomainTable& table, const CoordinatorState& state,
                               double cap = kDefaultOracleCap);

}  // namespace cbc
