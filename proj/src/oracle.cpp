#include "cbc/oracle.hpp"

#include "cbc/errors.hpp"

namespace cbc {

OracleResult enumerate_optimal(const DomainTable& table, const CoordinatorState& state, double cap) {
  const Catalog& catalog = table.catalog();
  const double product = table.product();
  if (product > cap) {
    throw LimitError("oracle: search space " + std::to_string(product) + " exceeds cap " + std::to_string(cap));
  }
  OracleResult result;
  if (product == 0) return result;

  const std::size_t n = table.task_count();
  std::vector<std::vector<Value>> domains(n);
  for (TaskIndex t = 0; t < n; ++t) domains[t] = table.values(t);
  std::vector<std::size_t> digit(n, 0);

  Assignment a(n);
  while (true) {
    for (TaskIndex t = 0; t < n; ++t) a[t] = domains[t][digit[t]];
    ++result.enumerated;
    if (check_assignment(a, catalog, state.situation).empty()) {
      ++result.valid_count;
      const ObjectiveVector v = objective_vector(catalog, a, state);
      if (!result.best_vector || v > *result.best_vector) {
        result.best = a;
        result.best_vector = v;
      }
    }
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++digit[i] < domains[i].size()) break;
      digit[i] = 0;
      if (i == 0) return result;
    }
    if (n == 0) return result;
  }
}

}  // namespace cbc
