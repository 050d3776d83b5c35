#pragma once

// Synthetic layered catalogs for timing the solver at scale.

#include <cstdint>
#include <string>

#include "cbc/catalog.hpp"

namespace cbc {

struct BenchParams {
  std::size_t tasks = 12;
  std::size_t layers = 3;
  std::size_t behaviors_per_task = 3;
  /// Requirements per behavior in every layer but the last; each points to a
  /// distinct task of the next layer.
  std::size_t requires_per_behavior = 2;
  /// Fraction of all task pairs declared incompatible.
  double incompat_density = 0.09;
  std::uint64_t seed = 1;
};

/// Acyclic by construction: requirements only point one layer down. Same
/// params, same catalog.
CatalogSpec generate_catalog(const BenchParams& params);

struct BenchTiming {
  double mean_ms = 0.0;
  double min_ms = 0.0;
  double max_ms = 0.0;
  bool solved = false;
  std::size_t solutions = 0;
};

struct BenchReport {
  double search_space = 0.0;  // product of |D(x)| over the catalog
  std::size_t constraints = 0;
  BenchTiming m1;
  BenchTiming m5;
  std::size_t repeats = 0;
};

/// Times solve_optimal with max_solutions 1 and 5 for a StartRequest on the
/// first task, every other domain full, `repeats` times each.
BenchReport run_bench(const Catalog& catalog, std::size_t repeats = 20, std::uint64_t seed = 1);

std::string render_bench(const BenchReport& report);

}  // namespace cbc
