#pragma once

#include <optional>
#include <string>
#include <vector>

#include "svarwb/restrictions.hpp"

namespace svarwb {

enum class SolverRoute { General, Recursive, Sequential };
enum class Completeness { Heuristic, CrossValidated, Exact };
const char* to_string(SolverRoute r);
const char* to_string(Completeness c);

struct GeneralSolverConfig {
  int starts = 0;  // 0 means 500 s n
  int max_iterations = 80;
  double tolerance = 1e-11;
  double dedup_tolerance = 1e-6;
};

struct RotationSet {
  std::vector<OrthogonalBlock> solutions;
  SolverRoute route = SolverRoute::General;
  Completeness completeness = Completeness::Heuristic;
  int starts_used = 0;
  int converged = 0;
  // Final residuals of the general route bucketed by floor(log10), from 1e-16 up to 1e2.
  std::vector<int> residual_histogram;
  std::size_t size() const { return solutions.size(); }
  bool empty() const { return solutions.empty(); }
};

// f_k == s (n - 1 - k) at every ordered position.
bool recursive_pattern(const RestrictionProgram& program);

// Per ordered position: an order of the regimes and the restriction rows each
// regime resolves, so that every regime receives exactly n - 1 - k rows and a
// row is resolved by the last of the regimes it involves.
struct SequentialPlan {
  std::vector<std::vector<int>> regime_order;                // [k] -> regimes
  std::vector<std::vector<std::vector<int>>> rows_by_regime;  // [k][p] -> row indices
};
std::optional<SequentialPlan> sequential_plan(const RestrictionProgram& program);

RotationSet enumerate_general(const RestrictionProgram& program, const RegimeModel& model,
                              const GeneralSolverConfig& config, Rng& rng);
RotationSet enumerate_recursive(const RestrictionProgram& program, const RegimeModel& model, Rng& rng);
RotationSet enumerate_sequential(const RestrictionProgram& program, const RegimeModel& model, Rng& rng);

enum class RoutePreference { Auto, General, Recursive, Sequential };
// Auto tries the sequential route, then the recursive route, then the general one.
RotationSet enumerate(const RestrictionProgram& program, const RegimeModel& model, RoutePreference route,
                      const GeneralSolverConfig& config, Rng& rng);

// Every solution of one set is within tol of a solution of the other and the sizes agree.
bool same_solutions(const RotationSet& a, const RotationSet& b, double tol);
void sort_solutions(std::vector<OrthogonalBlock>& solutions);

enum class TargetKind { ImpulseResponse, LongRunCumulative, FevShare };

struct TargetFunctional {
  TargetKind kind = TargetKind::ImpulseResponse;
  int variable = 0;
  int shock = 0;
};

// Target value for each horizon (ignored by the long-run target).
std::vector<double> target_path(const ReducedFormRegime& regime, const Matrix& q, const TargetFunctional& target,
                                const std::vector<int>& horizons);

struct IdentifiedSet {
  std::vector<int> horizons;
  // [p][h] sorted distinct values
  std::vector<std::vector<std::vector<double>>> values;
  // [p][m][h] path for each distinct regime rotation
  std::vector<std::vector<std::vector<double>>> paths;
};

IdentifiedSet identified_set(const RotationSet& set, const RegimeModel& model, const TargetFunctional& target,
                             const std::vector<int>& horizons);

}  // namespace svarwb
