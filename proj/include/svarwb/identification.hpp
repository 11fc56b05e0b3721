#pragma once

#include <string>
#include <vector>

#include "svarwb/restrictions.hpp"

namespace svarwb {

struct OrderCondition {
  bool satisfied = false;
  int f = 0;
  int required = 0;  // s n (n - 1) / 2
};

OrderCondition order_condition(const RestrictionProgram& program);
// One flag per ordered position: f_k >= s (n - 1 - k).
std::vector<bool> recursive_order_check(const RestrictionProgram& program);
bool recursive_order_holds(const RestrictionProgram& program);

// Coordinates of G e_j in the explicit basis S_j, one vector per ordered position.
using Theta = std::vector<Vector>;

Theta random_theta(const RestrictionProgram& program, Rng& rng);
Theta theta_at(const RestrictionProgram& program, const RegimeModel& model, const OrthogonalBlock& q);

// R*_{p,j} S*_{p,k}.
Matrix v_block(const RestrictionProgram& program, int j, int p, int k);
// [V_{j,1,j+1} theta_{j+1} ... V_{j,1,n} theta_n | ... | V_{j,s,j+1} theta_{j+1} ... V_{j,s,n} theta_n]
Matrix build_vj(const RestrictionProgram& program, int j, const Theta& theta);
// Same layout over all k = 1..n in every regime, f_j x s n.
Matrix build_vtilde_j(const RestrictionProgram& program, int j, const Theta& theta);
// Block diagonal of the per-shock matrices, f x s n^2.
Matrix build_vtilde(const RestrictionProgram& program, const Theta& theta);

// n^2 x n(n-1)/2: vec(H) = D h for skew-symmetric H, strictly lower
// entries enumerated column by column.
Matrix skew_duplication(int n);
// Stack over j of (I_s kron e_j'), s n x s n.
Matrix regime_shock_permutation(int n, int s);
// (T kron I_n)(I_s kron D), s n^2 x s n(n-1)/2.
Matrix skew_selection(int n, int s);
Matrix build_vapprox(const RestrictionProgram& program, const Theta& theta);

enum class Verdict { Identified, PartiallyIdentified, NotIdentified };
const char* to_string(Verdict v);

struct IdentificationVerdict {
  Verdict verdict = Verdict::NotIdentified;
  std::string route;
  int draws_requested = 0;
  int draws_used = 0;
  int rank = 0;      // best rank attained by the tested matrix
  int required = 0;  // full column rank
  std::vector<int> shock_rank;      // per ordered position (sufficient route)
  std::vector<int> shock_required;  // per ordered position
  std::vector<int> identified_shocks;  // original indices
};

// Rank test on V_j for j = 1..n-1 at random points.
IdentificationVerdict sufficient_rank_check(const RestrictionProgram& program, int draws, Rng& rng);
struct PartialVerdict {
  bool identified = false;
  int draws_used = 0;
};
PartialVerdict partial_identification_check(const RestrictionProgram& program, int shock, int draws, Rng& rng);
// Rank test on V~ T~ at random points.
IdentificationVerdict necessary_sufficient_check(const RestrictionProgram& program, int draws, Rng& rng);

struct PointCheck {
  bool sufficient_applicable = false;
  bool sufficient = false;
  bool necessary_sufficient = false;
  int rank = 0;
  int required = 0;
};
// Both rank tests evaluated at the point implied by (model, Q).
PointCheck check_at(const RestrictionProgram& program, const RegimeModel& model, const OrthogonalBlock& q);

}  // namespace svarwb
