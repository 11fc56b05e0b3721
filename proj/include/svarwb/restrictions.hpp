#pragma once

#include <limits>
#include <string>
#include <vector>

#include "svarwb/model.hpp"

namespace svarwb {

enum class TransformKind { A0Transpose, ImpulseResponse, LongRunCumulative };

struct TransformBlock {
  TransformKind kind = TransformKind::A0Transpose;
  int horizon = 0;  // used by ImpulseResponse only
  bool operator==(const TransformBlock& o) const {
    return kind == o.kind && (kind != TransformKind::ImpulseResponse || horizon == o.horizon);
  }
};

std::string describe(const TransformBlock& block);

// Ordered list of n-row blocks F_b(phi_p) Q_p making up G_p.
class TransformSpec {
 public:
  TransformSpec() = default;
  explicit TransformSpec(std::vector<TransformBlock> blocks);

  const std::vector<TransformBlock>& blocks() const { return blocks_; }
  int block_count() const { return static_cast<int>(blocks_.size()); }
  int block_index(const TransformBlock& b) const;  // -1 when absent
  bool uses_long_run() const;
  int max_horizon() const;
  // Stacked factor F(phi_p), (blocks * n) x n, so that G_p = F Q_p.
  Matrix base(const ReducedFormRegime& regime) const;

 private:
  std::vector<TransformBlock> blocks_;
};

// Entry (row, shock) of one transform block in one regime. For the A0
// transform, G = A0' so A0(equation, variable) sits at row = variable,
// shock = equation; use a0_cell for that.
struct Cell {
  int regime = 0;
  TransformBlock target;
  int row = 0;
  int shock = 0;
};

Cell a0_cell(int regime, int equation, int variable);
Cell ir_cell(int regime, int horizon, int variable, int shock);
Cell long_run_cell(int regime, int variable, int shock);

struct LinearTerm {
  Cell cell;
  double coefficient = 1.0;
};

// sum of coefficient * cell = 0; all cells refer to the same shock.
struct EqualityRestriction {
  std::vector<LinearTerm> terms;
  std::string label;

  static EqualityRestriction zero(const Cell& c, std::string label = {});
  // Same cell equal in two regimes.
  static EqualityRestriction equal_across(Cell c, int regime_a, int regime_b, std::string label = {});
};

enum class InequalityKind { Sign, Ranking };

// sum of coefficient * cell >= 0 (cells may mix shocks and regimes).
struct InequalityRestriction {
  InequalityKind kind = InequalityKind::Sign;
  std::vector<LinearTerm> terms;
  std::string label;

  static InequalityRestriction sign(const Cell& c, bool positive, std::string label = {});
  static InequalityRestriction ranking(const Cell& larger, const Cell& smaller, std::string label = {});
};

// lower <= sum_p w_p FEV_p(variable, shock, horizon) - sum_p v_p FEV_p(variable, other_shock, horizon) <= upper
struct FevRestriction {
  int variable = 0;
  int horizon = 0;
  int shock = 0;
  std::vector<double> weights;
  int other_shock = -1;
  std::vector<double> other_weights;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  std::string label;
};

enum class Normalization { None, A0DiagonalPositive };

struct RestrictionSet {
  std::vector<EqualityRestriction> equalities;
  std::vector<InequalityRestriction> inequalities;
  std::vector<FevRestriction> fev;
  Normalization normalization = Normalization::A0DiagonalPositive;
};

enum class BasisStyle {
  Orthonormal,  // echelon basis after Gram-Schmidt
  Echelon,      // raw echelon basis, entries as written by hand
};

struct CompiledRow {
  Eigen::RowVectorXd coefficients;  // length s * g
  std::vector<int> regimes;         // regimes with a nonzero coefficient, ascending
  int declaration = 0;
  int first_column = 0;
};

struct ShockRestrictions {
  int shock = 0;  // original index
  std::vector<CompiledRow> rows;
  Matrix r;  // f x (s g)
  Matrix s;  // (s g) x tau
  int f() const { return static_cast<int>(r.rows()); }
  int tau() const { return static_cast<int>(s.cols()); }
};

struct CompiledTerm {
  int regime = 0;
  int shock = 0;
  int g_row = 0;  // row of G_p
  double coefficient = 0.0;
};

struct CompiledInequality {
  InequalityKind kind = InequalityKind::Sign;
  std::vector<CompiledTerm> terms;
  std::vector<int> shocks;
  std::string label;
};

class RestrictionProgram {
 public:
  int n = 0;
  int s = 0;
  int g = 0;
  TransformSpec transform;
  BasisStyle basis = BasisStyle::Orthonormal;
  Normalization normalization = Normalization::A0DiagonalPositive;
  // Shocks are processed in decreasing number of restrictions; order[k] is the
  // original shock at position k and position[j] inverts it.
  std::vector<int> order;
  std::vector<int> position;
  std::vector<ShockRestrictions> ordered;  // indexed by position
  std::vector<CompiledInequality> inequalities;
  std::vector<FevRestriction> fev;

  int f() const;
  int f_at(int k) const { return ordered[static_cast<std::size_t>(k)].f(); }
  const ShockRestrictions& for_shock(int original) const {
    return ordered[static_cast<std::size_t>(position[static_cast<std::size_t>(original)])];
  }
  // Columns of R_k belonging to regime p, f_k x g.
  Matrix r_star(int k, int p) const;
  // Rows of S_k belonging to regime p, g x tau_k.
  Matrix s_star(int k, int p) const;
  bool has_inequalities() const { return !inequalities.empty() || !fev.empty(); }
};

RestrictionProgram compile(const RestrictionSet& spec, int n, int s, const TransformSpec& transform,
                           BasisStyle basis = BasisStyle::Orthonormal);

struct InequalityReport {
  bool satisfied = true;
  bool normalized = true;
  std::vector<double> margins;     // one per sign/ranking restriction
  std::vector<double> fev_values;  // one per FEV restriction
};

// Model-specific cache of the objects needed to test candidate rotations.
class Admissibility {
 public:
  Admissibility(const RestrictionProgram& program, const RegimeModel& model);

  const RestrictionProgram& program() const { return *program_; }
  const RegimeModel& model() const { return *model_; }
  const Matrix& base(int p) const { return base_[static_cast<std::size_t>(p)]; }
  // R*_{p,k} F_p, f_k x n: residual of position k is sum_p weights(k,p) q_{p,order[k]}.
  const Matrix& weights(int k, int p) const;

  Matrix evaluate_g(const OrthogonalBlock& q) const;
  Vector residual(int k, const OrthogonalBlock& q) const;
  double max_residual(const OrthogonalBlock& q) const;

  // q_j' Sigma_tr^{-1} e_j, the (j, j) entry of A0 for column q.
  double normalization_margin(int p, int shock, const Vector& q) const;
  // Margin clear of zero relative to the size of the column; columns on the
  // boundary leave the sign rule undefined and are rejected.
  bool margin_positive(int p, int shock, const Vector& q) const;
  bool column_normalized(int shock, const OrthogonalBlock& q) const;
  bool normalized(const OrthogonalBlock& q) const;

  double inequality_margin(int idx, const OrthogonalBlock& q) const;
  double fev_value(int idx, const OrthogonalBlock& q) const;
  bool fev_ok(int idx, const OrthogonalBlock& q) const;
  // Checks only restrictions whose shocks are all marked as placed.
  bool partial_ok(const std::vector<bool>& placed, const OrthogonalBlock& q) const;
  InequalityReport check(const OrthogonalBlock& q) const;

 private:
  const RestrictionProgram* program_;
  const RegimeModel* model_;
  std::vector<Matrix> base_;
  std::vector<Matrix> weights_;  // [k * s + p]
  std::vector<std::vector<Eigen::RowVectorXd>> ineq_rows_;
  std::vector<std::vector<Matrix>> fev_kernels_;  // [idx][p]
};

Matrix evaluate_g(const RestrictionProgram& program, const RegimeModel& model, const OrthogonalBlock& q);
// Indexed by original shock.
std::vector<Vector> equality_residual(const RestrictionProgram& program, const RegimeModel& model,
                                      const OrthogonalBlock& q);
InequalityReport inequality_satisfied(const RestrictionProgram& program, const RegimeModel& model,
                                      const OrthogonalBlock& q);
// Flips column signs so that every A0 has a positive diagonal.
OrthogonalBlock apply_normalization(const RegimeModel& model, const OrthogonalBlock& q);

constexpr double kInequalityTolerance = 1e-10;
constexpr double kNormalizationTolerance = 1e-10;

}  // namespace svarwb
