#pragma once

#include <vector>

#include "svarwb/linalg.hpp"

namespace svarwb {

struct ModelDims {
  int n = 0;  // variables
  int l = 0;  // lags
  int s = 0;  // regimes
  int m() const { return n * l + 1; }
  void validate() const;
};

// One regime of the reduced form: y_t = b + sum_i B_i y_{t-i} + u_t, Var(u_t) = Sigma.
class ReducedFormRegime {
 public:
  ReducedFormRegime() = default;
  ReducedFormRegime(Vector intercept, std::vector<Matrix> lag_coefficients, Matrix sigma);

  // Coefficients laid out as [b, B_1, ..., B_l], n x (n l + 1).
  static ReducedFormRegime from_coefficients(const Matrix& coefficients, const Matrix& sigma,
                                             int lags);

  int n() const { return static_cast<int>(intercept_.size()); }
  int lags() const { return static_cast<int>(lags_.size()); }
  const Vector& intercept() const { return intercept_; }
  const std::vector<Matrix>& lag_coefficients() const { return lags_; }
  const Matrix& sigma() const { return sigma_; }
  // Lower Cholesky factor with positive diagonal and its inverse.
  const Matrix& sigma_chol() const { return chol_; }
  const Matrix& sigma_chol_inv() const { return chol_inv_; }

  Matrix coefficients() const;
  Matrix lag_sum() const;
  Matrix companion() const;
  double spectral_radius() const;
  bool is_stationary() const;

 private:
  Vector intercept_;
  std::vector<Matrix> lags_;
  Matrix sigma_;
  Matrix chol_;
  Matrix chol_inv_;
};

struct StructuralRegime {
  Matrix a0;      // n x n
  Matrix a_plus;  // n x m, [a, A_1, ..., A_l]
};

struct RegimeModel {
  ModelDims dims;
  std::vector<ReducedFormRegime> regimes;
  std::vector<int> break_dates;

  RegimeModel() = default;
  RegimeModel(std::vector<ReducedFormRegime> regimes, std::vector<int> break_dates = {});
  const ReducedFormRegime& regime(int p) const { return regimes.at(static_cast<std::size_t>(p)); }
};

// One orthogonal matrix per regime.
struct OrthogonalBlock {
  std::vector<Matrix> q;

  OrthogonalBlock() = default;
  explicit OrthogonalBlock(std::vector<Matrix> blocks) : q(std::move(blocks)) {}
  static OrthogonalBlock identity(int n, int s);
  int regimes() const { return static_cast<int>(q.size()); }
  const Matrix& operator[](int p) const { return q[static_cast<std::size_t>(p)]; }
  Matrix& operator[](int p) { return q[static_cast<std::size_t>(p)]; }
  double max_distance(const OrthogonalBlock& other) const;
  void validate(int n, double tolerance = 1e-8) const;
};

std::vector<ReducedFormRegime> structural_to_reduced(const std::vector<StructuralRegime>& structural,
                                                     int lags);
StructuralRegime reduced_to_structural(const ReducedFormRegime& regime, const Matrix& q);

// C_0, ..., C_{max_h}.
std::vector<Matrix> vma_coefficients(const ReducedFormRegime& regime, int max_h);
Matrix impulse_response(const ReducedFormRegime& regime, const Matrix& q, int h);
// (I - sum_i B_i)^{-1} Sigma_tr, the long-run factor before rotation.
Matrix long_run_factor(const ReducedFormRegime& regime);
Matrix cumulative_long_run(const ReducedFormRegime& regime, const Matrix& q);
// Quadratic form whose value at column q_j is the share of the h-step forecast
// error variance of variable i due to shock j.
Matrix fev_kernel(const ReducedFormRegime& regime, int variable, int horizon);
double fev_contribution(const ReducedFormRegime& regime, const Matrix& q, int variable, int shock,
                        int horizon);

}  // namespace svarwb
