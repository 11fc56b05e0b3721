#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "svarwb/model.hpp"

namespace svarwb {

// Observations y_1..y_T in rows. break_dates[i] is the first row of regime
// i + 2. The first `lags` rows are presample for regime 1; every later regime
// takes its initial conditions from the end of the previous one.
class RegimeData {
 public:
  RegimeData(Matrix observations, std::vector<int> break_dates, int lags);

  int T() const { return static_cast<int>(y_.rows()); }
  int n() const { return static_cast<int>(y_.cols()); }
  int s() const { return static_cast<int>(breaks_.size()) + 1; }
  int lags() const { return lags_; }
  const Matrix& observations() const { return y_; }
  const std::vector<int>& break_dates() const { return breaks_; }
  // Rows [first, last) used as regressands in regime p.
  std::pair<int, int> rows(int p) const;
  Matrix design(int p) const;    // rows x (n l + 1): [1, y_{t-1}', ..., y_{t-l}']
  Matrix response(int p) const;  // rows x n

 private:
  Matrix y_;
  std::vector<int> breaks_;
  int lags_;
};

RegimeModel ols_fit(const RegimeData& data);
// Per regime, n x (n l + 1) standard errors of the coefficients [b, B_1, ..., B_l].
std::vector<Matrix> ols_standard_errors(const RegimeData& data, const RegimeModel& fit);
Matrix residuals(const RegimeData& data, const RegimeModel& model, int p);

// Sum of Gaussian log densities of the rows of `resid` under N(0, sigma).
double gaussian_loglik(const Matrix& resid, const Matrix& sigma);
// Gaussian log-likelihood conditional on the presample.
double log_likelihood(const RegimeData& data, const RegimeModel& model);

enum class PriorFamily { Diffuse, Conjugate };

struct PriorSpec {
  PriorFamily family = PriorFamily::Diffuse;
  // Conjugate prior: coefficients centered at zero with row covariance
  // coefficient_variance * I, Sigma inverse-Wishart(scale * I, n + extra_dof).
  double coefficient_variance = 100.0;
  double scale = 1.0;
  int extra_dof = 2;
};

// Normal-inverse-Wishart posterior of each regime's (B, Sigma).
class PosteriorSampler {
 public:
  PosteriorSampler(const RegimeData& data, PriorSpec prior);

  RegimeModel draw(Rng& rng) const;
  // Log posterior kernel (log-likelihood plus log prior) of a draw.
  double log_density(const RegimeModel& model) const;
  const Matrix& posterior_mean(int p) const { return regimes_[static_cast<std::size_t>(p)].mean; }
  double dof(int p) const { return regimes_[static_cast<std::size_t>(p)].dof; }

 private:
  struct Regime {
    Matrix mean;       // m x n
    Matrix row_chol;   // m x m, lower
    Matrix scale;      // n x n
    Matrix prior_precision;  // m x m (conjugate)
    double dof = 0.0;
  };
  const RegimeData* data_;
  PriorSpec prior_;
  std::vector<Regime> regimes_;
};

// Draw k uses the stream (seed, k), so the result does not depend on threading.
std::vector<RegimeModel> posterior_draws(const RegimeData& data, const PriorSpec& prior, int draws,
                                         std::uint64_t seed);

// Simulates T observations after burn_in discarded ones started from zero.
// breaks are rows of the returned sample where a new regime starts; burn-in
// uses the first regime.
Matrix simulate(const RegimeModel& model, const std::vector<int>& breaks, int T, int burn_in, Rng& rng);

}  // namespace svarwb
