#include "svarwb/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "svarwb/errors.hpp"

namespace svarwb {

namespace {

void check_sigma(const Matrix& sigma) {
  const Index n = sigma.rows();
  if (sigma.cols() != n || n == 0) fail(ErrorCode::InvalidArgument, "Sigma must be square and nonempty");
  if (!sigma.allFinite()) fail(ErrorCode::NotPositiveDefinite, "Sigma has non-finite entries");
  const double scale = sigma.cwiseAbs().maxCoeff();
  if (scale == 0.0) fail(ErrorCode::ZeroVariance, "Sigma is identically zero");
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    fail(ErrorCode::NotPositiveDefinite, "Sigma is not symmetric");
  for (Index i = 0; i < n; ++i)
    if (sigma(i, i) <= 0.0)
      fail(ErrorCode::ZeroVariance, "Sigma has a non-positive variance at index " + std::to_string(i));
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sigma + sigma.transpose()), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo <= hi * 1e-13) fail(ErrorCode::NotPositiveDefinite, "Sigma is not positive definite");
}

double inverse_condition(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  if (sv(0) == 0.0) return 0.0;
  return sv(sv.size() - 1) / sv(0);
}

}  // namespace

void ModelDims::validate() const {
  if (n < 2) fail(ErrorCode::InvalidArgument, "need at least two variables");
  if (l < 1) fail(ErrorCode::InvalidArgument, "need at least one lag");
  if (s < 1) fail(ErrorCode::InvalidArgument, "need at least one regime");
}

ReducedFormRegime::ReducedFormRegime(Vector intercept, std::vector<Matrix> lag_coefficients,
                                     Matrix sigma)
    : intercept_(std::move(intercept)), lags_(std::move(lag_coefficients)), sigma_(std::move(sigma)) {
  const Index n = intercept_.size();
  if (n < 1) fail(ErrorCode::InvalidArgument, "empty intercept");
  if (sigma_.rows() != n) fail(ErrorCode::InvalidArgument, "Sigma dimension does not match intercept");
  for (const auto& b : lags_)
    if (b.rows() != n || b.cols() != n)
      fail(ErrorCode::InvalidArgument, "lag coefficient matrix has wrong shape");
  check_sigma(sigma_);
  sigma_ = 0.5 * (sigma_ + sigma_.transpose());
  Eigen::LLT<Matrix> llt(sigma_);
  if (llt.info() != Eigen::Success) fail(ErrorCode::NotPositiveDefinite, "Cholesky failed");
  chol_ = llt.matrixL();
  chol_inv_ = chol_.triangularView<Eigen::Lower>().solve(Matrix::Identity(n, n));
}

ReducedFormRegime ReducedFormRegime::from_coefficients(const Matrix& coefficients, const Matrix& sigma,
                                                       int lags) {
  const Index n = coefficients.rows();
  if (lags < 0 || coefficients.cols() != n * lags + 1)
    fail(ErrorCode::InvalidArgument, "coefficient matrix must be n x (n l + 1)");
  std::vector<Matrix> b;
  for (int i = 0; i < lags; ++i) b.push_back(coefficients.block(0, 1 + i * n, n, n));
  return ReducedFormRegime(coefficients.col(0), std::move(b), sigma);
}

Matrix ReducedFormRegime::coefficients() const {
  const Index n = intercept_.size();
  Matrix out(n, n * lags() + 1);
  out.col(0) = intercept_;
  for (int i = 0; i < lags(); ++i) out.block(0, 1 + i * n, n, n) = lags_[static_cast<std::size_t>(i)];
  return out;
}

Matrix ReducedFormRegime::lag_sum() const {
  Matrix out = Matrix::Zero(n(), n());
  for (const auto& b : lags_) out += b;
  return out;
}

Matrix ReducedFormRegime::companion() const {
  const Index n = this->n();
  const Index l = std::max(1, lags());
  Matrix c = Matrix::Zero(n * l, n * l);
  for (int i = 0; i < lags(); ++i) c.block(0, i * n, n, n) = lags_[static_cast<std::size_t>(i)];
  if (l > 1) c.block(n, 0, n * (l - 1), n * (l - 1)).setIdentity();
  return c;
}

double ReducedFormRegime::spectral_radius() const {
  if (lags() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(companion(), false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool ReducedFormRegime::is_stationary() const { return spectral_radius() < 1.0 - 1e-10; }

RegimeModel::RegimeModel(std::vector<ReducedFormRegime> rs, std::vector<int> breaks)
    : regimes(std::move(rs)), break_dates(std::move(breaks)) {
  if (regimes.empty()) fail(ErrorCode::InvalidArgument, "model needs at least one regime");
  dims.n = regimes[0].n();
  dims.l = regimes[0].lags();
  dims.s = static_cast<int>(regimes.size());
  for (const auto& r : regimes)
    if (r.n() != dims.n || r.lags() != dims.l)
      fail(ErrorCode::InvalidArgument, "all regimes must share n and the lag order");
  if (!break_dates.empty() && static_cast<int>(break_dates.size()) != dims.s - 1)
    fail(ErrorCode::InvalidArgument, "need s - 1 break dates");
  for (std::size_t i = 1; i < break_dates.size(); ++i)
    if (break_dates[i] <= break_dates[i - 1])
      fail(ErrorCode::InvalidArgument, "break dates must be strictly increasing");
}

OrthogonalBlock OrthogonalBlock::identity(int n, int s) {
  return OrthogonalBlock(std::vector<Matrix>(static_cast<std::size_t>(s), Matrix::Identity(n, n)));
}

double OrthogonalBlock::max_distance(const OrthogonalBlock& other) const {
  double d = 0.0;
  for (std::size_t p = 0; p < q.size(); ++p) d = std::max(d, (q[p] - other.q[p]).cwiseAbs().maxCoeff());
  return d;
}

void OrthogonalBlock::validate(int n, double tolerance) const {
  for (const auto& b : q) {
    if (b.rows() != n || b.cols() != n) fail(ErrorCode::InvalidArgument, "rotation block has wrong shape");
    if (orthogonality_error(b) > tolerance) fail(ErrorCode::InvalidArgument, "rotation block is not orthogonal");
  }
}

std::vector<ReducedFormRegime> structural_to_reduced(const std::vector<StructuralRegime>& structural,
                                                     int lags) {
  std::vector<ReducedFormRegime> out;
  for (const auto& st : structural) {
    const Index n = st.a0.rows();
    if (st.a0.cols() != n || st.a_plus.rows() != n || st.a_plus.cols() != n * lags + 1)
      fail(ErrorCode::InvalidArgument, "structural matrices have inconsistent shapes");
    if (inverse_condition(st.a0) < 1e-12) fail(ErrorCode::SingularA0, "A0 is numerically singular");
    Eigen::PartialPivLU<Matrix> lu(st.a0);
    const Matrix a0_inv = lu.inverse();
    const Matrix coeffs = a0_inv * st.a_plus;
    const Matrix sigma = a0_inv * a0_inv.transpose();
    out.push_back(ReducedFormRegime::from_coefficients(coeffs, 0.5 * (sigma + sigma.transpose()), lags));
  }
  return out;
}

StructuralRegime reduced_to_structural(const ReducedFormRegime& regime, const Matrix& q) {
  StructuralRegime st;
  st.a0 = q.transpose() * regime.sigma_chol_inv();
  st.a_plus = st.a0 * regime.coefficients();
  return st;
}

std::vector<Matrix> vma_coefficients(const ReducedFormRegime& regime, int max_h) {
  if (max_h < 0) fail(ErrorCode::InvalidArgument, "horizon must be non-negative");
  const Index n = regime.n();
  std::vector<Matrix> c;
  c.reserve(static_cast<std::size_t>(max_h) + 1);
  c.push_back(Matrix::Identity(n, n));
  for (int h = 1; h <= max_h; ++h) {
    Matrix ch = Matrix::Zero(n, n);
    for (int i = 1; i <= std::min(h, regime.lags()); ++i)
      ch.noalias() += regime.lag_coefficients()[static_cast<std::size_t>(i - 1)] * c[static_cast<std::size_t>(h - i)];
    c.push_back(std::move(ch));
  }
  return c;
}

Matrix impulse_response(const ReducedFormRegime& regime, const Matrix& q, int h) {
  const auto c = vma_coefficients(regime, h);
  return c.back() * regime.sigma_chol() * q;
}

Matrix long_run_factor(const ReducedFormRegime& regime) {
  const Index n = regime.n();
  const Matrix m = Matrix::Identity(n, n) - regime.lag_sum();
  if (!regime.is_stationary())
    fail(ErrorCode::NonStationary, "regime is not stationary (spectral radius " +
                                       std::to_string(regime.spectral_radius()) + ")");
  if (inverse_condition(m) < 1e-12) fail(ErrorCode::NonStationary, "I - sum of lag matrices is singular");
  return m.partialPivLu().solve(regime.sigma_chol());
}

Matrix cumulative_long_run(const ReducedFormRegime& regime, const Matrix& q) {
  return long_run_factor(regime) * q;
}

Matrix fev_kernel(const ReducedFormRegime& regime, int variable, int horizon) {
  const int n = regime.n();
  if (variable < 0 || variable >= n) fail(ErrorCode::IndexOutOfRange, "FEV variable index out of range");
  if (horizon < 0) fail(ErrorCode::InvalidArgument, "FEV horizon must be non-negative");
  const auto c = vma_coefficients(regime, horizon);
  Matrix num = Matrix::Zero(n, n);
  double den = 0.0;
  for (const auto& ch : c) {
    const Eigen::RowVectorXd row = ch.row(variable) * regime.sigma_chol();
    num.noalias() += row.transpose() * row;
    den += row.squaredNorm();
  }
  if (den <= 0.0) fail(ErrorCode::ZeroVariance, "forecast error variance is zero");
  return num / den;
}

double fev_contribution(const ReducedFormRegime& regime, const Matrix& q, int variable, int shock,
                        int horizon) {
  if (shock < 0 || shock >= regime.n()) fail(ErrorCode::IndexOutOfRange, "FEV shock index out of range");
  const Matrix k = fev_kernel(regime, variable, horizon);
  const Vector qj = q.col(shock);
  return qj.dot(k * qj);
}

}  // namespace svarwb
