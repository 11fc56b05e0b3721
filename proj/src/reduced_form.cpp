#include "svarwb/reduced_form.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "svarwb/errors.hpp"

namespace svarwb {

RegimeData::RegimeData(Matrix observations, std::vector<int> break_dates, int lags)
    : y_(std::move(observations)), breaks_(std::move(break_dates)), lags_(lags) {
  if (lags_ < 1) fail(ErrorCode::InvalidArgument, "need at least one lag");
  if (y_.cols() < 1) fail(ErrorCode::InvalidArgument, "no variables");
  if (!y_.allFinite()) fail(ErrorCode::InvalidArgument, "observations contain non-finite values");
  int prev = lags_;
  for (int b : breaks_) {
    if (b <= prev || b >= T())
      fail(ErrorCode::InvalidArgument, "break date " + std::to_string(b) + " must lie strictly inside the sample");
    prev = b;
  }
  const int need = n() * lags_ + 1 + n();
  for (int p = 0; p < s(); ++p) {
    const auto [a, b] = rows(p);
    if (b - a < need)
      fail(ErrorCode::InsufficientObservations, "regime " + std::to_string(p + 1) + " has " +
                                                    std::to_string(b - a) + " usable observations, need " +
                                                    std::to_string(need));
  }
}

std::pair<int, int> RegimeData::rows(int p) const {
  const int first = p == 0 ? lags_ : breaks_[static_cast<std::size_t>(p - 1)];
  const int last = p + 1 < s() ? breaks_[static_cast<std::size_t>(p)] : T();
  return {first, last};
}

Matrix RegimeData::design(int p) const {
  const auto [a, b] = rows(p);
  const int nn = n();
  Matrix x(b - a, nn * lags_ + 1);
  for (int t = a; t < b; ++t) {
    x(t - a, 0) = 1.0;
    for (int i = 1; i <= lags_; ++i) x.block(t - a, 1 + (i - 1) * nn, 1, nn) = y_.row(t - i);
  }
  return x;
}

Matrix RegimeData::response(int p) const {
  const auto [a, b] = rows(p);
  return y_.middleRows(a, b - a);
}

RegimeModel ols_fit(const RegimeData& data) {
  std::vector<ReducedFormRegime> regimes;
  for (int p = 0; p < data.s(); ++p) {
    const Matrix x = data.design(p);
    const Matrix y = data.response(p);
    Eigen::ColPivHouseholderQR<Matrix> qr(x);
    if (qr.rank() < x.cols())
      fail(ErrorCode::InsufficientObservations, "design matrix of regime " + std::to_string(p + 1) + " is rank deficient");
    const Matrix bhat = qr.solve(y);  // m x n
    const Matrix u = y - x * bhat;
    const Matrix sigma = u.transpose() * u / static_cast<double>(x.rows() - x.cols());
    regimes.push_back(ReducedFormRegime::from_coefficients(bhat.transpose(), sigma, data.lags()));
  }
  return RegimeModel(std::move(regimes), data.break_dates());
}

std::vector<Matrix> ols_standard_errors(const RegimeData& data, const RegimeModel& fit) {
  std::vector<Matrix> out;
  for (int p = 0; p < data.s(); ++p) {
    const Matrix x = data.design(p);
    const Matrix xtx_inv = (x.transpose() * x).ldlt().solve(Matrix::Identity(x.cols(), x.cols()));
    const Matrix& sigma = fit.regime(p).sigma();
    Matrix se(data.n(), x.cols());
    for (Index i = 0; i < se.rows(); ++i)
      for (Index c = 0; c < se.cols(); ++c) se(i, c) = std::sqrt(sigma(i, i) * xtx_inv(c, c));
    out.push_back(se);
  }
  return out;
}

Matrix residuals(const RegimeData& data, const RegimeModel& model, int p) {
  return data.response(p) - data.design(p) * model.regime(p).coefficients().transpose();
}

double gaussian_loglik(const Matrix& resid, const Matrix& sigma) {
  const Index n = sigma.rows();
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) fail(ErrorCode::NotPositiveDefinite, "covariance is not positive definite");
  const Matrix l = llt.matrixL();
  const double logdet = 2.0 * l.diagonal().array().log().sum();
  const Matrix z = l.triangularView<Eigen::Lower>().solve(resid.transpose());
  const double t = static_cast<double>(resid.rows());
  return -0.5 * t * (static_cast<double>(n) * std::log(2.0 * std::numbers::pi) + logdet) - 0.5 * z.squaredNorm();
}

double log_likelihood(const RegimeData& data, const RegimeModel& model) {
  if (model.dims.s != data.s() || model.dims.n != data.n() || model.dims.l != data.lags())
    fail(ErrorCode::InvalidArgument, "model does not match the data layout");
  double ll = 0.0;
  for (int p = 0; p < data.s(); ++p) ll += gaussian_loglik(residuals(data, model, p), model.regime(p).sigma());
  return ll;
}

namespace {

Matrix lower_chol(const Matrix& a, const char* what) {
  Eigen::LLT<Matrix> llt(0.5 * (a + a.transpose()));
  if (llt.info() != Eigen::Success) fail(ErrorCode::NonPositiveScale, std::string(what) + " is not positive definite");
  return llt.matrixL();
}

// Sigma ~ inverse-Wishart(scale, dof) through the Bartlett decomposition of its inverse.
Matrix draw_inverse_wishart(const Matrix& scale, double dof, Rng& rng) {
  const Index n = scale.rows();
  const Matrix prec_chol = lower_chol(scale.ldlt().solve(Matrix::Identity(n, n)), "posterior scale inverse");
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix a = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    std::chi_squared_distribution<double> chi(dof - static_cast<double>(i));
    a(i, i) = std::sqrt(chi(rng));
    for (Index j = 0; j < i; ++j) a(i, j) = nd(rng);
  }
  const Matrix la = prec_chol * a;  // W = la la'
  const Matrix la_inv = la.triangularView<Eigen::Lower>().solve(Matrix::Identity(n, n));
  const Matrix sigma = la_inv.transpose() * la_inv;
  return 0.5 * (sigma + sigma.transpose());
}

}  // namespace

PosteriorSampler::PosteriorSampler(const RegimeData& data, PriorSpec prior) : data_(&data), prior_(prior) {
  const int n = data.n();
  for (int p = 0; p < data.s(); ++p) {
    const Matrix x = data.design(p);
    const Matrix y = data.response(p);
    const Index m = x.cols();
    Regime r;
    const Matrix xtx = x.transpose() * x;
    if (prior.family == PriorFamily::Diffuse) {
      Eigen::ColPivHouseholderQR<Matrix> qr(x);
      if (qr.rank() < m) fail(ErrorCode::InsufficientObservations, "rank deficient design");
      r.mean = qr.solve(y);
      const Matrix u = y - x * r.mean;
      r.scale = u.transpose() * u;
      r.row_chol = lower_chol(xtx.ldlt().solve(Matrix::Identity(m, m)), "coefficient covariance");
      r.dof = static_cast<double>(x.rows() - m);
    } else {
      if (prior.coefficient_variance <= 0.0 || prior.scale <= 0.0 || prior.extra_dof < 0)
        fail(ErrorCode::NonPositiveScale, "conjugate prior hyperparameters must be positive");
      r.prior_precision = Matrix::Identity(m, m) / prior.coefficient_variance;
      const Matrix post_prec = r.prior_precision + xtx;
      const Matrix post_cov = post_prec.ldlt().solve(Matrix::Identity(m, m));
      r.mean = post_cov * (x.transpose() * y);
      r.scale = prior.scale * Matrix::Identity(n, n) + y.transpose() * y - r.mean.transpose() * post_prec * r.mean;
      r.row_chol = lower_chol(post_cov, "coefficient covariance");
      r.dof = static_cast<double>(n + prior.extra_dof) + static_cast<double>(x.rows());
    }
    if (r.dof <= static_cast<double>(n - 1))
      fail(ErrorCode::NonPositiveScale, "posterior degrees of freedom too small in regime " + std::to_string(p + 1));
    lower_chol(r.scale, "posterior scale");
    regimes_.push_back(std::move(r));
  }
}

RegimeModel PosteriorSampler::draw(Rng& rng) const {
  std::vector<ReducedFormRegime> out;
  std::normal_distribution<double> nd(0.0, 1.0);
  for (const auto& r : regimes_) {
    const Matrix sigma = draw_inverse_wishart(r.scale, r.dof, rng);
    const Matrix sc = lower_chol(sigma, "drawn covariance");
    Matrix z(r.mean.rows(), r.mean.cols());
    for (Index c = 0; c < z.cols(); ++c)
      for (Index i = 0; i < z.rows(); ++i) z(i, c) = nd(rng);
    const Matrix b = r.mean + r.row_chol * z * sc.transpose();
    out.push_back(ReducedFormRegime::from_coefficients(b.transpose(), sigma, data_->lags()));
  }
  return RegimeModel(std::move(out), data_->break_dates());
}

double PosteriorSampler::log_density(const RegimeModel& model) const {
  double lp = log_likelihood(*data_, model);
  const double n = static_cast<double>(data_->n());
  for (int p = 0; p < data_->s(); ++p) {
    const Matrix& sigma = model.regime(p).sigma();
    const double logdet = 2.0 * model.regime(p).sigma_chol().diagonal().array().log().sum();
    if (prior_.family == PriorFamily::Diffuse) {
      lp -= 0.5 * (n + 1.0) * logdet;
    } else {
      const auto& r = regimes_[static_cast<std::size_t>(p)];
      const Matrix b = model.regime(p).coefficients().transpose();
      const double m = static_cast<double>(b.rows());
      const double nu0 = n + prior_.extra_dof;
      const Matrix inner = prior_.scale * Matrix::Identity(sigma.rows(), sigma.cols()) +
                           b.transpose() * r.prior_precision * b;
      lp += -0.5 * (nu0 + n + 1.0 + m) * logdet - 0.5 * sigma.ldlt().solve(inner).trace();
    }
  }
  return lp;
}

std::vector<RegimeModel> posterior_draws(const RegimeData& data, const PriorSpec& prior, int draws,
                                         std::uint64_t seed) {
  if (draws < 1) fail(ErrorCode::InvalidArgument, "need at least one posterior draw");
  PosteriorSampler sampler(data, prior);
  std::vector<RegimeModel> out;
  out.reserve(static_cast<std::size_t>(draws));
  for (int k = 0; k < draws; ++k) {
    Rng rng = stream_rng(seed, static_cast<std::uint64_t>(k));
    out.push_back(sampler.draw(rng));
  }
  return out;
}

Matrix simulate(const RegimeModel& model, const std::vector<int>& breaks, int T, int burn_in, Rng& rng) {
  const int n = model.dims.n, l = model.dims.l, s = model.dims.s;
  if (T < 1 || burn_in < 0) fail(ErrorCode::InvalidArgument, "sample size must be positive");
  if (static_cast<int>(breaks.size()) != s - 1) fail(ErrorCode::InvalidArgument, "need s - 1 break dates");
  int prev = 0;
  for (int b : breaks) {
    if (b <= prev || b >= T) fail(ErrorCode::InvalidArgument, "break dates must be increasing and inside the sample");
    prev = b;
  }
  const int total = burn_in + T;
  Matrix y = Matrix::Zero(total + l, n);
  int p = 0;
  for (int t = 0; t < total; ++t) {
    const int out_row = t - burn_in;
    while (p + 1 < s && out_row >= breaks[static_cast<std::size_t>(p)]) ++p;
    const auto& r = model.regime(out_row < 0 ? 0 : p);
    Vector v = r.intercept() + r.sigma_chol() * standard_normal_vector(n, rng);
    for (int i = 1; i <= l; ++i)
      v.noalias() += r.lag_coefficients()[static_cast<std::size_t>(i - 1)] * y.row(l + t - i).transpose();
    y.row(l + t) = v.transpose();
  }
  return y.bottomRows(T);
}

}  // namespace svarwb
