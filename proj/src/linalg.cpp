#include "svarwb/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace svarwb {

double rank_tolerance(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  return smax * static_cast<double>(std::max(a.rows(), a.cols())) *
         std::numeric_limits<double>::epsilon() * 64.0;
}

Index numerical_rank(const Matrix& a) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double tol = sv(0) * static_cast<double>(std::max(a.rows(), a.cols())) *
                     std::numeric_limits<double>::epsilon() * 64.0;
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++r;
  return r;
}

Index numerical_rank(const Matrix& a, double tolerance) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tolerance) ++r;
  return r;
}

Matrix null_space(const Matrix& a) {
  const Index n = a.cols();
  if (a.rows() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = sv.size() ? sv(0) * static_cast<double>(std::max(a.rows(), a.cols())) *
                                     std::numeric_limits<double>::epsilon() * 64.0
                               : 0.0;
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++r;
  return svd.matrixV().rightCols(n - r);
}

Matrix echelon_null_basis(const Matrix& a) {
  const Index rows = a.rows();
  const Index cols = a.cols();
  Matrix r = a;
  const double scale = rows ? std::max(1.0, r.cwiseAbs().maxCoeff()) : 1.0;
  const double tol = scale * 1e-12;
  std::vector<Index> pivot_cols;
  Index lead = 0;
  for (Index c = 0; c < cols && lead < rows; ++c) {
    Index best = lead;
    for (Index i = lead + 1; i < rows; ++i)
      if (std::abs(r(i, c)) > std::abs(r(best, c))) best = i;
    if (std::abs(r(best, c)) <= tol) continue;
    r.row(lead).swap(r.row(best));
    r.row(lead) /= r(lead, c);
    for (Index i = 0; i < rows; ++i) {
      if (i == lead) continue;
      const double f = r(i, c);
      if (f != 0.0) r.row(i) -= f * r.row(lead);
    }
    pivot_cols.push_back(c);
    ++lead;
  }
  std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
  for (Index c : pivot_cols) is_pivot[static_cast<std::size_t>(c)] = true;
  std::vector<Index> free_cols;
  for (Index c = 0; c < cols; ++c)
    if (!is_pivot[static_cast<std::size_t>(c)]) free_cols.push_back(c);
  Matrix basis = Matrix::Zero(cols, static_cast<Index>(free_cols.size()));
  for (std::size_t k = 0; k < free_cols.size(); ++k) {
    const Index fc = free_cols[k];
    basis(fc, static_cast<Index>(k)) = 1.0;
    for (std::size_t p = 0; p < pivot_cols.size(); ++p) {
      const double v = -r(static_cast<Index>(p), fc);
      basis(pivot_cols[p], static_cast<Index>(k)) = std::abs(v) <= tol ? 0.0 : v;
    }
  }
  return basis;
}

Matrix orthonormalize_columns(const Matrix& a) {
  Matrix q = a;
  for (Index j = 0; j < q.cols(); ++j) {
    for (Index i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
    const double nrm = q.col(j).norm();
    if (nrm > 0.0) q.col(j) /= nrm;
  }
  return q;
}

double orthogonality_error(const Matrix& q) {
  return (q.transpose() * q - Matrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

Vector standard_normal_vector(Index n, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = nd(rng);
  return v;
}

Vector random_unit_vector(Index n, Rng& rng) {
  for (;;) {
    Vector v = standard_normal_vector(n, rng);
    const double nrm = v.norm();
    if (nrm > 1e-12) return v / nrm;
  }
}

Matrix haar_orthogonal(Index n, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix z(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) z(i, j) = nd(rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

Rng stream_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream & 0xffffffffu),
                    static_cast<std::uint32_t>(stream >> 32), 0x5eedu};
  return Rng(seq);
}

}  // namespace svarwb
