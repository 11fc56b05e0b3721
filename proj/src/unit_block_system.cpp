#include "svarwb/unit_block_system.hpp"

#include <algorithm>
#include <cmath>

#include "svarwb/errors.hpp"

namespace svarwb {

namespace {

void push_pair(std::vector<Vector>& out, const Vector& d, const Matrix& a, double tol) {
  const double c = d.dot(a * d);
  if (c <= tol) return;
  const Vector lam = d / std::sqrt(c);
  out.push_back(lam);
  out.push_back(-lam);
}

UnitBlockSolutions solve_two(const Matrix& a, const Matrix& b) {
  UnitBlockSolutions res;
  const double scale = std::max({a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(), 1e-300});
  const double tol = 1e-12 * scale;
  const Matrix d = a - b;
  if (d.cwiseAbs().maxCoeff() <= 1e-10 * scale)
    fail(ErrorCode::DegenerateNullSpace, "both unit-norm conditions coincide; solutions form a continuum");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (d + d.transpose()));
  const double m1 = es.eigenvalues()(0), m2 = es.eigenvalues()(1);
  const Matrix& u = es.eigenvectors();
  if (m1 > tol || m2 < -tol) return res;
  if (std::abs(m1) <= tol && std::abs(m2) <= tol)
    fail(ErrorCode::DegenerateNullSpace, "unit-norm conditions coincide; solutions form a continuum");
  if (std::abs(m1) <= tol) {
    push_pair(res.solutions, u.col(0), a, tol);
    return res;
  }
  if (std::abs(m2) <= tol) {
    push_pair(res.solutions, u.col(1), a, tol);
    return res;
  }
  const double w1 = std::sqrt(std::abs(m2)), w2 = std::sqrt(std::abs(m1));
  const double nrm = std::hypot(w1, w2);
  push_pair(res.solutions, (u.col(0) * w1 + u.col(1) * w2) / nrm, a, tol);
  push_pair(res.solutions, (u.col(0) * w1 - u.col(1) * w2) / nrm, a, tol);
  return res;
}

UnitBlockSolutions solve_many(const std::vector<Matrix>& forms, Rng& rng, int starts_per_unknown) {
  UnitBlockSolutions res;
  res.exact = false;
  const Index s = static_cast<Index>(forms.size());
  const int starts = starts_per_unknown * static_cast<int>(s) * (1 << std::min<Index>(s, 10));
  for (int st = 0; st < starts; ++st) {
    Vector lam = random_unit_vector(s, rng);
    const double c = lam.dot(forms[0] * lam);
    if (c <= 1e-14) continue;
    lam /= std::sqrt(c);
    bool ok = false;
    for (int it = 0; it < 60; ++it) {
      Vector r(s);
      Matrix j(s, s);
      for (Index p = 0; p < s; ++p) {
        const Vector mp = forms[static_cast<std::size_t>(p)] * lam;
        r(p) = lam.dot(mp) - 1.0;
        j.row(p) = 2.0 * mp.transpose();
      }
      if (r.cwiseAbs().maxCoeff() < 1e-13) {
        ok = true;
        break;
      }
      Eigen::ColPivHouseholderQR<Matrix> qr(j);
      if (qr.rank() < s) break;
      const Vector step = qr.solve(r);
      double t = 1.0;
      const double r0 = r.squaredNorm();
      for (int ls = 0; ls < 30; ++ls) {
        const Vector trial = lam - t * step;
        double r1 = 0.0;
        for (Index p = 0; p < s; ++p) {
          const double v = trial.dot(forms[static_cast<std::size_t>(p)] * trial) - 1.0;
          r1 += v * v;
        }
        if (r1 < r0) break;
        t *= 0.5;
      }
      lam -= t * step;
    }
    if (!ok) continue;
    const bool seen = std::any_of(res.solutions.begin(), res.solutions.end(),
                                  [&](const Vector& v) { return (v - lam).cwiseAbs().maxCoeff() < 1e-8; });
    if (!seen) {
      res.solutions.push_back(lam);
      res.solutions.push_back(-lam);
    }
  }
  return res;
}

}  // namespace

UnitBlockSolutions solve_unit_blocks(const std::vector<Matrix>& forms, Rng& rng, int starts_per_unknown) {
  const std::size_t s = forms.size();
  if (s == 0) fail(ErrorCode::InvalidArgument, "empty unit-norm system");
  if (s == 1) {
    UnitBlockSolutions res;
    const double a = forms[0](0, 0);
    if (a > 1e-14) {
      Vector v(1);
      v(0) = 1.0 / std::sqrt(a);
      res.solutions.push_back(v);
      res.solutions.push_back(-v);
    }
    return res;
  }
  if (s == 2) return solve_two(forms[0], forms[1]);
  return solve_many(forms, rng, starts_per_unknown);
}

}  // namespace svarwb
