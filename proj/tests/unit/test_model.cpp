#include <doctest.h>

#include <cmath>

#include "../support/check.hpp"
#include "../support/fixtures.hpp"
#include "svarwb/errors.hpp"
#include "svarwb/model.hpp"

using namespace svarwb;
using fixtures::mat;

namespace {

// C_h read off powers of the companion matrix.
Matrix companion_power_vma(const ReducedFormRegime& r, int h) {
  const int n = r.n();
  Matrix f = r.companion();
  Matrix p = Matrix::Identity(f.rows(), f.cols());
  for (int i = 0; i < h; ++i) p = p * f;
  return p.topLeftCorner(n, n);
}

}  // namespace

TEST_CASE("scalar VMA coefficients are powers of the lag coefficient") {
  ReducedFormRegime r(Vector::Zero(1), {mat({{0.5}})}, mat({{1.0}}));
  const auto c = vma_coefficients(r, 10);
  for (int h = 0; h <= 10; ++h) CHECK(c[static_cast<std::size_t>(h)](0, 0) == doctest::Approx(std::pow(0.5, h)));
}

TEST_CASE("VMA coefficients match companion matrix powers") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 3, l = 1 + trial % 3;
    const RegimeModel m = fixtures::random_model(n, l, 1, rng);
    const auto c = vma_coefficients(m.regime(0), 12);
    for (int h = 0; h <= 12; ++h)
      CHECK(max_abs_diff(c[static_cast<std::size_t>(h)], companion_power_vma(m.regime(0), h)) < 1e-12);
  }
}

TEST_CASE("structural and reduced forms round trip") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 3, l = 1 + trial % 2;
    const RegimeModel m = fixtures::random_model(n, l, 1, rng);
    const Matrix q = haar_orthogonal(n, rng);
    const StructuralRegime st = reduced_to_structural(m.regime(0), q);
    const auto back = structural_to_reduced({st}, l);
    CHECK(max_abs_diff(back[0].coefficients(), m.regime(0).coefficients()) < 1e-10);
    CHECK(max_abs_diff(back[0].sigma(), m.regime(0).sigma()) < 1e-10);
  }
}

TEST_CASE("impact response at Q = I is the lower Cholesky factor") {
  const RegimeModel m = fixtures::trivariate_model();
  const Matrix ir = impulse_response(m.regime(0), Matrix::Identity(3, 3), 0);
  CHECK(max_abs_diff(ir * ir.transpose(), m.regime(0).sigma()) < 1e-12);
  CHECK(std::abs(ir(0, 1)) + std::abs(ir(0, 2)) + std::abs(ir(1, 2)) == doctest::Approx(0.0));
}

TEST_CASE("long-run response equals the truncated sum of impulse responses") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const RegimeModel m = fixtures::random_model(3, 2, 1, rng);
    const Matrix q = haar_orthogonal(3, rng);
    const auto c = vma_coefficients(m.regime(0), 400);
    Matrix sum = Matrix::Zero(3, 3);
    for (const auto& ch : c) sum += ch * m.regime(0).sigma_chol() * q;
    CHECK(max_abs_diff(cumulative_long_run(m.regime(0), q), sum) < 1e-8);
  }
}

TEST_CASE("long-run response rejects a unit root") {
  ReducedFormRegime r(Vector::Zero(2), {Matrix::Identity(2, 2)}, Matrix::Identity(2, 2));
  CHECK_THROWS_AS(cumulative_long_run(r, Matrix::Identity(2, 2)), Error);
  try {
    cumulative_long_run(r, Matrix::Identity(2, 2));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonStationary);
  }
}

TEST_CASE("FEV contributions sum to one over shocks") {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + trial % 3;
    const RegimeModel m = fixtures::random_model(n, 2, 1, rng);
    const Matrix q = haar_orthogonal(n, rng);
    for (int h = 0; h < 10; ++h)
      for (int i = 0; i < n; ++i) {
        double total = 0.0;
        for (int j = 0; j < n; ++j) {
          const double v = fev_contribution(m.regime(0), q, i, j, h);
          CHECK(v >= -1e-12);
          CHECK(v <= 1.0 + 1e-12);
          total += v;
        }
        CHECK(std::abs(total - 1.0) < 1e-10);
      }
  }
}

TEST_CASE("FEV contribution matches a Monte Carlo forecast error decomposition") {
  ReducedFormRegime r(Vector::Zero(2), {mat({{0.5, 0.2}, {-0.1, 0.3}})}, mat({{1.0, 0.4}, {0.4, 2.0}}));
  Rng rng(21);
  const Matrix q = haar_orthogonal(2, rng);
  const int horizon = 3;
  std::vector<Matrix> ir;
  for (int h = 0; h <= horizon; ++h) ir.push_back(impulse_response(r, q, h));
  std::normal_distribution<double> nd;
  double var_total = 0.0, var_part = 0.0;
  const int paths = 1000000;
  for (int k = 0; k < paths; ++k) {
    double total = 0.0, part = 0.0;
    for (int h = 0; h <= horizon; ++h) {
      const double e0 = nd(rng), e1 = nd(rng);
      const double a = ir[static_cast<std::size_t>(h)](0, 0) * e0;
      total += a + ir[static_cast<std::size_t>(h)](0, 1) * e1;
      part += a;
    }
    var_total += total * total;
    var_part += part * part;
  }
  CHECK(std::abs(var_part / var_total - fev_contribution(r, q, 0, 0, horizon)) < 2e-2);
}

TEST_CASE("rotating the structural form leaves the reduced form unchanged") {
  Rng rng(17);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 3;
    StructuralRegime st;
    st.a0 = Matrix::Identity(n, n) + 0.3 * haar_orthogonal(n, rng);
    st.a_plus = Matrix(n, n + 1);
    for (int i = 0; i < n; ++i) st.a_plus.row(i) = 0.3 * standard_normal_vector(n + 1, rng).transpose();
    const Matrix p = haar_orthogonal(n, rng);
    StructuralRegime rot{p * st.a0, p * st.a_plus};
    const auto a = structural_to_reduced({st}, 1);
    const auto b = structural_to_reduced({rot}, 1);
    worst = std::max({worst, max_abs_diff(a[0].coefficients(), b[0].coefficients()),
                      max_abs_diff(a[0].sigma(), b[0].sigma())});
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("invalid inputs are rejected with specific errors") {
  StructuralRegime st{Matrix::Zero(2, 2), Matrix::Zero(2, 3)};
  st.a0(0, 0) = 1.0;
  try {
    structural_to_reduced({st}, 1);
    FAIL("expected SingularA0");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularA0);
  }
  try {
    ReducedFormRegime(Vector::Zero(2), {}, mat({{1.0, 2.0}, {2.0, 1.0}}));
    FAIL("expected NotPositiveDefinite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPositiveDefinite);
  }
  try {
    ReducedFormRegime(Vector::Zero(2), {}, mat({{1.0, 0.0}, {0.0, 0.0}}));
    FAIL("expected ZeroVariance");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroVariance);
  }
}

TEST_CASE("normalization flips columns to a positive A0 diagonal") {
  const RegimeModel m = fixtures::trivariate_model();
  Rng rng(2);
  OrthogonalBlock q({haar_orthogonal(3, rng), haar_orthogonal(3, rng)});
  const OrthogonalBlock qn = apply_normalization(m, q);
  for (int p = 0; p < 2; ++p) {
    const Matrix a0 = reduced_to_structural(m.regime(p), qn[p]).a0;
    for (int j = 0; j < 3; ++j) CHECK(a0(j, j) > 0.0);
  }
}
