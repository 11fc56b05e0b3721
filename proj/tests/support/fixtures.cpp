#include "fixtures.hpp"

namespace fixtures {

using namespace svarwb;

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

TransformSpec a0_transform() { return TransformSpec({{TransformKind::A0Transpose, 0}}); }
TransformSpec impact_transform() { return TransformSpec({{TransformKind::ImpulseResponse, 0}}); }
TransformSpec impact_long_run_transform() {
  return TransformSpec({{TransformKind::ImpulseResponse, 0}, {TransformKind::LongRunCumulative, 0}});
}

RestrictionSet trivariate_set() {
  RestrictionSet rs;
  rs.equalities = {
      EqualityRestriction::zero(a0_cell(0, 0, 1)),
      EqualityRestriction::zero(a0_cell(0, 0, 2)),
      EqualityRestriction::equal_across(a0_cell(0, 0, 0), 0, 1),
      EqualityRestriction::zero(a0_cell(1, 0, 2)),
      EqualityRestriction::zero(a0_cell(0, 1, 2)),
      EqualityRestriction::zero(a0_cell(1, 1, 2)),
  };
  return rs;
}

RestrictionSet stability_set() {
  RestrictionSet rs;
  rs.equalities = {
      EqualityRestriction::equal_across(ir_cell(0, 0, 1, 0), 0, 1),
      EqualityRestriction::equal_across(long_run_cell(0, 1, 0), 0, 1),
  };
  return rs;
}

RestrictionSet nonidentified_set() {
  RestrictionSet rs;
  rs.equalities = {
      EqualityRestriction::zero(ir_cell(0, 0, 1, 0)),
      EqualityRestriction::zero(ir_cell(0, 0, 0, 1)),
      EqualityRestriction::zero(ir_cell(1, 0, 0, 1)),
      EqualityRestriction::zero(ir_cell(0, 0, 0, 2)),
      EqualityRestriction::zero(ir_cell(1, 0, 0, 2)),
      EqualityRestriction::equal_across(ir_cell(0, 0, 1, 2), 0, 1),
  };
  return rs;
}

RestrictionSet bivariate_stable_set() {
  RestrictionSet rs;
  // A zero impact response of variable 1 to shock 1 forces A0(2,2) = 0, so
  // the positive-diagonal rule is undefined here.
  rs.normalization = Normalization::None;
  rs.equalities = {
      EqualityRestriction::zero(ir_cell(0, 0, 0, 0)),
      EqualityRestriction::equal_across(ir_cell(0, 0, 1, 0), 0, 1),
  };
  return rs;
}

std::vector<SpecFixture> recursive_fixtures() {
  std::vector<SpecFixture> out;
  out.push_back({"trivariate A0 with a stable entry", trivariate_set(), 3, 2, a0_transform()});
  out.push_back({"bivariate impact zero and stable response", bivariate_stable_set(), 2, 2, impact_transform()});
  out.push_back({"bivariate short and long-run stability", stability_set(), 2, 2, impact_long_run_transform()});

  RestrictionSet chol;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < j; ++i) chol.equalities.push_back(EqualityRestriction::zero(ir_cell(0, 0, i, j)));
  out.push_back({"trivariate Cholesky", chol, 3, 1, impact_transform()});

  RestrictionSet mixed;
  // Impact zeros on variables 1 and 2 of shock 1 in regime 2 force A0(3,3) = 0 there.
  mixed.normalization = Normalization::None;
  mixed.equalities = {
      EqualityRestriction::zero(ir_cell(0, 0, 1, 0)),
      EqualityRestriction::equal_across(ir_cell(0, 0, 2, 0), 0, 1),
      EqualityRestriction::zero(ir_cell(1, 0, 0, 0)),
      EqualityRestriction::zero(ir_cell(1, 0, 1, 0)),
      EqualityRestriction::zero(ir_cell(0, 0, 2, 1)),
      EqualityRestriction::equal_across(ir_cell(0, 0, 0, 1), 0, 1),
  };
  out.push_back({"trivariate impact zeros with stable responses", mixed, 3, 2, impact_transform()});

  RestrictionSet a0pair;
  a0pair.equalities = {
      EqualityRestriction::zero(a0_cell(0, 0, 1)),
      EqualityRestriction::equal_across(a0_cell(0, 0, 0), 0, 1),
  };
  out.push_back({"bivariate A0 zero with a stable entry", a0pair, 2, 2, a0_transform()});
  return out;
}

std::vector<StructuralRegime> trivariate_structural() {
  StructuralRegime r1, r2;
  r1.a0 = mat({{1.0, 0.0, 0.0}, {0.5, 1.2, 0.0}, {-0.3, 0.4, 0.9}});
  r2.a0 = mat({{1.0, 0.6, 0.0}, {0.2, 0.8, 0.0}, {0.3, -0.5, 1.1}});
  const Matrix b1 = mat({{0.5, 0.1, 0.0}, {0.0, 0.4, 0.1}, {0.1, 0.0, 0.3}});
  const Matrix trivariate = mat({{0.3, -0.1, 0.1}, {0.2, 0.5, 0.0}, {0.0, 0.1, 0.6}});
  Matrix c1(3, 4), c2(3, 4);
  c1 << Vector::Constant(3, 0.1), b1;
  c2 << Vector::Constant(3, -0.2), trivariate;
  r1.a_plus = r1.a0 * c1;
  r2.a_plus = r2.a0 * c2;
  return {r1, r2};
}

RegimeModel trivariate_model() { return RegimeModel(structural_to_reduced(trivariate_structural(), 1)); }

Matrix random_spd(int n, Rng& rng) {
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = standard_normal_vector(1, rng)(0);
  return a * a.transpose() + 0.5 * Matrix::Identity(n, n);
}

Matrix random_stable_lag(int n, double radius, Rng& rng) {
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) a.row(i) = standard_normal_vector(n, rng).transpose();
  Eigen::EigenSolver<Matrix> es(a, false);
  const double rho = es.eigenvalues().cwiseAbs().maxCoeff();
  return a * (radius / rho);
}

RegimeModel random_model(int n, int l, int s, Rng& rng) {
  std::vector<ReducedFormRegime> regs;
  for (int p = 0; p < s; ++p) {
    std::vector<Matrix> lags;
    for (int i = 0; i < l; ++i) lags.push_back(random_stable_lag(n, 0.5 / l, rng));
    regs.emplace_back(standard_normal_vector(n, rng), lags, random_spd(n, rng));
  }
  return RegimeModel(std::move(regs));
}

}  // namespace fixtures
