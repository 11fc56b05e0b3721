#include <doctest.h>

#include <string>

#include "../oracles/angle_grid.hpp"
#include "../support/check.hpp"
#include "../support/fixtures.hpp"
#include "svarwb/enumerate.hpp"
#include "svarwb/errors.hpp"

using namespace svarwb;
using fixtures::mat;

namespace {

bool general_matches(const RotationSet& reference, const RestrictionProgram& prog, const RegimeModel& m, Rng& rng) {
  try {
    const RotationSet g = enumerate_general(prog, m, GeneralSolverConfig{}, rng);
    return same_solutions(g, reference, 1e-6);
  } catch (const Error& e) {
    return reference.empty() && e.code() == ErrorCode::SolverBudgetExhausted;
  }
}

void check_members(const RotationSet& set, const RestrictionProgram& prog, const RegimeModel& m) {
  Admissibility adm(prog, m);
  for (const auto& q : set.solutions) {
    for (int p = 0; p < prog.s; ++p) CHECK(orthogonality_error(q[p]) <= 1e-10);
    CHECK(adm.max_residual(q) <= 1e-8);
    CHECK(adm.check(q).satisfied);
  }
  for (std::size_t a = 0; a < set.size(); ++a)
    for (std::size_t b = a + 1; b < set.size(); ++b) CHECK(set.solutions[a].max_distance(set.solutions[b]) > 1e-6);
}

}  // namespace

TEST_CASE("triangular bivariate model has exactly one normalized solution") {
  RestrictionSet rs;
  rs.equalities.push_back(EqualityRestriction::zero(ir_cell(0, 0, 0, 1)));
  const auto prog = compile(rs, 2, 1, fixtures::impact_transform());
  Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const RegimeModel m = fixtures::random_model(2, 1, 1, rng);
    const RotationSet g = enumerate_general(prog, m, GeneralSolverConfig{}, rng);
    CHECK(g.size() == 1);
    const RotationSet r = enumerate_recursive(prog, m, rng);
    CHECK(r.size() == 1);
    CHECK(same_solutions(g, r, 1e-6));
    // Cholesky uniqueness: Sigma_tr Q is lower triangular with positive A0 diagonal.
    CHECK(max_abs_diff(r.solutions[0][0].cwiseAbs(), Matrix::Identity(2, 2)) < 1e-10);
  }
}

TEST_CASE("trivariate A0 solutions reproduce the restricted pattern") {
  const RegimeModel m = fixtures::trivariate_model();
  const auto prog = compile(fixtures::trivariate_set(), 3, 2, fixtures::a0_transform());
  Rng rng(2);
  const RotationSet set = enumerate_general(prog, m, GeneralSolverConfig{}, rng);
  MESSAGE("solutions at the fixture point: " << set.size());
  REQUIRE(set.size() >= 1);
  check_members(set, prog, m);
  bool truth_found = false;
  const auto truth = fixtures::trivariate_structural();
  for (const auto& q : set.solutions) {
    const Matrix a1 = reduced_to_structural(m.regime(0), q[0]).a0;
    const Matrix a2 = reduced_to_structural(m.regime(1), q[1]).a0;
    CHECK(std::abs(a1(0, 1)) < 1e-8);
    CHECK(std::abs(a1(0, 2)) < 1e-8);
    CHECK(std::abs(a1(1, 2)) < 1e-8);
    CHECK(std::abs(a2(0, 2)) < 1e-8);
    CHECK(std::abs(a2(1, 2)) < 1e-8);
    CHECK(std::abs(a1(0, 0) - a2(0, 0)) < 1e-8);
    if (max_abs_diff(a1, truth[0].a0) < 1e-8 && max_abs_diff(a2, truth[1].a0) < 1e-8) truth_found = true;
  }
  CHECK(truth_found);
}

TEST_CASE("recursive route in a single regime keeps one of two antipodal columns") {
  RestrictionSet chol;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < j; ++i) chol.equalities.push_back(EqualityRestriction::zero(ir_cell(0, 0, i, j)));
  const auto prog = compile(chol, 3, 1, fixtures::impact_transform());
  Rng rng(3);
  const RegimeModel m = fixtures::random_model(3, 2, 1, rng);
  const RotationSet r = enumerate_recursive(prog, m, rng);
  REQUIRE(r.size() == 1);
  CHECK(max_abs_diff(r.solutions[0][0], Matrix::Identity(3, 3)) < 1e-10);
  RestrictionSet loose = chol;
  loose.normalization = Normalization::None;
  CHECK(enumerate_recursive(compile(loose, 3, 1, fixtures::impact_transform()), m, rng).size() == 8);
}

TEST_CASE("routes agree on recursively just-identified fixtures") {
  Rng rng(4);
  for (const auto& fx : fixtures::recursive_fixtures()) {
    CAPTURE(std::string(fx.name));
    const auto prog = compile(fx.spec, fx.n, fx.s, fx.transform);
    REQUIRE(recursive_pattern(prog));
    const bool sequential = sequential_plan(prog).has_value();
    int nonempty = 0;
    for (int trial = 0; trial < 6; ++trial) {
      const RegimeModel m = fixtures::random_model(fx.n, 2, fx.s, rng);
      const RotationSet rec = enumerate_recursive(prog, m, rng);
      check_members(rec, prog, m);
      CHECK(general_matches(rec, prog, m, rng));
      if (sequential) CHECK(same_solutions(enumerate_sequential(prog, m, rng), rec, 1e-6));
      nonempty += rec.empty() ? 0 : 1;
    }
    CHECK(nonempty > 0);
  }
}

TEST_CASE("sequential plans exist unless every restriction spans both regimes") {
  for (const auto& fx : fixtures::recursive_fixtures()) {
    CAPTURE(std::string(fx.name));
    const bool all_cross = std::string(fx.name) == "bivariate short and long-run stability";
    CHECK(sequential_plan(compile(fx.spec, fx.n, fx.s, fx.transform)).has_value() == !all_cross);
  }
  RestrictionSet cross;
  cross.equalities = {EqualityRestriction::equal_across(ir_cell(0, 0, 0, 0), 0, 1),
                      EqualityRestriction::equal_across(ir_cell(0, 0, 1, 0), 0, 1)};
  const auto prog = compile(cross, 2, 2, fixtures::impact_transform());
  CHECK_FALSE(sequential_plan(prog).has_value());
  Rng rng(5);
  try {
    enumerate_sequential(prog, fixtures::random_model(2, 1, 2, rng), rng);
    FAIL("expected OrderingNotFound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OrderingNotFound);
  }
}

TEST_CASE("bivariate solutions match the angle grid") {
  const auto prog = compile(fixtures::bivariate_stable_set(), 2, 2, fixtures::impact_transform());
  Rng rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const RegimeModel m = fixtures::random_model(2, 1, 2, rng);
    RotationSet grid;
    grid.solutions = oracle::angle_grid_solutions(prog, m);
    const RotationSet rec = enumerate_recursive(prog, m, rng);
    CHECK(same_solutions(rec, grid, 1e-4));
    CHECK(general_matches(grid, prog, m, rng));
  }
}

TEST_CASE("an unreachable stable response empties the set") {
  const auto prog = compile(fixtures::bivariate_stable_set(), 2, 2, fixtures::impact_transform());
  std::vector<ReducedFormRegime> regs{
      ReducedFormRegime(Vector::Zero(2), {Matrix::Zero(2, 2)}, mat({{1.0, 0.0}, {0.0, 4.0}})),
      ReducedFormRegime(Vector::Zero(2), {Matrix::Zero(2, 2)}, mat({{1.0, 0.0}, {0.0, 0.01}}))};
  const RegimeModel m(regs);
  Rng rng(7);
  CHECK(enumerate_recursive(prog, m, rng).empty());
  CHECK(enumerate_sequential(prog, m, rng).empty());
  CHECK(general_matches(RotationSet{}, prog, m, rng));
}

TEST_CASE("route preconditions") {
  Rng rng(8);
  const RegimeModel m = fixtures::random_model(3, 1, 2, rng);
  const auto nonidentified = compile(fixtures::nonidentified_set(), 3, 2, fixtures::impact_transform());
  try {
    enumerate_recursive(nonidentified, m, rng);
    FAIL("expected RecursivePatternViolated");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RecursivePatternViolated);
  }
  const auto empty = compile(RestrictionSet{}, 3, 2, fixtures::impact_transform());
  try {
    enumerate_general(empty, m, GeneralSolverConfig{}, rng);
    FAIL("expected NotSquareSystem");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotSquareSystem);
  }
}

TEST_CASE("identified set values are sorted and bounded by the solution count") {
  const RegimeModel m = fixtures::trivariate_model();
  const auto prog = compile(fixtures::trivariate_set(), 3, 2, fixtures::a0_transform());
  Rng rng(9);
  const RotationSet set = enumerate(prog, m, RoutePreference::Auto, GeneralSolverConfig{}, rng);
  for (auto kind : {TargetKind::ImpulseResponse, TargetKind::LongRunCumulative, TargetKind::FevShare}) {
    const IdentifiedSet is = identified_set(set, m, {kind, 1, 0}, {0, 1, 2, 4, 8});
    for (int p = 0; p < 2; ++p)
      for (const auto& v : is.values[static_cast<std::size_t>(p)]) {
        CHECK(v.size() <= set.size());
        CHECK(!v.empty());
        for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] > v[i - 1]);
      }
  }
  const IdentifiedSet ir = identified_set(set, m, {TargetKind::ImpulseResponse, 2, 1}, {0, 3});
  const Matrix c3 = vma_coefficients(m.regime(1), 3)[3] * m.regime(1).sigma_chol() * set.solutions[0][1];
  const auto& vals = ir.values[1][1];
  CHECK(std::any_of(vals.begin(), vals.end(), [&](double v) { return std::abs(v - c3(2, 1)) < 1e-12; }));
}
