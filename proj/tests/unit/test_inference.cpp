#include <doctest.h>

#include <cmath>

#include "../support/check.hpp"
#include "../support/fixtures.hpp"
#include "svarwb/errors.hpp"
#include "svarwb/inference.hpp"

using namespace svarwb;
using fixtures::mat;

namespace {

// A record holding the given points in one regime at one horizon.
DrawRecord points_record(int index, const std::vector<double>& points, double log_density = 0.0,
                         bool interval = false) {
  DrawRecord r;
  r.index = index;
  r.log_density = log_density;
  r.status = DrawStatus::Ok;
  r.interval_set = interval;
  std::vector<double> v = points;
  std::sort(v.begin(), v.end());
  r.values = {{v}};
  r.paths = {{}};
  for (double x : points) r.paths[0].push_back({x});
  r.lower = {{v.front()}};
  r.upper = {{v.back()}};
  r.solutions = static_cast<int>(points.size());
  return r;
}

RegimeModel unit_model(int n, int s) {
  std::vector<ReducedFormRegime> regs(static_cast<std::size_t>(s),
                                      ReducedFormRegime(Vector::Zero(n), {Matrix::Zero(n, n)}, Matrix::Identity(n, n)));
  return RegimeModel(regs);
}

RegimeData simulated_data(const RegimeModel& truth, const std::vector<int>& breaks, int T, std::uint64_t seed) {
  Rng rng(seed);
  return RegimeData(simulate(truth, breaks, T, 100, rng), breaks, truth.dims.l);
}

}  // namespace

TEST_CASE("unrestricted single-regime sampler accepts everything") {
  RestrictionSet rs;
  rs.normalization = Normalization::None;
  const auto prog = compile(rs, 3, 1, fixtures::impact_transform());
  Rng rng(1);
  const auto sample = sample_set_identified(prog, unit_model(3, 1), 2000, rng);
  CHECK(sample.acceptance_rate() == 1.0);
  // Haar draws: the mean of each entry is near zero.
  Matrix mean = Matrix::Zero(3, 3);
  for (const auto& q : sample.accepted) {
    CHECK(orthogonality_error(q[0]) < 1e-12);
    mean += q[0];
  }
  mean /= static_cast<double>(sample.accepted.size());
  CHECK(mean.cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("a single sign restriction accepts about half of the proposals") {
  RestrictionSet rs;
  rs.normalization = Normalization::None;
  rs.inequalities.push_back(InequalityRestriction::sign(ir_cell(0, 0, 0, 0), true));
  const auto prog = compile(rs, 2, 1, fixtures::impact_transform());
  Rng rng(2);
  const auto sample = sample_set_identified(prog, unit_model(2, 1), 10000, rng);
  CHECK(std::abs(sample.acceptance_rate() - 0.5) < 0.05);
}

TEST_CASE("contradictory signs are essentially never accepted") {
  RestrictionSet rs;
  rs.normalization = Normalization::None;
  InequalityRestriction pos = InequalityRestriction::sign(ir_cell(0, 0, 0, 0), true);
  InequalityRestriction neg = InequalityRestriction::sign(ir_cell(0, 0, 0, 0), false);
  rs.inequalities = {pos, neg};
  const auto prog = compile(rs, 2, 1, fixtures::impact_transform());
  Rng rng(3);
  CHECK(sample_set_identified(prog, unit_model(2, 1), 2000, rng).acceptance_rate() < 1e-3);
}

TEST_CASE("sampled rotations satisfy the equality restrictions") {
  Rng rng(4);
  RestrictionSet rs;
  rs.equalities = {EqualityRestriction::equal_across(ir_cell(0, 0, 1, 0), 0, 1),
                   EqualityRestriction::zero(ir_cell(0, 0, 0, 1))};
  rs.inequalities.push_back(InequalityRestriction::sign(ir_cell(1, 0, 0, 0), true));
  const auto prog = compile(rs, 3, 2, fixtures::impact_transform());
  const RegimeModel m = fixtures::random_model(3, 1, 2, rng);
  const auto sample = sample_set_identified(prog, m, 500, rng);
  CHECK(sample.accepted.size() > 50);
  Admissibility adm(prog, m);
  for (const auto& q : sample.accepted) {
    CHECK(adm.max_residual(q) < 1e-8);
    for (int p = 0; p < 2; ++p) CHECK(orthogonality_error(q[p]) < 1e-10);
    CHECK(adm.check(q).satisfied);
  }
}

TEST_CASE("each draw carries total weight one") {
  const std::vector<DrawRecord> recs{points_record(0, {-1.0, 1.0})};
  const auto post = bayes_posterior(recs, {0}, {0.5});
  const auto& cell = post.cells[0][0];
  CHECK(cell.mean == doctest::Approx(0.0));
  CHECK(weighted_quantile({{-1.0, 0.5}, {1.0, 0.5}}, 0.5) == -1.0);
  CHECK(weighted_quantile({{-1.0, 0.5}, {1.0, 0.5}}, 0.51) == 1.0);
  const std::vector<DrawRecord> uneven{points_record(0, {-1.0, 1.0}), points_record(1, {3.0})};
  CHECK(bayes_posterior(uneven, {0}).cells[0][0].mean == doctest::Approx(1.5));
}

TEST_CASE("globally identified posterior is the push-forward of the reduced-form posterior") {
  Rng rng(5);
  const RegimeModel truth = fixtures::random_model(2, 1, 1, rng);
  const RegimeData data = simulated_data(truth, {}, 200, 6);
  RestrictionSet chol;
  chol.equalities.push_back(EqualityRestriction::zero(ir_cell(0, 0, 0, 1)));
  const auto prog = compile(chol, 2, 1, fixtures::impact_transform());
  const auto models = posterior_draws(data, PriorSpec{}, 300, 7);
  InferenceOptions opt;
  opt.posterior_draws = 300;
  opt.target = {TargetKind::ImpulseResponse, 1, 0};
  opt.horizons = {0, 2};
  const auto recs = collect_draws(models, {}, prog, opt);
  double direct0 = 0.0, direct2 = 0.0;
  for (const auto& m : models) {
    const auto path = target_path(m.regime(0), Matrix::Identity(2, 2), opt.target, opt.horizons);
    direct0 += path[0];
    direct2 += path[1];
  }
  const auto post = bayes_posterior(recs, opt.horizons);
  CHECK(post.draws_used == 300);
  CHECK(post.cells[0][0].mean == doctest::Approx(direct0 / 300).epsilon(1e-12));
  CHECK(post.cells[0][1].mean == doctest::Approx(direct2 / 300).epsilon(1e-12));
}

TEST_CASE("two opposite solutions per draw give a bimodal posterior") {
  Rng rng(8);
  std::normal_distribution<double> nd(0.0, 0.05);
  std::vector<DrawRecord> recs;
  for (int k = 0; k < 400; ++k) recs.push_back(points_record(k, {-1.0 + nd(rng), 1.0 + nd(rng)}));
  CHECK(bayes_posterior(recs, {0}).cells[0][0].modes == 2);
  std::vector<DrawRecord> single;
  for (int k = 0; k < 400; ++k) single.push_back(points_record(k, {nd(rng)}));
  CHECK(bayes_posterior(single, {0}).cells[0][0].modes == 1);
}

TEST_CASE("no admissible draw is an error") {
  DrawRecord empty;
  empty.status = DrawStatus::Empty;
  try {
    bayes_posterior({empty}, {0});
    FAIL("expected AllDrawsInadmissible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AllDrawsInadmissible);
  }
  try {
    projection_confidence_set({empty}, 0.9, ProjectionMode::SwitchingLabel);
    FAIL("expected EmptyRetention");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyRetention);
  }
}

TEST_CASE("projection set of single points is their range") {
  std::vector<DrawRecord> recs;
  for (int k = 0; k < 10; ++k) recs.push_back(points_record(k, {0.1 * k}, -k));
  const auto ps = projection_confidence_set(recs, 0.5, ProjectionMode::SwitchingLabel);
  CHECK(ps.retained == 5);
  REQUIRE(ps.cells[0][0].region.size() == 1);
  CHECK(ps.cells[0][0].region[0].lower == doctest::Approx(0.0));
  CHECK(ps.cells[0][0].region[0].upper == doctest::Approx(0.4));
}

TEST_CASE("two persistent modes give two disjoint projection intervals") {
  Rng rng(9);
  std::uniform_real_distribution<double> jitter(-0.01, 0.01);
  std::vector<DrawRecord> recs;
  for (int k = 0; k < 200; ++k)
    recs.push_back(points_record(k, {-1.0 + jitter(rng), 1.0 + jitter(rng)}, -0.01 * k));
  for (auto mode : {ProjectionMode::SwitchingLabel, ProjectionMode::FixedLabel}) {
    const auto ps = projection_confidence_set(recs, 0.9, mode);
    const auto& region = ps.cells[0][0].region;
    REQUIRE(region.size() == 2);
    for (const auto& iv : region) CHECK(iv.upper - iv.lower <= 0.1);
    CHECK(region[0].upper < region[1].lower);
  }
}

TEST_CASE("projection region contains every retained point") {
  Rng rng(10);
  std::normal_distribution<double> nd;
  std::vector<DrawRecord> recs;
  for (int k = 0; k < 300; ++k) {
    std::vector<double> pts;
    const int m = 1 + k % 3;
    for (int i = 0; i < m; ++i) pts.push_back(nd(rng) + 2.0 * i);
    recs.push_back(points_record(k, pts, nd(rng)));
  }
  for (auto mode : {ProjectionMode::SwitchingLabel, ProjectionMode::FixedLabel}) {
    const auto ps = projection_confidence_set(recs, 0.7, mode);
    std::vector<DrawRecord> sorted = recs;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const DrawRecord& a, const DrawRecord& b) { return a.log_density > b.log_density; });
    for (int i = 0; i < ps.retained; ++i)
      for (double x : sorted[static_cast<std::size_t>(i)].values[0][0]) {
        const auto& region = ps.cells[0][0].region;
        CHECK(std::any_of(region.begin(), region.end(),
                          [&](const Interval& iv) { return x >= iv.lower && x <= iv.upper; }));
      }
  }
}

TEST_CASE("robust summary of point-identified draws collapses to the Bayes mean") {
  Rng rng(11);
  std::normal_distribution<double> nd;
  std::vector<DrawRecord> recs;
  std::vector<double> xs;
  for (int k = 0; k < 500; ++k) {
    xs.push_back(nd(rng));
    recs.push_back(points_record(k, {xs.back()}));
  }
  const auto rb = robust_bayes(recs, 0.9);
  const auto& c = rb.cells[0][0];
  CHECK(c.mean_lower == doctest::Approx(c.mean_upper));
  CHECK(c.bayes_mean == doctest::Approx(c.mean_lower));
  const auto covered = std::count_if(xs.begin(), xs.end(),
                                     [&](double x) { return x >= c.region_lower && x <= c.region_upper; });
  CHECK(covered >= 450);
  CHECK(c.region_upper - c.region_lower < 2.0 * 1.645 * 1.3);
}

TEST_CASE("a fixed identified set gives exactly that set as the region") {
  const std::vector<double> lo(1000, -1.0), hi(1000, 1.0);
  const RobustCell c = robust_cell(lo, hi, 0.9);
  CHECK(c.radius >= 1.0);
  CHECK(c.region_lower <= -1.0);
  CHECK(c.region_upper >= 1.0);
  CHECK(c.region_lower == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(c.region_upper == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(c.mean_lower == -1.0);
  CHECK(c.mean_upper == 1.0);
}

TEST_CASE("robust regions grow with the credibility level on shifted sets") {
  Rng rng(12);
  std::normal_distribution<double> nd;
  std::vector<double> lo, hi;
  for (int k = 0; k < 2000; ++k) {
    const double c = nd(rng);
    lo.push_back(c - 0.5);
    hi.push_back(c + 0.5);
  }
  double prev_lo = 0.0, prev_hi = 0.0;
  bool first = true;
  for (double a : {0.5, 0.68, 0.8, 0.9, 0.95}) {
    const RobustCell c = robust_cell(lo, hi, a);
    if (!first) {
      CHECK(c.region_lower <= prev_lo + 1e-9);
      CHECK(c.region_upper >= prev_hi - 1e-9);
    }
    prev_lo = c.region_lower;
    prev_hi = c.region_upper;
    first = false;
  }
}

TEST_CASE("Bayes mean lies between the mean bounds and the region covers the inter-decile band") {
  Rng rng(13);
  std::normal_distribution<double> nd;
  std::vector<DrawRecord> recs;
  for (int k = 0; k < 1000; ++k) {
    const double c = nd(rng);
    recs.push_back(points_record(k, {c - 0.4, c + 0.1 * nd(rng), c + 0.6}));
  }
  const auto rb = robust_bayes(recs, 0.9);
  const auto post = bayes_posterior(recs, {0}, {0.8});
  const auto& c = rb.cells[0][0];
  CHECK(c.bayes_mean >= c.mean_lower);
  CHECK(c.bayes_mean <= c.mean_upper);
  CHECK(c.bayes_mean == doctest::Approx(post.cells[0][0].mean));
  CHECK(c.region_lower <= post.cells[0][0].raw[0].lower);
  CHECK(c.region_upper >= post.cells[0][0].raw[0].upper);
}

TEST_CASE("posterior probability range") {
  const std::vector<DrawRecord> recs{points_record(0, {0.0, 1.0}), points_record(1, {2.0, 3.0}),
                                     points_record(2, {0.5, 0.6}, 0.0, true)};
  const auto pr = posterior_probability_range(recs, 0, 0, 0.4, 1.5);
  CHECK(pr.lower == doctest::Approx(1.0 / 3.0));
  CHECK(pr.upper == doctest::Approx(2.0 / 3.0));
  const auto gap = posterior_probability_range(recs, 0, 0, 0.2, 0.8);
  CHECK(gap.lower == doctest::Approx(1.0 / 3.0));
  CHECK(gap.upper == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("inference on data is deterministic across thread counts") {
  Rng rng(14);
  const RegimeModel truth = fixtures::trivariate_model();
  const RegimeData data(simulate(truth, {150}, 300, 100, rng), {150}, 1);
  const auto prog = compile(fixtures::trivariate_set(), 3, 2, fixtures::a0_transform());
  InferenceOptions opt;
  opt.posterior_draws = 40;
  opt.target = {TargetKind::ImpulseResponse, 1, 0};
  opt.horizons = {0, 1, 4};
  opt.seed = 21;
  opt.threads = 1;
  const auto a = collect_draws(data, prog, opt);
  opt.threads = 4;
  const auto b = collect_draws(data, prog, opt);
  REQUIRE(a.size() == b.size());
  int ok = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].status == b[k].status);
    CHECK(a[k].values == b[k].values);
    CHECK(a[k].log_density == b[k].log_density);
    ok += a[k].admissible() ? 1 : 0;
  }
  CHECK(ok > 0);
  const auto rb = robust_bayes(a, 0.9);
  const auto post = bayes_posterior(a, opt.horizons, {0.8});
  for (int p = 0; p < 2; ++p)
    for (std::size_t h = 0; h < 3; ++h) {
      const auto& c = rb.cells[static_cast<std::size_t>(p)][h];
      CHECK(c.bayes_mean >= c.mean_lower - 1e-12);
      CHECK(c.bayes_mean <= c.mean_upper + 1e-12);
    }
  CHECK(rb.nonempty_probability >= 0.0);
  CHECK(rb.nonempty_probability <= 1.0);
}

TEST_CASE("set-identified inference brackets sampled values") {
  Rng rng(16);
  const RegimeModel truth = fixtures::random_model(2, 1, 2, rng);
  const RegimeData data(simulate(truth, {100}, 200, 100, rng), {100}, 1);
  RestrictionSet rs;
  rs.normalization = Normalization::None;
  rs.inequalities.push_back(InequalityRestriction::sign(ir_cell(0, 0, 0, 0), true));
  const auto prog = compile(rs, 2, 2, fixtures::impact_transform());
  InferenceOptions opt;
  opt.posterior_draws = 20;
  opt.rotation_draws = 100;
  opt.target = {TargetKind::ImpulseResponse, 0, 0};
  opt.horizons = {0, 2};
  opt.seed = 3;
  const auto recs = collect_draws(data, prog, opt);
  for (const auto& r : recs) {
    REQUIRE(r.admissible());
    CHECK(r.interval_set);
    for (int p = 0; p < 2; ++p)
      for (std::size_t h = 0; h < 2; ++h) {
        const auto& v = r.values[static_cast<std::size_t>(p)][h];
        CHECK(v.front() >= r.lower[static_cast<std::size_t>(p)][h]);
        CHECK(v.back() <= r.upper[static_cast<std::size_t>(p)][h]);
      }
    for (double x : r.values[0][0]) CHECK(x >= -1e-10);
  }
  CHECK(robust_bayes(recs, 0.9).nonempty_probability == 1.0);
}
