#include "svarwb/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "svarwb/errors.hpp"
#include "svarwb/parallel.hpp"

namespace svarwb {

const char* to_string(DrawStatus s) {
  switch (s) {
    case DrawStatus::Ok: return "ok";
    case DrawStatus::Empty: return "empty";
    case DrawStatus::NonStationary: return "nonstationary";
    case DrawStatus::Degenerate: return "degenerate";
    case DrawStatus::SolverBudget: return "solver_budget";
  }
  return "?";
}

namespace {

// Picks column signs that keep the column's restrictions and the
// normalization; false when no sign pattern works.
bool fix_signs(const Admissibility& adm, int k, int j, OrthogonalBlock& q) {
  const int s = adm.program().s;
  for (int mask = 0; mask < (1 << s); ++mask) {
    OrthogonalBlock c = q;
    for (int p = 0; p < s; ++p)
      if (mask & (1 << p)) c[p].col(j) = -c[p].col(j);
    const Vector r = adm.residual(k, c);
    if (r.size() && r.cwiseAbs().maxCoeff() > 1e-8) continue;
    if (!adm.column_normalized(j, c)) continue;
    q = std::move(c);
    return true;
  }
  return false;
}

}  // namespace

bool propose_rotation(const Admissibility& adm, Rng& rng, OrthogonalBlock& out) {
  const RestrictionProgram& prog = adm.program();
  const int n = prog.n, s = prog.s;
  out = OrthogonalBlock(std::vector<Matrix>(static_cast<std::size_t>(s), Matrix::Zero(n, n)));
  for (int k = 0; k < n; ++k) {
    const int j = prog.order[static_cast<std::size_t>(k)];
    const int f = prog.f_at(k);
    Matrix gamma = Matrix::Zero(f + s * k, s * n);
    for (int p = 0; p < s; ++p)
      if (f > 0) gamma.block(0, p * n, f, n) = adm.weights(k, p);
    for (int i = 0; i < k; ++i) {
      const int prev = prog.order[static_cast<std::size_t>(i)];
      for (int p = 0; p < s; ++p) gamma.block(f + i * s + p, p * n, 1, n) = out[p].col(prev).transpose();
    }
    const Matrix basis = null_space(gamma);
    const Index dim = basis.cols();
    if (dim < s) return false;
    // Per regime, the part of the null space living in that regime's block alone.
    std::vector<Matrix> own;
    Index own_total = 0;
    for (int p = 0; p < s; ++p) {
      Matrix others(static_cast<Index>((s - 1) * n), dim);
      Index row = 0;
      for (int o = 0; o < s; ++o)
        if (o != p) {
          others.middleRows(row, n) = basis.middleRows(o * n, n);
          row += n;
        }
      own.push_back(s == 1 ? Matrix(Matrix::Identity(dim, dim)) : null_space(others));
      own_total += own.back().cols();
    }
    if (own_total == dim) {
      for (int p = 0; p < s; ++p) {
        const Matrix& c = own[static_cast<std::size_t>(p)];
        if (c.cols() == 0) return false;
        const Vector lam = c * random_unit_vector(c.cols(), rng);
        Vector col = (basis * lam).segment(p * n, n);
        out[p].col(j) = col / col.norm();
      }
    } else {
      // Restrictions tie regimes together: start from a random point of the
      // null space and project onto unit norm in every regime block.
      std::vector<Matrix> forms;
      for (int p = 0; p < s; ++p) {
        const Matrix b = basis.middleRows(p * n, n);
        forms.push_back(b.transpose() * b);
      }
      Vector lam = standard_normal_vector(dim, rng);
      bool ok = false;
      for (int it = 0; it < 100; ++it) {
        Vector r(s);
        Matrix jac(s, dim);
        for (int p = 0; p < s; ++p) {
          const Vector mp = forms[static_cast<std::size_t>(p)] * lam;
          r(p) = lam.dot(mp) - 1.0;
          jac.row(p) = 2.0 * mp.transpose();
        }
        if (r.cwiseAbs().maxCoeff() < 1e-12) {
          ok = true;
          break;
        }
        lam -= jac.completeOrthogonalDecomposition().solve(r);
      }
      if (!ok) return false;
      const Vector v = basis * lam;
      for (int p = 0; p < s; ++p) out[p].col(j) = v.segment(p * n, n);
    }
    if (!fix_signs(adm, k, j, out)) return false;
  }
  return true;
}

SetIdentifiedSample sample_set_identified(const RestrictionProgram& program, const RegimeModel& model,
                                          int proposals, Rng& rng) {
  if (proposals < 1) fail(ErrorCode::InvalidArgument, "need at least one proposal");
  Admissibility adm(program, model);
  SetIdentifiedSample out;
  OrthogonalBlock q;
  for (int i = 0; i < proposals; ++i) {
    ++out.proposals;
    if (!propose_rotation(adm, rng, q)) continue;
    if (adm.check(q).satisfied) out.accepted.push_back(q);
  }
  return out;
}

DrawRecord make_record(int index, double log_density, const RotationSet& set, const RegimeModel& model,
                       const TargetFunctional& target, const std::vector<int>& horizons, bool distinct_only) {
  DrawRecord rec;
  rec.index = index;
  rec.log_density = log_density;
  rec.solutions = static_cast<int>(set.size());
  const int s = model.dims.s;
  const std::size_t hn = horizons.size();
  if (set.empty()) {
    rec.status = DrawStatus::Empty;
    return rec;
  }
  rec.status = DrawStatus::Ok;
  if (distinct_only) {
    IdentifiedSet is = identified_set(set, model, target, horizons);
    rec.values = std::move(is.values);
    rec.paths = std::move(is.paths);
  } else {
    rec.values.assign(static_cast<std::size_t>(s), std::vector<std::vector<double>>(hn));
    rec.paths.assign(static_cast<std::size_t>(s), {});
    for (int p = 0; p < s; ++p)
      for (const auto& q : set.solutions) {
        auto path = target_path(model.regime(p), q[p], target, horizons);
        for (std::size_t h = 0; h < hn; ++h) rec.values[static_cast<std::size_t>(p)][h].push_back(path[h]);
        rec.paths[static_cast<std::size_t>(p)].push_back(std::move(path));
      }
    for (auto& reg : rec.values)
      for (auto& v : reg) std::sort(v.begin(), v.end());
  }
  rec.lower.assign(static_cast<std::size_t>(s), std::vector<double>(hn));
  rec.upper.assign(static_cast<std::size_t>(s), std::vector<double>(hn));
  for (int p = 0; p < s; ++p)
    for (std::size_t h = 0; h < hn; ++h) {
      const auto& v = rec.values[static_cast<std::size_t>(p)][h];
      rec.lower[static_cast<std::size_t>(p)][h] = v.front();
      rec.upper[static_cast<std::size_t>(p)][h] = v.back();
    }
  return rec;
}

InferenceMode resolve_mode(const RestrictionProgram& program, InferenceMode requested) {
  if (requested != InferenceMode::Auto) return requested;
  const int needed = program.s * program.n * (program.n - 1) / 2;
  if (program.f() > needed)
    fail(ErrorCode::InvalidArgument, "over-identifying equality restrictions are not supported for inference");
  return program.f() == needed ? InferenceMode::LocallyIdentified : InferenceMode::SetIdentified;
}

namespace {

DrawRecord process_draw(int index, const RegimeModel& model, double log_density, const RestrictionProgram& program,
                        const InferenceOptions& options, InferenceMode mode) {
  Rng rng = stream_rng(options.seed ^ 0x9e3779b97f4a7c15ull, static_cast<std::uint64_t>(index));
  DrawRecord rec;
  rec.index = index;
  rec.log_density = log_density;
  try {
    if (options.target.kind == TargetKind::LongRunCumulative)
      for (const auto& r : model.regimes)
        if (!r.is_stationary()) fail(ErrorCode::NonStationary, "draw is not stationary");
    if (mode == InferenceMode::LocallyIdentified) {
      const RotationSet set = enumerate(program, model, options.route, options.solver, rng);
      return make_record(index, log_density, set, model, options.target, options.horizons, true);
    }
    Admissibility adm(program, model);
    const int budget = options.max_proposals > 0 ? options.max_proposals : 10 * options.rotation_draws;
    RotationSet accepted;
    OrthogonalBlock q;
    int proposals = 0;
    while (proposals < budget &&
           (proposals < options.rotation_draws || accepted.solutions.empty())) {
      ++proposals;
      if (!propose_rotation(adm, rng, q)) continue;
      if (adm.check(q).satisfied) accepted.solutions.push_back(q);
    }
    DrawRecord out = make_record(index, log_density, accepted, model, options.target, options.horizons, false);
    out.proposals = proposals;
    out.interval_set = true;
    return out;
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::NonStationary: rec.status = DrawStatus::NonStationary; break;
      case ErrorCode::DegenerateNullSpace: rec.status = DrawStatus::Degenerate; break;
      case ErrorCode::SolverBudgetExhausted: rec.status = DrawStatus::SolverBudget; break;
      default: throw;
    }
  }
  return rec;
}

void check_options(const InferenceOptions& options) {
  if (options.posterior_draws < 1) fail(ErrorCode::InvalidArgument, "need at least one posterior draw");
  if (options.rotation_draws < 1) fail(ErrorCode::InvalidArgument, "need at least one rotation draw");
  if (options.horizons.empty()) fail(ErrorCode::InvalidArgument, "no horizons requested");
}

}  // namespace

std::vector<DrawRecord> collect_draws(const std::vector<RegimeModel>& models, const std::vector<double>& log_densities,
                                      const RestrictionProgram& program, const InferenceOptions& options) {
  check_options(options);
  const InferenceMode mode = resolve_mode(program, options.mode);
  std::vector<DrawRecord> out(models.size());
  parallel_for(static_cast<int>(models.size()), options.threads, [&](int k) {
    const double ld = k < static_cast<int>(log_densities.size()) ? log_densities[static_cast<std::size_t>(k)] : 0.0;
    out[static_cast<std::size_t>(k)] = process_draw(k, models[static_cast<std::size_t>(k)], ld, program, options, mode);
  });
  return out;
}

std::vector<DrawRecord> collect_draws(const RegimeData& data, const RestrictionProgram& program,
                                      const InferenceOptions& options) {
  check_options(options);
  const InferenceMode mode = resolve_mode(program, options.mode);
  PosteriorSampler sampler(data, options.prior);
  std::vector<DrawRecord> out(static_cast<std::size_t>(options.posterior_draws));
  parallel_for(options.posterior_draws, options.threads, [&](int k) {
    Rng rng = stream_rng(options.seed, static_cast<std::uint64_t>(k));
    const RegimeModel model = sampler.draw(rng);
    out[static_cast<std::size_t>(k)] = process_draw(k, model, sampler.log_density(model), program, options, mode);
  });
  return out;
}

const std::vector<double>& default_coverages() {
  static const std::vector<double> c{0.9, 0.75, 0.5, 0.25, 0.1};
  return c;
}

double weighted_quantile(std::vector<std::pair<double, double>> vw, double prob) {
  if (vw.empty()) fail(ErrorCode::InvalidArgument, "quantile of an empty sample");
  std::sort(vw.begin(), vw.end());
  double total = 0.0;
  for (const auto& x : vw) total += x.second;
  const double target = prob * total;
  double cum = 0.0;
  for (const auto& x : vw) {
    cum += x.second;
    if (cum >= target * (1.0 - 1e-12)) return x.first;
  }
  return vw.back().first;
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

BayesCell bayes_cell(const std::vector<std::pair<double, double>>& vw, const std::vector<double>& coverages,
                     int grid_points) {
  BayesCell cell;
  cell.points = vw.size();
  double total = 0.0, mean = 0.0, w2 = 0.0;
  for (const auto& x : vw) {
    total += x.second;
    mean += x.first * x.second;
    w2 += x.second * x.second;
  }
  mean /= total;
  cell.mean = mean;
  cell.median = weighted_quantile(vw, 0.5);
  for (double c : coverages)
    cell.raw.push_back(Band{c, weighted_quantile(vw, 0.5 - c / 2), weighted_quantile(vw, 0.5 + c / 2)});
  double var = 0.0;
  for (const auto& x : vw) var += x.second * (x.first - mean) * (x.first - mean);
  var /= total;
  const double sd = std::sqrt(var);
  const double iqr = weighted_quantile(vw, 0.75) - weighted_quantile(vw, 0.25);
  const double neff = total * total / w2;
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  const double bw = 0.9 * spread * std::pow(neff, -0.2);
  if (!(bw > 1e-12 * std::max(1.0, std::abs(mean))) || grid_points < 3) {
    cell.smoothed = cell.raw;
    cell.modes = 1;
    return cell;
  }
  double lo = vw.front().first, hi = vw.front().first;
  for (const auto& x : vw) {
    lo = std::min(lo, x.first);
    hi = std::max(hi, x.first);
  }
  lo -= 3 * bw;
  hi += 3 * bw;
  std::vector<double> grid(static_cast<std::size_t>(grid_points)), dens(grid.size()), cdf(grid.size());
  for (int i = 0; i < grid_points; ++i) {
    const double x = lo + (hi - lo) * i / (grid_points - 1);
    double d = 0.0, c = 0.0;
    for (const auto& v : vw) {
      const double z = (x - v.first) / bw;
      d += v.second * std::exp(-0.5 * z * z);
      c += v.second * normal_cdf(z);
    }
    grid[static_cast<std::size_t>(i)] = x;
    dens[static_cast<std::size_t>(i)] = d / (total * bw * std::sqrt(2.0 * 3.141592653589793));
    cdf[static_cast<std::size_t>(i)] = c / total;
  }
  const auto invert = [&](double prob) {
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (cdf[i] >= prob) {
        const double span = cdf[i] - cdf[i - 1];
        const double t = span > 0 ? (prob - cdf[i - 1]) / span : 0.0;
        return grid[i - 1] + t * (grid[i] - grid[i - 1]);
      }
    return grid.back();
  };
  for (double c : coverages) cell.smoothed.push_back(Band{c, invert(0.5 - c / 2), invert(0.5 + c / 2)});
  const double peak = *std::max_element(dens.begin(), dens.end());
  int modes = 0;
  for (std::size_t i = 1; i + 1 < dens.size(); ++i)
    if (dens[i] > dens[i - 1] && dens[i] >= dens[i + 1] && dens[i] > 0.05 * peak) ++modes;
  cell.modes = std::max(1, modes);
  return cell;
}

}  // namespace

BayesPosterior bayes_posterior(const std::vector<DrawRecord>& records, const std::vector<int>& horizons,
                               const std::vector<double>& coverages, int grid_points) {
  BayesPosterior out;
  out.horizons = horizons;
  int s = 0;
  for (const auto& r : records)
    if (r.admissible()) {
      s = static_cast<int>(r.values.size());
      ++out.draws_used;
    }
  if (out.draws_used == 0) fail(ErrorCode::AllDrawsInadmissible, "no posterior draw has an admissible rotation");
  out.cells.assign(static_cast<std::size_t>(s), std::vector<BayesCell>(horizons.size()));
  for (int p = 0; p < s; ++p)
    for (std::size_t h = 0; h < horizons.size(); ++h) {
      std::vector<std::pair<double, double>> vw;
      for (const auto& r : records) {
        if (!r.admissible()) continue;
        const auto& v = r.values[static_cast<std::size_t>(p)][h];
        const double w = 1.0 / static_cast<double>(v.size());
        for (double x : v) vw.emplace_back(x, w);
      }
      out.cells[static_cast<std::size_t>(p)][h] = bayes_cell(vw, coverages, grid_points);
    }
  return out;
}

std::vector<Interval> merge_intervals(std::vector<Interval> intervals) {
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lower < b.lower; });
  std::vector<Interval> out;
  for (const auto& iv : intervals) {
    if (!out.empty() && iv.lower <= out.back().upper)
      out.back().upper = std::max(out.back().upper, iv.upper);
    else
      out.push_back(iv);
  }
  return out;
}

ProjectionSet projection_confidence_set(const std::vector<DrawRecord>& records, double alpha, ProjectionMode mode) {
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorCode::InvalidArgument, "alpha must lie in (0, 1]");
  if (records.empty()) fail(ErrorCode::EmptyRetention, "no draws");
  std::vector<int> idx(records.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return records[static_cast<std::size_t>(a)].log_density > records[static_cast<std::size_t>(b)].log_density;
  });
  ProjectionSet out;
  out.retained = static_cast<int>(std::ceil(alpha * static_cast<double>(records.size()) - 1e-9));
  std::vector<const DrawRecord*> kept;
  for (int i = 0; i < out.retained; ++i) {
    const auto& r = records[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
    if (r.admissible()) kept.push_back(&r);
  }
  out.retained_admissible = static_cast<int>(kept.size());
  if (kept.empty()) fail(ErrorCode::EmptyRetention, "no admissible draw among the retained ones");
  const int s = static_cast<int>(kept.front()->values.size());
  const std::size_t hn = kept.front()->values.front().size();
  out.cells.assign(static_cast<std::size_t>(s), std::vector<ProjectionCell>(hn));
  for (int p = 0; p < s; ++p) {
    const auto ps = static_cast<std::size_t>(p);
    std::vector<std::vector<Interval>> clusters(hn);
    const auto extend = [&](std::size_t h, std::size_t m, double v) {
      auto& c = clusters[h];
      if (c.size() <= m) c.resize(m + 1, Interval{std::numeric_limits<double>::infinity(),
                                                   -std::numeric_limits<double>::infinity()});
      c[m].lower = std::min(c[m].lower, v);
      c[m].upper = std::max(c[m].upper, v);
    };
    if (mode == ProjectionMode::SwitchingLabel) {
      for (const auto* r : kept)
        for (std::size_t h = 0; h < hn; ++h) {
          const auto& v = r->values[ps][h];
          for (std::size_t m = 0; m < v.size(); ++m) extend(h, m, v[m]);
        }
    } else {
      // Labels follow whole paths: each draw's paths are matched one to one
      // to running centroids, closest pairs first.
      std::size_t widest = 0;
      for (std::size_t i = 1; i < kept.size(); ++i)
        if (kept[i]->paths[ps].size() > kept[widest]->paths[ps].size()) widest = i;
      std::vector<std::vector<double>> centroid = kept[widest]->paths[ps];
      std::vector<int> counts(centroid.size(), 0);
      for (const auto* r : kept) {
        const auto& paths = r->paths[ps];
        std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
        for (std::size_t a = 0; a < paths.size(); ++a)
          for (std::size_t c = 0; c < centroid.size(); ++c) {
            double d = 0.0;
            for (std::size_t h = 0; h < hn; ++h) d += (paths[a][h] - centroid[c][h]) * (paths[a][h] - centroid[c][h]);
            pairs.emplace_back(d, a, c);
          }
        std::sort(pairs.begin(), pairs.end());
        std::vector<bool> used_path(paths.size(), false), used_cluster(centroid.size(), false);
        for (const auto& [d, a, c] : pairs) {
          if (used_path[a] || used_cluster[c]) continue;
          used_path[a] = used_cluster[c] = true;
          ++counts[c];
          for (std::size_t h = 0; h < hn; ++h) {
            centroid[c][h] += (paths[a][h] - centroid[c][h]) / counts[c];
            extend(h, c, paths[a][h]);
          }
        }
      }
    }
    for (std::size_t h = 0; h < hn; ++h) {
      auto& cell = out.cells[ps][h];
      for (const auto& iv : clusters[h])
        if (iv.lower <= iv.upper) cell.clusters.push_back(iv);
      cell.region = merge_intervals(cell.clusters);
    }
  }
  return out;
}

namespace {

double radius_at(double eta, const std::vector<double>& lower, const std::vector<double>& upper, std::size_t rank,
                 std::vector<double>& scratch) {
  for (std::size_t k = 0; k < lower.size(); ++k)
    scratch[k] = std::max(std::abs(eta - lower[k]), std::abs(eta - upper[k]));
  std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(rank), scratch.end());
  return scratch[rank];
}

}  // namespace

RobustCell robust_cell(const std::vector<double>& lower, const std::vector<double>& upper, double alpha) {
  if (lower.empty() || lower.size() != upper.size()) fail(ErrorCode::InvalidArgument, "bounds mismatch");
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorCode::InvalidArgument, "alpha must lie in (0, 1]");
  const std::size_t k = lower.size();
  RobustCell cell;
  for (std::size_t i = 0; i < k; ++i) {
    cell.mean_lower += lower[i];
    cell.mean_upper += upper[i];
  }
  cell.mean_lower /= static_cast<double>(k);
  cell.mean_upper /= static_cast<double>(k);
  // Order statistic ceil(alpha K): at least a fraction alpha of the sets lie inside.
  const std::size_t rank = static_cast<std::size_t>(
      std::clamp<double>(std::ceil(alpha * static_cast<double>(k) - 1e-9) - 1.0, 0.0, static_cast<double>(k - 1)));
  std::vector<double> scratch(k);
  double lo = *std::min_element(lower.begin(), lower.end());
  double hi = *std::max_element(upper.begin(), upper.end());
  const double pad = 0.1 * std::max(hi - lo, 1e-12 * std::max(1.0, std::abs(lo)));
  lo -= pad;
  hi += pad;
  constexpr int kGrid = 512;
  double best_eta = lo, best = std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i < kGrid; ++i) {
    const double eta = lo + (hi - lo) * i / (kGrid - 1);
    const double r = radius_at(eta, lower, upper, rank, scratch);
    if (r < best) {
      best = r;
      best_eta = eta;
      best_i = i;
    }
  }
  const double step = (hi - lo) / (kGrid - 1);
  double a = lo + step * std::max(0, best_i - 1), b = lo + step * std::min(kGrid - 1, best_i + 1);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = radius_at(c, lower, upper, rank, scratch), fd = radius_at(d, lower, upper, rank, scratch);
  for (int it = 0; it < 80 && b - a > 1e-14 * std::max(1.0, std::abs(a)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = radius_at(c, lower, upper, rank, scratch);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = radius_at(d, lower, upper, rank, scratch);
    }
  }
  const double mid = 0.5 * (a + b);
  const double fm = radius_at(mid, lower, upper, rank, scratch);
  if (fm < best) {
    best = fm;
    best_eta = mid;
  }
  cell.center = best_eta;
  cell.radius = best;
  cell.region_lower = best_eta - best;
  cell.region_upper = best_eta + best;
  return cell;
}

RobustSummary robust_bayes(const std::vector<DrawRecord>& records, double alpha) {
  RobustSummary out;
  std::vector<const DrawRecord*> ok;
  int counted = 0;
  for (const auto& r : records) {
    if (r.status == DrawStatus::NonStationary || r.status == DrawStatus::Degenerate) continue;
    ++counted;
    if (r.admissible()) ok.push_back(&r);
  }
  if (ok.empty()) fail(ErrorCode::AllDrawsInadmissible, "no posterior draw has an admissible rotation");
  out.draws_used = static_cast<int>(ok.size());
  out.nonempty_probability = static_cast<double>(ok.size()) / counted;
  const std::size_t s = ok.front()->values.size();
  const std::size_t hn = ok.front()->values.front().size();
  out.cells.assign(s, std::vector<RobustCell>(hn));
  for (std::size_t p = 0; p < s; ++p)
    for (std::size_t h = 0; h < hn; ++h) {
      std::vector<double> lo, hi;
      double bayes = 0.0;
      for (const auto* r : ok) {
        lo.push_back(r->lower[p][h]);
        hi.push_back(r->upper[p][h]);
        const auto& v = r->values[p][h];
        bayes += std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      }
      RobustCell cell = robust_cell(lo, hi, alpha);
      cell.bayes_mean = bayes / static_cast<double>(ok.size());
      out.cells[p][h] = cell;
    }
  return out;
}

ProbabilityRange posterior_probability_range(const std::vector<DrawRecord>& records, int p, int h, double a,
                                             double b) {
  if (a > b) fail(ErrorCode::InvalidArgument, "event bounds out of order");
  ProbabilityRange out;
  int used = 0;
  for (const auto& r : records) {
    if (!r.admissible()) continue;
    ++used;
    const auto ps = static_cast<std::size_t>(p), hs = static_cast<std::size_t>(h);
    const double lo = r.lower.at(ps).at(hs), hi = r.upper.at(ps).at(hs);
    if (lo >= a && hi <= b) out.lower += 1.0;
    bool meets;
    if (r.interval_set) {
      meets = hi >= a && lo <= b;
    } else {
      const auto& v = r.values[ps][hs];
      meets = std::any_of(v.begin(), v.end(), [&](double x) { return x >= a && x <= b; });
    }
    if (meets) out.upper += 1.0;
  }
  if (used == 0) fail(ErrorCode::AllDrawsInadmissible, "no posterior draw has an admissible rotation");
  out.lower /= used;
  out.upper /= used;
  return out;
}

}  // namespace svarwb
