#include "svarwb/enumerate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "svarwb/errors.hpp"
#include "svarwb/unit_block_system.hpp"

namespace svarwb {

const char* to_string(SolverRoute r) {
  switch (r) {
    case SolverRoute::General: return "general";
    case SolverRoute::Recursive: return "recursive";
    case SolverRoute::Sequential: return "sequential";
  }
  return "?";
}

const char* to_string(Completeness c) {
  switch (c) {
    case Completeness::Heuristic: return "heuristic";
    case Completeness::CrossValidated: return "cross-validated";
    case Completeness::Exact: return "exact";
  }
  return "?";
}

namespace {

constexpr double kFinalResidual = 1e-8;

bool lex_less(const OrthogonalBlock& a, const OrthogonalBlock& b) {
  for (int p = 0; p < a.regimes(); ++p)
    for (Index c = 0; c < a[p].cols(); ++c)
      for (Index r = 0; r < a[p].rows(); ++r) {
        const double d = a[p](r, c) - b[p](r, c);
        if (std::abs(d) > 1e-9) return d < 0;
      }
  return false;
}

// Adds q unless an equal rotation is already present.
bool add_unique(std::vector<OrthogonalBlock>& out, const OrthogonalBlock& q, double tol) {
  for (const auto& o : out)
    if (o.max_distance(q) < tol) return false;
  out.push_back(q);
  return true;
}

bool final_ok(const Admissibility& adm, const OrthogonalBlock& q) {
  for (int p = 0; p < q.regimes(); ++p)
    if (orthogonality_error(q[p]) > kFinalResidual) return false;
  if (adm.max_residual(q) > kFinalResidual) return false;
  return adm.check(q).satisfied;
}

RotationSet finish(std::vector<OrthogonalBlock> candidates, const Admissibility& adm, double tol) {
  RotationSet out;
  for (const auto& q : candidates)
    if (final_ok(adm, q)) add_unique(out.solutions, q, tol);
  sort_solutions(out.solutions);
  return out;
}

struct Node {
  OrthogonalBlock q;
  std::vector<bool> placed;
};

Node empty_node(int n, int s) {
  return Node{OrthogonalBlock(std::vector<Matrix>(static_cast<std::size_t>(s), Matrix::Zero(n, n))),
              std::vector<bool>(static_cast<std::size_t>(n), false)};
}

}  // namespace

void sort_solutions(std::vector<OrthogonalBlock>& solutions) {
  std::stable_sort(solutions.begin(), solutions.end(), lex_less);
}

bool same_solutions(const RotationSet& a, const RotationSet& b, double tol) {
  if (a.size() != b.size()) return false;
  for (const auto& x : a.solutions) {
    const bool hit = std::any_of(b.solutions.begin(), b.solutions.end(),
                                 [&](const OrthogonalBlock& y) { return x.max_distance(y) < tol; });
    if (!hit) return false;
  }
  return true;
}

bool recursive_pattern(const RestrictionProgram& program) {
  for (int k = 0; k < program.n; ++k)
    if (program.f_at(k) != program.s * (program.n - 1 - k)) return false;
  return true;
}

std::optional<SequentialPlan> sequential_plan(const RestrictionProgram& program) {
  const int n = program.n, s = program.s;
  SequentialPlan plan;
  for (int k = 0; k < n; ++k) {
    const auto& rows = program.ordered[static_cast<std::size_t>(k)].rows;
    const int need = n - 1 - k;
    std::vector<int> perm(static_cast<std::size_t>(s));
    std::iota(perm.begin(), perm.end(), 0);
    bool found = false;
    do {
      std::vector<int> rank(static_cast<std::size_t>(s));
      for (int i = 0; i < s; ++i) rank[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i;
      std::vector<std::vector<int>> assigned(static_cast<std::size_t>(s));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        int owner = rows[r].regimes.front();
        for (int p : rows[r].regimes)
          if (rank[static_cast<std::size_t>(p)] > rank[static_cast<std::size_t>(owner)]) owner = p;
        assigned[static_cast<std::size_t>(owner)].push_back(static_cast<int>(r));
      }
      const bool ok = std::all_of(assigned.begin(), assigned.end(),
                                  [&](const std::vector<int>& a) { return static_cast<int>(a.size()) == need; });
      if (ok) {
        plan.regime_order.push_back(perm);
        plan.rows_by_regime.push_back(std::move(assigned));
        found = true;
        break;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (!found) return std::nullopt;
  }
  return plan;
}

RotationSet enumerate_general(const RestrictionProgram& program, const RegimeModel& model,
                              const GeneralSolverConfig& config, Rng& rng) {
  const int n = program.n, s = program.s;
  const int orth = s * n * (n + 1) / 2;
  const int f = program.f();
  const int unknowns = s * n * n;
  if (orth + f != unknowns)
    fail(ErrorCode::NotSquareSystem, "general route needs f = s n (n - 1) / 2 = " +
                                         std::to_string(s * n * (n - 1) / 2) + ", got f = " + std::to_string(f));
  Admissibility adm(program, model);
  const int starts = config.starts > 0 ? config.starts : 500 * s * n;
  const auto var = [n](int p, int c, int r) { return p * n * n + c * n + r; };

  const auto residual = [&](const Vector& x, Vector& res, Matrix* jac) {
    res.setZero(unknowns);
    if (jac) jac->setZero(unknowns, unknowns);
    int e = 0;
    for (int p = 0; p < s; ++p)
      for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
          double v = 0.0;
          for (int r = 0; r < n; ++r) v += x(var(p, a, r)) * x(var(p, b, r));
          res(e) = v - (a == b ? 1.0 : 0.0);
          if (jac)
            for (int r = 0; r < n; ++r) {
              (*jac)(e, var(p, a, r)) += x(var(p, b, r));
              (*jac)(e, var(p, b, r)) += x(var(p, a, r));
            }
          ++e;
        }
    for (int k = 0; k < n; ++k) {
      const int j = program.order[static_cast<std::size_t>(k)];
      for (int row = 0; row < program.f_at(k); ++row) {
        double v = 0.0;
        for (int p = 0; p < s; ++p) {
          const Matrix& w = adm.weights(k, p);
          for (int r = 0; r < n; ++r) {
            v += w(row, r) * x(var(p, j, r));
            if (jac) (*jac)(e, var(p, j, r)) = w(row, r);
          }
        }
        res(e) = v;
        ++e;
      }
    }
  };

  RotationSet out;
  out.route = SolverRoute::General;
  out.completeness = Completeness::Heuristic;
  out.residual_histogram.assign(19, 0);
  std::vector<OrthogonalBlock> roots;
  Vector res(unknowns), trial_res(unknowns);
  Matrix jac(unknowns, unknowns);
  for (int st = 0; st < starts; ++st) {
    Vector x(unknowns);
    for (int p = 0; p < s; ++p) {
      const Matrix h = haar_orthogonal(n, rng);
      for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) x(var(p, c, r)) = h(r, c);
    }
    residual(x, res, &jac);
    double norm = res.cwiseAbs().maxCoeff();
    for (int it = 0; it < config.max_iterations && norm >= config.tolerance; ++it) {
      Eigen::PartialPivLU<Matrix> lu(jac);
      Vector step;
      if (std::abs(lu.determinant()) > 1e-300 && lu.rcond() > 1e-14)
        step = lu.solve(res);
      else
        step = jac.colPivHouseholderQr().solve(res);
      double t = 1.0;
      const double base = res.squaredNorm();
      Vector xt = x - step;
      for (int ls = 0; ls < 30; ++ls) {
        xt = x - t * step;
        residual(xt, trial_res, nullptr);
        if (trial_res.squaredNorm() < base) break;
        t *= 0.5;
      }
      x = xt;
      residual(x, res, &jac);
      norm = res.cwiseAbs().maxCoeff();
    }
    const int bucket = norm <= 0.0 ? 0 : std::clamp(static_cast<int>(std::floor(std::log10(norm))) + 16, 0, 18);
    ++out.residual_histogram[static_cast<std::size_t>(bucket)];
    if (norm >= config.tolerance) continue;
    ++out.converged;
    OrthogonalBlock q;
    for (int p = 0; p < s; ++p) {
      Matrix m(n, n);
      for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) m(r, c) = x(var(p, c, r));
      q.q.push_back(m);
    }
    add_unique(roots, q, 1e-9);
  }
  out.starts_used = starts;
  if (out.converged == 0)
    fail(ErrorCode::SolverBudgetExhausted,
         "no start converged after " + std::to_string(starts) + " starts; cannot certify an empty set");

  // Restrictions are homogeneous in each column, so column signs can be chosen
  // per column; keep the sign patterns that preserve the restrictions and the
  // normalization.
  std::vector<OrthogonalBlock> candidates;
  for (const auto& root : roots) {
    std::vector<OrthogonalBlock> partial{root};
    for (int k = 0; k < n; ++k) {
      const int j = program.order[static_cast<std::size_t>(k)];
      std::vector<OrthogonalBlock> next;
      for (const auto& base : partial)
        for (int mask = 0; mask < (1 << s); ++mask) {
          OrthogonalBlock c = base;
          for (int p = 0; p < s; ++p)
            if (mask & (1 << p)) c[p].col(j) = -c[p].col(j);
          const Vector r = adm.residual(k, c);
          if (r.size() && r.cwiseAbs().maxCoeff() > kFinalResidual) continue;
          if (!adm.column_normalized(j, c)) continue;
          next.push_back(std::move(c));
        }
      partial = std::move(next);
    }
    candidates.insert(candidates.end(), partial.begin(), partial.end());
  }
  RotationSet fin = finish(std::move(candidates), adm, config.dedup_tolerance);
  out.solutions = std::move(fin.solutions);
  return out;
}

RotationSet enumerate_recursive(const RestrictionProgram& program, const RegimeModel& model, Rng& rng) {
  if (!recursive_pattern(program))
    fail(ErrorCode::RecursivePatternViolated, "recursive route needs f_j = s (n - j) for every shock");
  const int n = program.n, s = program.s;
  Admissibility adm(program, model);
  bool exact = true;
  std::vector<Node> nodes{empty_node(n, s)};
  for (int k = 0; k < n && !nodes.empty(); ++k) {
    const int j = program.order[static_cast<std::size_t>(k)];
    const int f = program.f_at(k);
    std::vector<Node> next;
    for (const auto& node : nodes) {
      Matrix gamma = Matrix::Zero(f + s * k, s * n);
      for (int p = 0; p < s; ++p)
        if (f > 0) gamma.block(0, p * n, f, n) = adm.weights(k, p);
      for (int i = 0; i < k; ++i) {
        const int prev = program.order[static_cast<std::size_t>(i)];
        for (int p = 0; p < s; ++p) gamma.block(f + i * s + p, p * n, 1, n) = node.q[p].col(prev).transpose();
      }
      const Matrix basis = null_space(gamma);
      if (basis.cols() != s)
        fail(ErrorCode::DegenerateNullSpace, "null space of the stacked restrictions for shock " +
                                                 std::to_string(j + 1) + " has dimension " +
                                                 std::to_string(basis.cols()) + ", expected " + std::to_string(s));
      std::vector<Matrix> forms;
      for (int p = 0; p < s; ++p) {
        const Matrix b = basis.middleRows(p * n, n);
        forms.push_back(b.transpose() * b);
      }
      const UnitBlockSolutions sol = solve_unit_blocks(forms, rng);
      exact = exact && sol.exact;
      for (const auto& lam : sol.solutions) {
        const Vector v = basis * lam;
        Node child = node;
        for (int p = 0; p < s; ++p) child.q[p].col(j) = v.segment(p * n, n);
        child.placed[static_cast<std::size_t>(j)] = true;
        if (!adm.column_normalized(j, child.q)) continue;
        if (!adm.partial_ok(child.placed, child.q)) continue;
        next.push_back(std::move(child));
      }
    }
    nodes = std::move(next);
  }
  std::vector<OrthogonalBlock> cands;
  for (auto& nd : nodes) cands.push_back(std::move(nd.q));
  RotationSet out = finish(std::move(cands), adm, 1e-6);
  out.route = SolverRoute::Recursive;
  out.completeness = exact ? Completeness::Exact : Completeness::Heuristic;
  return out;
}

RotationSet enumerate_sequential(const RestrictionProgram& program, const RegimeModel& model, Rng&) {
  const auto plan = sequential_plan(program);
  if (!plan) fail(ErrorCode::OrderingNotFound, "no regime ordering resolves the restrictions one regime at a time");
  const int n = program.n, s = program.s;
  Admissibility adm(program, model);
  std::vector<Node> nodes{empty_node(n, s)};
  for (int k = 0; k < n && !nodes.empty(); ++k) {
    const int j = program.order[static_cast<std::size_t>(k)];
    const auto& order = plan->regime_order[static_cast<std::size_t>(k)];
    const auto& assigned = plan->rows_by_regime[static_cast<std::size_t>(k)];
    std::vector<Node> frontier = nodes;
    for (int p : order) {
      const auto& rows = assigned[static_cast<std::size_t>(p)];
      const int nr = static_cast<int>(rows.size());
      std::vector<Node> next;
      for (const auto& node : frontier) {
        Matrix ft(nr + k, n);
        Vector ct = Vector::Zero(nr + k);
        for (int r = 0; r < nr; ++r) {
          const int row = rows[static_cast<std::size_t>(r)];
          ft.row(r) = adm.weights(k, p).row(row);
          double c = 0.0;
          for (int o = 0; o < s; ++o)
            if (o != p) c -= adm.weights(k, o).row(row).dot(node.q[o].col(j));
          ct(r) = c;
        }
        for (int i = 0; i < k; ++i) ft.row(nr + i) = node.q[p].col(program.order[static_cast<std::size_t>(i)]).transpose();
        Eigen::JacobiSVD<Matrix> svd(ft, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const double tol = sv.size() ? sv(0) * n * 64.0 * std::numeric_limits<double>::epsilon() : 0.0;
        Index rank = 0;
        for (Index i = 0; i < sv.size(); ++i)
          if (sv(i) > tol) ++rank;
        if (rank != n - 1)
          fail(ErrorCode::DegenerateNullSpace, "regime " + std::to_string(p + 1) + " restrictions for shock " +
                                                   std::to_string(j + 1) + " do not leave a one-dimensional null space");
        const Vector alpha = svd.matrixV().col(n - 1);
        const Matrix fft = ft * ft.transpose();
        const Vector a_tilde = ft.transpose() * fft.ldlt().solve(ct);
        const double qa = alpha.dot(alpha);
        const double qb = 2.0 * a_tilde.dot(alpha);
        const double qc = a_tilde.dot(a_tilde) - 1.0;
        const double disc = qb * qb - 4.0 * qa * qc;
        std::vector<double> roots;
        if (disc < -1e-12) continue;
        if (disc <= 1e-12) {
          roots.push_back(-qb / (2.0 * qa));
        } else {
          const double sq = std::sqrt(disc);
          roots.push_back((-qb - sq) / (2.0 * qa));
          roots.push_back((-qb + sq) / (2.0 * qa));
        }
        for (double z : roots) {
          Node child = node;
          Vector qcol = a_tilde + alpha * z;
          qcol /= qcol.norm();
          child.q[p].col(j) = qcol;
          if (program.normalization == Normalization::A0DiagonalPositive &&
              !adm.margin_positive(p, j, qcol))
            continue;
          next.push_back(std::move(child));
        }
      }
      frontier = std::move(next);
    }
    std::vector<Node> kept;
    for (auto& node : frontier) {
      node.placed[static_cast<std::size_t>(j)] = true;
      if (adm.partial_ok(node.placed, node.q)) kept.push_back(std::move(node));
    }
    nodes = std::move(kept);
  }
  std::vector<OrthogonalBlock> cands;
  for (auto& nd : nodes) cands.push_back(std::move(nd.q));
  RotationSet out = finish(std::move(cands), adm, 1e-6);
  out.route = SolverRoute::Sequential;
  out.completeness = Completeness::Exact;
  return out;
}

RotationSet enumerate(const RestrictionProgram& program, const RegimeModel& model, RoutePreference route,
                      const GeneralSolverConfig& config, Rng& rng) {
  switch (route) {
    case RoutePreference::General: return enumerate_general(program, model, config, rng);
    case RoutePreference::Recursive: return enumerate_recursive(program, model, rng);
    case RoutePreference::Sequential: return enumerate_sequential(program, model, rng);
    case RoutePreference::Auto: break;
  }
  if (sequential_plan(program)) return enumerate_sequential(program, model, rng);
  if (recursive_pattern(program)) return enumerate_recursive(program, model, rng);
  return enumerate_general(program, model, config, rng);
}

std::vector<double> target_path(const ReducedFormRegime& regime, const Matrix& q, const TargetFunctional& target,
                                const std::vector<int>& horizons) {
  const int n = regime.n();
  if (target.variable < 0 || target.variable >= n || target.shock < 0 || target.shock >= n)
    fail(ErrorCode::IndexOutOfRange, "target index out of range");
  std::vector<double> out;
  out.reserve(horizons.size());
  switch (target.kind) {
    case TargetKind::ImpulseResponse: {
      const int hmax = horizons.empty() ? 0 : *std::max_element(horizons.begin(), horizons.end());
      const auto c = vma_coefficients(regime, hmax);
      const Vector impact = regime.sigma_chol() * q.col(target.shock);
      for (int h : horizons) out.push_back(c[static_cast<std::size_t>(h)].row(target.variable).dot(impact));
      break;
    }
    case TargetKind::LongRunCumulative: {
      const double v = long_run_factor(regime).row(target.variable).dot(q.col(target.shock));
      out.assign(horizons.size(), v);
      break;
    }
    case TargetKind::FevShare: {
      const Vector qj = q.col(target.shock);
      for (int h : horizons) out.push_back(qj.dot(fev_kernel(regime, target.variable, h) * qj));
      break;
    }
  }
  return out;
}

IdentifiedSet identified_set(const RotationSet& set, const RegimeModel& model, const TargetFunctional& target,
                             const std::vector<int>& horizons) {
  for (int h : horizons)
    if (h < 0) fail(ErrorCode::InvalidArgument, "negative horizon");
  const int s = model.dims.s;
  IdentifiedSet out;
  out.horizons = horizons;
  out.values.resize(static_cast<std::size_t>(s));
  out.paths.resize(static_cast<std::size_t>(s));
  for (int p = 0; p < s; ++p) {
    std::vector<Matrix> distinct;
    for (const auto& sol : set.solutions) {
      const bool seen = std::any_of(distinct.begin(), distinct.end(), [&](const Matrix& m) {
        return (m - sol[p]).cwiseAbs().maxCoeff() < 1e-8;
      });
      if (!seen) distinct.push_back(sol[p]);
    }
    auto& vals = out.values[static_cast<std::size_t>(p)];
    vals.assign(horizons.size(), {});
    for (const auto& qp : distinct) {
      auto path = target_path(model.regime(p), qp, target, horizons);
      for (std::size_t h = 0; h < horizons.size(); ++h) vals[h].push_back(path[h]);
      out.paths[static_cast<std::size_t>(p)].push_back(std::move(path));
    }
    for (auto& v : vals) {
      std::sort(v.begin(), v.end());
      std::vector<double> uniq;
      for (double x : v)
        if (uniq.empty() || std::abs(x - uniq.back()) > 1e-10 * std::max(1.0, std::abs(x))) uniq.push_back(x);
      v = std::move(uniq);
    }
  }
  return out;
}

}  // namespace svarwb
