#include "svarwb/identification.hpp"

#include <algorithm>

#include "svarwb/errors.hpp"

#include <unsupported/Eigen/KroneckerProduct>

namespace svarwb {

namespace {

int skew_count(int n) { return n * (n - 1) / 2; }

int required_vj(const RestrictionProgram& prog, int j) { return prog.s * (prog.n - 1 - j); }

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Identified: return "identified";
    case Verdict::PartiallyIdentified: return "partially identified";
    case Verdict::NotIdentified: return "not identified";
  }
  return "?";
}

OrderCondition order_condition(const RestrictionProgram& program) {
  OrderCondition oc;
  oc.f = program.f();
  oc.required = program.s * skew_count(program.n);
  oc.satisfied = oc.f >= oc.required;
  return oc;
}

std::vector<bool> recursive_order_check(const RestrictionProgram& program) {
  std::vector<bool> out;
  for (int k = 0; k < program.n; ++k) out.push_back(program.f_at(k) >= required_vj(program, k));
  return out;
}

bool recursive_order_holds(const RestrictionProgram& program) {
  const auto flags = recursive_order_check(program);
  return std::all_of(flags.begin(), flags.end(), [](bool b) { return b; });
}

Theta random_theta(const RestrictionProgram& program, Rng& rng) {
  Theta th;
  for (const auto& sh : program.ordered) th.push_back(standard_normal_vector(sh.tau(), rng));
  return th;
}

Theta theta_at(const RestrictionProgram& program, const RegimeModel& model, const OrthogonalBlock& q) {
  Admissibility adm(program, model);
  const Matrix g = adm.evaluate_g(q);
  Theta th;
  for (int k = 0; k < program.n; ++k) {
    const auto& sh = program.ordered[static_cast<std::size_t>(k)];
    const Vector col = g.col(program.order[static_cast<std::size_t>(k)]);
    if (program.basis == BasisStyle::Orthonormal)
      th.push_back(sh.s.transpose() * col);
    else
      th.push_back(sh.s.colPivHouseholderQr().solve(col));
  }
  return th;
}

Matrix v_block(const RestrictionProgram& program, int j, int p, int k) {
  return program.r_star(j, p) * program.s_star(k, p);
}

Matrix build_vj(const RestrictionProgram& program, int j, const Theta& theta) {
  const int n = program.n, s = program.s;
  const int f = program.f_at(j);
  const int per = n - 1 - j;
  Matrix v = Matrix::Zero(f, s * per);
  for (int p = 0; p < s; ++p)
    for (int k = j + 1; k < n; ++k)
      v.col(p * per + (k - j - 1)) = v_block(program, j, p, k) * theta[static_cast<std::size_t>(k)];
  return v;
}

Matrix build_vtilde_j(const RestrictionProgram& program, int j, const Theta& theta) {
  const int n = program.n, s = program.s;
  Matrix v = Matrix::Zero(program.f_at(j), s * n);
  for (int p = 0; p < s; ++p)
    for (int k = 0; k < n; ++k)
      v.col(p * n + k) = v_block(program, j, p, k) * theta[static_cast<std::size_t>(k)];
  return v;
}

Matrix build_vtilde(const RestrictionProgram& program, const Theta& theta) {
  const int n = program.n, s = program.s;
  Matrix v = Matrix::Zero(program.f(), s * n * n);
  int row = 0;
  for (int j = 0; j < n; ++j) {
    const int f = program.f_at(j);
    if (f > 0) v.block(row, j * s * n, f, s * n) = build_vtilde_j(program, j, theta);
    row += f;
  }
  return v;
}

Matrix skew_duplication(int n) {
  Matrix d = Matrix::Zero(n * n, skew_count(n));
  int idx = 0;
  for (int j = 0; j < n; ++j)
    for (int i = j + 1; i < n; ++i) {
      d(j * n + i, idx) = 1.0;
      d(i * n + j, idx) = -1.0;
      ++idx;
    }
  return d;
}

Matrix regime_shock_permutation(int n, int s) {
  Matrix t = Matrix::Zero(s * n, s * n);
  for (int j = 0; j < n; ++j)
    for (int p = 0; p < s; ++p) t(j * s + p, p * n + j) = 1.0;
  return t;
}

Matrix skew_selection(int n, int s) {
  const Matrix t = regime_shock_permutation(n, s);
  const Matrix d = skew_duplication(n);
  const Matrix left = Eigen::kroneckerProduct(t, Matrix::Identity(n, n));
  const Matrix right = Eigen::kroneckerProduct(Matrix::Identity(s, s), d);
  return left * right;
}

Matrix build_vapprox(const RestrictionProgram& program, const Theta& theta) {
  return build_vtilde(program, theta) * skew_selection(program.n, program.s);
}

namespace {

// Longest run of leading positions whose V_j has full column rank, and the ranks.
int leading_full_rank(const RestrictionProgram& program, const Theta& theta, std::vector<int>& ranks) {
  const int n = program.n;
  ranks.assign(static_cast<std::size_t>(n), 0);
  int prefix = 0;
  bool broken = false;
  for (int j = 0; j + 1 < n; ++j) {
    const Matrix v = build_vj(program, j, theta);
    const int r = static_cast<int>(numerical_rank(v));
    ranks[static_cast<std::size_t>(j)] = r;
    if (!broken && r == required_vj(program, j))
      ++prefix;
    else
      broken = true;
  }
  return prefix;
}

void require_recursive(const RestrictionProgram& program) {
  if (!recursive_order_holds(program))
    fail(ErrorCode::RecursiveSchemeUnavailable,
         "some shock has fewer than s (n - j) restrictions; use the general rank test");
}

}  // namespace

IdentificationVerdict sufficient_rank_check(const RestrictionProgram& program, int draws, Rng& rng) {
  if (draws < 1) fail(ErrorCode::InvalidArgument, "need at least one draw");
  require_recursive(program);
  const int n = program.n;
  IdentificationVerdict v;
  v.route = "sufficient";
  v.draws_requested = draws;
  v.shock_rank.assign(static_cast<std::size_t>(n), 0);
  for (int j = 0; j < n; ++j) v.shock_required.push_back(required_vj(program, j));
  v.required = n - 1;
  int best = 0;
  std::vector<int> ranks;
  for (int d = 0; d < draws; ++d) {
    const Theta th = random_theta(program, rng);
    const int prefix = leading_full_rank(program, th, ranks);
    for (int j = 0; j < n; ++j)
      v.shock_rank[static_cast<std::size_t>(j)] =
          std::max(v.shock_rank[static_cast<std::size_t>(j)], ranks[static_cast<std::size_t>(j)]);
    best = std::max(best, prefix);
    v.draws_used = d + 1;
    if (best >= n - 1) break;
  }
  v.rank = best;
  if (best >= n - 1) {
    v.verdict = Verdict::Identified;
    for (int k = 0; k < n; ++k) v.identified_shocks.push_back(program.order[static_cast<std::size_t>(k)]);
  } else if (best > 0) {
    v.verdict = Verdict::PartiallyIdentified;
    for (int k = 0; k < best; ++k) v.identified_shocks.push_back(program.order[static_cast<std::size_t>(k)]);
  }
  std::sort(v.identified_shocks.begin(), v.identified_shocks.end());
  return v;
}

PartialVerdict partial_identification_check(const RestrictionProgram& program, int shock, int draws, Rng& rng) {
  if (shock < 0 || shock >= program.n) fail(ErrorCode::IndexOutOfRange, "shock index out of range");
  if (draws < 1) fail(ErrorCode::InvalidArgument, "need at least one draw");
  const int k = program.position[static_cast<std::size_t>(shock)];
  const int need = std::min(k + 1, program.n - 1);
  const auto flags = recursive_order_check(program);
  PartialVerdict out;
  for (int j = 0; j < need; ++j)
    if (!flags[static_cast<std::size_t>(j)]) return out;
  std::vector<int> ranks;
  for (int d = 0; d < draws; ++d) {
    const Theta th = random_theta(program, rng);
    out.draws_used = d + 1;
    if (leading_full_rank(program, th, ranks) >= need) {
      out.identified = true;
      break;
    }
  }
  return out;
}

IdentificationVerdict necessary_sufficient_check(const RestrictionProgram& program, int draws, Rng& rng) {
  if (draws < 1) fail(ErrorCode::InvalidArgument, "need at least one draw");
  IdentificationVerdict v;
  v.route = "necessary_sufficient";
  v.draws_requested = draws;
  v.required = program.s * skew_count(program.n);
  const Matrix sel = skew_selection(program.n, program.s);
  for (int d = 0; d < draws; ++d) {
    const Theta th = random_theta(program, rng);
    const Matrix va = build_vtilde(program, th) * sel;
    const int r = static_cast<int>(numerical_rank(va));
    v.rank = std::max(v.rank, r);
    v.draws_used = d + 1;
    if (r == v.required) break;
  }
  if (v.rank == v.required) {
    v.verdict = Verdict::Identified;
    for (int j = 0; j < program.n; ++j) v.identified_shocks.push_back(j);
  }
  return v;
}

PointCheck check_at(const RestrictionProgram& program, const RegimeModel& model, const OrthogonalBlock& q) {
  PointCheck pc;
  const Theta th = theta_at(program, model, q);
  pc.sufficient_applicable = recursive_order_holds(program);
  if (pc.sufficient_applicable) {
    std::vector<int> ranks;
    pc.sufficient = leading_full_rank(program, th, ranks) >= program.n - 1;
  }
  pc.required = program.s * skew_count(program.n);
  pc.rank = static_cast<int>(numerical_rank(build_vapprox(program, th)));
  pc.necessary_sufficient = pc.rank == pc.required;
  return pc;
}

}  // namespace svarwb
