#include "svarwb/restrictions.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "svarwb/errors.hpp"

namespace svarwb {

std::string describe(const TransformBlock& block) {
  switch (block.kind) {
    case TransformKind::A0Transpose: return "A0";
    case TransformKind::ImpulseResponse: return "IR" + std::to_string(block.horizon);
    case TransformKind::LongRunCumulative: return "CIR";
  }
  return "?";
}

TransformSpec::TransformSpec(std::vector<TransformBlock> blocks) : blocks_(std::move(blocks)) {
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].kind == TransformKind::ImpulseResponse && blocks_[i].horizon < 0)
      fail(ErrorCode::InadmissibleTransform, "negative impulse response horizon");
    for (std::size_t k = 0; k < i; ++k)
      if (blocks_[k] == blocks_[i])
        fail(ErrorCode::InadmissibleTransform, "transform block " + describe(blocks_[i]) + " listed twice");
  }
}

int TransformSpec::block_index(const TransformBlock& b) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    if (blocks_[i] == b) return static_cast<int>(i);
  return -1;
}

bool TransformSpec::uses_long_run() const {
  return std::any_of(blocks_.begin(), blocks_.end(),
                     [](const TransformBlock& b) { return b.kind == TransformKind::LongRunCumulative; });
}

int TransformSpec::max_horizon() const {
  int h = 0;
  for (const auto& b : blocks_)
    if (b.kind == TransformKind::ImpulseResponse) h = std::max(h, b.horizon);
  return h;
}

Matrix TransformSpec::base(const ReducedFormRegime& regime) const {
  const int n = regime.n();
  Matrix f(n * block_count(), n);
  std::vector<Matrix> vma;
  bool have_vma = false;
  for (int b = 0; b < block_count(); ++b) {
    const auto& blk = blocks_[static_cast<std::size_t>(b)];
    switch (blk.kind) {
      case TransformKind::A0Transpose:
        f.middleRows(b * n, n) = regime.sigma_chol_inv().transpose();
        break;
      case TransformKind::ImpulseResponse:
        if (!have_vma) {
          vma = vma_coefficients(regime, max_horizon());
          have_vma = true;
        }
        f.middleRows(b * n, n) = vma[static_cast<std::size_t>(blk.horizon)] * regime.sigma_chol();
        break;
      case TransformKind::LongRunCumulative:
        f.middleRows(b * n, n) = long_run_factor(regime);
        break;
    }
  }
  return f;
}

Cell a0_cell(int regime, int equation, int variable) {
  return Cell{regime, TransformBlock{TransformKind::A0Transpose, 0}, variable, equation};
}

Cell ir_cell(int regime, int horizon, int variable, int shock) {
  return Cell{regime, TransformBlock{TransformKind::ImpulseResponse, horizon}, variable, shock};
}

Cell long_run_cell(int regime, int variable, int shock) {
  return Cell{regime, TransformBlock{TransformKind::LongRunCumulative, 0}, variable, shock};
}

EqualityRestriction EqualityRestriction::zero(const Cell& c, std::string label) {
  return EqualityRestriction{{LinearTerm{c, 1.0}}, std::move(label)};
}

EqualityRestriction EqualityRestriction::equal_across(Cell c, int regime_a, int regime_b, std::string label) {
  Cell a = c;
  a.regime = regime_a;
  Cell b = c;
  b.regime = regime_b;
  return EqualityRestriction{{LinearTerm{a, 1.0}, LinearTerm{b, -1.0}}, std::move(label)};
}

InequalityRestriction InequalityRestriction::sign(const Cell& c, bool positive, std::string label) {
  return InequalityRestriction{InequalityKind::Sign, {LinearTerm{c, positive ? 1.0 : -1.0}}, std::move(label)};
}

InequalityRestriction InequalityRestriction::ranking(const Cell& larger, const Cell& smaller, std::string label) {
  return InequalityRestriction{InequalityKind::Ranking,
                               {LinearTerm{larger, 1.0}, LinearTerm{smaller, -1.0}},
                               std::move(label)};
}

int RestrictionProgram::f() const {
  int total = 0;
  for (const auto& sh : ordered) total += sh.f();
  return total;
}

Matrix RestrictionProgram::r_star(int k, int p) const {
  return ordered[static_cast<std::size_t>(k)].r.middleCols(p * g, g);
}

Matrix RestrictionProgram::s_star(int k, int p) const {
  return ordered[static_cast<std::size_t>(k)].s.middleRows(p * g, g);
}

namespace {

int resolve_g_row(const Cell& c, int n, int s, const TransformSpec& transform, const std::string& what) {
  if (c.regime < 0 || c.regime >= s)
    fail(ErrorCode::IndexOutOfRange, what + ": regime " + std::to_string(c.regime + 1) + " out of range");
  if (c.row < 0 || c.row >= n)
    fail(ErrorCode::IndexOutOfRange, what + ": variable " + std::to_string(c.row + 1) + " out of range");
  if (c.shock < 0 || c.shock >= n)
    fail(ErrorCode::IndexOutOfRange, what + ": shock " + std::to_string(c.shock + 1) + " out of range");
  const int b = transform.block_index(c.target);
  if (b < 0)
    fail(ErrorCode::InadmissibleTransform,
         what + ": target " + describe(c.target) + " is not part of the transform");
  return b * n + c.row;
}

std::string label_of(const std::string& label, const char* kind, std::size_t idx) {
  return label.empty() ? std::string(kind) + " #" + std::to_string(idx + 1) : label;
}

}  // namespace

RestrictionProgram compile(const RestrictionSet& spec, int n, int s, const TransformSpec& transform,
                           BasisStyle basis) {
  if (n < 2 || s < 1) fail(ErrorCode::InvalidArgument, "need n >= 2 and s >= 1");
  if (transform.block_count() == 0) fail(ErrorCode::InadmissibleTransform, "empty transform");
  RestrictionProgram prog;
  prog.n = n;
  prog.s = s;
  prog.g = n * transform.block_count();
  prog.transform = transform;
  prog.basis = basis;
  prog.normalization = spec.normalization;
  const int width = s * prog.g;

  std::vector<std::vector<CompiledRow>> by_shock(static_cast<std::size_t>(n));
  for (std::size_t d = 0; d < spec.equalities.size(); ++d) {
    const auto& eq = spec.equalities[d];
    const std::string what = label_of(eq.label, "equality", d);
    if (eq.terms.empty()) fail(ErrorCode::InvalidArgument, what + ": no terms");
    const int shock = eq.terms.front().cell.shock;
    CompiledRow row;
    row.coefficients = Eigen::RowVectorXd::Zero(width);
    row.declaration = static_cast<int>(d);
    for (const auto& t : eq.terms) {
      const int gr = resolve_g_row(t.cell, n, s, transform, what);
      if (t.cell.shock != shock)
        fail(ErrorCode::InvalidArgument, what + ": equality terms must refer to a single shock");
      row.coefficients(t.cell.regime * prog.g + gr) += t.coefficient;
    }
    const double scale = row.coefficients.cwiseAbs().maxCoeff();
    if (scale == 0.0) fail(ErrorCode::RankDeficientR, what + ": coefficients cancel to a zero row");
    row.first_column = -1;
    for (int c = 0; c < width; ++c) {
      if (std::abs(row.coefficients(c)) <= 1e-14 * scale) {
        row.coefficients(c) = 0.0;
        continue;
      }
      if (row.first_column < 0) row.first_column = c;
      const int p = c / prog.g;
      if (row.regimes.empty() || row.regimes.back() != p) row.regimes.push_back(p);
    }
    by_shock[static_cast<std::size_t>(shock)].push_back(std::move(row));
  }

  std::vector<ShockRestrictions> shocks(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    auto& rows = by_shock[static_cast<std::size_t>(j)];
    // Rows of the first regime come first, then rows that also involve later
    // regimes, then rows of later regimes; declaration order breaks ties.
    std::stable_sort(rows.begin(), rows.end(), [](const CompiledRow& a, const CompiledRow& b) {
      if (a.regimes.front() != b.regimes.front()) return a.regimes.front() < b.regimes.front();
      const bool ca = a.regimes.size() > 1, cb = b.regimes.size() > 1;
      if (ca != cb) return !ca;
      if (a.first_column != b.first_column) return a.first_column < b.first_column;
      return a.declaration < b.declaration;
    });
    auto& sh = shocks[static_cast<std::size_t>(j)];
    sh.shock = j;
    sh.r.resize(static_cast<Index>(rows.size()), width);
    for (std::size_t i = 0; i < rows.size(); ++i) sh.r.row(static_cast<Index>(i)) = rows[i].coefficients;
    if (!rows.empty() && numerical_rank(sh.r) < sh.r.rows())
      fail(ErrorCode::RankDeficientR,
           "restrictions on shock " + std::to_string(j + 1) + " are linearly dependent");
    if (sh.r.rows() > width)
      fail(ErrorCode::RankDeficientR, "more restrictions than entries for shock " + std::to_string(j + 1));
    Matrix basis_raw = rows.empty() ? Matrix(Matrix::Identity(width, width)) : echelon_null_basis(sh.r);
    sh.s = basis == BasisStyle::Orthonormal ? orthonormalize_columns(basis_raw) : basis_raw;
    sh.rows = std::move(rows);
  }

  prog.order.resize(static_cast<std::size_t>(n));
  std::iota(prog.order.begin(), prog.order.end(), 0);
  std::stable_sort(prog.order.begin(), prog.order.end(), [&](int a, int b) {
    return shocks[static_cast<std::size_t>(a)].f() > shocks[static_cast<std::size_t>(b)].f();
  });
  prog.position.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    prog.position[static_cast<std::size_t>(prog.order[static_cast<std::size_t>(k)])] = k;
    prog.ordered.push_back(shocks[static_cast<std::size_t>(prog.order[static_cast<std::size_t>(k)])]);
  }

  for (std::size_t d = 0; d < spec.inequalities.size(); ++d) {
    const auto& in = spec.inequalities[d];
    const std::string what = label_of(in.label, "inequality", d);
    if (in.terms.empty()) fail(ErrorCode::InvalidArgument, what + ": no terms");
    CompiledInequality ci;
    ci.kind = in.kind;
    ci.label = what;
    for (const auto& t : in.terms) {
      const int gr = resolve_g_row(t.cell, n, s, transform, what);
      ci.terms.push_back(CompiledTerm{t.cell.regime, t.cell.shock, gr, t.coefficient});
      if (std::find(ci.shocks.begin(), ci.shocks.end(), t.cell.shock) == ci.shocks.end())
        ci.shocks.push_back(t.cell.shock);
    }
    prog.inequalities.push_back(std::move(ci));
  }

  for (std::size_t d = 0; d < spec.fev.size(); ++d) {
    FevRestriction fr = spec.fev[d];
    const std::string what = label_of(fr.label, "fev", d);
    fr.label = what;
    if (fr.variable < 0 || fr.variable >= n) fail(ErrorCode::IndexOutOfRange, what + ": variable out of range");
    if (fr.shock < 0 || fr.shock >= n) fail(ErrorCode::IndexOutOfRange, what + ": shock out of range");
    if (fr.other_shock >= n) fail(ErrorCode::IndexOutOfRange, what + ": second shock out of range");
    if (fr.horizon < 0) fail(ErrorCode::InvalidArgument, what + ": negative horizon");
    if (static_cast<int>(fr.weights.size()) != s)
      fail(ErrorCode::InvalidArgument, what + ": need one weight per regime");
    if (fr.other_shock >= 0 && static_cast<int>(fr.other_weights.size()) != s)
      fail(ErrorCode::InvalidArgument, what + ": need one weight per regime for the second shock");
    if (fr.lower > fr.upper) fail(ErrorCode::InvalidArgument, what + ": lower bound exceeds upper bound");
    prog.fev.push_back(std::move(fr));
  }
  return prog;
}

Admissibility::Admissibility(const RestrictionProgram& program, const RegimeModel& model)
    : program_(&program), model_(&model) {
  if (model.dims.n != program.n || model.dims.s != program.s)
    fail(ErrorCode::InvalidArgument, "model dimensions do not match the restriction program");
  const int s = program.s;
  for (int p = 0; p < s; ++p) base_.push_back(program.transform.base(model.regime(p)));
  weights_.resize(static_cast<std::size_t>(program.n * s));
  for (int k = 0; k < program.n; ++k)
    for (int p = 0; p < s; ++p)
      weights_[static_cast<std::size_t>(k * s + p)] = program.r_star(k, p) * base_[static_cast<std::size_t>(p)];
  for (const auto& in : program.inequalities) {
    std::vector<Eigen::RowVectorXd> rows;
    for (const auto& t : in.terms) rows.push_back(t.coefficient * base_[static_cast<std::size_t>(t.regime)].row(t.g_row));
    ineq_rows_.push_back(std::move(rows));
  }
  for (const auto& fr : program.fev) {
    std::vector<Matrix> kernels;
    for (int p = 0; p < s; ++p) kernels.push_back(fev_kernel(model.regime(p), fr.variable, fr.horizon));
    fev_kernels_.push_back(std::move(kernels));
  }
}

const Matrix& Admissibility::weights(int k, int p) const {
  return weights_[static_cast<std::size_t>(k * program_->s + p)];
}

Matrix Admissibility::evaluate_g(const OrthogonalBlock& q) const {
  const int g = program_->g;
  Matrix out(program_->s * g, program_->n);
  for (int p = 0; p < program_->s; ++p) out.middleRows(p * g, g) = base(p) * q[p];
  return out;
}

Vector Admissibility::residual(int k, const OrthogonalBlock& q) const {
  const int j = program_->order[static_cast<std::size_t>(k)];
  Vector r = Vector::Zero(program_->f_at(k));
  if (r.size() == 0) return r;
  for (int p = 0; p < program_->s; ++p) r.noalias() += weights(k, p) * q[p].col(j);
  return r;
}

double Admissibility::max_residual(const OrthogonalBlock& q) const {
  double worst = 0.0;
  for (int k = 0; k < program_->n; ++k) {
    const Vector r = residual(k, q);
    if (r.size()) worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

double Admissibility::normalization_margin(int p, int shock, const Vector& q) const {
  return q.dot(model_->regime(p).sigma_chol_inv().col(shock));
}

bool Admissibility::margin_positive(int p, int shock, const Vector& q) const {
  const double scale = model_->regime(p).sigma_chol_inv().col(shock).norm();
  return normalization_margin(p, shock, q) > kNormalizationTolerance * scale;
}

bool Admissibility::column_normalized(int shock, const OrthogonalBlock& q) const {
  if (program_->normalization == Normalization::None) return true;
  for (int p = 0; p < program_->s; ++p)
    if (!margin_positive(p, shock, q[p].col(shock))) return false;
  return true;
}

bool Admissibility::normalized(const OrthogonalBlock& q) const {
  for (int j = 0; j < program_->n; ++j)
    if (!column_normalized(j, q)) return false;
  return true;
}

double Admissibility::inequality_margin(int idx, const OrthogonalBlock& q) const {
  const auto& in = program_->inequalities[static_cast<std::size_t>(idx)];
  const auto& rows = ineq_rows_[static_cast<std::size_t>(idx)];
  double v = 0.0;
  for (std::size_t t = 0; t < in.terms.size(); ++t) v += rows[t].dot(q[in.terms[t].regime].col(in.terms[t].shock));
  return v;
}

double Admissibility::fev_value(int idx, const OrthogonalBlock& q) const {
  const auto& fr = program_->fev[static_cast<std::size_t>(idx)];
  double v = 0.0;
  for (int p = 0; p < program_->s; ++p) {
    const double w = fr.weights[static_cast<std::size_t>(p)];
    if (w != 0.0) {
      const Vector qj = q[p].col(fr.shock);
      v += w * qj.dot(fev_kernels_[static_cast<std::size_t>(idx)][static_cast<std::size_t>(p)] * qj);
    }
    if (fr.other_shock >= 0) {
      const double w2 = fr.other_weights[static_cast<std::size_t>(p)];
      if (w2 != 0.0) {
        const Vector qr = q[p].col(fr.other_shock);
        v -= w2 * qr.dot(fev_kernels_[static_cast<std::size_t>(idx)][static_cast<std::size_t>(p)] * qr);
      }
    }
  }
  return v;
}

bool Admissibility::fev_ok(int idx, const OrthogonalBlock& q) const {
  const auto& fr = program_->fev[static_cast<std::size_t>(idx)];
  const double v = fev_value(idx, q);
  return v >= fr.lower - kInequalityTolerance && v <= fr.upper + kInequalityTolerance;
}

bool Admissibility::partial_ok(const std::vector<bool>& placed, const OrthogonalBlock& q) const {
  for (std::size_t i = 0; i < program_->inequalities.size(); ++i) {
    const auto& in = program_->inequalities[i];
    const bool ready = std::all_of(in.shocks.begin(), in.shocks.end(),
                                   [&](int j) { return placed[static_cast<std::size_t>(j)]; });
    if (ready && inequality_margin(static_cast<int>(i), q) < -kInequalityTolerance) return false;
  }
  for (std::size_t i = 0; i < program_->fev.size(); ++i) {
    const auto& fr = program_->fev[i];
    const bool ready = placed[static_cast<std::size_t>(fr.shock)] &&
                       (fr.other_shock < 0 || placed[static_cast<std::size_t>(fr.other_shock)]);
    if (ready && !fev_ok(static_cast<int>(i), q)) return false;
  }
  return true;
}

InequalityReport Admissibility::check(const OrthogonalBlock& q) const {
  InequalityReport rep;
  for (std::size_t i = 0; i < program_->inequalities.size(); ++i) {
    const double m = inequality_margin(static_cast<int>(i), q);
    rep.margins.push_back(m);
    if (m < -kInequalityTolerance) rep.satisfied = false;
  }
  for (std::size_t i = 0; i < program_->fev.size(); ++i) {
    rep.fev_values.push_back(fev_value(static_cast<int>(i), q));
    if (!fev_ok(static_cast<int>(i), q)) rep.satisfied = false;
  }
  rep.normalized = normalized(q);
  if (!rep.normalized) rep.satisfied = false;
  return rep;
}

Matrix evaluate_g(const RestrictionProgram& program, const RegimeModel& model, const OrthogonalBlock& q) {
  q.validate(program.n);
  return Admissibility(program, model).evaluate_g(q);
}

std::vector<Vector> equality_residual(const RestrictionProgram& program, const RegimeModel& model,
                                      const OrthogonalBlock& q) {
  q.validate(program.n);
  Admissibility adm(program, model);
  std::vector<Vector> out(static_cast<std::size_t>(program.n));
  for (int k = 0; k < program.n; ++k)
    out[static_cast<std::size_t>(program.order[static_cast<std::size_t>(k)])] = adm.residual(k, q);
  return out;
}

InequalityReport inequality_satisfied(const RestrictionProgram& program, const RegimeModel& model,
                                      const OrthogonalBlock& q) {
  q.validate(program.n);
  return Admissibility(program, model).check(q);
}

OrthogonalBlock apply_normalization(const RegimeModel& model, const OrthogonalBlock& q) {
  OrthogonalBlock out = q;
  for (int p = 0; p < q.regimes(); ++p) {
    const Matrix& li = model.regime(p).sigma_chol_inv();
    for (Index j = 0; j < out[p].cols(); ++j) {
      const double d = out[p].col(j).dot(li.col(j));
      if (d == 0.0)
        fail(ErrorCode::NormalizationUndefined,
             "A0 diagonal entry " + std::to_string(j + 1) + " is zero in regime " + std::to_string(p + 1));
      if (d < 0.0) out[p].col(j) = -out[p].col(j);
    }
  }
  return out;
}

}  // namespace svarwb
