#include "angle_grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oracle {

using namespace svarwb;

namespace {

Matrix rotation(double a, int flip) {
  Matrix q(2, 2);
  q << std::cos(a), -flip * std::sin(a), std::sin(a), flip * std::cos(a);
  return q;
}

// Residual contribution of regime p: sum over shocks of R_j(regime p cols) G_p e_j.
std::array<double, 2> contribution(const RestrictionProgram& prog, const Matrix& base, int p, const Matrix& q) {
  const Matrix g = base * q;
  std::array<double, 2> out{0.0, 0.0};
  int e = 0;
  for (int k = 0; k < prog.n; ++k) {
    const int j = prog.order[static_cast<std::size_t>(k)];
    const Matrix rs = prog.r_star(k, p);
    for (Index r = 0; r < rs.rows(); ++r) out[static_cast<std::size_t>(e++)] += rs.row(r).dot(g.col(j));
  }
  return out;
}

}  // namespace

std::vector<OrthogonalBlock> angle_grid_solutions(const RestrictionProgram& program, const RegimeModel& model,
                                                  double resolution) {
  if (program.n != 2 || program.s != 2 || program.f() != 2)
    throw std::invalid_argument("angle grid oracle needs n = 2, s = 2 and two equality restrictions");
  const int cells = static_cast<int>(std::ceil(2.0 * std::numbers::pi / resolution));
  const double step = 2.0 * std::numbers::pi / cells;
  const Matrix base0 = program.transform.base(model.regime(0));
  const Matrix base1 = program.transform.base(model.regime(1));
  const Matrix* bases[2] = {&base0, &base1};

  // contribution is linear in (cos a, sin a) for fixed flip: u cos a + v sin a.
  std::array<std::array<std::array<double, 2>, 2>, 2> u{}, v{};
  for (int p = 0; p < 2; ++p)
    for (int fi = 0; fi < 2; ++fi) {
      const int flip = fi == 0 ? 1 : -1;
      u[p][fi] = contribution(program, *bases[p], p, rotation(0.0, flip));
      v[p][fi] = contribution(program, *bases[p], p, rotation(std::numbers::pi / 2, flip));
    }
  const auto eval = [&](int p, int fi, double a) {
    return std::array<double, 2>{u[p][fi][0] * std::cos(a) + v[p][fi][0] * std::sin(a),
                                 u[p][fi][1] * std::cos(a) + v[p][fi][1] * std::sin(a)};
  };

  Admissibility adm(program, model);
  std::vector<OrthogonalBlock> found;
  for (int f0 = 0; f0 < 2; ++f0)
    for (int f1 = 0; f1 < 2; ++f1) {
      std::array<std::vector<double>, 2> lo0, hi0, lo1, hi1;
      for (int c = 0; c < 2; ++c) {
        lo0[c].resize(static_cast<std::size_t>(cells));
        hi0[c].resize(static_cast<std::size_t>(cells));
        lo1[c].resize(static_cast<std::size_t>(cells));
        hi1[c].resize(static_cast<std::size_t>(cells));
      }
      for (int i = 0; i < cells; ++i) {
        const auto a = eval(0, f0, i * step), b = eval(0, f0, (i + 1) * step);
        const auto x = eval(1, f1, i * step), y = eval(1, f1, (i + 1) * step);
        for (int c = 0; c < 2; ++c) {
          lo0[c][static_cast<std::size_t>(i)] = std::min(a[c], b[c]);
          hi0[c][static_cast<std::size_t>(i)] = std::max(a[c], b[c]);
          lo1[c][static_cast<std::size_t>(i)] = std::min(x[c], y[c]);
          hi1[c][static_cast<std::size_t>(i)] = std::max(x[c], y[c]);
        }
      }
      std::vector<std::array<double, 2>> roots;
      for (int i = 0; i < cells; ++i) {
        const auto is = static_cast<std::size_t>(i);
        for (int k = 0; k < cells; ++k) {
          const auto ks = static_cast<std::size_t>(k);
          if (lo0[0][is] + lo1[0][ks] > 0.0 || hi0[0][is] + hi1[0][ks] < 0.0) continue;
          if (lo0[1][is] + lo1[1][ks] > 0.0 || hi0[1][is] + hi1[1][ks] < 0.0) continue;
          double a0 = (i + 0.5) * step, a1 = (k + 0.5) * step;
          bool ok = false;
          for (int it = 0; it < 50; ++it) {
            const auto r0 = eval(0, f0, a0), r1 = eval(1, f1, a1);
            const double e0 = r0[0] + r1[0], e1 = r0[1] + r1[1];
            if (std::max(std::abs(e0), std::abs(e1)) < 1e-14) {
              ok = true;
              break;
            }
            const auto d0 = eval(0, f0, a0 + std::numbers::pi / 2);  // derivative of u cos + v sin
            const auto d1 = eval(1, f1, a1 + std::numbers::pi / 2);
            const double det = d0[0] * d1[1] - d1[0] * d0[1];
            if (std::abs(det) < 1e-14) break;
            a0 -= (d1[1] * e0 - d1[0] * e1) / det;
            a1 -= (-d0[1] * e0 + d0[0] * e1) / det;
          }
          if (!ok) {
            const auto r0 = eval(0, f0, a0), r1 = eval(1, f1, a1);
            ok = std::max(std::abs(r0[0] + r1[0]), std::abs(r0[1] + r1[1])) < 1e-11;
          }
          if (!ok) continue;
          a0 = std::remainder(a0, 2.0 * std::numbers::pi);
          a1 = std::remainder(a1, 2.0 * std::numbers::pi);
          const bool dup = std::any_of(roots.begin(), roots.end(), [&](const std::array<double, 2>& r) {
            return std::abs(std::remainder(r[0] - a0, 2.0 * std::numbers::pi)) < 1e-8 &&
                   std::abs(std::remainder(r[1] - a1, 2.0 * std::numbers::pi)) < 1e-8;
          });
          if (!dup) roots.push_back({a0, a1});
        }
      }
      for (const auto& r : roots) {
        OrthogonalBlock q({rotation(r[0], f0 == 0 ? 1 : -1), rotation(r[1], f1 == 0 ? 1 : -1)});
        if (!adm.check(q).satisfied) continue;
        const bool dup = std::any_of(found.begin(), found.end(),
                                     [&](const OrthogonalBlock& o) { return o.max_distance(q) < 1e-8; });
        if (!dup) found.push_back(q);
      }
    }
  return found;
}

}  // namespace oracle
