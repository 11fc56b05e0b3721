#pragma once

#include <vector>

#include "svarwb/enumerate.hpp"
#include "svarwb/restrictions.hpp"

namespace fixtures {

using svarwb::Matrix;

svarwb::TransformSpec a0_transform();
svarwb::TransformSpec impact_transform();
svarwb::TransformSpec impact_long_run_transform();

// Three variables, two regimes, restrictions on A0 with a stability restriction
// on the (1,1) entry.
svarwb::RestrictionSet trivariate_set();
// Two variables, two regimes, impact and long-run stability of variable 2's response to shock 1.
svarwb::RestrictionSet stability_set();
// Three variables, two regimes, impact restrictions that fail to identify.
svarwb::RestrictionSet nonidentified_set();
// Two variables, two regimes: IR_1(1,1) = 0 at impact and IR(2,1) stable across regimes; no sign normalization.
svarwb::RestrictionSet bivariate_stable_set();

struct SpecFixture {
  const char* name;
  svarwb::RestrictionSet spec;
  int n;
  int s;
  svarwb::TransformSpec transform;
};

// Recursively just-identified specs with n <= 3 and s <= 2.
std::vector<SpecFixture> recursive_fixtures();

// Structural regimes satisfying trivariate_set, one lag.
std::vector<svarwb::StructuralRegime> trivariate_structural();
svarwb::RegimeModel trivariate_model();

Matrix random_spd(int n, svarwb::Rng& rng);
Matrix random_stable_lag(int n, double radius, svarwb::Rng& rng);
svarwb::RegimeModel random_model(int n, int l, int s, svarwb::Rng& rng);

Matrix mat(std::initializer_list<std::initializer_list<double>> rows);

}  // namespace fixtures
