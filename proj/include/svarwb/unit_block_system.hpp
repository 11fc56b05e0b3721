#pragma once

#include <vector>

#include "svarwb/linalg.hpp"

namespace svarwb {

struct UnitBlockSolutions {
  std::vector<Vector> solutions;
  bool exact = true;  // false when found by multi-start search
};

// All real lambda with lambda' M_p lambda = 1 for every p, where each M_p is
// symmetric positive semidefinite of size s x s. One and two unknowns are
// solved in closed form; larger systems by seeded multi-start Newton.
// Throws DegenerateNullSpace when the solutions form a continuum.
UnitBlockSolutions solve_unit_blocks(const std::vector<Matrix>& forms, Rng& rng, int starts_per_unknown = 64);

}  // namespace svarwb
