#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace svarwb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using Rng = std::mt19937_64;

// Singular values below sigma_max * max(rows, cols) * eps * 64 count as zero.
double rank_tolerance(const Matrix& a);
Index numerical_rank(const Matrix& a);
Index numerical_rank(const Matrix& a, double tolerance);

// Orthonormal basis of {x : a x = 0}. A matrix with zero rows has the identity as basis.
Matrix null_space(const Matrix& a);

// Null basis read off the reduced row echelon form: one column per free
// variable, with a 1 in the free slot. Columns are ordered by free index.
Matrix echelon_null_basis(const Matrix& a);

// Modified Gram-Schmidt, processing columns left to right.
Matrix orthonormalize_columns(const Matrix& a);

double orthogonality_error(const Matrix& q);

Matrix haar_orthogonal(Index n, Rng& rng);
Vector standard_normal_vector(Index n, Rng& rng);
Vector random_unit_vector(Index n, Rng& rng);

// Seeds an independent stream for a numbered task so results do not
// depend on the order in which tasks are processed.
Rng stream_rng(std::uint64_t seed, std::uint64_t stream);

}  // namespace svarwb
