#pragma once

#include <optional>
#include <vector>

namespace fairthresh::linalg {

using Matrix = std::vector<std::vector<double>>;

// Solve the square system a*x = b by Gaussian elimination with partial
// pivoting. Returns nullopt when the matrix is singular to working
// precision (pivot below `pivot_tol`).
std::optional<std::vector<double>> solve_dense(Matrix a, std::vector<double> b,
                                               double pivot_tol = 1e-11);

// Ordinary least squares via normal equations with a small ridge jitter on
// the diagonal for conditioning. `rows` are the regressor rows; a column of
// ones is appended internally for the intercept. Returns (weights, intercept).
std::pair<std::vector<double>, double> ols_fit(const Matrix& rows,
                                               const std::vector<double>& target,
                                               double ridge = 1e-8);

}  // namespace fairthresh::linalg
