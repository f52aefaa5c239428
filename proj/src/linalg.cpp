#include "fairthresh/linalg.hpp"

#include <cmath>
#include <cstddef>

#include "fairthresh/error.hpp"

namespace fairthresh::linalg {

std::optional<std::vector<double>> solve_dense(Matrix a, std::vector<double> b,
                                               double pivot_tol) {
  const std::size_t n = a.size();
  if (b.size() != n) throw ConfigError("solve_dense: dimension mismatch");
  for (const auto& row : a) {
    if (row.size() != n) throw ConfigError("solve_dense: matrix not square");
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < pivot_tol) return std::nullopt;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    const double inv = 1.0 / a[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a[r][col] * inv;
      if (factor == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double v = b[i];
    for (std::size_t c = i + 1; c < n; ++c) v -= a[i][c] * x[c];
    x[i] = v / a[i][i];
  }
  return x;
}

std::pair<std::vector<double>, double> ols_fit(const Matrix& rows,
                                               const std::vector<double>& target,
                                               double ridge) {
  const std::size_t n = rows.size();
  if (n == 0 || target.size() != n) {
    throw DataError("ols_fit: empty or mismatched regression inputs");
  }
  const std::size_t p = rows.front().size();
  const std::size_t d = p + 1;  // + intercept
  Matrix xtx(d, std::vector<double>(d, 0.0));
  std::vector<double> xty(d, 0.0);
  std::vector<double> row(d, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != p) throw DataError("ols_fit: ragged feature rows");
    for (std::size_t j = 0; j < p; ++j) row[j] = rows[i][j];
    row[p] = 1.0;
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) xtx[a][b] += row[a] * row[b];
      xty[a] += row[a] * target[i];
    }
  }
  for (std::size_t a = 0; a < d; ++a) xtx[a][a] += ridge;
  auto beta = solve_dense(xtx, xty);
  if (!beta) throw DataError("ols_fit: singular normal equations");
  std::vector<double> weights(beta->begin(), beta->begin() + static_cast<long>(p));
  return {std::move(weights), (*beta)[p]};
}

}  // namespace fairthresh::linalg
