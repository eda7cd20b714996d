#include "ash/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "ash/simd/distance.hpp"

namespace ash {

Assignment solve_lsap(const CostMatrix& c) {
  const std::size_t n = c.n();
  if (n == 0) throw std::invalid_argument("solve_lsap: empty matrix");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!std::isfinite(c.at(i, j)))
        throw std::invalid_argument("solve_lsap: non-finite cost entry");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // Shortest augmenting path with potentials; 0 is a virtual root column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0);  // column -> row (1-based)
  std::vector<std::size_t> way(n + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      const double* row = c.row(i0 - 1);
      double delta = kInf;
      std::size_t j1 = 0;
      const double ui0 = u[i0];
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = row[j - 1] - ui0 - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment result;
  result.perm.resize(n);
  for (std::size_t j = 1; j <= n; ++j) result.perm[match[j] - 1] = j - 1;
  for (std::size_t i = 0; i < n; ++i) result.total_cost += c.at(i, result.perm[i]);
  return result;
}

Assignment brute_force_lsap(const CostMatrix& c) {
  const std::size_t n = c.n();
  if (n == 0) throw std::invalid_argument("brute_force_lsap: empty matrix");
  if (n > 10) throw std::invalid_argument("brute_force_lsap: n > 10 refused");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Assignment best;
  best.total_cost = std::numeric_limits<double>::infinity();
  // std::next_permutation enumerates in lexicographic order, so strict
  // improvement keeps the lexicographically smallest optimum.
  do {
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) cost += c.at(i, perm[i]);
    if (cost < best.total_cost) {
      best.total_cost = cost;
      best.perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

PrelinkResult prelink(const std::vector<double>& ex, const std::vector<double>& ey,
                      const std::vector<double>& cx, const std::vector<double>& cy,
                      const std::vector<int>& ckey, double threshold) {
  if (threshold < 0.0) throw std::invalid_argument("prelink: negative threshold");
  const std::size_t nrows = ex.size();
  const std::size_t ncols = cx.size();

  // Distinct record towers in ascending key order; columns grouped per tower.
  std::map<int, std::vector<std::size_t>> cols_by_key;
  for (std::size_t j = 0; j < ncols; ++j) cols_by_key[ckey[j]].push_back(j);

  std::vector<int> keys;
  std::vector<double> kx, ky;
  keys.reserve(cols_by_key.size());
  for (const auto& [key, cols] : cols_by_key) {
    keys.push_back(key);
    kx.push_back(cx[cols.front()]);
    ky.push_back(cy[cols.front()]);
  }

  // Rows eligible for each tower, ascending row index by construction.
  std::map<int, std::vector<std::size_t>> rows_by_key;
  for (std::size_t i = 0; i < nrows; ++i) {
    if (keys.empty()) break;
    const std::size_t k = simd::nearest_point(ex[i], ey[i], kx.data(), ky.data(), keys.size());
    const double dx = kx[k] - ex[i];
    const double dy = ky[k] - ey[i];
    if (std::sqrt(dx * dx + dy * dy) <= threshold) rows_by_key[keys[k]].push_back(i);
  }

  PrelinkResult result;
  std::vector<char> row_linked(nrows, 0), col_linked(ncols, 0);
  for (const auto& [key, rows] : rows_by_key) {
    const auto& cols = cols_by_key[key];
    const std::size_t take = std::min(rows.size(), cols.size());
    for (std::size_t k = 0; k < take; ++k) {
      result.links.emplace_back(rows[k], cols[k]);
      row_linked[rows[k]] = 1;
      col_linked[cols[k]] = 1;
    }
  }
  for (std::size_t i = 0; i < nrows; ++i)
    if (!row_linked[i]) result.rows_left.push_back(i);
  for (std::size_t j = 0; j < ncols; ++j)
    if (!col_linked[j]) result.cols_left.push_back(j);
  return result;
}

}  // namespace ash
