#pragma once

#include <cstddef>
#include <vector>

namespace ash {

// Dense square cost matrix, row-major. Entries are meters for distance costs
// and dimensionless for information-gain costs.
class CostMatrix {
 public:
  CostMatrix() = default;
  explicit CostMatrix(std::size_t n, double fill = 0.0)
      : n_(n), data_(n * n, fill) {}

  std::size_t n() const { return n_; }
  double& at(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  double* row(std::size_t i) { return data_.data() + i * n_; }
  const double* row(std::size_t i) const { return data_.data() + i * n_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

struct Assignment {
  std::vector<std::size_t> perm;  // perm[i] = column assigned to row i
  double total_cost = 0.0;
};

// Exact minimum-cost perfect matching via the O(n^3) shortest augmenting
// path formulation with row/column potentials. Throws on n == 0 or a
// non-finite entry. Ties between optimal assignments resolve arbitrarily.
Assignment solve_lsap(const CostMatrix& c);

// Exhaustive test oracle over all n! permutations, n <= 10. Ties break to the
// lexicographically smallest permutation.
Assignment brute_force_lsap(const CostMatrix& c);

// One already-linked (row, record) pair plus the indices that survive into
// the reduced LSAP.
struct PrelinkResult {
  std::vector<std::pair<std::size_t, std::size_t>> links;  // (row, col)
  std::vector<std::size_t> rows_left;
  std::vector<std::size_t> cols_left;
};

// Greedy dimension reduction before an LSAP solve. Row i carries a next
// location estimate (ex[i], ey[i]); column j carries a record at tower
// coordinates (cx[j], cy[j]) with tower key ckey[j]. For each tower g,
// rows whose estimate is within `threshold` meters of g and whose nearest
// record tower is g are linked to g's records, min(#rows, #records) pairs,
// rows in ascending index against records in canonical (input) order.
PrelinkResult prelink(const std::vector<double>& ex, const std::vector<double>& ey,
                      const std::vector<double>& cx, const std::vector<double>& cy,
                      const std::vector<int>& ckey, double threshold);

}  // namespace ash
