#pragma once

// Integer partitions (Young diagrams), box statistics and Pochhammer symbols.
//
// Rows and columns are 0-based throughout: the box in the top-left corner of
// a diagram is (0, 0), and parts()[0] is the largest part.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <compare>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "betamoments/errors.hpp"

namespace betamoments {

class Partition {
 public:
  Partition() = default;

  /// Throws std::invalid_argument unless parts are positive and weakly decreasing.
  explicit Partition(std::vector<int> parts) : parts_(std::move(parts)) {
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (parts_[i] <= 0)
        throw std::invalid_argument("partition parts must be positive");
      if (i > 0 && parts_[i] > parts_[i - 1])
        throw std::invalid_argument("partition parts must be weakly decreasing");
    }
  }

  Partition(std::initializer_list<int> parts) : Partition(std::vector<int>(parts)) {}

  std::span<const int> parts() const noexcept { return parts_; }
  int num_parts() const noexcept { return static_cast<int>(parts_.size()); }
  bool empty() const noexcept { return parts_.empty(); }

  int weight() const noexcept {
    int w = 0;
    for (int p : parts_) w += p;
    return w;
  }

  /// Length of row i; 0 past the last part.
  int row_length(int i) const noexcept {
    return i < num_parts() ? parts_[static_cast<std::size_t>(i)] : 0;
  }

  /// Length of column j (the j-th part of the conjugate partition).
  int column_length(int j) const noexcept {
    int n = 0;
    while (n < num_parts() && parts_[static_cast<std::size_t>(n)] > j) ++n;
    return n;
  }

  bool contains(int i, int j) const noexcept {
    return i >= 0 && j >= 0 && j < row_length(i);
  }

  Partition conjugate() const {
    std::vector<int> c;
    if (!parts_.empty()) {
      c.reserve(static_cast<std::size_t>(parts_.front()));
      for (int j = 0; j < parts_.front(); ++j) c.push_back(column_length(j));
    }
    return Partition(std::move(c));
  }

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(parts_[i]);
    }
    return s + ")";
  }

  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition&, const Partition&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Partition& p) {
    return os << p.to_string();
  }

 private:
  std::vector<int> parts_;
};

struct BoxStats {
  int arm;     // boxes to the right
  int leg;     // boxes below
  int coarm;   // boxes to the left
  int coleg;   // boxes above

  friend bool operator==(const BoxStats&, const BoxStats&) = default;
};

/// Arm, leg, co-arm and co-leg of box (row, col). The box must lie in the diagram.
inline BoxStats box_stats(const Partition& kappa, int row, int col) {
  assert(kappa.contains(row, col));
  if (!kappa.contains(row, col))
    throw std::out_of_range("box_stats: box outside the diagram");
  return BoxStats{kappa.row_length(row) - col - 1, kappa.column_length(col) - row - 1,
                  col, row};
}

/// Calls f(row, col, BoxStats) for every box, row-major.
template <class F>
void for_each_box(const Partition& kappa, F&& f) {
  const auto conj = kappa.conjugate();
  for (int i = 0; i < kappa.num_parts(); ++i) {
    const int len = kappa.row_length(i);
    for (int j = 0; j < len; ++j)
      f(i, j, BoxStats{len - j - 1, conj.row_length(j) - i - 1, j, i});
  }
}

namespace detail {

// Partitions of exactly `weight` with parts <= largest and at most max_parts
// parts, appended in reverse-lexicographic order.
inline void partitions_of(int weight, int largest, int max_parts, std::vector<int>& prefix,
                          std::vector<Partition>& out) {
  if (weight == 0) {
    out.emplace_back(prefix);
    return;
  }
  if (max_parts == 0) return;
  for (int p = std::min(weight, largest); p >= 1; --p) {
    // remaining weight must fit into the remaining rows
    if (static_cast<long>(p) * max_parts < weight) break;
    prefix.push_back(p);
    partitions_of(weight - p, p, max_parts - 1, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace detail

/// Every partition of exactly `weight` with at most `max_parts` parts,
/// in reverse-lexicographic order ((2) before (1,1)).
inline std::vector<Partition> partitions_of_weight(int weight,
                                                   std::optional<int> max_parts = std::nullopt) {
  if (weight < 0) throw std::invalid_argument("partitions_of_weight: negative weight");
  std::vector<Partition> out;
  std::vector<int> prefix;
  detail::partitions_of(weight, weight, max_parts.value_or(weight), prefix, out);
  return out;
}

/// Every partition with weight <= max_weight and at most max_parts parts,
/// ordered weight-major and reverse-lexicographically within a weight.
inline std::vector<Partition> enumerate_partitions(int max_weight,
                                                   std::optional<int> max_parts = std::nullopt) {
  if (max_weight < 0) throw std::invalid_argument("enumerate_partitions: negative weight");
  std::vector<Partition> out;
  for (int w = 0; w <= max_weight; ++w) {
    auto shell = partitions_of_weight(w, max_parts);
    out.insert(out.end(), std::make_move_iterator(shell.begin()),
               std::make_move_iterator(shell.end()));
  }
  return out;
}

/// Rising factorial (x)_k = x (x+1) ... (x+k-1); (x)_0 = 1.
template <class T>
T pochhammer(const T& x, int k) {
  T r(1);
  for (int j = 0; j < k; ++j) r *= x + T(j);
  return r;
}

/// log (x)_k for x > 0, via log-Gamma.
inline double log_pochhammer(double x, int k) {
  detail::require(x > 0.0, "log_pochhammer: x must be positive");
  return std::lgamma(x + k) - std::lgamma(x);
}

/// Generalised Pochhammer symbol [x]_kappa^(alpha) = prod_j (x - j/alpha)_{kappa_j},
/// j running over the 0-based row index.
template <class T>
T gen_pochhammer(const T& x, const Partition& kappa, const T& alpha) {
  T r(1);
  for (int j = 0; j < kappa.num_parts(); ++j)
    r *= pochhammer(T(x - T(j) / alpha), kappa.row_length(j));
  return r;
}

}  // namespace betamoments
