#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <complex>
#include <set>

#include "betamoments/partitions.hpp"

using namespace betamoments;
using rational = boost::multiprecision::cpp_rational;

namespace {

// Independent generator: all weakly decreasing sequences with bounded sum, by brute force.
void brute(int remaining, int largest, int parts_left, std::vector<int>& cur, std::set<std::vector<int>>& out) {
  out.insert(cur);
  if (parts_left == 0) return;
  for (int p = 1; p <= std::min(remaining, largest); ++p) {
    cur.push_back(p);
    brute(remaining - p, p, parts_left - 1, cur, out);
    cur.pop_back();
  }
}

std::size_t brute_count(int w, int max_parts) {
  std::set<std::vector<int>> out;
  std::vector<int> cur;
  brute(w, w, max_parts, cur, out);
  return out.size();
}

// Box (i, j) in the 1-based convention of the usual diagram pictures.
BoxStats stats1(const Partition& k, int i, int j) { return box_stats(k, i - 1, j - 1); }

}  // namespace

TEST(Partition, RejectsInvalidParts) {
  EXPECT_THROW(Partition({2, 3}), std::invalid_argument);
  EXPECT_THROW(Partition({2, 0}), std::invalid_argument);
  EXPECT_NO_THROW(Partition({3, 3, 1}));
}

TEST(Partition, WeightAndColumns) {
  Partition k{4, 2, 1};
  EXPECT_EQ(k.weight(), 7);
  EXPECT_EQ(k.num_parts(), 3);
  EXPECT_EQ(k.column_length(0), 3);
  EXPECT_EQ(k.column_length(1), 2);
  EXPECT_EQ(k.column_length(3), 1);
  EXPECT_EQ(k.conjugate(), Partition({3, 2, 1, 1}));
  EXPECT_EQ(Partition().num_parts(), 0);
  EXPECT_EQ(Partition().weight(), 0);
}

TEST(Enumerate, SmallCases) {
  auto two = enumerate_partitions(2);
  ASSERT_EQ(two.size(), 4u);
  EXPECT_EQ(two[0], Partition());
  EXPECT_EQ(two[1], Partition({1}));
  EXPECT_EQ(two[2], Partition({2}));
  EXPECT_EQ(two[3], Partition({1, 1}));

  auto zero = enumerate_partitions(0);
  ASSERT_EQ(zero.size(), 1u);
  EXPECT_TRUE(zero[0].empty());

  auto seven = enumerate_partitions(7, 3);
  EXPECT_NE(std::find(seven.begin(), seven.end(), Partition({4, 2, 1})), seven.end());
  for (const auto& k : seven) EXPECT_LE(k.num_parts(), 3);
}

TEST(Enumerate, CountsMatchBruteForce) {
  for (int w = 0; w <= 12; ++w)
    for (int p : {1, 2, 3, 12}) EXPECT_EQ(enumerate_partitions(w, p).size(), brute_count(w, p)) << w << " " << p;
}

TEST(Enumerate, OrderIsWeightMajorReverseLex) {
  auto all = enumerate_partitions(8);
  for (std::size_t i = 1; i < all.size(); ++i) {
    const auto& a = all[i - 1];
    const auto& b = all[i];
    if (a.weight() == b.weight()) {
      EXPECT_TRUE(std::lexicographical_compare(b.parts().begin(), b.parts().end(), a.parts().begin(), a.parts().end()));
    } else {
      EXPECT_LT(a.weight(), b.weight());
    }
  }
}

TEST(BoxStats, PaperDiagram) {
  Partition k{4, 2, 1};
  EXPECT_EQ(stats1(k, 1, 1), (BoxStats{3, 2, 0, 0}));
  EXPECT_EQ(stats1(k, 1, 4), (BoxStats{0, 0, 3, 0}));
  EXPECT_EQ(stats1(k, 2, 2), (BoxStats{0, 0, 1, 1}));
  EXPECT_EQ(stats1(k, 3, 1), (BoxStats{0, 0, 0, 2}));
  EXPECT_EQ(stats1(Partition({1}), 1, 1), (BoxStats{0, 0, 0, 0}));
}

TEST(BoxStats, HookConsistencyAndBoxCount) {
  for (const auto& k : enumerate_partitions(8)) {
    int boxes = 0;
    for_each_box(k, [&](int i, int j, const BoxStats& b) {
      ++boxes;
      EXPECT_EQ(b, box_stats(k, i, j));
      EXPECT_EQ(b.arm + b.coarm + 1, k.row_length(i));
      EXPECT_EQ(b.leg + b.coleg + 1, k.column_length(j));
    });
    EXPECT_EQ(boxes, k.weight());
  }
}

TEST(Pochhammer, Basics) {
  EXPECT_EQ(pochhammer(3.7, 0), 1.0);
  EXPECT_EQ(pochhammer(-2.0, 2), 2.0);
  EXPECT_EQ(pochhammer(-2.0, 3), 0.0);
  const std::complex<double> z(0.5, 1.0);
  const auto p = pochhammer(z, 2);
  EXPECT_NEAR(std::abs(p - z * (z + 1.0)), 0.0, 1e-15);
  EXPECT_NEAR(log_pochhammer(2.5, 4), std::log(pochhammer(2.5, 4)), 1e-13);
  EXPECT_EQ(pochhammer(rational(1, 2), 3), rational(15, 8));
}

TEST(GenPochhammer, Definition) {
  EXPECT_EQ(gen_pochhammer(2.3, Partition(), 0.7), 1.0);
  EXPECT_DOUBLE_EQ(gen_pochhammer(2.3, Partition({1}), 0.7), 2.3);
  // (4 tau / beta, (1,1), beta/2) = (4 tau/beta)(4 tau/beta - 2/beta), exactly, at beta = 3, tau = 5/2
  const rational beta(3), tau(5, 2);
  const rational x = rational(4) * tau / beta;
  EXPECT_EQ(gen_pochhammer(x, Partition({1, 1}), rational(beta / 2)), x * (x - rational(2) / beta));
  for (int k = 0; k <= 6; ++k)
    EXPECT_DOUBLE_EQ(gen_pochhammer(1.25, Partition(k ? std::vector<int>{k} : std::vector<int>{}), 0.4),
                     pochhammer(1.25, k));
}
