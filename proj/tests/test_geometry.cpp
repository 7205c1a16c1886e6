#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "ugbound/geometry.hpp"
#include "ugbound/rng.hpp"

using namespace ugbound;

namespace {

UgInstance single_edge() { return UgInstance(2, 2, {{0, 1, 1.0, Permutation::identity(2)}}); }

UgInstance triangle_maxcut() {
  return from_maxcut(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}});
}

}  // namespace

TEST(ArcsinY, Values) {
  EXPECT_DOUBLE_EQ(arcsin_y(1.0), 1.0);
  EXPECT_DOUBLE_EQ(arcsin_y(-1.0), -1.0);
  EXPECT_EQ(arcsin_y(0.0), 0.0);
  EXPECT_NEAR(arcsin_y(0.5), 1.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(arcsin_y(1.0 + 5e-13), 1.0);
  EXPECT_THROW(arcsin_y(1.0 + 1e-9), Error);
  EXPECT_THROW(arcsin_y(-1.5), Error);
  EXPECT_THROW(arcsin_y(std::nan("")), Error);
}

TEST(ArcsinY, OddAndAgreesWithArccosForm) {
  for (int t = -1000; t <= 1000; ++t) {
    const double c = t / 1000.0;
    EXPECT_NEAR(arcsin_y(c), 1.0 - kTwoOverPi * std::acos(c), 1e-12);
    EXPECT_EQ(arcsin_y(-c), -arcsin_y(c));
  }
}

TEST(ArcsinY, SignSplitScalarInequality) {
  for (int t = 0; t <= 1000; ++t) {
    const double x = t / 1000.0;
    EXPECT_LE(arcsin_y(x), x + 1e-12);
    EXPECT_GE(arcsin_y(-x), -x - 1e-12);
  }
}

TEST(UnmatchedProb, ValuesAndIdentity) {
  EXPECT_EQ(unmatched_prob(1, 0), 1.0);
  EXPECT_EQ(unmatched_prob(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(unmatched_prob(0.75, 0.75), 0.375);
  EXPECT_THROW(unmatched_prob(1.1, 0.5), Error);
  EXPECT_THROW(unmatched_prob(0.5, -0.1), Error);
  for (int a = 0; a <= 50; ++a) {
    for (int b = 0; b <= 50; ++b) {
      const double p = a / 50.0;
      const double q = b / 50.0;
      const double u = unmatched_prob(p, q);
      EXPECT_EQ(u, unmatched_prob(q, p));
      EXPECT_GE(u, 0.0);
      EXPECT_LE(u, 1.0);
      EXPECT_NEAR(1.0 - 2.0 * u, (2 * p - 1) * (2 * q - 1), 1e-12);
    }
  }
}

TEST(P4Objective, Embeddings) {
  EXPECT_DOUBLE_EQ(p4_objective(single_edge(), embed_labeling(single_edge(), Labeling{{0, 0}})), 1.0);
  EXPECT_DOUBLE_EQ(p4_objective(single_edge(), embed_labeling(single_edge(), Labeling{{0, 1}})), 0.0);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const UgInstance inst = generate_random(6, 2 + seed % 4, 9, seed);
    const Labeling labeling{oracle::decode(seed * 7919 % oracle::power(inst.k(), 6), 6, inst.k())};
    const GramSolution sol = embed_labeling(inst, labeling);
    EXPECT_NEAR(p4_objective(inst, sol), oracle::matched_weight(inst, labeling.labels), 1e-9);
  }
}

TEST(P4Objective, RejectsNonUnitVectors) {
  GramSolution sol = embed_labeling(single_edge(), Labeling{{0, 0}});
  sol.factors[2] = 0.5;
  EXPECT_THROW(p4_objective(single_edge(), sol), Error);
}

TEST(P4Objective, SyntheticGramReproducesYObjective) {
  // Inner products chosen so that (2/pi) asin returns y_ir and y_ir y_js.
  Rng rng(12);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t n = 5;
    const std::size_t k = 2 + seed % 4;
    const UgInstance inst = generate_random(n, k, 8, seed);
    std::vector<double> p(n * k);
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t r = 0; r < k; ++r) sum += (p[i * k + r] = rng.uniform() + 1e-3);
      for (std::size_t r = 0; r < k; ++r) p[i * k + r] /= sum;
    }
    std::vector<double> y(p.size());
    for (std::size_t s = 0; s < p.size(); ++s) y[s] = 2.0 * p[s] - 1.0;
    const std::size_t stride = k + 1;
    auto y_of = [&](std::size_t slot) { return y[(slot / stride) * k + slot % stride - 1]; };
    auto gram = [&](std::size_t a, std::size_t b) {
      const double half_pi = std::numbers::pi / 2.0;
      if (a == b) return 1.0;
      if (a % stride == 0) return std::sin(half_pi * y_of(b));
      return std::sin(half_pi * y_of(a) * y_of(b));
    };
    const double expected = expected_value_y(inst, YAssignment(n, k, y));
    EXPECT_NEAR(p4_objective_from(inst, gram), expected, 1e-9);
  }
}

TEST(P4ConstraintResidual, TightAndViolated) {
  const UgInstance inst = generate_random(5, 4, 7, 3);
  for (double r : p4_constraint_residual(inst, embed_labeling(inst, Labeling{{0, 3, 1, 2, 2}}))) {
    EXPECT_NEAR(r, 0.0, 1e-12);
  }
  GramSolution aligned;
  aligned.dim = 25;
  aligned.rank = 1;
  aligned.factors.assign(25, 1.0);
  for (double r : p4_constraint_residual(inst, aligned)) EXPECT_NEAR(r, 6.0, 1e-12);
}

TEST(BoundFromSdp, Factor) {
  EXPECT_NEAR(bound_from_sdp(1.0), 0.636619772367581, 1e-9);
  EXPECT_EQ(bound_from_sdp(0.0), 0.0);
  EXPECT_NEAR(bound_from_sdp(std::numbers::pi), 2.0, 1e-15);
  EXPECT_THROW(bound_from_sdp(-1e-3), Error);
  for (double z = 0.125; z < 100.0; z *= 1.7) {
    EXPECT_NEAR(bound_from_sdp(z) / z, 2.0 / std::numbers::pi, 1e-12);
  }
}

TEST(VerifyBounds, SingleEdge) {
  const BoundReport r = verify_bounds(single_edge(), 100);
  ASSERT_TRUE(r.z_exact.has_value());
  EXPECT_EQ(*r.z_exact, 1.0);
  EXPECT_NEAR(r.z1, 1.0, 1e-4);
  EXPECT_NEAR(r.lb, 0.6366, 1e-4);
  EXPECT_TRUE(*r.sound);
  EXPECT_TRUE(*r.theorem2_holds);
}

TEST(VerifyBounds, Planted) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto planted = generate_planted(6, 2 + seed % 3, 8, seed);
    const BoundReport r = verify_bounds(planted.instance, 1u << 12);
    EXPECT_NEAR(r.z1, r.total_weight, 1e-4 * r.total_weight);
    EXPECT_NEAR(r.lb, kTwoOverPi * r.z1, 1e-12 * r.z1);
    EXPECT_TRUE(*r.sound);
    EXPECT_TRUE(*r.theorem2_holds);
    EXPECT_NEAR(*r.ratio, 1.0, 1e-4);
  }
}

TEST(VerifyBounds, TriangleMaxcut) {
  const BoundReport r = verify_bounds(triangle_maxcut(), 100);
  EXPECT_EQ(*r.z_exact, 2.0);
  EXPECT_GE(r.z1, 2.0 - 1e-4);
  EXPECT_LE(r.z1, 3.0 + 1e-4);
  EXPECT_TRUE(*r.sound);
}

TEST(VerifyBounds, FlagsOnlyWithExactValue) {
  const BoundReport r = verify_bounds(generate_random(6, 3, 8, 1), 100);
  EXPECT_FALSE(r.z_exact.has_value());
  EXPECT_FALSE(r.sound.has_value());
  EXPECT_FALSE(r.theorem2_holds.has_value());
  EXPECT_FALSE(r.ratio.has_value());
}

TEST(VerifyBounds, DenseMaxcutBreaksClaimedBound) {
  // Complete graph on five vertices: the best cut is 6, the relaxation
  // reaches all 10 edges, and (2/pi) * 10 exceeds 6.
  std::vector<WeightedPair> k5;
  for (Vertex i = 0; i < 5; ++i)
    for (Vertex j = i + 1; j < 5; ++j) k5.push_back({i, j, 1.0});
  const BoundReport r = verify_bounds(from_maxcut(5, k5), 100);
  EXPECT_EQ(*r.z_exact, 6.0);
  EXPECT_NEAR(r.z1, 10.0, 1e-4);
  EXPECT_TRUE(*r.sound);
  EXPECT_FALSE(*r.theorem2_holds);
}
