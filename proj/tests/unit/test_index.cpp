#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cijump/analyzer.hpp"
#include "cijump/index.hpp"

using namespace cijump;

namespace {

OrbitCatalogue reference_ellipsoid() {
  return ellipsoid_catalogue({parse_scalar("2-sqrt(3)"), ExactScalar(1), ExactScalar::sqrt(3)});
}

OrbitSpectrum rotations(std::initializer_list<const char*> rhos) {
  OrbitSpectrum s;
  s.label = "y";
  for (const char* r : rhos) s.blocks.push_back(TransverseBlock::rotation(parse_scalar(r)));
  s.action = PiMultiple(ExactScalar(1));
  return s;
}

// Action of the circle (1/2) alpha (p^2 + q^2) = 1 in one coordinate plane,
// integrated as (1/2) oint (p dq - q dp) with the midpoint rule.
double circular_action(double alpha, int steps = 20000) {
  const double r = std::sqrt(2.0 / alpha);
  double sum = 0;
  for (int s = 0; s < steps; ++s) {
    const double t0 = 2 * std::numbers::pi * s / steps;
    const double t1 = 2 * std::numbers::pi * (s + 1) / steps;
    const double p0 = r * std::cos(t0), q0 = r * std::sin(t0);
    const double p1 = r * std::cos(t1), q1 = r * std::sin(t1);
    sum += 0.5 * ((p0 + p1) / 2 * (q1 - q0) - (q0 + q1) / 2 * (p1 - p0));
  }
  return sum;
}

}  // namespace

TEST_CASE("mean index of the reference ellipsoid") {
  auto c = reference_ellipsoid();
  REQUIRE(c.orbits.size() == 3);
  CHECK(mean_index(c.orbits[0]) == parse_scalar("12+6*sqrt(3)"));
  CHECK(mean_index(c.orbits[1]) == ExactScalar(6));
  CHECK(mean_index(c.orbits[2]) == parse_scalar("2*sqrt(3)"));
  // 6/(2 - sqrt 3) and 6/sqrt 3 in unrationalized form.
  CHECK(mean_index(c.orbits[0]) == ExactScalar(6) / parse_scalar("2-sqrt(3)"));
  CHECK(mean_index(c.orbits[2]) == ExactScalar(6) / ExactScalar::sqrt(3));
}

TEST_CASE("ellipsoid means match 2 sum alpha_j / alpha_i") {
  const std::vector<std::vector<ExactScalar>> weights = {
      {parse_scalar("2-sqrt(3)"), ExactScalar(1), ExactScalar::sqrt(3)},
      {ExactScalar(1), ExactScalar::sqrt(2)},
      {ExactScalar(1), ExactScalar::fraction(3, 2), ExactScalar(2), ExactScalar(5)},
  };
  for (const auto& alpha : weights) {
    auto c = ellipsoid_catalogue(alpha);
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      ExactScalar expected(0);
      for (const auto& a : alpha) expected += 2 * (a / alpha[i]);
      CHECK(mean_index(c.orbits[i]) == expected);
    }
  }
}

TEST_CASE("ellipsoid actions match circular orbit quadrature") {
  const std::vector<ExactScalar> alpha = {ExactScalar(1), ExactScalar::sqrt(2)};
  auto c = ellipsoid_catalogue(alpha);
  CHECK(c.orbits[0].action.coefficient() == ExactScalar(2));
  CHECK(c.orbits[1].action.coefficient() == ExactScalar(2) / ExactScalar::sqrt(2));
  CHECK(mean_index(c.orbits[0]) == parse_scalar("2+2*sqrt(2)"));
  CHECK(mean_index(c.orbits[1]) == parse_scalar("2+sqrt(2)"));

  auto e = reference_ellipsoid();
  for (const auto& cat : {c, e}) {
    for (std::size_t i = 0; i < cat.orbits.size(); ++i) {
      const double action = cat.orbits[i].action.coefficient().to_double() * std::numbers::pi;
      CHECK(action == doctest::Approx(circular_action(cat.alpha[i].to_double())).epsilon(1e-7));
    }
  }
}

TEST_CASE("two hyperbolic blocks have mean 2") {
  OrbitSpectrum s;
  s.blocks = {TransverseBlock::of_kind(BlockKind::kHyperbolicPos), TransverseBlock::of_kind(BlockKind::kHyperbolicPos)};
  s.action = PiMultiple(ExactScalar(1));
  CHECK(mean_index(s) == ExactScalar(2));
  CHECK(iterate_indices(s, 7) == IndexPair{14, 14});
  auto convex = is_dynamically_convex(s, 3);
  CHECK_FALSE(convex.convex);
  CHECK(convex.margin == -2);
}

TEST_CASE("iterate indices of the reference ellipsoid") {
  auto c = reference_ellipsoid();
  CHECK(iterate_indices(c.orbits[2], 1) == IndexPair{4, 4});
  CHECK(iterate_indices(c.orbits[0], 1) == IndexPair{22, 22});
  CHECK(iterate_indices(c.orbits[1], 1) == IndexPair{2 + 1 + 3, 2 + 1 + 3});
}

TEST_CASE("degenerate rotation") {
  auto s = rotations({"1/2"});
  CHECK(block_contribution(s.blocks[0], 2) == IndexPair{1, 3});
  CHECK(iterate_indices(s, 2) == IndexPair{5, 7});
  CHECK(iterate_indices(s, 1) == IndexPair{3, 3});
}

TEST_CASE("trivial and hyperbolic blocks") {
  CHECK(block_contribution(TransverseBlock::of_kind(BlockKind::kTrivialPlus), 3) == IndexPair{-1, 0});
  CHECK(block_contribution(TransverseBlock::of_kind(BlockKind::kTrivialMinus), 3) == IndexPair{0, 1});
  CHECK(block_contribution(TransverseBlock::of_kind(BlockKind::kHyperbolicPos), 3) == IndexPair{0, 0});
  CHECK(block_contribution(TransverseBlock::of_kind(BlockKind::kHyperbolicNeg), 3) == IndexPair{3, 3});
  OrbitSpectrum s;
  s.blocks = {TransverseBlock::of_kind(BlockKind::kHyperbolicNeg)};
  s.action = PiMultiple(ExactScalar(1));
  CHECK(mean_index(s) == ExactScalar(3));
}

TEST_CASE("negative iterates") {
  auto s = rotations({"3/10", "sqrt(3)"});
  for (std::int64_t l = 1; l <= 12; ++l) {
    auto forward = iterate_indices(s, l);
    auto reversed = iterate_indices(s, -l, NegativeIterateConvention::kPathReversal);
    CHECK(reversed.lower == -forward.upper);
    CHECK(reversed.upper == -forward.lower);
  }
  // Formula convention at k = -1: -2 + (2 floor(-3/10) + 1) + (2 floor(-sqrt 3) + 1).
  CHECK(iterate_indices(s, -1) == IndexPair{-2 - 1 - 3, -2 - 1 - 3});
  CHECK_THROWS_AS(iterate_indices(s, 0), IndexError);
}

TEST_CASE("validate rejects non-positive rotation") {
  auto s = rotations({"0"});
  CHECK_THROWS_AS(validate(s), IndexError);
  auto t = rotations({"1-sqrt(3)"});
  CHECK_THROWS_AS(validate(t), IndexError);
}

TEST_CASE("signature multiplicities") {
  auto c = reference_ellipsoid();
  for (std::int64_t k = 1; k <= 20; ++k) {
    for (const auto& o : c.orbits) {
      if (o.label == "x2") continue;
      CHECK(signature_multiplicities(o, k) == SignatureMultiplicities{0, 0});
    }
  }
  CHECK(signature_multiplicities(c.orbits[1], 5) == SignatureMultiplicities{0, 0});
  auto half = rotations({"1/2", "sqrt(3)"});
  CHECK(signature_multiplicities(half, 2) == SignatureMultiplicities{1, 1});
  CHECK(signature_multiplicities(half, 3) == SignatureMultiplicities{0, 0});
  OrbitSpectrum t;
  t.blocks = {TransverseBlock::of_kind(BlockKind::kTrivialPlus), TransverseBlock::rotation(ExactScalar::sqrt(3))};
  t.action = PiMultiple(ExactScalar(1));
  CHECK(signature_multiplicities(t, 1) == SignatureMultiplicities{0, 0});
}

TEST_CASE("dynamic convexity margins") {
  auto c = reference_ellipsoid();
  auto x3 = is_dynamically_convex(c.orbits[2], 3);
  CHECK(x3.convex);
  CHECK(x3.margin == 0);
  auto x1 = is_dynamically_convex(c.orbits[0], 3);
  CHECK(x1.convex);
  CHECK(x1.margin == 18);
}

TEST_CASE("action over mean index") {
  auto c = reference_ellipsoid();
  CHECK(c.orbits[1].action.coefficient() == ExactScalar(2));
  CHECK(c.orbits[2].action.coefficient() == ExactScalar(2) / ExactScalar::sqrt(3));
  for (const auto& o : c.orbits) {
    CHECK(mean_action_ratio(o).coefficient() == ExactScalar::fraction(1, 3));
    for (std::int64_t k : {2, 7, 50}) CHECK(mean_action_ratio(iterate(o, k)) == mean_action_ratio(o));
  }
}

TEST_CASE("mean index is linear under iteration") {
  auto c = reference_ellipsoid();
  auto mixed = rotations({"1/2", "2-sqrt(3)", "5/3"});
  for (const auto& o : {c.orbits[0], c.orbits[2], mixed}) {
    for (std::int64_t k = 1; k <= 100; ++k) CHECK(mean_index(iterate(o, k)) == ExactScalar(k) * mean_index(o));
  }
}

TEST_CASE("crossing count oracle on single blocks") {
  auto r = TransverseBlock::rotation(ExactScalar::fraction(3, 10));
  CHECK(oracle_block_contribution(r, 1, 256) == IndexPair{1, 1});
  CHECK(oracle_block_contribution(r, 4, 256) == IndexPair{3, 3});
  auto h = TransverseBlock::rotation(ExactScalar::fraction(1, 2));
  CHECK(oracle_block_contribution(h, 2, 256) == IndexPair{1, 3});
  for (auto kind : {BlockKind::kTrivialPlus, BlockKind::kTrivialMinus, BlockKind::kHyperbolicPos,
                    BlockKind::kHyperbolicNeg}) {
    auto b = TransverseBlock::of_kind(kind);
    for (std::int64_t k = 1; k <= 5; ++k) CHECK(oracle_block_contribution(b, k, 256) == block_contribution(b, k));
  }
}

TEST_CASE("crossing count oracle agrees with the block formulas") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> num(1, 60), den(1, 12), kd(1, 30), coeff(-3, 3);
  int degenerate = 0;
  for (int trial = 0; trial < 60; ++trial) {
    OrbitSpectrum s;
    s.action = PiMultiple(ExactScalar(1));
    const int blocks = 1 + trial % 3;
    for (int b = 0; b < blocks; ++b) {
      ExactScalar rho(Rational(num(rng), den(rng)));
      if (b % 2 == 1) {
        ExactScalar cand = rho + ExactScalar(coeff(rng)) * ExactScalar::sqrt(3);
        if (cand > ExactScalar(0)) rho = cand;
      }
      s.blocks.push_back(TransverseBlock::rotation(rho));
    }
    const std::int64_t k = kd(rng);
    const auto exact = iterate_indices(s, k);
    if (exact.degeneracy() != 0) ++degenerate;
    CHECK(crossing_count_oracle(s.blocks, k, 256) == exact);
  }
  CHECK(degenerate > 0);
}
