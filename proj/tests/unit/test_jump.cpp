#include <doctest.h>

#include <random>

#include "cijump/analyzer.hpp"
#include "cijump/catalogue_io.hpp"
#include "cijump/jump.hpp"
#include "cijump/report.hpp"

#include <fstream>
#include <sstream>

using namespace cijump;

namespace {

OrbitCatalogue reference_ellipsoid() {
  return ellipsoid_catalogue({parse_scalar("2-sqrt(3)"), ExactScalar(1), ExactScalar::sqrt(3)});
}

TorusVector single(const char* entry) {
  TorusVector v;
  v.entries = {parse_scalar(entry)};
  v.origins = {CoordinateOrigin{}};
  v.mean_indices = {ExactScalar(1) / parse_scalar(entry)};
  v.radicand = v.entries[0].radicand();
  return v;
}

OrthantVertex vertex(std::vector<int> chi) {
  OrthantVertex o;
  o.chi = std::move(chi);
  return o;
}

JumpSolution fixture_solution() {
  std::ifstream in(std::string(CIJUMP_FIXTURE_DIR) + "/ellipsoid_n3.solution.json");
  std::stringstream ss;
  ss << in.rdbuf();
  return solution_from_json(Json::parse(ss.str()));
}

}  // namespace

TEST_CASE("torus vector of a rational single orbit") {
  OrbitSpectrum s;
  s.label = "y";
  s.blocks = {TransverseBlock::rotation(ExactScalar(1)), TransverseBlock::rotation(ExactScalar(1))};
  s.action = PiMultiple(ExactScalar(1));
  auto v = build_torus_vector({s}, 1);
  REQUIRE(v.h() == 1);
  CHECK(v.entries[0] == ExactScalar::fraction(1, 6));
  CHECK_FALSE(v.has_irrational());
  auto lattice = relation_lattice(v);
  CHECK_THROWS_AS(admissible_orthants(lattice, v), JumpError);
}

TEST_CASE("torus vector of the reference ellipsoid") {
  auto c = reference_ellipsoid();
  auto v = build_torus_vector(c.orbits, 1);
  REQUIRE(v.h() == 9);
  CHECK(v.entries[0] == ExactScalar(1) / parse_scalar("12+6*sqrt(3)"));
  CHECK(v.entries[1] == ExactScalar::fraction(1, 6));
  CHECK(v.entries[2] == ExactScalar(1) / parse_scalar("2*sqrt(3)"));
  std::size_t elliptic = 0;
  for (std::size_t i = 3; i < v.h(); ++i) {
    const auto& o = v.origins[i];
    CHECK(o.kind == CoordinateKind::kElliptic);
    CHECK(o.lambda == frac_scalar(c.orbits[o.orbit].blocks[o.block].rho));
    CHECK(v.entries[i] == 2 * o.lambda / mean_index(c.orbits[o.orbit]));
    ++elliptic;
  }
  CHECK(elliptic == 6);
  // lambda for rho = 2 - sqrt 3 and rho = sqrt 3 on x2.
  bool found_a = false, found_b = false;
  for (std::size_t i = 3; i < v.h(); ++i) {
    if (v.origins[i].orbit != 1) continue;
    found_a |= v.origins[i].lambda == parse_scalar("2-sqrt(3)");
    found_b |= v.origins[i].lambda == parse_scalar("sqrt(3)-1");
  }
  CHECK(found_a);
  CHECK(found_b);
}

TEST_CASE("integer kernel") {
  auto basis = integer_kernel({{Integer(1), Integer(2), Integer(3)}}, 3);
  CHECK(basis.size() == 2);
  for (const auto& w : basis) CHECK(w[0] + 2 * w[1] + 3 * w[2] == 0);
}

TEST_CASE("relation lattice agrees with a bounded brute-force scan") {
  auto c = reference_ellipsoid();
  auto v = build_torus_vector(c.orbits, 1);
  auto lattice = relation_lattice(v);
  CHECK(lattice.rank() + lattice.dim_v() == v.h());
  for (const auto& w : lattice.basis) CHECK(dot(w, v.entries).is_rational());
  // Every w with support <= 2 and |w| <= 20 whose dot product is rational
  // must be a lattice member, and no other w may be.
  const std::size_t h = v.h();
  for (std::size_t a = 0; a < h; ++a) {
    for (std::size_t b = a; b < h; ++b) {
      for (int wa = -20; wa <= 20; ++wa) {
        for (int wb = -20; wb <= 20; ++wb) {
          if (a == b && wb != 0) continue;
          IntVector w(h, Integer(0));
          w[a] += wa;
          w[b] += wb;
          CHECK(in_lattice(lattice, w) == dot(w, v.entries).is_rational());
        }
      }
    }
  }
}

TEST_CASE("admissible orthants are closed under the antipode") {
  auto c = reference_ellipsoid();
  auto v = build_torus_vector(c.orbits, 2);
  auto vs = admissible_orthants(relation_lattice(v), v);
  REQUIRE_FALSE(vs.empty());
  for (const auto& o : vs) {
    // Coordinates where the witness vanishes keep their vertex entry.
    std::vector<int> anti(o.chi.size());
    for (std::size_t i = 0; i < anti.size(); ++i) anti[i] = o.witness[i] == 0 ? o.chi[i] : 1 - o.chi[i];
    bool found = false;
    for (const auto& p : vs) found |= p.chi == anti;
    CHECK(found);
  }
  for (const auto& link : sign_linkage(v, vs)) CHECK(link.holds);
}

TEST_CASE("one-dimensional V gives two vertices") {
  auto v = single("sqrt(3)");
  auto lattice = relation_lattice(v);
  CHECK(lattice.dim_v() == 1);
  auto vs = admissible_orthants(lattice, v);
  REQUIRE(vs.size() == 2);
  CHECK(vs[0].chi != vs[1].chi);
}

TEST_CASE("search on sqrt 3") {
  auto v = single("sqrt(3)");
  auto coarse = search_T(v, vertex({1}), ExactScalar::fraction(1, 10), 100000, 5);
  REQUIRE(coarse.hits.size() == 5);
  CHECK(coarse.hits[0] == 4);
  CHECK(torus_residuals(v, {1}, 4)[0] == parse_scalar("7-4*sqrt(3)"));
  auto fine = search_T(v, vertex({1}), ExactScalar::fraction(1, 40), 100000, 5);
  REQUIRE(fine.hits.size() == 5);
  CHECK(std::find(fine.hits.begin(), fine.hits.end(), 15) != fine.hits.end());
  for (auto T : fine.hits) CHECK(torus_residuals(v, {1}, T)[0] < ExactScalar::fraction(1, 40));
  // Every T below the first fine hit is a genuine miss.
  for (std::int64_t T = 1; T < fine.hits[0]; ++T) {
    CHECK(torus_residuals(v, {1}, T)[0] >= ExactScalar::fraction(1, 40));
  }
}

TEST_CASE("search reports exhaustion with a near miss") {
  auto v = single("sqrt(3)");
  auto r = search_T(v, vertex({1}), ExactScalar::fraction(1, 1000), 10, 1);
  CHECK(r.hits.empty());
  CHECK(r.exhausted);
  REQUIRE(r.best_near_miss.has_value());
  CHECK(r.best_near_miss->T == 4);
}

TEST_CASE("solve_jump on the reference ellipsoid") {
  auto c = reference_ellipsoid();
  JumpConfig cfg;
  cfg.M = 2;
  cfg.N = 2;
  cfg.l0 = 3;
  cfg.even_d = true;
  auto s = solve_jump(c.orbits, cfg);
  CHECK(s.T <= 10'000'000);
  CHECK(s.d % 2 == 0);
  for (auto k : s.k) CHECK(k % 2 == 0);
  CHECK(check_solution_invariants(s, c.orbits).all_pass());
  CHECK(verify_recurrence(s, c.orbits, 3, cfg.eta).all_pass());
  CHECK(verify_convexity_bounds(s, c.orbits, 3, 5).all_pass());
  for (std::size_t i = 0; i < s.k.size(); ++i) {
    const auto gap = abs(ExactScalar(s.k[i]) * mean_index(c.orbits[i]) - ExactScalar(s.d));
    CHECK(gap < cfg.eta);
  }
  auto pinned = fixture_solution();
  CHECK(pinned.T == s.T);
  CHECK(pinned.k == s.k);
  CHECK(pinned.d == s.d);
}

TEST_CASE("recurrence identities hold exactly on the pinned solution") {
  auto c = reference_ellipsoid();
  auto s = fixture_solution();
  for (std::size_t i = 0; i < c.orbits.size(); ++i) {
    for (std::int64_t l = 1; l <= 3; ++l) {
      const auto fwd = iterate_indices(c.orbits[i], s.k[i] + l);
      const auto base = iterate_indices(c.orbits[i], l);
      CHECK(fwd.lower == s.d + base.lower);
      CHECK(fwd.upper == s.d + base.upper);
      const auto back = iterate_indices(c.orbits[i], s.k[i] - l);
      const auto neg = iterate_indices(c.orbits[i], -l);
      const auto b = signature_multiplicities(c.orbits[i], l);
      CHECK(back.lower == s.d + neg.lower - (b.plus - b.minus));
      CHECK(back.upper == s.d + neg.upper - (b.plus - b.minus));
    }
    for (std::int64_t l = 1; l <= 5; ++l) {
      CHECK(iterate_indices(c.orbits[i], s.k[i] + l).lower >= s.d + 2 * l + 2);
      CHECK(iterate_indices(c.orbits[i], s.k[i] - l).upper <= s.d - 2 * l);
    }
  }
}

TEST_CASE("rational mean gives exact alignment") {
  OrbitSpectrum s;
  s.label = "y";
  s.blocks = {TransverseBlock::rotation(ExactScalar::fraction(1, 3)),
              TransverseBlock::rotation(ExactScalar::fraction(2, 3))};
  s.action = PiMultiple(ExactScalar(1));
  REQUIRE(mean_index(s) == ExactScalar(4));
  JumpConfig cfg;
  cfg.M = 3;
  cfg.N = 3;
  cfg.epsilon = ExactScalar::fraction(1, 100);
  auto sol = solve_jump({s}, cfg);
  auto record = verify_recurrence(sol, {s}, 1, cfg.eta);
  CHECK(record.all_pass());
  bool zero_gap = false;
  for (const auto& line : record.lines) zero_gap |= line.check == "mean_gap" && line.lhs == "0";
  CHECK(zero_gap);
  for (const auto& note : sol.notes) CHECK(note.find("M rho is not an integer") == std::string::npos);
  cfg.M = 2;
  cfg.N = 2;
  auto off = solve_jump({s}, cfg);
  bool warned = false;
  for (const auto& note : off.notes) warned |= note.find("M rho is not an integer") != std::string::npos;
  CHECK(warned);
  CHECK_FALSE(verify_recurrence(off, {s}, 1, cfg.eta).all_pass());
}

TEST_CASE("config validation") {
  auto c = reference_ellipsoid();
  JumpConfig cfg;
  cfg.M = 3;
  cfg.N = 2;
  CHECK_THROWS_AS(solve_jump(c.orbits, cfg), JumpError);
  cfg = JumpConfig{};
  cfg.eta = ExactScalar::fraction(1, 2);
  CHECK_THROWS_AS(solve_jump(c.orbits, cfg), JumpError);
  cfg = JumpConfig{};
  cfg.epsilon = ExactScalar::sqrt(3) / 100;
  CHECK_THROWS_AS(solve_jump(c.orbits, cfg), JumpError);
}

TEST_CASE("epsilon above the ceiling is tightened and noted") {
  auto c = reference_ellipsoid();
  JumpConfig cfg;
  cfg.M = 2;
  cfg.N = 2;
  cfg.even_d = true;
  cfg.epsilon = ExactScalar::fraction(1, 10);
  auto s = solve_jump(c.orbits, cfg);
  CHECK(s.epsilon < epsilon_ceiling(c.orbits, 2));
  bool noted = false;
  for (const auto& n : s.notes) noted |= n.find("auto-tightened") != std::string::npos;
  CHECK(noted);
}

TEST_CASE("an accepted epsilon above the ceiling breaks the alignment") {
  // Assemble directly at a torus hit for a loose epsilon: the mean alignment
  // bound 1/8 is no longer guaranteed and some hit must violate it.
  auto c = reference_ellipsoid();
  JumpConfig cfg;
  cfg.M = 1;
  cfg.epsilon = ExactScalar::fraction(1, 5);
  auto v = build_torus_vector(c.orbits, 1);
  auto vs = admissible_orthants(relation_lattice(v), v);
  auto hits = search_T(v, vs[0], cfg.epsilon, 5000, 200);
  std::size_t failures = 0;
  for (auto T : hits.hits) {
    auto s = assemble_solution(c.orbits, v, vs[0], T, cfg);
    for (const auto& line : check_solution_invariants(s, c.orbits).lines) {
      if (line.check == "mean_alignment" && !line.pass) ++failures;
    }
  }
  CHECK(failures > 0);
}

TEST_CASE("forced exhaustion") {
  auto c = reference_ellipsoid();
  JumpConfig cfg;
  cfg.M = 2;
  cfg.N = 2;
  cfg.T_max = 10;
  try {
    solve_jump(c.orbits, cfg);
    FAIL("expected exhaustion");
  } catch (const SearchExhausted& e) {
    CHECK(e.code() == JumpErrc::kExhausted);
    CHECK(e.near_miss().has_value());
  }
}

TEST_CASE("convexity bounds reject non-convex spectra") {
  OrbitSpectrum s;
  s.label = "h";
  s.blocks = {TransverseBlock::of_kind(BlockKind::kHyperbolicPos), TransverseBlock::of_kind(BlockKind::kHyperbolicPos)};
  s.action = PiMultiple(ExactScalar(1));
  JumpSolution sol;
  sol.k = {10};
  sol.d = 20;
  try {
    verify_convexity_bounds(sol, {s}, 3, 5);
    FAIL("expected precondition failure");
  } catch (const JumpError& e) {
    CHECK(e.code() == JumpErrc::kPrecondition);
  }
}

TEST_CASE("negative iterate convention chosen by the backward shift") {
  auto c = parse_catalogue(
      "n: 3\nfield: 3\nprovenance: user\n"
      "orbit: t; action_pi: 1; reoccurring: yes; blocks: trivial_plus, rotation(1+sqrt(3))\n"
      "orbit: u; action_pi: 1; reoccurring: yes; blocks: trivial_minus, rotation(sqrt(3))\n");
  JumpConfig cfg;
  cfg.epsilon = ExactScalar::fraction(1, 100);
  auto s = solve_jump(c.orbits, cfg);
  CHECK(verify_recurrence(s, c.orbits, 3, cfg.eta, NegativeIterateConvention::kFormula).all_pass());
  auto reversed = verify_recurrence(s, c.orbits, 3, cfg.eta, NegativeIterateConvention::kPathReversal);
  CHECK(reversed.failures() == 6);
  for (const auto& line : reversed.lines) {
    if (!line.pass) CHECK(line.check == "backward_shift");
  }
}
