// One PASS/FAIL line per acceptance criterion. Exit status is nonzero iff
// some criterion fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "cijump/analyzer.hpp"
#include "cijump/catalogue_io.hpp"
#include "cijump/index.hpp"
#include "cijump/jump.hpp"
#include "cijump/report.hpp"

using namespace cijump;

namespace {

const std::string kFixtures = CIJUMP_FIXTURE_DIR;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

OrbitCatalogue fixture_catalogue() { return load_catalogue(kFixtures + "/ellipsoid_n3.cat"); }

JumpConfig criterion_config() {
  JumpConfig cfg;
  cfg.M = 2;
  cfg.N = 2;
  cfg.epsilon = ExactScalar::fraction(1, 1000);
  cfg.eta = ExactScalar::fraction(1, 20);
  cfg.l0 = 3;
  cfg.T_max = 10'000'000;
  cfg.even_d = true;
  return cfg;
}

// Criterion checks append human-readable reasons for each failure.
struct Outcome {
  std::vector<std::string> failures;
  std::string summary;
  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

struct Criterion {
  int id;
  const char* name;
  double budget_ms;
  std::function<void(Outcome&)> body;
};

// Shared between criteria 3, 4 and 5.
std::optional<JumpSolution> g_solution;

void resonance_identity(Outcome& out);

void reproduction(Outcome& out) {
  auto c = fixture_catalogue();
  auto report = analyze(c);
  out.require(report.means.size() == 3, "three means");
  if (report.means.size() != 3) return;
  out.require(report.means[0] == parse_scalar("12+6*sqrt(3)"), "mean x1 = 12+6*sqrt(3)");
  out.require(report.means[1] == ExactScalar(6), "mean x2 = 6");
  out.require(report.means[2] == parse_scalar("2*sqrt(3)"), "mean x3 = 2*sqrt(3)");
  // Same values in the unrationalized form 6/(2 - sqrt 3), 6, 6/sqrt 3.
  out.require(report.means[0] == ExactScalar(6) / parse_scalar("2-sqrt(3)"), "6/(2-sqrt(3))");
  out.require(report.means[2] == ExactScalar(6) / ExactScalar::sqrt(3), "6/sqrt(3)");
  out.require(report.rationality.rational == std::vector<std::size_t>{1}, "rational {x2}");
  out.require(report.rationality.irrational == std::vector<std::size_t>{0, 2}, "irrational {x1, x3}");
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      const ExactScalar ratio = report.means[i] / report.means[j];
      out.require(!ratio.is_rational(), "ratio " + std::to_string(i + 1) + "/" + std::to_string(j + 1) + " irrational");
      out.require(ratio == c.alpha[j] / c.alpha[i], "ratio equals alpha_j/alpha_i");
      out.require(!report.ratios.rational[i][j], "ratio matrix entry");
    }
  }
  out.summary = "means 12+6*sqrt(3), 6, 2*sqrt(3); rational {x2}; 3 irrational ratios";
}

void resonance_identity(Outcome& out) {
  auto c = fixture_catalogue();
  auto table = resonance_check(c);
  out.require(table.verdict.status == VerdictStatus::kPass, "resonance verdict PASS");
  for (const auto& orbit : c.orbits) {
    const PiMultiple base = mean_action_ratio(orbit);
    out.require(base.coefficient() == ExactScalar::fraction(1, 3), orbit.label + " ratio pi/3");
    // Independent of the library ratio: action coefficient over mean index.
    out.require(orbit.action.coefficient() / mean_index(orbit) == ExactScalar::fraction(1, 3),
                orbit.label + " action/mean");
    for (std::int64_t k = 1; k <= 50; ++k) {
      const OrbitSpectrum it = iterate(orbit, k);
      out.require(mean_action_ratio(it) == base, orbit.label + "^" + std::to_string(k) + " ratio");
      out.require(it.action.coefficient() == ExactScalar(k) * orbit.action.coefficient(),
                  orbit.label + "^" + std::to_string(k) + " action scales");
    }
  }
  out.summary = "c(x1) = c(x2) = c(x3) = pi/3, invariant for k <= 50";
}

void constructive_jump(Outcome& out) {
  auto c = fixture_catalogue();
  const JumpConfig cfg = criterion_config();
  JumpSolution s;
  try {
    s = solve_jump(c.orbits, cfg);
  } catch (const std::exception& e) {
    out.require(false, std::string("solve_jump threw: ") + e.what());
    return;
  }
  g_solution = s;
  const ExactScalar eps = cfg.epsilon;
  out.require(s.T >= 1 && s.T <= 10'000'000, "T <= 10^7");
  out.require(s.d % 2 == 0, "d even");
  std::vector<ExactScalar> kd;
  for (std::size_t i = 0; i < c.orbits.size(); ++i) {
    const auto& orbit = c.orbits[i];
    out.require(s.k[i] % 2 == 0, orbit.label + " k even");
    for (const auto& block : orbit.blocks) {
      if (block.rho.is_rational()) continue;
      const ExactScalar lambda = frac_scalar(block.rho);
      out.require(dist_to_integer(ExactScalar(s.k[i]) * lambda) < eps, orbit.label + " elliptic closeness");
    }
    kd.push_back(ExactScalar(s.k[i]) * mean_index(orbit));
    out.require(abs(kd.back() - ExactScalar(s.d)) < cfg.eta, orbit.label + " mean gap");
  }
  for (std::size_t i = 1; i < kd.size(); ++i) {
    out.require(abs(kd[0] - kd[i]) < ExactScalar::fraction(1, 8), "mean alignment x1 vs x" + std::to_string(i + 1));
  }
  std::size_t identities = 0;
  for (std::size_t i = 0; i < c.orbits.size(); ++i) {
    const auto& orbit = c.orbits[i];
    for (std::int64_t l = 1; l <= 3; ++l) {
      const IndexPair fwd = iterate_indices(orbit, s.k[i] + l);
      const IndexPair base = iterate_indices(orbit, l);
      out.require(fwd == IndexPair{s.d + base.lower, s.d + base.upper}, orbit.label + " forward shift l=" + std::to_string(l));
      const IndexPair back = iterate_indices(orbit, s.k[i] - l);
      const IndexPair neg = iterate_indices(orbit, -l);
      const auto b = signature_multiplicities(orbit, l);
      const std::int64_t shift = s.d - (b.plus - b.minus);
      out.require(back == IndexPair{shift + neg.lower, shift + neg.upper},
                  orbit.label + " backward shift l=" + std::to_string(l));
      identities += 2;
    }
  }
  out.require(verify_recurrence(s, c.orbits, 3, cfg.eta).all_pass(), "verify_recurrence all lines");
  std::ostringstream os;
  os << "T = " << s.T << ", d = " << s.d << ", k = (" << s.k[0] << ", " << s.k[1] << ", " << s.k[2] << "), "
     << identities << " index identities exact";
  out.summary = os.str();
}

void convexity_bounds(Outcome& out) {
  if (!g_solution) {
    out.require(false, "no solution from criterion 3");
    return;
  }
  auto c = fixture_catalogue();
  const JumpSolution& s = *g_solution;
  const int n = 3;
  std::size_t checks = 0;
  for (std::size_t i = 0; i < c.orbits.size(); ++i) {
    for (std::int64_t l = 1; l <= 5; ++l) {
      out.require(iterate_indices(c.orbits[i], s.k[i] + l).lower >= s.d + 2 * l + (n - 1),
                  c.orbits[i].label + " lower growth l=" + std::to_string(l));
      out.require(iterate_indices(c.orbits[i], s.k[i] - l).upper <= s.d - 2 * l,
                  c.orbits[i].label + " upper decay l=" + std::to_string(l));
      checks += 2;
    }
  }
  const auto record = verify_convexity_bounds(s, c.orbits, n, 5);
  out.require(record.all_pass(), "verify_convexity_bounds all lines");
  out.summary = std::to_string(checks) + " bounds, 0 failures";
}

void carrier_count(Outcome& out) {
  if (!g_solution) {
    out.require(false, "no solution from criterion 3");
    return;
  }
  auto c = fixture_catalogue();
  const auto t = carrier_feasibility(c, *g_solution);
  out.require(t.window.degrees.size() == 3, "3 window degrees");
  out.require(window_size(3) == 3, "floor((n+1)/2)+1 = 3");
  out.require(t.distinct_orbits == 3, "3 distinct orbits");
  out.require(t.sdm_flags.empty(), "no degenerate maximum flag");
  out.require(t.conflicts.empty(), "no conflicts");
  std::set<std::size_t> orbits;
  for (const auto& entry : t.degrees) {
    out.require(entry.admissible.size() == 1, "degree " + std::to_string(entry.degree) + " has one carrier");
    for (const auto& cand : entry.admissible) {
      out.require(cand.indices.lower <= entry.degree && entry.degree <= cand.indices.upper, "sandwich");
      orbits.insert(cand.orbit);
    }
  }
  out.require(orbits.size() == 3, "carriers are x1, x2, x3");
  std::ostringstream os;
  for (const auto& entry : t.degrees) {
    os << entry.degree << " <- ";
    for (const auto& cand : entry.admissible) os << c.orbits[cand.orbit].label << "^" << cand.k;
    os << "; ";
  }
  out.summary = os.str() + "no SDM flag";
}

void oracle_equivalence(Outcome& out) {
  std::mt19937_64 rng(20261018);
  std::uniform_int_distribution<int> blocks_d(1, 4), k_d(1, 30), num_d(1, 90), den_d(1, 15), rad_d(-4, 4), pick(0, 3);
  int degenerate = 0, mismatches = 0, instances = 0;
  while (instances < 200) {
    OrbitSpectrum s;
    s.label = "r";
    s.action = PiMultiple(ExactScalar(1));
    const std::int64_t k = k_d(rng);
    const int m = blocks_d(rng);
    for (int b = 0; b < m; ++b) {
      ExactScalar rho;
      switch (pick(rng)) {
        case 0: {
          // k rho integral: rho = j / q with q | k.
          std::vector<int> divisors;
          for (int q = 1; q <= k; ++q) {
            if (k % q == 0) divisors.push_back(q);
          }
          const int q = divisors[std::uniform_int_distribution<std::size_t>(0, divisors.size() - 1)(rng)];
          rho = ExactScalar(Rational(std::uniform_int_distribution<int>(1, 3 * q)(rng), q));
          break;
        }
        case 1:
          rho = ExactScalar(Rational(num_d(rng), den_d(rng)));
          break;
        default: {
          ExactScalar cand = ExactScalar(Rational(num_d(rng), den_d(rng))) +
                             ExactScalar(Rational(rad_d(rng), den_d(rng))) * ExactScalar::sqrt(3);
          rho = cand.sign() > 0 ? cand : ExactScalar(Rational(num_d(rng), den_d(rng)));
        }
      }
      s.blocks.push_back(TransverseBlock::rotation(rho));
    }
    ++instances;
    const IndexPair exact = iterate_indices(s, k);
    bool is_degenerate = false;
    for (const auto& b : s.blocks) is_degenerate |= (ExactScalar(k) * b.rho).is_integer();
    if (is_degenerate) ++degenerate;
    const IndexPair numeric = crossing_count_oracle(s.blocks, k, 256);
    if (!(numeric == exact)) ++mismatches;
  }
  out.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  out.require(degenerate >= 20, "only " + std::to_string(degenerate) + " degenerate instances");
  out.summary = std::to_string(instances) + " spectra, " + std::to_string(degenerate) + " degenerate, " +
                std::to_string(mismatches) + " mismatches";
}

void property_suites(Outcome& out) {
  std::size_t windows = 0;
  for (int n = 2; n <= 8; ++n) {
    const std::int64_t first = (n + 5) % 2 == 0 ? n + 5 : n + 6;
    for (std::int64_t d = first; d <= n + 205; d += 2) {
      const auto w = degree_window(d, n);
      // Independent count of degrees of parity n+1 in the window.
      const std::int64_t lo = n % 2 == 1 ? d - 2 : d - 1;
      std::size_t expected = 0;
      for (std::int64_t x = lo; x <= d + n; ++x) {
        if ((x - (n + 1)) % 2 == 0) ++expected;
      }
      out.require(w.degrees.size() == static_cast<std::size_t>((n + 1) / 2 + 1) && w.degrees.size() == expected,
                  "window n=" + std::to_string(n) + " d=" + std::to_string(d));
      ++windows;
    }
  }

  auto c = fixture_catalogue();
  std::size_t linear = 0;
  for (const auto& orbit : c.orbits) {
    for (std::int64_t k = 1; k <= 100; ++k) {
      const OrbitSpectrum it = iterate(orbit, k);
      ExactScalar direct(2 * k);
      for (const auto& b : it.blocks) direct += 2 * b.rho;
      out.require(mean_index(it) == ExactScalar(k) * mean_index(orbit) && mean_index(it) == direct,
                  orbit.label + " linearity k=" + std::to_string(k));
      ++linear;
    }
  }

  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> h_d(1, 5), num(-30, 30), den(1, 12), rad(-6, 6);
  std::size_t two_vertex = 0;
  for (int trial = 0; trial < 50; ++trial) {
    TorusVector v;
    const int h = h_d(rng);
    bool irrational = false;
    for (int i = 0; i < h; ++i) {
      ExactScalar x = ExactScalar(Rational(num(rng), den(rng)));
      if (i == 0 || rad(rng) % 2 == 0) x += ExactScalar(Rational(rad(rng) | 1, den(rng))) * ExactScalar::sqrt(3);
      irrational |= !x.is_rational();
      v.entries.push_back(x);
      v.origins.push_back(CoordinateOrigin{});
      v.mean_indices.push_back(ExactScalar(1));
    }
    v.radicand = irrational ? 3 : 1;
    const auto lattice = relation_lattice(v);
    const auto vs = admissible_orthants(lattice, v);
    for (const auto& o : vs) {
      std::vector<int> anti(o.chi.size());
      for (std::size_t i = 0; i < anti.size(); ++i) anti[i] = o.witness[i] == 0 ? o.chi[i] : 1 - o.chi[i];
      bool found = false;
      for (const auto& p : vs) found |= p.chi == anti;
      out.require(found, "antipode of a vertex in trial " + std::to_string(trial));
    }
    if (lattice.dim_v() == 1) {
      out.require(vs.size() == 2, "dim V = 1 gives two vertices in trial " + std::to_string(trial));
      ++two_vertex;
    }
  }

  // Bounded brute-force relation scan on the ellipsoid vector: w.v is
  // rational iff the radical coefficients cancel.
  const TorusVector v = build_torus_vector(c.orbits, 1);
  const auto lattice = relation_lattice(v);
  const std::size_t h = v.h();
  Integer common_den = 1;
  for (const auto& x : v.entries) mpz_lcm(common_den.get_mpz_t(), common_den.get_mpz_t(), x.radical_coefficient().get_den_mpz_t());
  std::vector<long> b(h);
  for (std::size_t i = 0; i < h; ++i) {
    const Rational scaled = v.entries[i].radical_coefficient() * common_den;
    b[i] = Integer(scaled.get_num()).get_si();
  }
  std::size_t relations = 0, scanned = 0;
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = i + 1; j < h; ++j) {
      for (std::size_t l = j + 1; l < h; ++l) {
        for (long wi = -20; wi <= 20; ++wi) {
          for (long wj = -20; wj <= 20; ++wj) {
            for (long wl = -20; wl <= 20; ++wl) {
              ++scanned;
              const bool relation = wi * b[i] + wj * b[j] + wl * b[l] == 0;
              // Non-relations are spot-checked; relations are all checked.
              if (!relation && scanned % 101 != 0) continue;
              IntVector w(h, Integer(0));
              w[i] = wi;
              w[j] = wj;
              w[l] = wl;
              if (relation) ++relations;
              if (in_lattice(lattice, w) != relation) {
                out.require(false, "lattice membership disagrees with the scan");
              }
            }
          }
        }
      }
    }
  }
  out.require(lattice.rank() + lattice.dim_v() == h, "rank + dim V = h");
  out.summary = std::to_string(windows) + " windows, " + std::to_string(linear) + " linearity checks, 50 torus vectors (" +
                std::to_string(two_vertex) + " with dim V = 1), " + std::to_string(relations) + " relations of " +
                std::to_string(scanned) + " scanned";
}

// Torus distance from frac(T sqrt 3) to 1 decided with integer square roots.
bool sqrt3_hit(std::int64_t T, long eps_den) {
  // Need some integer m with |T sqrt 3 - m| < 1/eps_den.
  Integer r;
  Integer sq = Integer(3) * T * T;
  mpz_sqrt(r.get_mpz_t(), sq.get_mpz_t());
  for (const Integer& m : {Integer(r), Integer(r + 1)}) {
    // |T sqrt 3 - m| < 1/e  <=>  (m - 1/e)^2 < 3 T^2 < (m + 1/e)^2 with m - 1/e > 0.
    const Rational lo = Rational(m) - Rational(1, eps_den);
    const Rational hi = Rational(m) + Rational(1, eps_den);
    if (lo > 0 && lo * lo < Rational(sq) && Rational(sq) < hi * hi) return true;
  }
  return false;
}

void kronecker_search(Outcome& out) {
  TorusVector v;
  v.entries = {ExactScalar::sqrt(3)};
  v.origins = {CoordinateOrigin{}};
  v.mean_indices = {ExactScalar(1)};
  v.radicand = 3;
  OrthantVertex chi;
  chi.chi = {1};
  std::string summary;
  for (const auto& [eps_den, must] : std::vector<std::pair<long, std::int64_t>>{{10, 4}, {40, 15}}) {
    const auto r = search_T(v, chi, ExactScalar::fraction(1, eps_den), 100000, 5);
    std::set<std::int64_t> distinct(r.hits.begin(), r.hits.end());
    out.require(distinct.size() >= 5, "eps 1/" + std::to_string(eps_den) + " gives >= 5 hits");
    out.require(distinct.count(must) == 1, "T = " + std::to_string(must) + " among hits");
    for (auto T : r.hits) out.require(sqrt3_hit(T, eps_den), "hit T=" + std::to_string(T) + " confirmed by oracle");
    const std::int64_t last = r.hits.empty() ? 0 : r.hits.back();
    for (std::int64_t T = 1; T <= last; ++T) {
      if (distinct.count(T) == 0) out.require(!sqrt3_hit(T, eps_den), "missed T=" + std::to_string(T));
    }
    summary += "eps 1/" + std::to_string(eps_den) + ": ";
    for (auto T : r.hits) summary += std::to_string(T) + " ";
  }
  out.summary = summary;
}

void negative_controls(Outcome& out) {
  // Two rational carriers.
  {
    auto c = load_catalogue(kFixtures + "/two_rational.cat");
    auto s = solution_from_json(Json::parse(read_file(kFixtures + "/two_rational.solution.json")));
    auto report = analyze(c, &s);
    bool failed = false;
    for (const auto& v : report.verdicts) failed |= v.name == "irrational_mean_count" && v.status == VerdictStatus::kFail;
    out.require(failed, "two-rational catalogue fails the irrational mean count");
    out.require(report.rationality.witness.has_value(), "equal-mean witness present");
    if (report.rationality.witness) {
      const auto& w = *report.rationality.witness;
      out.require(w.first_value == w.second_value && w.first_value == ExactScalar(w.d), "k_a D_a = k_b D_b = d");
    }
    const std::string body = dump_report(report_envelope("analyze", analysis_to_json(c, report)));
    out.require(body == read_file(kFixtures + "/two_rational.analyze.json"), "two-rational report matches pinned output");
  }
  // Epsilon above the ceiling.
  {
    auto c = fixture_catalogue();
    const Json pinned = Json::parse(read_file(kFixtures + "/epsilon_tightened.jump.json"));
    JumpConfig cfg;
    cfg.M = 2;
    cfg.N = 2;
    cfg.even_d = true;
    cfg.epsilon = ExactScalar::fraction(1, 10);
    out.require(!(cfg.epsilon < epsilon_ceiling(c.orbits, 2)), "1/10 is above the ceiling");
    auto s = solve_jump(c.orbits, cfg);
    bool noted = false;
    for (const auto& n : s.notes) noted |= n.find("epsilon auto-tightened from 1/10") != std::string::npos;
    out.require(noted, "tightening noted");
    out.require(s.epsilon < epsilon_ceiling(c.orbits, 2), "tightened epsilon below the ceiling");
    out.require(pinned.at("status") == "ok", "pinned jump status ok");
    out.require(pinned.at("solution") == solution_to_json(s), "pinned solution matches");
  }
  // Equal weights.
  {
    auto c = load_catalogue(kFixtures + "/ellipsoid_111.cat");
    auto report = analyze(c);
    bool warned = false;
    for (const auto& w : report.warnings) warned |= w.find("infinitely many") != std::string::npos;
    out.require(warned, "infinitude warning");
    out.require(!report.any_fail(), "warning only");
    const std::string body = dump_report(report_envelope("analyze", analysis_to_json(c, report)));
    out.require(body == read_file(kFixtures + "/ellipsoid_111.analyze.json"), "equal-weight report matches pinned output");
  }
  out.summary = "two-rational FAIL with witness; epsilon tightened and noted; equal weights warn";
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "exact means, rationality partition and irrational ratios", 1000, reproduction},
      {2, "action over mean index is pi/3 and iteration invariant", 1000, resonance_identity},
      {3, "common index jump on the ellipsoid fixture", 60000, constructive_jump},
      {4, "dynamically convex growth bounds for l <= 5", 1000, convexity_bounds},
      {5, "window carriers at n = 3", 1000, carrier_count},
      {6, "block formulas agree with the crossing count oracle", 120000, oracle_equivalence},
      {7, "window, linearity, orthant and relation properties", 120000, property_suites},
      {8, "simultaneous approximation search on sqrt 3", 10000, kronecker_search},
      {9, "negative controls", 60000, negative_controls},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(out);
    } catch (const std::exception& e) {
      out.failures.push_back(std::string("exception: ") + e.what());
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (ms > c.budget_ms) out.failures.push_back("runtime " + std::to_string(ms) + " ms over budget");
    const bool pass = out.failures.empty();
    if (!pass) ++failed;
    std::printf("%s criterion %d: %s (%.0f ms, budget %.0f ms)\n", pass ? "PASS" : "FAIL", c.id, c.name, ms, c.budget_ms);
    if (!out.summary.empty()) std::printf("    %s\n", out.summary.c_str());
    for (std::size_t i = 0; i < out.failures.size() && i < 10; ++i) std::printf("    failed: %s\n", out.failures[i].c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
