#include "cijump/selftest.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "cijump/analyzer.hpp"
#include "cijump/catalogue_io.hpp"
#include "cijump/exit_code.hpp"
#include "cijump/index.hpp"
#include "cijump/jump.hpp"
#include "cijump/report.hpp"
#include "cijump/scalar.hpp"

namespace cijump {

namespace {

using Rng = std::mt19937_64;

long uniform(Rng& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

ExactScalar random_scalar(Rng& rng, std::uint64_t d) {
  const Rational a(uniform(rng, -60, 60), uniform(rng, 1, 24));
  const Rational b = uniform(rng, 0, 4) == 0 ? Rational(0) : Rational(uniform(rng, -30, 30), uniform(rng, 1, 24));
  return ExactScalar(a, b, d);
}

ExactScalar random_positive(Rng& rng, bool irrational) {
  for (;;) {
    ExactScalar x = irrational ? ExactScalar(Rational(uniform(rng, -40, 40), uniform(rng, 1, 12)),
                                             Rational(uniform(rng, 1, 20) * (uniform(rng, 0, 1) ? 1 : -1),
                                                      uniform(rng, 1, 12)),
                                             3)
                               : ExactScalar(Rational(uniform(rng, 1, 60), uniform(rng, 1, 12)));
    if (x.sign() > 0 && x < ExactScalar(8)) return x;
  }
}

TransverseBlock random_block(Rng& rng, bool rotations_only) {
  const long pick = uniform(rng, 0, rotations_only ? 1 : 5);
  switch (pick) {
    case 0:
      return TransverseBlock::rotation(random_positive(rng, true));
    case 1:
      return TransverseBlock::rotation(random_positive(rng, false));
    case 2:
      return TransverseBlock::of_kind(BlockKind::kTrivialPlus);
    case 3:
      return TransverseBlock::of_kind(BlockKind::kTrivialMinus);
    case 4:
      return TransverseBlock::of_kind(BlockKind::kHyperbolicPos);
    default:
      return TransverseBlock::of_kind(BlockKind::kHyperbolicNeg);
  }
}

OrbitSpectrum random_spectrum(Rng& rng, std::size_t blocks, bool rotations_only, const std::string& label) {
  OrbitSpectrum s;
  s.label = label;
  for (std::size_t q = 0; q < blocks; ++q) s.blocks.push_back(random_block(rng, rotations_only));
  s.action = PiMultiple(random_positive(rng, false));
  s.reoccurring = true;
  return s;
}

std::vector<ExactScalar> fixture_alpha() { return {parse_scalar("2-sqrt(3)"), ExactScalar(1), parse_scalar("sqrt(3)")}; }

const OrbitCatalogue& fixture_catalogue() {
  static const OrbitCatalogue c = ellipsoid_catalogue(fixture_alpha());
  return c;
}

JumpConfig fixture_config() {
  JumpConfig config;
  config.M = 2;
  config.N = 2;
  config.even_d = true;
  config.epsilon = ExactScalar::fraction(1, 1000);
  config.eta = ExactScalar::fraction(1, 20);
  config.l0 = 3;
  return config;
}

const JumpSolution& fixture_solution() {
  static const JumpSolution s = solve_jump(fixture_catalogue().orbits, fixture_config());
  return s;
}

class Suite {
 public:
  Suite(std::string name, std::vector<PropertyResult>& out) : name_(std::move(name)), out_(out) {}

  // Runs one property; exceptions count as failures.
  void check(const std::string& property, const std::function<std::string(bool&)>& body) {
    PropertyResult r{name_, property, true, ""};
    try {
      r.detail = body(r.pass);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    out_.push_back(std::move(r));
  }

 private:
  std::string name_;
  std::vector<PropertyResult>& out_;
};

// --- scalar ------------------------------------------------------------------------------

void scalar_suite(std::vector<PropertyResult>& out) {
  Suite suite("scalar", out);
  Rng rng(1001);
  std::vector<ExactScalar> xs;
  for (int i = 0; i < 1000; ++i) xs.push_back(random_scalar(rng, i % 3 == 0 ? 2 : 3));

  suite.check("canonical_idempotent", [&](bool& pass) {
    for (const auto& x : xs) {
      const ExactScalar y = parse_scalar(x.to_literal());
      if (!(y == x) || y.to_literal() != x.to_literal()) pass = false;
    }
    const std::vector<std::pair<const char*, const char*>> forms = {
        {"sqrt(12)", "2*sqrt(3)"}, {"(1+sqrt(3))*(1-sqrt(3))", "-2"}, {"6/(2-sqrt(3))", "12+6*sqrt(3)"},
        {"4/2", "2"}, {"sqrt(4)", "2"}, {"-(-sqrt(3)/3)", "sqrt(3)/3"}};
    for (const auto& [in, want] : forms) {
      if (parse_scalar(in).to_literal() != want) pass = false;
    }
    return "1000 random literals and 6 non-canonical forms";
  });

  suite.check("order_vs_interval", [&](bool& pass) {
    int disjoint = 0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const ExactScalar& x = xs[i];
      const ExactScalar& y = xs[i + 1];
      if (x.radicand() != y.radicand() && !x.is_rational() && !y.is_rational()) continue;
      const RationalInterval ix = to_interval(x, 30);
      const RationalInterval iy = to_interval(y, 30);
      if (ix.hi < iy.lo) {
        ++disjoint;
        if (compare(x, y) != std::strong_ordering::less) pass = false;
      } else if (iy.hi < ix.lo) {
        ++disjoint;
        if (compare(x, y) != std::strong_ordering::greater) pass = false;
      }
    }
    return std::to_string(disjoint) + " disjoint bracket pairs";
  });

  suite.check("floor_frac_identity", [&](bool& pass) {
    for (const auto& x : xs) {
      const ExactScalar f = frac_scalar(x);
      if (!(ExactScalar(floor_scalar(x)) + f == x) || f.sign() < 0 || !(f < ExactScalar(1))) pass = false;
    }
    return "1000 random values";
  });

  suite.check("distance_symmetry", [&](bool& pass) {
    for (const auto& x : xs) {
      const ExactScalar dx = dist_to_integer(x);
      const long k = uniform(rng, -1000, 1000);
      if (!(dist_to_integer(x + ExactScalar(k)) == dx) || !(dist_to_integer(-x) == dx)) pass = false;
    }
    return "1000 random values";
  });

  suite.check("field_axioms", [&](bool& pass) {
    for (std::size_t i = 0; i + 2 < 900; i += 3) {
      if (xs[i].radicand() != xs[i + 1].radicand() || xs[i].radicand() != xs[i + 2].radicand()) continue;
      const ExactScalar& a = xs[i];
      const ExactScalar& b = xs[i + 1];
      const ExactScalar& c = xs[i + 2];
      if (!((a + b) + c == a + (b + c))) pass = false;
      if (!((a * b) * c == a * (b * c))) pass = false;
      if (!(a * (b + c) == a * b + a * c)) pass = false;
      if (!b.is_zero() && !(a / b * b == a)) pass = false;
      if (!(a - a).is_zero()) pass = false;
    }
    return "random triples within one field";
  });
}

// --- index -------------------------------------------------------------------------------

void index_suite(std::vector<PropertyResult>& out) {
  Suite suite("index", out);
  Rng rng(2002);

  suite.check("mean_linearity", [&](bool& pass) {
    for (int s = 0; s < 100; ++s) {
      const OrbitSpectrum spec = random_spectrum(rng, static_cast<std::size_t>(uniform(rng, 1, 4)), false, "y");
      const ExactScalar mean = mean_index(spec);
      for (std::int64_t k = 1; k <= 100; ++k) {
        if (!(mean_index(iterate(spec, k)) == ExactScalar(k) * mean)) pass = false;
      }
    }
    return "100 spectra, k <= 100";
  });

  suite.check("index_sandwich", [&](bool& pass) {
    for (int s = 0; s < 500; ++s) {
      const int n = static_cast<int>(uniform(rng, 2, 5));
      const OrbitSpectrum spec = random_spectrum(rng, static_cast<std::size_t>(n - 1), false, "y");
      const IndexPair mu = iterate_indices(spec, 1);
      if (abs(mean_index(spec) - ExactScalar(mu.lower)) > ExactScalar(n - 1 + mu.degeneracy())) pass = false;
    }
    return "500 spectra";
  });

  suite.check("oracle_equivalence", [&](bool& pass) {
    int degenerate = 0;
    int mismatches = 0;
    for (int s = 0; s < 200; ++s) {
      const std::int64_t k = uniform(rng, 1, 30);
      std::vector<TransverseBlock> blocks;
      const auto m = static_cast<std::size_t>(uniform(rng, 1, 4));
      for (std::size_t q = 0; q < m; ++q) blocks.push_back(random_block(rng, false));
      if (s % 5 == 0) {
        // Force an eigenvalue-1 iterate: rho = p/k.
        blocks[0] = TransverseBlock::rotation(ExactScalar(Rational(uniform(rng, 1, 4 * k), k)));
      }
      bool deg = false;
      for (const auto& b : blocks) {
        if (b.kind == BlockKind::kRotation && (ExactScalar(k) * b.rho).is_integer()) deg = true;
      }
      degenerate += deg;
      OrbitSpectrum spec{"y", blocks, PiMultiple(ExactScalar(1)), false, 1};
      if (!(iterate_indices(spec, k) == crossing_count_oracle(blocks, k, 64))) ++mismatches;
    }
    pass = mismatches == 0 && degenerate >= 20;
    return std::to_string(mismatches) + " mismatches, " + std::to_string(degenerate) + " degenerate cases";
  });

  suite.check("monotone_growth", [&](bool& pass) {
    for (int s = 0; s < 100; ++s) {
      const TransverseBlock block = TransverseBlock::rotation(random_positive(rng, s % 2 == 0));
      for (std::int64_t k = 1; k < 60; ++k) {
        const IndexPair a = block_contribution(block, k);
        const IndexPair b = block_contribution(block, k + 1);
        if (b.lower < a.lower || b.upper < a.upper) pass = false;
        if (a.degeneracy() == 0 && b.degeneracy() == 0) {
          const Integer jumps = floor_scalar(ExactScalar(k + 1) * block.rho) - floor_scalar(ExactScalar(k) * block.rho);
          if (b.lower - a.lower != 2 * jumps.get_si()) pass = false;
        }
      }
    }
    return "100 single rotation blocks, k < 60";
  });

  suite.check("nondegeneracy", [&](bool& pass) {
    for (int s = 0; s < 100; ++s) {
      OrbitSpectrum spec;
      spec.label = "y";
      for (int q = 0; q < 3; ++q) spec.blocks.push_back(TransverseBlock::rotation(random_positive(rng, true)));
      spec.action = PiMultiple(ExactScalar(1));
      for (std::int64_t k = 1; k <= 50; ++k) {
        if (iterate_indices(spec, k).degeneracy() != 0) pass = false;
      }
    }
    return "100 irrational spectra, k <= 50";
  });
}

// --- jump --------------------------------------------------------------------------------

// Irrational parts of v scaled to a primitive-free integer row.
std::vector<long> irrational_row(const TorusVector& v) {
  Integer scale = 1;
  for (const auto& e : v.entries) {
    Integer den = e.radical_coefficient().get_den();
    mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), den.get_mpz_t());
  }
  std::vector<long> row;
  for (const auto& e : v.entries) {
    Rational x = e.radical_coefficient() * Rational(scale);
    x.canonicalize();
    row.push_back(x.get_num().get_si());
  }
  return row;
}

// Coordinates of w in a lattice basis by a left inverse; independent of in_lattice.
class LatticeMembership {
 public:
  explicit LatticeMembership(const std::vector<IntVector>& basis) : basis_(basis) {
    const std::size_t r = basis.size();
    if (r == 0) return;
    const std::size_t h = basis[0].size();
    // Pick r independent coordinates, then invert that r x r minor.
    std::vector<std::vector<Rational>> rows;
    for (std::size_t i = 0; i < h && rows_.size() < r; ++i) {
      std::vector<Rational> candidate(r);
      for (std::size_t j = 0; j < r; ++j) candidate[j] = Rational(basis[j][i]);
      auto trial = rows;
      trial.push_back(candidate);
      if (rank(trial) == trial.size()) {
        rows = std::move(trial);
        rows_.push_back(i);
      }
    }
    inverse_ = invert(rows);
  }

  bool contains(const std::vector<long>& w) const {
    const std::size_t r = basis_.size();
    if (r == 0) return std::all_of(w.begin(), w.end(), [](long x) { return x == 0; });
    std::vector<Rational> c(r, 0);
    for (std::size_t a = 0; a < r; ++a) {
      for (std::size_t b = 0; b < r; ++b) c[a] += inverse_[a][b] * Rational(w[rows_[b]]);
      if (c[a].get_den() != 1) return false;
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      Integer total = 0;
      for (std::size_t a = 0; a < r; ++a) total += c[a].get_num() * basis_[a][i];
      if (total != w[i]) return false;
    }
    return true;
  }

 private:
  static std::size_t rank(std::vector<std::vector<Rational>> m) {
    std::size_t rk = 0;
    const std::size_t cols = m.empty() ? 0 : m[0].size();
    for (std::size_t c = 0; c < cols && rk < m.size(); ++c) {
      std::size_t p = rk;
      while (p < m.size() && m[p][c] == 0) ++p;
      if (p == m.size()) continue;
      std::swap(m[p], m[rk]);
      for (std::size_t r = rk + 1; r < m.size(); ++r) {
        const Rational f = m[r][c] / m[rk][c];
        for (std::size_t cc = c; cc < cols; ++cc) m[r][cc] -= f * m[rk][cc];
      }
      ++rk;
    }
    return rk;
  }

  static std::vector<std::vector<Rational>> invert(std::vector<std::vector<Rational>> m) {
    const std::size_t n = m.size();
    std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n, 0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t p = c;
      while (m[p][c] == 0) ++p;
      std::swap(m[p], m[c]);
      std::swap(inv[p], inv[c]);
      const Rational pivot = m[c][c];
      for (std::size_t j = 0; j < n; ++j) {
        m[c][j] /= pivot;
        inv[c][j] /= pivot;
      }
      for (std::size_t r = 0; r < n; ++r) {
        if (r == c || m[r][c] == 0) continue;
        const Rational f = m[r][c];
        for (std::size_t j = 0; j < n; ++j) {
          m[r][j] -= f * m[c][j];
          inv[r][j] -= f * inv[c][j];
        }
      }
    }
    // m * basis-minor = I with rows = chosen coordinates; inv maps coordinates to coefficients.
    return inv;
  }

  std::vector<IntVector> basis_;
  std::vector<std::size_t> rows_;
  std::vector<std::vector<Rational>> inverse_;
};

std::vector<TorusVector> random_torus_vectors(Rng& rng, int count) {
  std::vector<TorusVector> out;
  while (static_cast<int>(out.size()) < count) {
    std::vector<OrbitSpectrum> spectra;
    const long r = uniform(rng, 1, 3);
    for (long i = 0; i < r; ++i) spectra.push_back(random_spectrum(rng, 2, true, "y" + std::to_string(i)));
    TorusVector v = build_torus_vector(spectra, uniform(rng, 1, 3));
    if (v.has_irrational()) out.push_back(std::move(v));
  }
  return out;
}

void jump_suite(std::vector<PropertyResult>& out) {
  Suite suite("jump", out);
  Rng rng(3003);
  const TorusVector fixture_v = build_torus_vector(fixture_catalogue().orbits, 2);
  const std::vector<TorusVector> vectors = random_torus_vectors(rng, 50);

  suite.check("relation_soundness", [&](bool& pass) {
    int non_relations = 0;
    std::vector<const TorusVector*> all{&fixture_v};
    for (const auto& v : vectors) all.push_back(&v);
    for (const TorusVector* v : all) {
      const RelationLattice lattice = relation_lattice(*v);
      for (const auto& w : lattice.basis) {
        if (!dot(w, v->entries).is_rational()) pass = false;
      }
      const std::vector<long> row = irrational_row(*v);
      for (int t = 0; t < 100 && v == &fixture_v; ++t) {
        IntVector w(v->h());
        long image = 0;
        for (std::size_t k = 0; k < w.size(); ++k) {
          const long x = uniform(rng, -5, 5);
          w[k] = x;
          image += x * row[k];
        }
        if (image == 0) continue;
        ++non_relations;
        if (dot(w, v->entries).is_rational() || in_lattice(lattice, w)) pass = false;
      }
    }
    return "51 vectors; " + std::to_string(non_relations) + " non-relations";
  });

  suite.check("relation_brute_force", [&](bool& pass) {
    const RelationLattice lattice = relation_lattice(fixture_v);
    const LatticeMembership member(lattice.basis);
    const std::vector<long> row = irrational_row(fixture_v);
    const std::size_t h = row.size();
    long relations = 0;
    std::vector<long> w(h, 0);
    // Supports of size <= 3, entries in [-20, 20].
    for (std::size_t a = 0; a < h; ++a) {
      for (std::size_t b = a; b < h; ++b) {
        for (std::size_t c = b; c < h; ++c) {
          for (long x = -20; x <= 20; ++x) {
            for (long y = (b == a ? 0 : -20); y <= (b == a ? 0 : 20); ++y) {
              for (long z = (c == b ? 0 : -20); z <= (c == b ? 0 : 20); ++z) {
                std::fill(w.begin(), w.end(), 0);
                w[a] += x;
                w[b] += y;
                w[c] += z;
                if (row[a] * w[a] + (b != a ? row[b] * w[b] : 0) + (c != b ? row[c] * w[c] : 0) != 0) continue;
                ++relations;
                if (!member.contains(w)) pass = false;
              }
            }
          }
        }
      }
    }
    if (lattice.rank() + lattice.dim_v() != h) pass = false;
    return std::to_string(relations) + " relations with support <= 3 and |w| <= 20, all in the lattice";
  });

  suite.check("antipodal_closure", [&](bool& pass) {
    int dim_one = 0;
    std::vector<const TorusVector*> all{&fixture_v};
    for (const auto& v : vectors) all.push_back(&v);
    for (const TorusVector* v : all) {
      const RelationLattice lattice = relation_lattice(*v);
      const auto vertices = admissible_orthants(lattice, *v);
      std::set<std::vector<int>> chis;
      for (const auto& x : vertices) chis.insert(x.chi);
      for (const auto& x : vertices) {
        std::vector<int> flipped = x.chi;
        for (std::size_t k = 0; k < flipped.size(); ++k) {
          if (!v->entries[k].is_rational()) flipped[k] = 1 - flipped[k];
        }
        if (!chis.count(flipped)) pass = false;
      }
      if (lattice.dim_v() == 1) {
        ++dim_one;
        if (vertices.size() != 2) pass = false;
      }
    }
    return std::to_string(all.size()) + " vectors, " + std::to_string(dim_one) + " with dim V = 1";
  });

  suite.check("search_exactness", [&](bool& pass) {
    const ExactScalar eps = ExactScalar::fraction(1, 8);
    const auto vertices = admissible_orthants(relation_lattice(fixture_v), fixture_v);
    std::size_t hits = 0;
    for (const auto& chi : vertices) {
      const SearchResult found = search_T(fixture_v, chi, eps, 3000, 100000);
      std::vector<std::int64_t> brute;
      for (std::int64_t T = 1; T <= 3000; ++T) {
        const auto res = torus_residuals(fixture_v, chi.chi, T);
        if (std::all_of(res.begin(), res.end(), [&](const ExactScalar& r) { return r < eps; })) brute.push_back(T);
      }
      if (found.hits != brute) pass = false;
      hits += brute.size();
    }
    if (hits == 0) pass = false;
    return "T <= 3000, eps = 1/8, " + std::to_string(hits) + " hits agree with direct evaluation";
  });

  suite.check("solution_closure", [&](bool& pass) {
    const JumpSolution& s = fixture_solution();
    const VerificationRecord first = check_solution_invariants(s, fixture_catalogue().orbits);
    const JumpSolution back = solution_from_json(Json::parse(solution_to_json(s).dump()));
    const VerificationRecord second = check_solution_invariants(back, fixture_catalogue().orbits);
    pass = first.all_pass() && record_to_json(first).dump() == record_to_json(second).dump() &&
           record_to_json(s.report).dump() == record_to_json(first).dump();
    return "T = " + std::to_string(s.T) + ", " + std::to_string(first.lines.size()) + " invariant lines";
  });

  suite.check("infinitude_evidence", [&](bool& pass) {
    TorusVector single;
    single.entries = {ExactScalar::sqrt(3)};
    single.origins = {CoordinateOrigin{}};
    single.radicand = 3;
    const OrthantVertex one{{1}, {Rational(1)}};
    std::string detail;
    for (const long den : {10L, 40L}) {
      const SearchResult r = search_T(single, one, ExactScalar::fraction(1, den), 100000, 5);
      if (r.hits.size() != 5) pass = false;
      detail += "sqrt(3) eps 1/" + std::to_string(den) + ": " + std::to_string(r.hits.size()) + " hits; ";
    }
    // Documented bound for the fixture: five hits below 10^7 at eps = 1/1000.
    for (const auto& chi : admissible_orthants(relation_lattice(fixture_v), fixture_v)) {
      const SearchResult r = search_T(fixture_v, chi, ExactScalar::fraction(1, 1000), 10'000'000, 5);
      if (r.hits.size() != 5) pass = false;
      detail += "fixture vertex: last of 5 hits at T = " + (r.hits.empty() ? std::string("-") : std::to_string(r.hits.back())) + "; ";
    }
    return detail;
  });
}

// --- analyzer ----------------------------------------------------------------------------

OrbitCatalogue random_ellipsoid(Rng& rng) {
  const long n = uniform(rng, 2, 5);
  std::vector<ExactScalar> alpha;
  for (long i = 0; i < n; ++i) alpha.push_back(random_positive(rng, uniform(rng, 0, 2) != 0));
  std::sort(alpha.begin(), alpha.end());
  return ellipsoid_catalogue(alpha);
}

void analyzer_suite(std::vector<PropertyResult>& out) {
  Suite suite("analyzer", out);
  Rng rng(4004);

  suite.check("window_cardinality", [&](bool& pass) {
    int windows = 0;
    for (int n = 2; n <= 8; ++n) {
      for (std::int64_t d = n + 5; d <= n + 205; ++d) {
        if (d % 2 != 0) continue;
        ++windows;
        if (degree_window(d, n).degrees.size() != window_size(n)) pass = false;
      }
    }
    return std::to_string(windows) + " windows";
  });

  suite.check("carrier_sandwich", [&](bool& pass) {
    const CarrierTable t = carrier_feasibility(fixture_catalogue(), fixture_solution());
    std::size_t pairs = 0;
    for (const auto& entry : t.degrees) {
      for (const auto& c : entry.admissible) {
        ++pairs;
        const IndexPair mu = iterate_indices(iterate(fixture_catalogue().orbits[c.orbit], c.k), 1);
        if (!(mu.lower <= entry.degree && entry.degree <= mu.upper)) pass = false;
      }
    }
    return std::to_string(pairs) + " admitted pairs";
  });

  suite.check("ratio_matrix_symmetry", [&](bool& pass) {
    std::vector<OrbitCatalogue> catalogues{fixture_catalogue()};
    for (int i = 0; i < 20; ++i) catalogues.push_back(random_ellipsoid(rng));
    for (const auto& c : catalogues) {
      const RatioMatrix m = ratio_matrix(c);
      for (std::size_t i = 0; i < m.rational.size(); ++i) {
        if (!m.rational[i][i]) pass = false;
        for (std::size_t j = 0; j < m.rational.size(); ++j) {
          if (m.rational[i][j] != m.rational[j][i]) pass = false;
        }
      }
    }
    return "21 catalogues";
  });

  suite.check("resonance_iteration_invariance", [&](bool& pass) {
    std::vector<OrbitCatalogue> catalogues{fixture_catalogue()};
    for (int i = 0; i < 10; ++i) catalogues.push_back(random_ellipsoid(rng));
    for (const auto& c : catalogues) {
      for (const auto& orbit : c.orbits) {
        const PiMultiple base = mean_action_ratio(orbit);
        for (std::int64_t k = 1; k <= 50; ++k) {
          if (!(mean_action_ratio(iterate(orbit, k)) == base)) pass = false;
        }
      }
    }
    return "11 catalogues, k <= 50";
  });

  suite.check("ellipsoid_convexity", [&](bool& pass) {
    for (int i = 0; i < 50; ++i) {
      const OrbitCatalogue c = random_ellipsoid(rng);
      for (const auto& orbit : c.orbits) {
        if (!is_dynamically_convex(orbit, c.n).convex) pass = false;
      }
    }
    return "50 random weight tuples";
  });
}

// --- cli ---------------------------------------------------------------------------------

bool same_catalogue(const OrbitCatalogue& a, const OrbitCatalogue& b) {
  return a.n == b.n && a.provenance == b.provenance && a.alpha == b.alpha && a.orbits == b.orbits &&
         a.warnings == b.warnings && a.resonance_mode == b.resonance_mode;
}

const char* kUserSample =
    "n: 3\n"
    "field: 3\n"
    "provenance: user\n"
    "orbit: a; action_pi: 1; reoccurring: yes; blocks: rotation(1/2), trivial_plus\n"
    "orbit: b; action_pi: 3/2+sqrt(3); reoccurring: no; multiplicity: 2; blocks: rotation(sqrt(3)), "
    "hyperbolic_neg\n"
    "orbit: c; action_pi: 2; reoccurring: yes; blocks: trivial_minus, hyperbolic_pos\n";

const char* kEllipsoidSample =
    "n: 3\n"
    "field: 3\n"
    "provenance: ellipsoid\n"
    "ellipsoid: 2-sqrt(3), 1, sqrt(3)\n";

void cli_suite(std::vector<PropertyResult>& out, const std::string& fixture_dir) {
  Suite suite("cli", out);

  std::vector<std::pair<std::string, std::string>> texts{{"user sample", kUserSample},
                                                         {"ellipsoid sample", kEllipsoidSample}};
  if (!fixture_dir.empty()) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(fixture_dir)) {
      if (entry.path().extension() == ".cat") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
      std::ifstream in(path, std::ios::binary);
      std::ostringstream buffer;
      buffer << in.rdbuf();
      parse_catalogue(buffer.str());  // a corrupt fixture aborts the run
      texts.emplace_back(path.filename().string(), buffer.str());
    }
  }

  suite.check("catalogue_round_trip", [&](bool& pass) {
    std::string bad;
    for (const auto& [name, text] : texts) {
      const OrbitCatalogue c = parse_catalogue(text);
      const std::string emitted = emit_catalogue(c);
      if (emitted != text || !same_catalogue(parse_catalogue(emitted), c)) {
        pass = false;
        bad += " " + name;
      }
    }
    return std::to_string(texts.size()) + " catalogues" + (bad.empty() ? "" : "; differs:" + bad);
  });

  suite.check("parse_diagnostics", [&](bool& pass) {
    const std::vector<std::tuple<std::string, std::size_t, std::size_t>> cases = {
        {"n: 3\nfield: 3\nprovenance: user\norbit: a; action_pi: 1+; blocks: trivial_plus, trivial_plus\n", 4, 24},
        {"n: 3\nfield: 3\nprovenance: user\norbit: a; action_pi: 1; blocks: spiral, trivial_plus\n", 4, 33},
        {"n: 3\nfield: 3\nbogus: 1\n", 3, 1},
        {"n: 3\nfield: 3\nprovenance: user\n", 4, 1},
        {"n: 3\nfield: 2\nprovenance: ellipsoid\nellipsoid: 1, sqrt(3), 2\n", 4, 15},
    };
    std::string detail;
    for (const auto& [text, line, column] : cases) {
      try {
        parse_catalogue(text);
        pass = false;
        detail += " accepted;";
      } catch (const CatalogueParseError& e) {
        if (e.line() != line || e.column() != column) {
          pass = false;
          detail += std::string(" ") + e.what() + ";";
        }
      }
    }
    return std::to_string(cases.size()) + " malformed inputs" + detail;
  });

  suite.check("report_determinism", [&](bool& pass) {
    const AnalysisReport a = analyze(fixture_catalogue(), &fixture_solution());
    const AnalysisReport b = analyze(fixture_catalogue(), &fixture_solution());
    const std::string first = dump_report(report_envelope("analyze", analysis_to_json(fixture_catalogue(), a)));
    const std::string second = dump_report(report_envelope("analyze", analysis_to_json(fixture_catalogue(), b)));
    const JumpSolution again = solve_jump(fixture_catalogue().orbits, fixture_config());
    pass = first == second && solution_to_json(again).dump() == solution_to_json(fixture_solution()).dump();
    return "analyze and jump reports byte-identical across runs";
  });

  suite.check("exit_code_contract", [&](bool& pass) {
    const std::vector<std::pair<std::exception_ptr, ExitCode>> cases = {
        {std::make_exception_ptr(SearchExhausted("x", std::nullopt, 0)), ExitCode::kExhausted},
        {std::make_exception_ptr(JumpError(JumpErrc::kPrecondition, "x")), ExitCode::kVerificationFailure},
        {std::make_exception_ptr(JumpError(JumpErrc::kInvalidInput, "x")), ExitCode::kInputError},
        {std::make_exception_ptr(CatalogueParseError(1, 1, "x")), ExitCode::kInputError},
        {std::make_exception_ptr(ScalarError(ScalarErrc::kSyntax, "x")), ExitCode::kInputError},
        {std::make_exception_ptr(AnalyzerError("x")), ExitCode::kInputError},
        {std::make_exception_ptr(ReportFormatError("x")), ExitCode::kInputError},
    };
    std::set<int> codes;
    for (const auto& [error, want] : cases) {
      const ExitCode got = exit_code_for(error);
      codes.insert(static_cast<int>(got));
      if (got != want) pass = false;
    }
    codes.insert(static_cast<int>(ExitCode::kOk));
    if (codes != std::set<int>{0, 1, 2, 3}) pass = false;
    return "7 error kinds map onto {1, 2, 3}; success is 0";
  });
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"scalar", "index", "jump", "analyzer", "cli"};
  return names;
}

std::vector<PropertyResult> run_selftest(const SelftestOptions& options) {
  for (const auto& s : options.suites) {
    if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end()) {
      throw std::invalid_argument("unknown suite '" + s + "'");
    }
  }
  auto wanted = [&](const std::string& s) {
    return options.suites.empty() || std::find(options.suites.begin(), options.suites.end(), s) != options.suites.end();
  };
  std::vector<PropertyResult> out;
  if (wanted("scalar")) scalar_suite(out);
  if (wanted("index")) index_suite(out);
  if (wanted("jump")) jump_suite(out);
  if (wanted("analyzer")) analyzer_suite(out);
  if (wanted("cli")) cli_suite(out, options.fixture_dir);
  return out;
}

}  // namespace cijump
