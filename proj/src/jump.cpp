#include "cijump/jump.hpp"

#include <algorithm>
#include <map>
#include <random>

namespace cijump {

namespace {

Integer lcm_int(const Integer& x, const Integer& y) {
  Integer out;
  mpz_lcm(out.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
  return out;
}

Integer floor_mod(const Integer& x, const Integer& m) {
  Integer r;
  mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
  return r;
}

Integer isqrt(const Integer& n) {
  Integer root;
  mpz_sqrt(root.get_mpz_t(), n.get_mpz_t());
  return root;
}

std::int64_t to_int64(const Integer& value, const char* what) {
  if (!value.fits_slong_p()) throw JumpError(JumpErrc::kInvalidInput, std::string(what) + " overflows 64 bits");
  return value.get_si();
}

ExactScalar torus_distance(const ExactScalar& x, int chi) {
  const ExactScalar gap = abs(frac_scalar(x) - ExactScalar(chi));
  const ExactScalar wrap = ExactScalar(1) - gap;
  return gap < wrap ? gap : wrap;
}

}  // namespace

bool TorusVector::has_irrational() const {
  return std::any_of(entries.begin(), entries.end(), [](const ExactScalar& x) { return !x.is_rational(); });
}

TorusVector build_torus_vector(const std::vector<OrbitSpectrum>& spectra, std::int64_t M) {
  if (M < 1) throw JumpError(JumpErrc::kInvalidInput, "M must be a positive integer");
  if (spectra.empty()) throw JumpError(JumpErrc::kInvalidInput, "no orbits given");
  TorusVector v;
  v.M = M;
  for (const auto& spec : spectra) {
    validate(spec);
    ExactScalar delta = mean_index(spec);
    if (delta.sign() <= 0) {
      throw JumpError(JumpErrc::kInvalidInput,
                      "orbit " + spec.label + " has non-positive mean index " + delta.to_literal());
    }
    v.radicand = common_radicand(ExactScalar::sqrt(v.radicand), delta);
    v.mean_indices.push_back(std::move(delta));
  }
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    v.entries.push_back(ExactScalar(1) / (ExactScalar(M) * v.mean_indices[i]));
    v.origins.push_back({CoordinateKind::kMean, i, 0, {}});
  }
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    const auto& blocks = spectra[i].blocks;
    for (std::size_t q = 0; q < blocks.size(); ++q) {
      if (blocks[q].kind != BlockKind::kRotation) continue;
      ExactScalar lambda = frac_scalar(blocks[q].rho);
      if (lambda.is_rational()) continue;
      v.radicand = common_radicand(ExactScalar::sqrt(v.radicand), lambda);
      v.entries.push_back(ExactScalar(2) * lambda / v.mean_indices[i]);
      v.origins.push_back({CoordinateKind::kElliptic, i, q, std::move(lambda)});
    }
  }
  return v;
}

// --- relations ---------------------------------------------------------------------

std::vector<IntVector> integer_kernel(const std::vector<IntVector>& rows, std::size_t h) {
  // Column operations on [rows; I]: the identity part accumulates a
  // unimodular U with rows*U in column echelon form.
  std::vector<IntVector> a = rows;
  std::vector<IntVector> u(h, IntVector(h, 0));
  for (std::size_t j = 0; j < h; ++j) u[j][j] = 1;  // u[col][row]
  auto swap_cols = [&](std::size_t x, std::size_t y) {
    if (x == y) return;
    for (auto& row : a) std::swap(row[x], row[y]);
    std::swap(u[x], u[y]);
  };
  auto sub_col = [&](std::size_t target, std::size_t source, const Integer& q) {
    for (auto& row : a) row[target] -= q * row[source];
    for (std::size_t r = 0; r < h; ++r) u[target][r] -= q * u[source][r];
  };

  std::size_t pivot = 0;
  for (auto& row_ref : a) {
    const std::size_t row = static_cast<std::size_t>(&row_ref - a.data());
    if (pivot >= h) break;
    for (;;) {
      std::size_t best = h;
      for (std::size_t j = pivot; j < h; ++j) {
        if (a[row][j] == 0) continue;
        if (best == h || abs(a[row][j]) < abs(a[row][best])) best = j;
      }
      if (best == h) break;
      swap_cols(pivot, best);
      bool clean = true;
      for (std::size_t j = pivot + 1; j < h; ++j) {
        if (a[row][j] == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), a[row][j].get_mpz_t(), a[row][pivot].get_mpz_t());
        sub_col(j, pivot, q);
        if (a[row][j] != 0) clean = false;
      }
      if (clean) {
        ++pivot;
        break;
      }
    }
  }
  std::vector<IntVector> kernel;
  for (std::size_t j = pivot; j < h; ++j) kernel.push_back(u[j]);
  return kernel;
}

ExactScalar dot(const IntVector& w, const std::vector<ExactScalar>& v) {
  ExactScalar total;
  for (std::size_t k = 0; k < w.size() && k < v.size(); ++k) {
    if (w[k] != 0) total += ExactScalar(w[k]) * v[k];
  }
  return total;
}

RelationLattice relation_lattice(const TorusVector& v) {
  const std::size_t h = v.h();
  RatVector irrational(h);
  Integer scale = 1;
  bool any = false;
  for (std::size_t k = 0; k < h; ++k) {
    irrational[k] = v.entries[k].radical_coefficient();
    if (irrational[k] != 0) any = true;
    scale = lcm_int(scale, irrational[k].get_den());
  }
  RelationLattice lattice;
  std::vector<IntVector> rows;
  if (any) {
    IntVector row(h);
    for (std::size_t k = 0; k < h; ++k) {
      Rational scaled = irrational[k] * Rational(scale);
      scaled.canonicalize();
      row[k] = scaled.get_num();
    }
    rows.push_back(row);
    lattice.v_basis.push_back(irrational);
  }
  lattice.basis = integer_kernel(rows, h);
  return lattice;
}

namespace {

// Solves sum_j c_j * columns[j] = target over Q; nullopt when inconsistent.
std::optional<RatVector> solve_rational(const std::vector<IntVector>& columns, const IntVector& target) {
  const std::size_t n = columns.size();
  const std::size_t m = target.size();
  std::vector<RatVector> aug(m, RatVector(n + 1));
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) aug[r][c] = Rational(columns[c][r]);
    aug[r][n] = Rational(target[r]);
  }
  std::vector<std::size_t> pivot_cols;
  std::size_t row = 0;
  for (std::size_t c = 0; c < n && row < m; ++c) {
    std::size_t p = row;
    while (p < m && aug[p][c] == 0) ++p;
    if (p == m) continue;
    std::swap(aug[p], aug[row]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == row || aug[r][c] == 0) continue;
      const Rational f = aug[r][c] / aug[row][c];
      for (std::size_t cc = c; cc <= n; ++cc) aug[r][cc] -= f * aug[row][cc];
    }
    pivot_cols.push_back(c);
    ++row;
  }
  for (std::size_t r = row; r < m; ++r) {
    if (aug[r][n] != 0) return std::nullopt;
  }
  RatVector coeffs(n, 0);
  for (std::size_t i = 0; i < pivot_cols.size(); ++i) {
    coeffs[pivot_cols[i]] = aug[i][n] / aug[i][pivot_cols[i]];
  }
  return coeffs;
}

}  // namespace

bool in_lattice(const RelationLattice& lattice, const IntVector& w) {
  if (lattice.basis.empty()) return std::all_of(w.begin(), w.end(), [](const Integer& x) { return x == 0; });
  const auto coeffs = solve_rational(lattice.basis, w);
  if (!coeffs) return false;
  return std::all_of(coeffs->begin(), coeffs->end(), [](const Rational& c) { return c.get_den() == 1; });
}

OrthantVertex zero_vertex(std::size_t h) { return OrthantVertex{std::vector<int>(h, 0), RatVector(h, 0)}; }

std::vector<OrthantVertex> admissible_orthants(const RelationLattice& lattice, const TorusVector& v) {
  const std::size_t h = v.h();
  const std::size_t p = lattice.dim_v();
  if (!v.has_irrational()) {
    throw JumpError(JumpErrc::kPrecondition, "admissible orthants need an irrational coordinate");
  }
  if (p == 0) throw JumpError(JumpErrc::kPrecondition, "dim V = 0 with an irrational coordinate");

  std::vector<std::size_t> irrational;
  for (std::size_t k = 0; k < h; ++k) {
    if (!v.entries[k].is_rational()) irrational.push_back(k);
  }

  std::map<std::vector<int>, RatVector> found;
  auto consider = [&](const std::vector<long>& coeffs) {
    RatVector a(h, 0);
    for (std::size_t j = 0; j < p; ++j) {
      if (coeffs[j] == 0) continue;
      for (std::size_t k = 0; k < h; ++k) a[k] += Rational(coeffs[j]) * lattice.v_basis[j][k];
    }
    for (std::size_t k : irrational) {
      if (a[k] == 0) return;
    }
    for (int sign : {1, -1}) {
      std::vector<int> chi(h);
      RatVector witness(h);
      for (std::size_t k = 0; k < h; ++k) {
        witness[k] = sign > 0 ? a[k] : Rational(-a[k]);
        chi[k] = witness[k] < 0 ? 1 : 0;
      }
      found.emplace(std::move(chi), std::move(witness));
    }
  };

  constexpr long kRadius = 2;
  double combos = 1.0;
  for (std::size_t j = 0; j < p; ++j) combos *= 2 * kRadius + 1;
  if (h <= 12 && combos <= 1e5) {
    // Shells of increasing sup-norm keep witnesses small.
    for (long radius = 1; radius <= kRadius; ++radius) {
      std::vector<long> c(p, -radius);
      for (;;) {
        const long sup = std::transform_reduce(c.begin(), c.end(), 0L,
                                               [](long x, long y) { return std::max(x, y); },
                                               [](long x) { return std::labs(x); });
        if (sup == radius) consider(c);
        std::size_t j = 0;
        while (j < p && c[j] == radius) c[j++] = -radius;
        if (j == p) break;
        ++c[j];
      }
    }
  } else {
    std::mt19937_64 rng(0x5eed);
    std::uniform_int_distribution<long> coeff(-3, 3);
    for (int trial = 0; trial < 4000; ++trial) {
      std::vector<long> c(p);
      for (auto& x : c) x = coeff(rng);
      consider(c);
    }
  }
  std::vector<OrthantVertex> out;
  for (auto& [chi, witness] : found) out.push_back({chi, witness});
  return out;
}

std::vector<SignLink> sign_linkage(const TorusVector& v, const std::vector<OrthantVertex>& vertices) {
  std::vector<SignLink> links;
  const std::size_t r = v.orbit_count();
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = i + 1; j < r; ++j) {
      ExactScalar ratio = v.entries[i] / v.entries[j];
      if (!ratio.is_rational() || ratio.sign() <= 0) continue;
      SignLink link{i, j, std::move(ratio), true};
      for (const auto& vertex : vertices) {
        if (vertex.chi[i] != vertex.chi[j]) link.holds = false;
      }
      links.push_back(std::move(link));
    }
  }
  return links;
}

// --- T search ------------------------------------------------------------------------

std::vector<ExactScalar> torus_residuals(const TorusVector& v, const std::vector<int>& chi, std::int64_t T) {
  std::vector<ExactScalar> out;
  out.reserve(v.h());
  for (std::size_t k = 0; k < v.h(); ++k) out.push_back(torus_distance(ExactScalar(T) * v.entries[k], chi[k]));
  return out;
}

namespace {

// Exact torus-distance test with an integer fast path. For a coordinate
// x = (P + Q sqrt d)/D the value S*D*frac(T x) is bracketed between two
// consecutive integers using one integer square root; only brackets that
// straddle epsilon fall back to full field arithmetic.
class TorusScanner {
 public:
  TorusScanner(const TorusVector& v, const std::vector<int>& chi, const ExactScalar& epsilon)
      : v_(v), chi_(chi), epsilon_(epsilon) {
    if (!epsilon.is_rational()) {
      throw JumpError(JumpErrc::kInvalidInput, "epsilon must be rational");
    }
    eps_num_ = epsilon.rational_part().get_num();
    eps_den_ = epsilon.rational_part().get_den();
    const Integer scale = Integer(1) << 32;
    for (const auto& x : v.entries) {
      Coordinate c;
      const Rational& a = x.rational_part();
      const Rational& b = x.radical_coefficient();
      c.D = lcm_int(a.get_den(), b.get_den());
      c.P = a.get_num() * (c.D / a.get_den());
      c.Q = b.get_num() * (c.D / b.get_den());
      if (c.Q != 0) {
        c.scale = scale;
        c.K = scale * scale * c.Q * c.Q * Integer(static_cast<unsigned long>(x.radicand()));
      } else {
        c.scale = 1;
      }
      c.SD = c.scale * c.D;
      coords_.push_back(std::move(c));
    }
  }

  struct Bound {
    bool near = false;
    Integer score_num;  // rigorous lower bound of the distance: score_num / SD
    const Integer* score_den = nullptr;
  };

  // Decides coordinate k at T exactly.
  Bound evaluate(std::size_t k, const Integer& T, const Integer& T2) {
    const Coordinate& c = coords_[k];
    Integer m;
    bool exact;
    if (c.Q == 0) {
      m = floor_mod(T * c.P, c.D);
      exact = true;
    } else {
      Integer s = isqrt(c.K * T2);
      if (c.Q < 0) s = -s - 1;
      m = floor_mod(c.scale * T * c.P + s, c.SD);
      exact = false;
    }
    // chi shifts frac by an integer and so leaves the torus distance alone.
    Bound out;
    out.score_den = &c.SD;
    if (exact) {
      const Integer dist = std::min(m, Integer(c.SD - m));
      out.score_num = dist;
      out.near = dist * eps_den_ < eps_num_ * c.SD;
      return out;
    }
    // frac in (m/SD, (m+1)/SD): distance in (lower, upper].
    const Integer lower = std::min(m, Integer(c.SD - m - 1));
    const Integer upper = std::min(Integer(m + 1), Integer(c.SD - m));
    out.score_num = lower;
    if (upper * eps_den_ <= eps_num_ * c.SD) {
      out.near = true;
    } else if (lower * eps_den_ >= eps_num_ * c.SD) {
      out.near = false;
    } else {
      const ExactScalar x = ExactScalar(T) * v_.entries[k];
      out.near = torus_distance(x, chi_[k]) < epsilon_;
    }
    return out;
  }

  // Next hit in [from, to]; optionally tracks the closest miss.
  std::optional<std::int64_t> next_hit(std::int64_t from, std::int64_t to, bool track) {
    for (std::int64_t t = from; t <= to; ++t) {
      const Integer T(static_cast<long>(t));
      const Integer T2 = T * T;
      bool hit = true;
      // Score of this T: max over coordinates of the lower bound.
      Integer score_num = 0;
      const Integer* score_den = &one_;
      for (std::size_t k = 0; k < coords_.size(); ++k) {
        Bound b = evaluate(k, T, T2);
        if (track && b.score_num * (*score_den) > score_num * (*b.score_den)) {
          score_num = b.score_num;
          score_den = b.score_den;
        }
        if (!b.near) {
          hit = false;
          if (!track) break;
          if (has_best_ && score_num * best_den_ >= best_num_ * (*score_den)) break;
        }
      }
      if (hit) return t;
      if (track && (!has_best_ || score_num * best_den_ < best_num_ * (*score_den))) {
        has_best_ = true;
        best_T_ = t;
        best_num_ = score_num;
        best_den_ = *score_den;
      }
    }
    return std::nullopt;
  }

  std::optional<NearMiss> near_miss() const {
    if (!has_best_) return std::nullopt;
    NearMiss miss;
    miss.T = best_T_;
    miss.residuals = torus_residuals(v_, chi_, best_T_);
    miss.max_distance = *std::max_element(miss.residuals.begin(), miss.residuals.end());
    return miss;
  }

 private:
  struct Coordinate {
    Integer P, Q, D, K, SD, scale;
  };

  const TorusVector& v_;
  std::vector<int> chi_;
  ExactScalar epsilon_;
  Integer eps_num_, eps_den_;
  std::vector<Coordinate> coords_;
  Integer one_ = 1;
  bool has_best_ = false;
  std::int64_t best_T_ = 0;
  Integer best_num_ = 0;
  Integer best_den_ = 1;
};

void check_epsilon(const ExactScalar& epsilon) {
  if (epsilon.sign() <= 0 || !(epsilon < ExactScalar::fraction(1, 2))) {
    throw JumpError(JumpErrc::kInvalidInput, "epsilon must satisfy 0 < epsilon < 1/2");
  }
}

}  // namespace

SearchResult search_T(const TorusVector& v, const OrthantVertex& chi, const ExactScalar& epsilon,
                      std::int64_t T_max, std::size_t count, std::int64_t T_start) {
  check_epsilon(epsilon);
  if (count < 1) throw JumpError(JumpErrc::kInvalidInput, "count must be >= 1");
  if (chi.chi.size() != v.h()) throw JumpError(JumpErrc::kInvalidInput, "vertex dimension mismatch");
  TorusScanner scanner(v, chi.chi, epsilon);
  SearchResult result;
  std::int64_t from = std::max<std::int64_t>(T_start, 1);
  while (result.hits.size() < count) {
    const auto hit = scanner.next_hit(from, T_max, result.hits.empty());
    if (!hit) {
      result.exhausted = true;
      break;
    }
    result.hits.push_back(*hit);
    from = *hit + 1;
  }
  if (result.exhausted && result.hits.empty()) result.best_near_miss = scanner.near_miss();
  return result;
}

// --- solutions -------------------------------------------------------------------------

bool VerificationRecord::all_pass() const {
  return std::all_of(lines.begin(), lines.end(), [](const VerificationLine& l) { return l.pass; });
}

std::size_t VerificationRecord::failures() const {
  return static_cast<std::size_t>(
      std::count_if(lines.begin(), lines.end(), [](const VerificationLine& l) { return !l.pass; }));
}

ExactScalar epsilon_ceiling(const std::vector<OrbitSpectrum>& spectra, std::int64_t M) {
  ExactScalar largest;
  for (const auto& spec : spectra) {
    ExactScalar delta = abs(mean_index(spec));
    if (delta > largest) largest = delta;
  }
  return ExactScalar(1) / (ExactScalar(16 * M) * largest);
}

JumpSolution assemble_solution(const std::vector<OrbitSpectrum>& spectra, const TorusVector& v,
                               const OrthantVertex& chi, std::int64_t T, const JumpConfig& config) {
  JumpSolution s;
  s.T = T;
  s.chi = chi;
  s.M = config.M;
  s.N = config.N;
  s.even_d = config.even_d;
  s.epsilon = config.epsilon;
  s.eta = config.eta;
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    const Integer base = floor_scalar(ExactScalar(T) * v.entries[i]);
    s.k.push_back(to_int64((base + chi.chi[i]) * config.M, "k_i"));
  }
  const NearestInteger d = nearest_integer(ExactScalar(s.k[0]) * v.mean_indices[0]);
  s.d = to_int64(d.value, "d");
  s.residuals = torus_residuals(v, chi.chi, T);
  return s;
}

namespace {

VerificationLine make_line(std::string check, std::string subject, std::int64_t l, std::string lhs,
                           std::string relation, std::string rhs, bool pass) {
  return VerificationLine{std::move(check), std::move(subject), l,   std::move(lhs),
                          std::move(relation), std::move(rhs), pass};
}

std::string pair_literal(const IndexPair& p) {
  return "(" + std::to_string(p.lower) + "," + std::to_string(p.upper) + ")";
}

void append_invariants(VerificationRecord& record, const JumpSolution& s,
                       const std::vector<OrbitSpectrum>& spectra, const ExactScalar& eta) {
  const ExactScalar eighth = ExactScalar::fraction(1, 8);
  const ExactScalar d(s.d);
  ExactScalar first_mean;
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    const auto& spec = spectra[i];
    const std::int64_t k = s.k[i];
    record.lines.push_back(make_line("iterate_positive", spec.label, 0, std::to_string(k), ">=", "1", k >= 1));
    record.lines.push_back(make_line("k_divisibility", spec.label, 0, std::to_string(k), "divisible by",
                                     std::to_string(s.M), s.M > 0 && k % s.M == 0));
    const ExactScalar scaled_mean = ExactScalar(k) * mean_index(spec);
    for (std::size_t q = 0; q < spec.blocks.size(); ++q) {
      const auto& block = spec.blocks[q];
      if (block.kind != BlockKind::kRotation) continue;
      const ExactScalar lambda = frac_scalar(block.rho);
      if (lambda.is_rational()) continue;
      const ExactScalar gap = dist_to_integer(ExactScalar(k) * lambda);
      record.lines.push_back(make_line("elliptic_closeness", spec.label + ".block" + std::to_string(q), 0,
                                       gap.to_literal(), "<", s.epsilon.to_literal(), gap < s.epsilon));
    }
    if (i == 0) {
      first_mean = scaled_mean;
    } else {
      const ExactScalar gap = abs(first_mean - scaled_mean);
      record.lines.push_back(make_line("mean_alignment", spec.label, 0, gap.to_literal(), "<", "1/8",
                                       gap < eighth));
    }
    const NearestInteger nearest = nearest_integer(scaled_mean);
    record.lines.push_back(make_line("nearest_consistency", spec.label, 0, nearest.value.get_str(), "==",
                                     std::to_string(s.d), !nearest.tie && nearest.value == s.d));
    const ExactScalar gap = abs(scaled_mean - d);
    record.lines.push_back(make_line("mean_gap", spec.label, 0, gap.to_literal(), "<", eta.to_literal(), gap < eta));
  }
  record.lines.push_back(make_line("d_divisibility", "d", 0, std::to_string(s.d), "divisible by",
                                   std::to_string(s.N), s.N > 0 && s.d % s.N == 0));
  if (s.even_d) {
    record.lines.push_back(make_line("d_parity", "d", 0, std::to_string(s.d), "divisible by", "2", s.d % 2 == 0));
  }
}

}  // namespace

VerificationRecord check_solution_invariants(const JumpSolution& solution,
                                             const std::vector<OrbitSpectrum>& spectra) {
  if (solution.k.size() != spectra.size()) {
    throw JumpError(JumpErrc::kInvalidInput, "solution and catalogue disagree on the orbit count");
  }
  VerificationRecord record;
  append_invariants(record, solution, spectra, solution.eta);
  return record;
}

JumpSolution solve_jump(const std::vector<OrbitSpectrum>& spectra, const JumpConfig& input) {
  JumpConfig config = input;
  if (config.N < 1 || config.M < 1 || config.M % config.N != 0) {
    throw JumpError(JumpErrc::kInvalidInput, "M must be a positive multiple of N");
  }
  if (config.eta.sign() <= 0 || !(config.eta < ExactScalar::fraction(1, 2))) {
    throw JumpError(JumpErrc::kInvalidInput, "eta must satisfy 0 < eta < 1/2");
  }
  if (config.l0 < 1) throw JumpError(JumpErrc::kInvalidInput, "l0 must be >= 1");
  if (config.T_max < 1) throw JumpError(JumpErrc::kInvalidInput, "T_max must be >= 1");

  const TorusVector v = build_torus_vector(spectra, config.M);
  std::vector<std::string> notes;
  const ExactScalar ceiling = epsilon_ceiling(spectra, config.M);
  if (!config.epsilon.is_rational() || config.epsilon.sign() <= 0) {
    throw JumpError(JumpErrc::kInvalidInput, "epsilon must be a positive rational");
  }
  if (!(config.epsilon < ceiling)) {
    ExactScalar largest;
    for (const auto& delta : v.mean_indices) {
      if (delta > largest) largest = delta;
    }
    const Integer bound = (floor_scalar(largest) + 1) * 16 * config.M;
    const ExactScalar tightened = ExactScalar(Rational(1, 1) / Rational(bound));
    notes.push_back("epsilon auto-tightened from " + config.epsilon.to_literal() + " to " +
                    tightened.to_literal() + " (ceiling " + ceiling.to_literal() + ")");
    config.epsilon = tightened;
  }
  check_epsilon(config.epsilon);
  notes.push_back(
      "torus distance read componentwise with wraparound (sup norm); chi enters only through k_i");
  // Rational rotations are not torus coordinates; index shifts need M rho integral.
  for (const auto& spec : spectra) {
    for (const auto& block : spec.blocks) {
      if (block.kind != BlockKind::kRotation || !block.rho.is_rational()) continue;
      if (!(ExactScalar(config.M) * block.rho).is_integer()) {
        notes.push_back("M rho is not an integer for rational rotation " + block.rho.to_literal() + " of " +
                        spec.label + "; index shifts at that block may fail");
      }
    }
  }

  std::vector<OrthantVertex> vertices;
  if (v.has_irrational()) {
    vertices = admissible_orthants(relation_lattice(v), v);
  } else {
    vertices.push_back(zero_vertex(v.h()));
    notes.push_back("torus vector is rational; using the zero vertex");
  }

  TorusScanner scanner(v, vertices.front().chi, config.epsilon);
  std::size_t rejected = 0;
  bool any_hit = false;
  std::int64_t from = 1;
  while (from <= config.T_max) {
    const auto hit = scanner.next_hit(from, config.T_max, !any_hit);
    if (!hit) break;
    any_hit = true;
    for (const auto& vertex : vertices) {
      JumpSolution candidate = assemble_solution(spectra, v, vertex, *hit, config);
      if (std::any_of(candidate.k.begin(), candidate.k.end(), [](std::int64_t k) { return k < 1; })) {
        ++rejected;
        continue;
      }
      VerificationRecord record = check_solution_invariants(candidate, spectra);
      if (!record.all_pass()) {
        ++rejected;
        continue;
      }
      candidate.report = std::move(record);
      candidate.notes = notes;
      return candidate;
    }
    from = *hit + 1;
  }
  throw SearchExhausted("no admissible T <= " + std::to_string(config.T_max) + " (" +
                            std::to_string(rejected) + " torus hits rejected)",
                        any_hit ? std::nullopt : scanner.near_miss(), rejected);
}

VerificationRecord verify_recurrence(const JumpSolution& solution, const std::vector<OrbitSpectrum>& spectra,
                                     int l0, const ExactScalar& eta, NegativeIterateConvention convention) {
  if (solution.k.size() != spectra.size()) {
    throw JumpError(JumpErrc::kInvalidInput, "solution and catalogue disagree on the orbit count");
  }
  if (l0 < 1) throw JumpError(JumpErrc::kInvalidInput, "l0 must be >= 1");
  VerificationRecord record;
  append_invariants(record, solution, spectra, eta);
  record.notes.push_back(kSignatureConventionNote);
  record.notes.push_back(std::string("negative iterates evaluated by the ") + to_string(convention) +
                         " convention");
  const std::int64_t d = solution.d;
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    const auto& spec = spectra[i];
    const std::int64_t k = solution.k[i];
    for (int l = 1; l <= l0; ++l) {
      const IndexPair ahead = iterate_indices(spec, k + l, convention);
      const IndexPair base = iterate_indices(spec, l, convention);
      const IndexPair shifted{d + base.lower, d + base.upper};
      record.lines.push_back(make_line("forward_shift", spec.label, l, pair_literal(ahead), "==",
                                       pair_literal(shifted), ahead == shifted));

      if (k - l < 1) {
        record.lines.push_back(make_line("backward_shift", spec.label, l, "k-l<1", "==", "-", false));
        continue;
      }
      const IndexPair behind = iterate_indices(spec, k - l, convention);
      const IndexPair negative = iterate_indices(spec, -l, convention);
      const SignatureMultiplicities b = signature_multiplicities(spec, l);
      const std::int64_t correction = b.plus - b.minus;
      const IndexPair expected{d + negative.lower + correction, d + negative.upper + correction};
      record.lines.push_back(make_line("backward_shift", spec.label, l, pair_literal(behind), "==",
                                       pair_literal(expected), behind == expected));
    }
  }
  return record;
}

VerificationRecord verify_convexity_bounds(const JumpSolution& solution,
                                           const std::vector<OrbitSpectrum>& spectra, int n, int l_max) {
  if (solution.k.size() != spectra.size()) {
    throw JumpError(JumpErrc::kInvalidInput, "solution and catalogue disagree on the orbit count");
  }
  for (const auto& spec : spectra) {
    const ConvexityCheck check = is_dynamically_convex(spec, n);
    if (!check.convex) {
      throw JumpError(JumpErrc::kPrecondition, "orbit " + spec.label +
                                                   " is not dynamically convex (margin " +
                                                   std::to_string(check.margin) + ")");
    }
  }
  VerificationRecord record;
  const std::int64_t m = n - 1;
  const std::int64_t d = solution.d;
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    const auto& spec = spectra[i];
    const std::int64_t k = solution.k[i];
    for (int l = 1; l <= l_max; ++l) {
      const std::int64_t lower = iterate_indices(spec, k + l).lower;
      const std::int64_t floor_bound = d + 2 * l + m;
      record.lines.push_back(make_line("lower_growth", spec.label, l, std::to_string(lower), ">=",
                                       std::to_string(floor_bound), lower >= floor_bound));
      if (k - l < 1) {
        record.lines.push_back(make_line("upper_decay", spec.label, l, "k-l<1", "<=", "-", false));
        continue;
      }
      const std::int64_t upper = iterate_indices(spec, k - l).upper;
      const std::int64_t ceiling = d - 2 * l;
      record.lines.push_back(make_line("upper_decay", spec.label, l, std::to_string(upper), "<=",
                                       std::to_string(ceiling), upper <= ceiling));
    }
    const std::int64_t lower_one = iterate_indices(spec, k + 1).lower;
    const std::int64_t window = d + n + 1;
    record.lines.push_back(make_line("window_floor", spec.label, 1, std::to_string(lower_one), ">=",
                                     std::to_string(window), lower_one >= window));
    record.notes.push_back("window_floor slack for " + spec.label + ": " + std::to_string(lower_one - window));
  }
  return record;
}

}  // namespace cijump
