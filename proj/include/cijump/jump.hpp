#pragma once

/**
 * @file jump.hpp
 * @brief Constructive common index jump.
 *
 * Given orbits with mean indices D_i > 0, find iterates k_i (all divisible
 * by M) and an integer d such that every k_i D_i is within eta of d and the
 * indices of x_i^{k_i +/- l} are d-shifts of those of x_i^{+/- l}.
 *
 * The construction goes through the torus vector
 *
 *     v = (1/(M D_1), ..., 1/(M D_r), 2 lambda_11 / D_1, ..., 2 lambda_{r iota_r} / D_r)
 *
 * (lambda = fractional part of an irrational rotation number). An integer T
 * with {T v} close to a vertex chi of the unit cube gives
 *
 *     k_i = (floor(T / (M D_i)) + chi_i) * M.
 *
 * Vertices come from sign patterns of points in the subspace V annihilated
 * by the integer relations of v. Every accept/reject decision below is made
 * with exact arithmetic.
 */

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cijump/index.hpp"
#include "cijump/scalar.hpp"

namespace cijump {

enum class JumpErrc {
  kInvalidInput,
  kPrecondition,
  kExhausted,
};

class JumpError : public std::runtime_error {
 public:
  JumpError(JumpErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  JumpErrc code() const { return code_; }

 private:
  JumpErrc code_;
};

// --- torus vector --------------------------------------------------------------

enum class CoordinateKind { kMean, kElliptic };

struct CoordinateOrigin {
  CoordinateKind kind = CoordinateKind::kMean;
  std::size_t orbit = 0;
  /// Block index inside the orbit (elliptic coordinates only).
  std::size_t block = 0;
  /// frac(rho) for elliptic coordinates.
  ExactScalar lambda;
};

struct TorusVector {
  std::vector<ExactScalar> entries;
  std::vector<CoordinateOrigin> origins;
  std::int64_t M = 1;
  std::vector<ExactScalar> mean_indices;
  std::uint64_t radicand = 1;

  std::size_t h() const { return entries.size(); }
  std::size_t orbit_count() const { return mean_indices.size(); }
  bool has_irrational() const;
};

TorusVector build_torus_vector(const std::vector<OrbitSpectrum>& spectra, std::int64_t M);

// --- relations and orthants ----------------------------------------------------

using IntVector = std::vector<Integer>;
using RatVector = std::vector<Rational>;

struct RelationLattice {
  /// Integer basis of {w : w.v rational}.
  std::vector<IntVector> basis;
  /// Rational basis of V = {x : w.x = 0 for all relations w}.
  std::vector<RatVector> v_basis;

  std::size_t rank() const { return basis.size(); }
  std::size_t dim_v() const { return v_basis.size(); }
};

/// Integer kernel basis of the map Z^h -> Z^rows given by `rows`.
std::vector<IntVector> integer_kernel(const std::vector<IntVector>& rows, std::size_t h);

/// Exact dot product w.v.
ExactScalar dot(const IntVector& w, const std::vector<ExactScalar>& v);

RelationLattice relation_lattice(const TorusVector& v);

/// True iff w lies in the Z-span of the lattice basis.
bool in_lattice(const RelationLattice& lattice, const IntVector& w);

struct OrthantVertex {
  std::vector<int> chi;
  RatVector witness;

  friend bool operator==(const OrthantVertex&, const OrthantVertex&) = default;
};

/// One vertex per sign pattern found in A(v); closed under a -> -a.
/// Throws JumpError(kPrecondition) if v is rational.
std::vector<OrthantVertex> admissible_orthants(const RelationLattice& lattice, const TorusVector& v);

/// The all-zero vertex used when v has no irrational coordinate.
OrthantVertex zero_vertex(std::size_t h);

struct SignLink {
  std::size_t first = 0;
  std::size_t second = 0;
  /// v_first / v_second, rational and positive.
  ExactScalar ratio;
  bool holds = true;
};

/// Mean coordinates with a positive rational ratio must carry equal chi on
/// every vertex.
std::vector<SignLink> sign_linkage(const TorusVector& v, const std::vector<OrthantVertex>& vertices);

// --- T search --------------------------------------------------------------------

struct NearMiss {
  std::int64_t T = 0;
  ExactScalar max_distance;
  std::vector<ExactScalar> residuals;
};

struct SearchResult {
  std::vector<std::int64_t> hits;
  /// True when T_max was reached before `count` hits.
  bool exhausted = false;
  std::optional<NearMiss> best_near_miss;
};

/// Torus distance from frac(T v_k) to chi_k for every coordinate.
std::vector<ExactScalar> torus_residuals(const TorusVector& v, const std::vector<int>& chi,
                                         std::int64_t T);

/// Up to `count` integers T in [T_start, T_max], ascending, with every torus
/// residual < epsilon. Requires 0 < epsilon < 1/2.
SearchResult search_T(const TorusVector& v, const OrthantVertex& chi, const ExactScalar& epsilon,
                      std::int64_t T_max, std::size_t count, std::int64_t T_start = 1);

// --- solutions --------------------------------------------------------------------

struct VerificationLine {
  std::string check;
  std::string subject;
  std::int64_t l = 0;
  std::string lhs;
  std::string relation;
  std::string rhs;
  bool pass = false;
};

struct VerificationRecord {
  std::vector<VerificationLine> lines;
  std::vector<std::string> notes;

  bool all_pass() const;
  std::size_t failures() const;
};

struct JumpConfig {
  std::int64_t M = 1;
  std::int64_t N = 1;
  ExactScalar epsilon = ExactScalar::fraction(1, 1000);
  ExactScalar eta = ExactScalar::fraction(1, 20);
  int l0 = 1;
  std::int64_t T_max = 10'000'000;
  bool even_d = false;
  NegativeIterateConvention convention = NegativeIterateConvention::kFormula;
};

struct JumpSolution {
  std::int64_t T = 0;
  OrthantVertex chi;
  std::vector<std::int64_t> k;
  std::int64_t d = 0;
  std::int64_t M = 1;
  std::int64_t N = 1;
  bool even_d = false;
  ExactScalar epsilon;
  ExactScalar eta;
  /// Torus residuals |{T v} - chi|, one per coordinate.
  std::vector<ExactScalar> residuals;
  VerificationRecord report;
  std::vector<std::string> notes;
};

/// Largest admissible epsilon is strictly below 1/(16 M max D_i).
ExactScalar epsilon_ceiling(const std::vector<OrbitSpectrum>& spectra, std::int64_t M);

/// k_i and d for a given T and vertex, without any acceptance checks.
JumpSolution assemble_solution(const std::vector<OrbitSpectrum>& spectra, const TorusVector& v,
                               const OrthantVertex& chi, std::int64_t T, const JumpConfig& config);

/// Checks of the solution's defining invariants: elliptic closeness,
/// mean alignment, mean gap and divisibility.
VerificationRecord check_solution_invariants(const JumpSolution& solution,
                                             const std::vector<OrbitSpectrum>& spectra);

class SearchExhausted : public JumpError {
 public:
  SearchExhausted(const std::string& what, std::optional<NearMiss> near_miss, std::size_t rejected)
      : JumpError(JumpErrc::kExhausted, what), near_miss_(std::move(near_miss)), rejected_(rejected) {}
  const std::optional<NearMiss>& near_miss() const { return near_miss_; }
  /// Torus hits that failed the solution invariants.
  std::size_t rejected_hits() const { return rejected_; }

 private:
  std::optional<NearMiss> near_miss_;
  std::size_t rejected_;
};

/// First T (ascending) and vertex whose assembled solution satisfies every
/// invariant. epsilon is tightened below the ceiling if needed (noted).
JumpSolution solve_jump(const std::vector<OrbitSpectrum>& spectra, const JumpConfig& config);

/// Mean gap, elliptic closeness, mean alignment, divisibility, and the
/// forward/backward index shifts for 1 <= l <= l0.
VerificationRecord verify_recurrence(const JumpSolution& solution,
                                     const std::vector<OrbitSpectrum>& spectra, int l0,
                                     const ExactScalar& eta,
                                     NegativeIterateConvention convention =
                                         NegativeIterateConvention::kFormula);

/// Dynamically convex growth bounds for 1 <= l <= l_max. Throws
/// JumpError(kPrecondition) when some spectrum is not dynamically convex.
VerificationRecord verify_convexity_bounds(const JumpSolution& solution,
                                           const std::vector<OrbitSpectrum>& spectra, int n,
                                           int l_max);

}  // namespace cijump
