#pragma once

// Catalogue-level checks: degree windows, carrier feasibility, rationality
// and ratio classification, resonance.
//
// The carrier map from homology degrees to orbit iterates is not computed.
// It is treated as an axiom with two consequences that can be checked on a
// finite catalogue:
//   sandwich:  mu_-(y_D) <= D <= mu_+(y_D) for the carrier y_D of degree D
//   monotone:  carriers of distinct degrees have distinct actions.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cijump/index.hpp"
#include "cijump/jump.hpp"
#include "cijump/scalar.hpp"

namespace cijump {

class AnalyzerError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Provenance { kUser, kEllipsoid };

struct OrbitCatalogue {
  int n = 0;
  std::vector<OrbitSpectrum> orbits;
  Provenance provenance = Provenance::kUser;
  /// Ellipsoid weights; empty for user catalogues.
  std::vector<ExactScalar> alpha;
  std::vector<std::string> warnings;
  /// Set when a rational weight ratio makes infinitely many orbits expected.
  bool resonance_mode = false;
};

/// n >= 2, at least one orbit, n-1 blocks per orbit, positive actions,
/// distinct labels. Throws AnalyzerError.
void validate_catalogue(const OrbitCatalogue& catalogue);

/// Orbits on the axes of sum alpha_i (p_i^2 + q_i^2) / 2 = 1.
OrbitCatalogue ellipsoid_catalogue(const std::vector<ExactScalar>& alpha);

struct DegreeWindow {
  std::int64_t d = 0;
  int n = 0;
  std::vector<std::int64_t> degrees;
};

/// Degrees of parity n+1 in [d-2, d+n] (n odd) or [d-1, d+n] (n even).
/// Requires d even and d >= n+3.
DegreeWindow degree_window(std::int64_t d, int n);

/// floor((n+1)/2) + 1.
std::size_t window_size(int n);

struct CarrierCandidate {
  std::size_t orbit = 0;
  std::int64_t k = 0;
  IndexPair indices;
};

struct DegreeCarriers {
  std::int64_t degree = 0;
  std::vector<CarrierCandidate> admissible;
  /// Orbit chosen by the distinct-orbit matching, if any.
  std::optional<std::size_t> matched;
};

struct CarrierConflict {
  std::int64_t first = 0;
  std::int64_t second = 0;
  CarrierCandidate shared;
};

struct SdmFlag {
  std::int64_t degree = 0;
  std::vector<CarrierCandidate> iterates;
};

struct CarrierTable {
  DegreeWindow window;
  std::vector<DegreeCarriers> degrees;
  std::vector<SdmFlag> sdm_flags;
  std::vector<CarrierConflict> conflicts;
  std::vector<std::int64_t> empty_degrees;
  /// Size of a largest matching of window degrees to distinct orbits.
  std::size_t distinct_orbits = 0;

  bool consistent() const { return empty_degrees.empty() && conflicts.empty(); }
  /// Orbits matched to some window degree, ascending.
  std::vector<std::size_t> carrier_orbits() const;
};

/// Candidates are the iterates with k D_i within (blocks + 1) of the
/// window. Each block keeps mu_-/+ within 1 of its mean contribution, so no
/// iterate outside this range can satisfy the sandwich. Throws
/// AnalyzerError when an orbit is not dynamically convex.
CarrierTable carrier_feasibility(const OrbitCatalogue& catalogue, const JumpSolution& solution);

enum class VerdictStatus { kPass, kFail, kNotApplicable };

const char* to_string(VerdictStatus status);

struct Verdict {
  std::string name;
  VerdictStatus status = VerdictStatus::kNotApplicable;
  std::string detail;
  /// Count minus required count where meaningful.
  std::int64_t margin = 0;
};

struct MeanEqualityWitness {
  std::size_t first = 0;
  std::size_t second = 0;
  ExactScalar first_value;   // k_first * D_first
  ExactScalar second_value;  // k_second * D_second
  std::int64_t d = 0;
};

struct RationalityPartition {
  std::vector<std::size_t> rational;
  std::vector<std::size_t> irrational;
  /// Orbits the partition was taken over.
  std::vector<std::size_t> scope;
  std::optional<MeanEqualityWitness> witness;
  Verdict verdict;
};

/// Partition of `scope` (all orbits when empty) by rationality of the mean
/// index. The verdict asks for at least floor((n+1)/2) irrational and at
/// most one rational orbit; two rational carriers get the witness
/// k_a D_a = k_b D_b = d when a solution is given.
RationalityPartition classify_rationality(const OrbitCatalogue& catalogue,
                                          const std::vector<std::size_t>& scope,
                                          const JumpSolution* solution = nullptr);

/// True iff a/b is rational; both nonzero, common radicand.
bool ratio_is_rational(const ExactScalar& a, const ExactScalar& b);

struct RatioMatrix {
  /// rational[i][j] over all catalogue orbits.
  std::vector<std::vector<bool>> rational;
  /// Largest subset of `scope` with pairwise irrational ratios.
  std::vector<std::size_t> irrational_subset;
  Verdict verdict;
};

RatioMatrix ratio_matrix(const OrbitCatalogue& catalogue, const std::vector<std::size_t>& scope = {});

struct ResonanceEntry {
  std::size_t orbit = 0;
  PiMultiple ratio;
};

struct ResonanceTable {
  std::vector<ResonanceEntry> entries;
  /// Pairwise coefficient differences c_i - c_j, row-major over entries.
  std::vector<std::vector<ExactScalar>> differences;
  Verdict verdict;
};

ResonanceTable resonance_check(const OrbitCatalogue& catalogue);

struct AnalysisReport {
  std::vector<ExactScalar> means;
  std::optional<CarrierTable> carriers;
  RationalityPartition rationality;
  RatioMatrix ratios;
  ResonanceTable resonance;
  std::vector<Verdict> verdicts;
  std::vector<std::string> warnings;

  bool any_fail() const;
};

/// Full report. With a solution, scope is the matched window carriers and
/// the solution is re-checked first.
AnalysisReport analyze(const OrbitCatalogue& catalogue, const JumpSolution* solution = nullptr);

}  // namespace cijump
