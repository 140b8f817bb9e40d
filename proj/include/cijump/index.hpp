#pragma once

/**
 * @file index.hpp
 * @brief Block calculus for Conley-Zehnder indices of iterated orbits.
 *
 * The linearized return map of a closed orbit is described by a list of
 * 2-dimensional transverse blocks. The indices of the k-th iterate are
 *
 *     mu_{-/+}(x^k) = 2k + sum over blocks of the block contribution,
 *
 * where the 2k term is the orbit (longitudinal) normalization. Per block:
 *
 *   rotation rho, k*rho not integer   (2 floor(k rho) + 1, same)
 *   rotation rho, k*rho integer       (2 k rho - 1, 2 k rho + 1)
 *   trivial_plus   N1(1,1)            (-1, 0)   every iterate
 *   trivial_minus  N1(1,-1)           ( 0, 1)   every iterate
 *   hyperbolic_pos                    ( 0, 0)
 *   hyperbolic_neg                    ( k, k)
 *
 * The mean index is 2 + sum(2 rho) + (number of hyperbolic_neg blocks).
 * crossing_count_oracle() recomputes all of the above numerically from
 * explicit generating paths and is the check on this table.
 */

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cijump/scalar.hpp"

namespace cijump {

enum class BlockKind {
  kRotation,
  kTrivialPlus,
  kTrivialMinus,
  kHyperbolicPos,
  kHyperbolicNeg,
};

const char* to_string(BlockKind kind);
/// Inverse of to_string(BlockKind); throws std::invalid_argument.
BlockKind block_kind_from_string(const std::string& name);

struct TransverseBlock {
  BlockKind kind = BlockKind::kHyperbolicPos;
  /// Total rotation number (not reduced mod 1); only meaningful for kRotation.
  ExactScalar rho;

  static TransverseBlock rotation(ExactScalar rho);
  static TransverseBlock of_kind(BlockKind kind);

  friend bool operator==(const TransverseBlock&, const TransverseBlock&) = default;
};

struct OrbitSpectrum {
  std::string label;
  std::vector<TransverseBlock> blocks;
  PiMultiple action;
  bool reoccurring = false;
  /// Iteration count relative to the prime orbit; 1 for prime orbits.
  std::int64_t multiplicity = 1;

  friend bool operator==(const OrbitSpectrum&, const OrbitSpectrum&) = default;
};

struct IndexPair {
  std::int64_t lower = 0;
  std::int64_t upper = 0;

  std::int64_t degeneracy() const { return upper - lower; }
  IndexPair& operator+=(const IndexPair& rhs) {
    lower += rhs.lower;
    upper += rhs.upper;
    return *this;
  }
  friend IndexPair operator+(IndexPair lhs, const IndexPair& rhs) { return lhs += rhs; }
  friend bool operator==(const IndexPair&, const IndexPair&) = default;
};

class IndexError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// How mu(Phi^{-l}) is evaluated for negative iterates.
enum class NegativeIterateConvention {
  /// Evaluate the per-block formulas at k = -l (floors and all).
  kFormula,
  /// Reverse the path: mu_{-/+}(Phi^{-l}) = -mu_{+/-}(Phi^l).
  kPathReversal,
};

const char* to_string(NegativeIterateConvention convention);

/// Throws IndexError for a non-positive rotation number.
void validate(const OrbitSpectrum& spec);

ExactScalar mean_index(const OrbitSpectrum& spec);

/// Contribution of one block to mu_{-/+}(x^k), k != 0.
IndexPair block_contribution(const TransverseBlock& block, std::int64_t k,
                             std::int64_t multiplicity = 1);

IndexPair iterate_indices(const OrbitSpectrum& spec, std::int64_t k,
                          NegativeIterateConvention convention = NegativeIterateConvention::kFormula);

/// k-fold iterate as a spectrum of its own: rho and action scaled by k.
OrbitSpectrum iterate(const OrbitSpectrum& spec, std::int64_t k);

struct SignatureMultiplicities {
  std::int64_t plus = 0;
  std::int64_t minus = 0;
  friend bool operator==(const SignatureMultiplicities&, const SignatureMultiplicities&) = default;
};

/// Shipped convention: b+ = b- = 1 for each rotation block with k*rho integer,
/// zero otherwise. Trivial and hyperbolic blocks contribute nothing. This is a
/// convention; the backward-shift identity is what validates it.
SignatureMultiplicities signature_multiplicities(const OrbitSpectrum& spec, std::int64_t k);

inline constexpr const char* kSignatureConventionNote =
    "b+/b- split is a convention: b+ = b- = 1 per rotation block at an eigenvalue-1 "
    "iterate, 0 otherwise";

struct ConvexityCheck {
  bool convex = false;
  /// mu_-(x) - (n + 1).
  std::int64_t margin = 0;
};

ConvexityCheck is_dynamically_convex(const OrbitSpectrum& spec, int n);

/// Action over mean index; invariant under iteration.
PiMultiple mean_action_ratio(const OrbitSpectrum& spec);

// --- numerical oracle --------------------------------------------------------

class OracleResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Signed crossing count of the block's generating path (iterated k times)
/// against the eigenvalue-1 locus. Degenerate endpoints are resolved by
/// the two small rotational perturbations; lower/upper are the min/max.
IndexPair oracle_block_contribution(const TransverseBlock& block, std::int64_t k, int samples,
                                    std::int64_t multiplicity = 1);

/// Total oracle indices of the k-th iterate, including the 2k normalization.
IndexPair crossing_count_oracle(const std::vector<TransverseBlock>& blocks, std::int64_t k,
                                int samples, std::int64_t multiplicity = 1);

}  // namespace cijump
