#include "cijump/index.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

namespace cijump {

const char* to_string(BlockKind kind) {
  switch (kind) {
    case BlockKind::kRotation: return "rotation";
    case BlockKind::kTrivialPlus: return "trivial_plus";
    case BlockKind::kTrivialMinus: return "trivial_minus";
    case BlockKind::kHyperbolicPos: return "hyperbolic_pos";
    case BlockKind::kHyperbolicNeg: return "hyperbolic_neg";
  }
  return "unknown";
}

BlockKind block_kind_from_string(const std::string& name) {
  for (BlockKind kind : {BlockKind::kRotation, BlockKind::kTrivialPlus, BlockKind::kTrivialMinus,
                         BlockKind::kHyperbolicPos, BlockKind::kHyperbolicNeg}) {
    if (name == to_string(kind)) return kind;
  }
  throw std::invalid_argument("unknown block kind '" + name + "'");
}

const char* to_string(NegativeIterateConvention convention) {
  switch (convention) {
    case NegativeIterateConvention::kFormula: return "formula";
    case NegativeIterateConvention::kPathReversal: return "path_reversal";
  }
  return "unknown";
}

TransverseBlock TransverseBlock::rotation(ExactScalar rho) {
  return TransverseBlock{BlockKind::kRotation, std::move(rho)};
}

TransverseBlock TransverseBlock::of_kind(BlockKind kind) { return TransverseBlock{kind, {}}; }

namespace {

std::int64_t to_int64(const Integer& value) {
  if (!value.fits_slong_p()) throw IndexError("index value overflows 64 bits");
  return value.get_si();
}

}  // namespace

void validate(const OrbitSpectrum& spec) {
  for (const auto& block : spec.blocks) {
    if (block.kind == BlockKind::kRotation && block.rho.sign() <= 0) {
      throw IndexError("orbit " + spec.label + ": rotation number must be positive, got " +
                       block.rho.to_literal());
    }
  }
  if (spec.action.coefficient().sign() <= 0) {
    throw IndexError("orbit " + spec.label + ": action must be positive");
  }
  if (spec.multiplicity < 1) throw IndexError("orbit " + spec.label + ": multiplicity must be >= 1");
}

ExactScalar mean_index(const OrbitSpectrum& spec) {
  ExactScalar total(2 * spec.multiplicity);
  for (const auto& block : spec.blocks) {
    if (block.kind == BlockKind::kRotation) {
      total += ExactScalar(2) * block.rho;
    } else if (block.kind == BlockKind::kHyperbolicNeg) {
      total += ExactScalar(spec.multiplicity);
    }
  }
  return total;
}

IndexPair block_contribution(const TransverseBlock& block, std::int64_t k,
                             std::int64_t multiplicity) {
  if (k == 0) throw IndexError("iterate k must be nonzero");
  switch (block.kind) {
    case BlockKind::kRotation: {
      const ExactScalar turns = ExactScalar(k) * block.rho;
      if (turns.is_integer()) {
        const std::int64_t n = to_int64(turns.rational_part().get_num());
        return {2 * n - 1, 2 * n + 1};
      }
      const std::int64_t f = to_int64(floor_scalar(turns));
      return {2 * f + 1, 2 * f + 1};
    }
    case BlockKind::kTrivialPlus: return {-1, 0};
    case BlockKind::kTrivialMinus: return {0, 1};
    case BlockKind::kHyperbolicPos: return {0, 0};
    case BlockKind::kHyperbolicNeg: return {k * multiplicity, k * multiplicity};
  }
  return {};
}

IndexPair iterate_indices(const OrbitSpectrum& spec, std::int64_t k,
                          NegativeIterateConvention convention) {
  if (k == 0) throw IndexError("iterate k must be nonzero");
  if (k < 0 && convention == NegativeIterateConvention::kPathReversal) {
    const IndexPair forward = iterate_indices(spec, -k, NegativeIterateConvention::kFormula);
    return {-forward.upper, -forward.lower};
  }
  IndexPair total{2 * k * spec.multiplicity, 2 * k * spec.multiplicity};
  for (const auto& block : spec.blocks) total += block_contribution(block, k, spec.multiplicity);
  return total;
}

OrbitSpectrum iterate(const OrbitSpectrum& spec, std::int64_t k) {
  if (k < 1) throw IndexError("iterate() needs k >= 1");
  OrbitSpectrum out = spec;
  out.label = spec.label + "^" + std::to_string(k);
  for (auto& block : out.blocks) {
    if (block.kind == BlockKind::kRotation) block.rho *= ExactScalar(k);
  }
  out.action = spec.action * ExactScalar(k);
  out.multiplicity = spec.multiplicity * k;
  return out;
}

SignatureMultiplicities signature_multiplicities(const OrbitSpectrum& spec, std::int64_t k) {
  if (k < 1) throw IndexError("signature multiplicities need k >= 1");
  SignatureMultiplicities out;
  for (const auto& block : spec.blocks) {
    if (block.kind == BlockKind::kRotation && (ExactScalar(k) * block.rho).is_integer()) {
      ++out.plus;
      ++out.minus;
    }
  }
  return out;
}

ConvexityCheck is_dynamically_convex(const OrbitSpectrum& spec, int n) {
  const IndexPair first = iterate_indices(spec, 1);
  const std::int64_t margin = first.lower - (n + 1);
  return {margin >= 0, margin};
}

PiMultiple mean_action_ratio(const OrbitSpectrum& spec) {
  const ExactScalar mean = mean_index(spec);
  if (mean.is_zero()) throw IndexError("orbit " + spec.label + ": zero mean index");
  return spec.action / mean;
}

// --- crossing-count oracle -----------------------------------------------------
//
// The graph of Phi in (R^2 x R^2, -omega + omega) is a Lagrangian plane; it
// meets the graph of the identity exactly when Phi has eigenvalue 1. After the
// reflection z -> diag(1,-1) z on the first factor both graphs are Lagrangian
// for the standard form, and the Souriau map L -> U(L) = (X+iY)(X-iY)^{-1}
// turns intersections into eigenvalue-1 events of W = U(Gr I)^* U(Gr Phi).
// Crossings are counted by following the eigenvalue phases of W.

namespace {

using Mat2 = std::array<double, 4>;  // row-major
using Cx = std::complex<double>;
using CMat2 = std::array<Cx, 4>;

Mat2 mul(const Mat2& x, const Mat2& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
          x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
}

Mat2 rotation_matrix(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c, -s, s, c};
}

CMat2 cmul(const CMat2& x, const CMat2& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
          x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
}

CMat2 cinv(const CMat2& x) {
  const Cx det = x[0] * x[3] - x[1] * x[2];
  return {x[3] / det, -x[1] / det, -x[2] / det, x[0] / det};
}

CMat2 adjoint(const CMat2& x) {
  return {std::conj(x[0]), std::conj(x[2]), std::conj(x[1]), std::conj(x[3])};
}

CMat2 souriau(const Mat2& phi) {
  // Frame rows (q1, p1, q2, p2) = [diag(1,-1); Phi]; X = q-rows, Y = p-rows.
  const Mat2 X{1.0, 0.0, phi[0], phi[1]};
  const Mat2 Y{0.0, -1.0, phi[2], phi[3]};
  CMat2 plus;
  CMat2 minus;
  for (int i = 0; i < 4; ++i) {
    plus[i] = Cx(X[i], Y[i]);
    minus[i] = Cx(X[i], -Y[i]);
  }
  return cmul(plus, cinv(minus));
}

std::array<double, 2> eigen_phases(const CMat2& w) {
  const Cx tr = w[0] + w[3];
  const Cx det = w[0] * w[3] - w[1] * w[2];
  const Cx disc = std::sqrt(tr * tr / 4.0 - det);
  return {std::arg(tr / 2.0 + disc), std::arg(tr / 2.0 - disc)};
}

double wrap(double angle) { return std::remainder(angle, 2.0 * std::numbers::pi); }

using Path = std::function<Mat2(double)>;

class PhaseTracker {
 public:
  explicit PhaseTracker(const Path& path) : path_(path), reference_(adjoint(souriau({1, 0, 0, 1}))) {}

  std::array<double, 2> phases_at(double t) const {
    return eigen_phases(cmul(reference_, souriau(path_(t))));
  }

  // Unwrapped phases at t = 1 plus the signed crossing count.
  double count(int samples) {
    phase_ = {0.0, 0.0};
    started_ = false;
    half_count_ = 0.0;
    crossings_ = 0;
    double t = 0.0;
    const double dt = 1.0 / samples;
    for (int i = 1; i <= samples; ++i) {
      const double next = (i == samples) ? 1.0 : i * dt;
      advance(t, next, 0);
      t = next;
    }
    for (double p : phase_) {
      const double r = wrap(p);
      if (std::abs(r) < kDegenerateTol) {
        throw OracleResolutionError("oracle: endpoint still degenerate after perturbation");
      }
    }
    return half_count_ + crossings_;
  }

 private:
  static constexpr double kMaxStep = 0.25;
  static constexpr double kDegenerateTol = 1e-10;
  static constexpr int kMaxDepth = 48;

  void advance(double t0, double t1, int depth) {
    const auto raw = phases_at(t1);
    // Match new eigenphases to the tracked ones by circular distance.
    const double d00 = std::abs(wrap(raw[0] - phase_[0])) + std::abs(wrap(raw[1] - phase_[1]));
    const double d01 = std::abs(wrap(raw[1] - phase_[0])) + std::abs(wrap(raw[0] - phase_[1]));
    const std::array<double, 2> matched = d00 <= d01 ? raw : std::array<double, 2>{raw[1], raw[0]};
    const std::array<double, 2> step{wrap(matched[0] - phase_[0]), wrap(matched[1] - phase_[1])};
    if (std::max(std::abs(step[0]), std::abs(step[1])) > kMaxStep) {
      if (depth >= kMaxDepth) throw OracleResolutionError("oracle: cannot resolve phase motion");
      const double mid = 0.5 * (t0 + t1);
      advance(t0, mid, depth + 1);
      advance(mid, t1, depth + 1);
      return;
    }
    for (int j = 0; j < 2; ++j) {
      const double before = phase_[j];
      const double after = before + step[j];
      if (!started_) {
        // Both phases leave 0 at t = 0; each departure is half a crossing.
        if (std::abs(after) < kDegenerateTol) {
          throw OracleResolutionError("oracle: no phase motion at the start, refine samples");
        }
        half_count_ += after > 0 ? 0.5 : -0.5;
      } else {
        crossings_ += region(after) - region(before);
      }
      phase_[j] = after;
    }
    started_ = true;
  }

  static long region(double phase) {
    return static_cast<long>(std::floor(phase / (2.0 * std::numbers::pi)));
  }

  const Path& path_;
  CMat2 reference_;
  std::array<double, 2> phase_{0.0, 0.0};
  bool started_ = false;
  double half_count_ = 0.0;
  long crossings_ = 0;
};

Path generating_path(const TransverseBlock& block, std::int64_t k, std::int64_t multiplicity) {
  const double kd = static_cast<double>(k);
  switch (block.kind) {
    case BlockKind::kRotation: {
      const double angle = 2.0 * std::numbers::pi * block.rho.to_double() * kd;
      return [angle](double t) { return rotation_matrix(angle * t); };
    }
    case BlockKind::kTrivialPlus:
      return [kd](double t) { return Mat2{1.0, kd * t, 0.0, 1.0}; };
    case BlockKind::kTrivialMinus:
      return [kd](double t) { return Mat2{1.0, -kd * t, 0.0, 1.0}; };
    case BlockKind::kHyperbolicPos: {
      const double s = std::log(2.0) * kd;
      return [s](double t) { return Mat2{std::exp(s * t), 0.0, 0.0, std::exp(-s * t)}; };
    }
    case BlockKind::kHyperbolicNeg: {
      // Turn by pi per iteration first, then stretch.
      const double turns = static_cast<double>(k * multiplicity);
      const double s = std::log(2.0) * turns;
      return [turns, s](double t) {
        if (t <= 0.5) return rotation_matrix(std::numbers::pi * turns * 2.0 * t);
        const double u = 2.0 * t - 1.0;
        return mul(rotation_matrix(std::numbers::pi * turns),
                   Mat2{std::exp(s * u), 0.0, 0.0, std::exp(-s * u)});
      };
    }
  }
  return [](double) { return Mat2{1, 0, 0, 1}; };
}

}  // namespace

IndexPair oracle_block_contribution(const TransverseBlock& block, std::int64_t k, int samples,
                                    std::int64_t multiplicity) {
  if (k < 1) throw IndexError("oracle needs k >= 1");
  if (samples < 1) throw IndexError("oracle needs a positive sample count");
  const Path base = generating_path(block, k, multiplicity);
  // Rounding in the endpoint grows with the total turning angle, and the
  // base grid must not alias a full turn between samples.
  const double turning = 2.0 * std::numbers::pi * static_cast<double>(k * multiplicity) *
                         (1.0 + std::abs(block.rho.to_double()));
  samples = std::max(samples, static_cast<int>(std::ceil(4.0 * turning)));

  // Gap of the unperturbed endpoint from the eigenvalue-1 locus decides how
  // small the resolving perturbation has to be.
  const Path base_ref = base;
  PhaseTracker probe(base_ref);
  const auto end = probe.phases_at(1.0);
  const double gap = std::min(std::abs(wrap(end[0])), std::abs(wrap(end[1])));
  constexpr double kDefaultDelta = 1e-4;
  const double degenerate_tol = 1e-14 * std::max(1.0, turning);
  double delta = kDefaultDelta;
  if (gap > 1e-9) {
    delta = std::min(kDefaultDelta, gap / 8.0);
  } else if (gap > degenerate_tol) {
    throw OracleResolutionError("oracle: endpoint too close to degenerate to classify");
  }

  std::array<long, 2> counts{};
  for (int side = 0; side < 2; ++side) {
    const double signed_delta = side == 0 ? -delta : delta;
    const Path perturbed = [&base, signed_delta](double t) {
      return mul(base(t), rotation_matrix(signed_delta * t));
    };
    PhaseTracker tracker(perturbed);
    counts[side] = std::lround(tracker.count(samples));
  }
  return {std::min(counts[0], counts[1]), std::max(counts[0], counts[1])};
}

IndexPair crossing_count_oracle(const std::vector<TransverseBlock>& blocks, std::int64_t k,
                                int samples, std::int64_t multiplicity) {
  IndexPair total{2 * k * multiplicity, 2 * k * multiplicity};
  for (const auto& block : blocks) total += oracle_block_contribution(block, k, samples, multiplicity);
  return total;
}

}  // namespace cijump
