#include "cijump/analyzer.hpp"

#include <algorithm>
#include <bit>
#include <set>

namespace cijump {

void validate_catalogue(const OrbitCatalogue& catalogue) {
  if (catalogue.n < 2) throw AnalyzerError("n must be at least 2");
  if (catalogue.orbits.empty()) throw AnalyzerError("empty catalogue");
  std::set<std::string> labels;
  const std::size_t blocks = static_cast<std::size_t>(catalogue.n - 1);
  for (const auto& orbit : catalogue.orbits) {
    if (orbit.label.empty()) throw AnalyzerError("orbit without label");
    if (!labels.insert(orbit.label).second) throw AnalyzerError("duplicate orbit label " + orbit.label);
    if (orbit.blocks.size() != blocks) {
      throw AnalyzerError("orbit " + orbit.label + " has " + std::to_string(orbit.blocks.size()) +
                          " blocks, expected " + std::to_string(blocks));
    }
    if (orbit.action.coefficient().sign() <= 0) {
      throw AnalyzerError("orbit " + orbit.label + " has non-positive action");
    }
    try {
      validate(orbit);
    } catch (const IndexError& e) {
      throw AnalyzerError(e.what());
    }
  }
}

OrbitCatalogue ellipsoid_catalogue(const std::vector<ExactScalar>& alpha) {
  if (alpha.size() < 2) throw AnalyzerError("ellipsoid needs at least two weights");
  std::uint64_t radicand = 1;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i].sign() <= 0) throw AnalyzerError("ellipsoid weights must be positive");
    radicand = common_radicand(ExactScalar::sqrt(radicand), alpha[i]);
    if (i > 0 && alpha[i] < alpha[i - 1]) throw AnalyzerError("ellipsoid weights must be sorted ascending");
  }
  OrbitCatalogue out;
  out.n = static_cast<int>(alpha.size());
  out.provenance = Provenance::kEllipsoid;
  out.alpha = alpha;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    OrbitSpectrum orbit;
    orbit.label = "x" + std::to_string(i + 1);
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      if (j != i) orbit.blocks.push_back(TransverseBlock::rotation(alpha[j] / alpha[i]));
    }
    orbit.action = PiMultiple(ExactScalar(2) / alpha[i]);
    orbit.reoccurring = true;
    out.orbits.push_back(std::move(orbit));
  }
  for (std::size_t i = 0; i < alpha.size() && !out.resonance_mode; ++i) {
    for (std::size_t j = i + 1; j < alpha.size(); ++j) {
      if ((alpha[i] / alpha[j]).is_rational()) {
        out.resonance_mode = true;
        out.warnings.push_back("weight ratio alpha" + std::to_string(i + 1) + "/alpha" + std::to_string(j + 1) +
                               " is rational: infinitely many closed characteristics expected");
        break;
      }
    }
  }
  return out;
}

std::size_t window_size(int n) { return static_cast<std::size_t>((n + 1) / 2 + 1); }

DegreeWindow degree_window(std::int64_t d, int n) {
  if (n < 2) throw AnalyzerError("n must be at least 2");
  if (d % 2 != 0) throw AnalyzerError("degree window needs even d, got " + std::to_string(d));
  if (d < n + 3) throw AnalyzerError("degree window needs d >= n+3");
  DegreeWindow w{d, n, {}};
  const std::int64_t lo = n % 2 == 1 ? d - 2 : d - 1;
  for (std::int64_t x = lo; x <= d + n; ++x) {
    if (x >= n + 1 && (x - (n + 1)) % 2 == 0) w.degrees.push_back(x);
  }
  return w;
}

std::vector<std::size_t> CarrierTable::carrier_orbits() const {
  std::vector<std::size_t> out;
  for (const auto& entry : degrees) {
    if (entry.matched) out.push_back(*entry.matched);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

bool same_iterate(const CarrierCandidate& a, const CarrierCandidate& b) { return a.orbit == b.orbit && a.k == b.k; }

// Kuhn augmenting paths: degrees on the left, orbits on the right.
bool augment(std::size_t degree, const std::vector<std::vector<std::size_t>>& adj, std::vector<bool>& seen,
             std::vector<std::optional<std::size_t>>& owner) {
  for (std::size_t orbit : adj[degree]) {
    if (seen[orbit]) continue;
    seen[orbit] = true;
    if (!owner[orbit] || augment(*owner[orbit], adj, seen, owner)) {
      owner[orbit] = degree;
      return true;
    }
  }
  return false;
}

}  // namespace

CarrierTable carrier_feasibility(const OrbitCatalogue& catalogue, const JumpSolution& solution) {
  validate_catalogue(catalogue);
  const int n = catalogue.n;
  if (solution.k.size() != catalogue.orbits.size()) {
    throw AnalyzerError("solution and catalogue disagree on the orbit count");
  }
  for (const auto& orbit : catalogue.orbits) {
    const ConvexityCheck check = is_dynamically_convex(orbit, n);
    if (!check.convex) {
      throw AnalyzerError("orbit " + orbit.label + " is not dynamically convex (margin " +
                          std::to_string(check.margin) + ")");
    }
  }
  CarrierTable table;
  table.window = degree_window(solution.d, n);
  const std::int64_t lo = table.window.degrees.front();
  const std::int64_t hi = table.window.degrees.back();

  std::vector<CarrierCandidate> candidates;
  for (std::size_t i = 0; i < catalogue.orbits.size(); ++i) {
    const auto& orbit = catalogue.orbits[i];
    const ExactScalar mean = mean_index(orbit);
    const std::int64_t slack = static_cast<std::int64_t>(orbit.blocks.size()) + 1;
    const Integer k_lo = ceil_scalar(ExactScalar(lo - slack) / mean);
    const Integer k_hi = floor_scalar(ExactScalar(hi + slack) / mean);
    for (Integer k = std::max(k_lo, Integer(1)); k <= k_hi; ++k) {
      const std::int64_t kk = k.get_si();
      candidates.push_back({i, kk, iterate_indices(orbit, kk)});
    }
  }

  for (std::int64_t degree : table.window.degrees) {
    DegreeCarriers entry{degree, {}, std::nullopt};
    for (const auto& c : candidates) {
      if (c.indices.lower <= degree && degree <= c.indices.upper) entry.admissible.push_back(c);
    }
    if (entry.admissible.empty()) table.empty_degrees.push_back(degree);
    table.degrees.push_back(std::move(entry));
  }

  if (n % 2 == 1) {
    for (const auto& entry : table.degrees) {
      if (entry.degree != solution.d - 2 || entry.admissible.empty()) continue;
      const bool only_predecessors = std::all_of(entry.admissible.begin(), entry.admissible.end(),
                                                 [&](const CarrierCandidate& c) {
                                                   return c.k == solution.k[c.orbit] - 1;
                                                 });
      if (only_predecessors) table.sdm_flags.push_back({entry.degree, entry.admissible});
    }
  }

  for (std::size_t a = 0; a < table.degrees.size(); ++a) {
    for (std::size_t b = a + 1; b < table.degrees.size(); ++b) {
      const auto& x = table.degrees[a].admissible;
      const auto& y = table.degrees[b].admissible;
      if (x.size() == 1 && y.size() == 1 && same_iterate(x[0], y[0])) {
        table.conflicts.push_back({table.degrees[a].degree, table.degrees[b].degree, x[0]});
      }
    }
  }

  std::vector<std::vector<std::size_t>> adj(table.degrees.size());
  for (std::size_t a = 0; a < table.degrees.size(); ++a) {
    for (const auto& c : table.degrees[a].admissible) {
      if (std::find(adj[a].begin(), adj[a].end(), c.orbit) == adj[a].end()) adj[a].push_back(c.orbit);
    }
  }
  std::vector<std::optional<std::size_t>> owner(catalogue.orbits.size());
  for (std::size_t a = 0; a < table.degrees.size(); ++a) {
    std::vector<bool> seen(catalogue.orbits.size(), false);
    if (augment(a, adj, seen, owner)) ++table.distinct_orbits;
  }
  for (std::size_t orbit = 0; orbit < owner.size(); ++orbit) {
    if (owner[orbit]) table.degrees[*owner[orbit]].matched = orbit;
  }
  return table;
}

const char* to_string(VerdictStatus status) {
  switch (status) {
    case VerdictStatus::kPass:
      return "PASS";
    case VerdictStatus::kFail:
      return "FAIL";
    case VerdictStatus::kNotApplicable:
      return "N/A";
  }
  return "?";
}

namespace {

std::vector<std::size_t> all_orbits(const OrbitCatalogue& catalogue) {
  std::vector<std::size_t> out(catalogue.orbits.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
  return out;
}

std::string label_list(const OrbitCatalogue& catalogue, const std::vector<std::size_t>& ids) {
  std::string out = "{";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ", ";
    out += catalogue.orbits[ids[i]].label;
  }
  return out + "}";
}

}  // namespace

RationalityPartition classify_rationality(const OrbitCatalogue& catalogue, const std::vector<std::size_t>& scope,
                                          const JumpSolution* solution) {
  RationalityPartition part;
  part.scope = scope.empty() ? all_orbits(catalogue) : scope;
  for (std::size_t i : part.scope) {
    (mean_index(catalogue.orbits[i]).is_rational() ? part.rational : part.irrational).push_back(i);
  }
  const auto required = static_cast<std::int64_t>((catalogue.n + 1) / 2);
  const auto irrational = static_cast<std::int64_t>(part.irrational.size());
  const auto rational = static_cast<std::int64_t>(part.rational.size());
  part.verdict.name = "irrational_mean_count";
  part.verdict.margin = irrational - required;
  part.verdict.detail = "classify_rationality: irrational " + label_list(catalogue, part.irrational) +
                        " count " + std::to_string(irrational) + " (need >= " + std::to_string(required) +
                        "), rational " + label_list(catalogue, part.rational) + " count " +
                        std::to_string(rational) + " (need <= 1)";
  const bool pass = irrational >= required && rational <= 1;
  part.verdict.status = pass ? VerdictStatus::kPass : VerdictStatus::kFail;
  if (rational >= 2 && solution != nullptr) {
    const std::size_t a = part.rational[0];
    const std::size_t b = part.rational[1];
    MeanEqualityWitness w{a, b, ExactScalar(solution->k[a]) * mean_index(catalogue.orbits[a]),
                          ExactScalar(solution->k[b]) * mean_index(catalogue.orbits[b]), solution->d};
    part.verdict.detail += "; equal-mean witness k*D(" + catalogue.orbits[a].label + ") = " +
                           w.first_value.to_literal() + ", k*D(" + catalogue.orbits[b].label + ") = " +
                           w.second_value.to_literal() + ", d = " + std::to_string(w.d);
    part.witness = std::move(w);
  }
  return part;
}

bool ratio_is_rational(const ExactScalar& a, const ExactScalar& b) {
  if (a.is_zero() || b.is_zero()) throw AnalyzerError("zero mean index in ratio test");
  const Rational cross = a.rational_part() * b.radical_coefficient() - b.rational_part() * a.radical_coefficient();
  if (!a.is_rational() && !b.is_rational() && a.radicand() != b.radicand()) {
    throw ScalarError(ScalarErrc::kMixedRadicands, "mixed radicands in ratio test");
  }
  return cross == 0;
}

RatioMatrix ratio_matrix(const OrbitCatalogue& catalogue, const std::vector<std::size_t>& scope) {
  const std::size_t r = catalogue.orbits.size();
  std::vector<ExactScalar> means;
  for (const auto& orbit : catalogue.orbits) means.push_back(mean_index(orbit));
  RatioMatrix out;
  out.rational.assign(r, std::vector<bool>(r, true));
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = i + 1; j < r; ++j) {
      const bool q = ratio_is_rational(means[i], means[j]);
      out.rational[i][j] = out.rational[j][i] = q;
    }
  }
  const std::vector<std::size_t> pool = scope.empty() ? all_orbits(catalogue) : scope;
  // Largest pairwise-irrational subset; exhaustive for small pools.
  if (pool.size() <= 20) {
    std::uint32_t best = 0;
    int best_size = 0;
    for (std::uint32_t mask = 1; mask < (1u << pool.size()); ++mask) {
      const int size = std::popcount(mask);
      if (size <= best_size) continue;
      bool ok = true;
      for (std::size_t a = 0; a < pool.size() && ok; ++a) {
        if (!(mask >> a & 1u)) continue;
        for (std::size_t b = a + 1; b < pool.size() && ok; ++b) {
          if ((mask >> b & 1u) && out.rational[pool[a]][pool[b]]) ok = false;
        }
      }
      if (ok) {
        best = mask;
        best_size = size;
      }
    }
    for (std::size_t a = 0; a < pool.size(); ++a) {
      if (best >> a & 1u) out.irrational_subset.push_back(pool[a]);
    }
  } else {
    for (std::size_t i : pool) {
      if (std::none_of(out.irrational_subset.begin(), out.irrational_subset.end(),
                       [&](std::size_t j) { return out.rational[i][j]; })) {
        out.irrational_subset.push_back(i);
      }
    }
  }
  const auto required = static_cast<std::int64_t>(window_size(catalogue.n));
  const auto found = static_cast<std::int64_t>(out.irrational_subset.size());
  out.verdict.name = "irrational_ratio_count";
  out.verdict.margin = found - required;
  out.verdict.status = found >= required ? VerdictStatus::kPass : VerdictStatus::kFail;
  out.verdict.detail = "ratio_matrix: pairwise irrational subset " + label_list(catalogue, out.irrational_subset) +
                       " size " + std::to_string(found) + " (need >= " + std::to_string(required) + ")";
  return out;
}

ResonanceTable resonance_check(const OrbitCatalogue& catalogue) {
  ResonanceTable table;
  for (std::size_t i = 0; i < catalogue.orbits.size(); ++i) {
    if (catalogue.orbits[i].reoccurring) table.entries.push_back({i, mean_action_ratio(catalogue.orbits[i])});
  }
  table.verdict.name = "resonance";
  if (table.entries.empty()) {
    table.verdict.status = VerdictStatus::kNotApplicable;
    table.verdict.detail = "resonance_check: no reoccurring orbit";
    return table;
  }
  bool equal = true;
  std::string mismatch;
  for (const auto& a : table.entries) {
    std::vector<ExactScalar> row;
    for (const auto& b : table.entries) {
      row.push_back(a.ratio.coefficient() - b.ratio.coefficient());
      if (!row.back().is_zero() && a.orbit < b.orbit) {
        equal = false;
        mismatch += "; " + catalogue.orbits[a.orbit].label + " vs " + catalogue.orbits[b.orbit].label +
                    ": coefficient difference " + row.back().to_literal();
      }
    }
    table.differences.push_back(std::move(row));
  }
  table.verdict.status = equal ? VerdictStatus::kPass : VerdictStatus::kFail;
  table.verdict.detail = "resonance_check: action/mean = ";
  for (std::size_t e = 0; e < table.entries.size(); ++e) {
    if (e) table.verdict.detail += ", ";
    table.verdict.detail += catalogue.orbits[table.entries[e].orbit].label + " " + table.entries[e].ratio.to_string();
  }
  table.verdict.detail += mismatch;
  return table;
}

bool AnalysisReport::any_fail() const {
  return std::any_of(verdicts.begin(), verdicts.end(),
                     [](const Verdict& v) { return v.status == VerdictStatus::kFail; });
}

AnalysisReport analyze(const OrbitCatalogue& catalogue, const JumpSolution* solution) {
  validate_catalogue(catalogue);
  AnalysisReport report;
  report.warnings = catalogue.warnings;
  for (const auto& orbit : catalogue.orbits) report.means.push_back(mean_index(orbit));

  std::vector<std::size_t> scope;
  if (solution != nullptr) {
    const VerificationRecord record = check_solution_invariants(*solution, catalogue.orbits);
    Verdict checked{"solution_invariants", record.all_pass() ? VerdictStatus::kPass : VerdictStatus::kFail,
                    "check_solution_invariants: " + std::to_string(record.failures()) + " of " +
                        std::to_string(record.lines.size()) + " lines failed",
                    -static_cast<std::int64_t>(record.failures())};
    report.verdicts.push_back(checked);
    if (record.all_pass()) {
      report.carriers = carrier_feasibility(catalogue, *solution);
      const CarrierTable& t = *report.carriers;
      scope = t.carrier_orbits();
      Verdict carriers{"carrier_consistency", t.consistent() ? VerdictStatus::kPass : VerdictStatus::kFail, "", 0};
      carriers.margin = static_cast<std::int64_t>(t.distinct_orbits) - static_cast<std::int64_t>(window_size(catalogue.n));
      carriers.detail = "carrier_feasibility: " + std::to_string(t.window.degrees.size()) + " window degrees, " +
                        std::to_string(t.distinct_orbits) + " distinct orbits matched";
      if (!t.empty_degrees.empty()) {
        carriers.detail += "; degree";
        for (auto d : t.empty_degrees) carriers.detail += " " + std::to_string(d);
        carriers.detail += " has no admissible iterate: assumption set inconsistent with the carrier axiom";
      }
      for (const auto& c : t.conflicts) {
        carriers.detail += "; degrees " + std::to_string(c.first) + " and " + std::to_string(c.second) +
                           " share the single iterate " + catalogue.orbits[c.shared.orbit].label + "^" +
                           std::to_string(c.shared.k);
      }
      report.verdicts.push_back(carriers);
      Verdict sdm{"sdm_candidate", t.sdm_flags.empty() ? VerdictStatus::kPass : VerdictStatus::kFail, "", 0};
      sdm.margin = -static_cast<std::int64_t>(t.sdm_flags.size());
      sdm.detail = t.sdm_flags.empty()
                       ? "carrier_feasibility: no symplectic degenerate maximum candidate"
                       : "carrier_feasibility: degree " + std::to_string(t.sdm_flags.front().degree) +
                             " is carried only by predecessor iterates x^(k-1); a symplectic degenerate "
                             "maximum there would force infinitely many orbits (flag only, not a proof)";
      report.verdicts.push_back(sdm);
    }
  }

  report.rationality = classify_rationality(catalogue, scope, solution);
  report.ratios = ratio_matrix(catalogue, scope);
  report.resonance = resonance_check(catalogue);
  Verdict rationality = report.rationality.verdict;
  Verdict ratios = report.ratios.verdict;
  if (catalogue.resonance_mode) {
    const std::string reason = " (not applicable: catalogue expects infinitely many orbits)";
    rationality.status = VerdictStatus::kNotApplicable;
    rationality.detail += reason;
    ratios.status = VerdictStatus::kNotApplicable;
    ratios.detail += reason;
  }
  report.verdicts.push_back(rationality);
  report.verdicts.push_back(ratios);
  report.verdicts.push_back(report.resonance.verdict);
  return report;
}

}  // namespace cijump
