#include "cijump/report.hpp"

#include <sstream>

namespace cijump {

namespace {

Json literal(const ExactScalar& x) { return x.to_literal(); }

ExactScalar read_scalar(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw ReportFormatError(std::string("missing scalar field '") + key + "'");
  }
  try {
    return parse_scalar(j.at(key).get<std::string>());
  } catch (const ScalarError& e) {
    throw ReportFormatError(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T read(const Json& j, const char* key) {
  if (!j.contains(key)) throw ReportFormatError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ReportFormatError(std::string("field '") + key + "': " + e.what());
  }
}

Json labels(const OrbitCatalogue& catalogue, const std::vector<std::size_t>& ids) {
  Json out = Json::array();
  for (std::size_t i : ids) out.push_back(catalogue.orbits[i].label);
  return out;
}

Json verdict_json(const Verdict& v) {
  return Json{{"name", v.name}, {"status", to_string(v.status)}, {"margin", v.margin}, {"detail", v.detail}};
}

Json candidate_json(const OrbitCatalogue& catalogue, const CarrierCandidate& c) {
  return Json{{"orbit", catalogue.orbits[c.orbit].label},
              {"k", c.k},
              {"mu_minus", c.indices.lower},
              {"mu_plus", c.indices.upper}};
}

}  // namespace

Json record_to_json(const VerificationRecord& record) {
  Json lines = Json::array();
  for (const auto& l : record.lines) {
    lines.push_back(Json{{"check", l.check},
                         {"subject", l.subject},
                         {"l", l.l},
                         {"lhs", l.lhs},
                         {"relation", l.relation},
                         {"rhs", l.rhs},
                         {"pass", l.pass}});
  }
  return Json{{"all_pass", record.all_pass()},
              {"failures", record.failures()},
              {"lines", std::move(lines)},
              {"notes", record.notes}};
}

Json solution_to_json(const JumpSolution& s) {
  Json witness = Json::array();
  for (const auto& w : s.chi.witness) witness.push_back(ExactScalar(w).to_literal());
  Json residuals = Json::array();
  for (const auto& r : s.residuals) residuals.push_back(literal(r));
  return Json{{"T", s.T},
              {"d", s.d},
              {"k", s.k},
              {"M", s.M},
              {"N", s.N},
              {"even_d", s.even_d},
              {"epsilon", literal(s.epsilon)},
              {"eta", literal(s.eta)},
              {"chi", s.chi.chi},
              {"chi_witness", std::move(witness)},
              {"residuals", std::move(residuals)},
              {"invariants", record_to_json(s.report)},
              {"notes", s.notes}};
}

JumpSolution solution_from_json(const Json& input) {
  if (!input.is_object()) throw ReportFormatError("solution must be a JSON object");
  const Json& j = input.contains("solution") ? input.at("solution") : input;
  if (!j.is_object()) throw ReportFormatError("solution must be a JSON object");
  JumpSolution s;
  s.T = read<std::int64_t>(j, "T");
  s.d = read<std::int64_t>(j, "d");
  s.k = read<std::vector<std::int64_t>>(j, "k");
  s.M = read<std::int64_t>(j, "M");
  s.N = read<std::int64_t>(j, "N");
  s.even_d = read<bool>(j, "even_d");
  s.epsilon = read_scalar(j, "epsilon");
  s.eta = read_scalar(j, "eta");
  s.chi.chi = read<std::vector<int>>(j, "chi");
  if (j.contains("chi_witness")) {
    for (const auto& w : j.at("chi_witness")) {
      const ExactScalar x = parse_scalar(w.get<std::string>());
      if (!x.is_rational()) throw ReportFormatError("chi_witness entries must be rational");
      s.chi.witness.push_back(x.rational_part());
    }
  }
  if (j.contains("residuals")) {
    for (const auto& r : j.at("residuals")) s.residuals.push_back(parse_scalar(r.get<std::string>()));
  }
  if (j.contains("notes")) s.notes = j.at("notes").get<std::vector<std::string>>();
  if (s.k.empty()) throw ReportFormatError("solution has no iterates");
  return s;
}

Json catalogue_summary(const OrbitCatalogue& catalogue) {
  Json orbits = Json::array();
  for (const auto& orbit : catalogue.orbits) {
    const ExactScalar mean = mean_index(orbit);
    orbits.push_back(Json{{"label", orbit.label},
                          {"mean_index", literal(mean)},
                          {"mean_rational", mean.is_rational()},
                          {"action_pi", literal(orbit.action.coefficient())},
                          {"reoccurring", orbit.reoccurring}});
  }
  Json alpha = Json::array();
  for (const auto& a : catalogue.alpha) alpha.push_back(literal(a));
  return Json{{"n", catalogue.n},
              {"provenance", catalogue.provenance == Provenance::kEllipsoid ? "ellipsoid" : "user"},
              {"alpha", std::move(alpha)},
              {"resonance_mode", catalogue.resonance_mode},
              {"warnings", catalogue.warnings},
              {"orbits", std::move(orbits)}};
}

Json index_table(const OrbitCatalogue& catalogue, std::int64_t k_lo, std::int64_t k_hi) {
  Json rows = Json::array();
  for (const auto& orbit : catalogue.orbits) {
    const ExactScalar mean = mean_index(orbit);
    const ConvexityCheck convex = is_dynamically_convex(orbit, catalogue.n);
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
      const IndexPair mu = iterate_indices(orbit, k);
      const SignatureMultiplicities b = signature_multiplicities(orbit, k);
      rows.push_back(Json{{"orbit", orbit.label},
                          {"k", k},
                          {"mu_minus", mu.lower},
                          {"mu_plus", mu.upper},
                          {"mean_index", literal(ExactScalar(k) * mean)},
                          {"b_plus", b.plus},
                          {"b_minus", b.minus},
                          {"convexity_margin", convex.margin}});
    }
  }
  return Json{{"rows", std::move(rows)}, {"notes", Json::array({kSignatureConventionNote})}};
}

Json analysis_to_json(const OrbitCatalogue& catalogue, const AnalysisReport& report) {
  Json out;
  out["catalogue"] = catalogue_summary(catalogue);
  if (report.carriers) {
    const CarrierTable& t = *report.carriers;
    Json degrees = Json::array();
    for (const auto& entry : t.degrees) {
      Json admissible = Json::array();
      for (const auto& c : entry.admissible) admissible.push_back(candidate_json(catalogue, c));
      degrees.push_back(Json{{"degree", entry.degree},
                             {"admissible", std::move(admissible)},
                             {"matched", entry.matched ? Json(catalogue.orbits[*entry.matched].label) : Json()}});
    }
    Json sdm = Json::array();
    for (const auto& flag : t.sdm_flags) {
      Json iterates = Json::array();
      for (const auto& c : flag.iterates) iterates.push_back(candidate_json(catalogue, c));
      sdm.push_back(Json{{"degree", flag.degree}, {"iterates", std::move(iterates)}});
    }
    Json conflicts = Json::array();
    for (const auto& c : t.conflicts) {
      conflicts.push_back(Json{{"first", c.first}, {"second", c.second}, {"shared", candidate_json(catalogue, c.shared)}});
    }
    out["carriers"] = Json{{"d", t.window.d},
                           {"window", t.window.degrees},
                           {"degrees", std::move(degrees)},
                           {"sdm_flags", std::move(sdm)},
                           {"conflicts", std::move(conflicts)},
                           {"empty_degrees", t.empty_degrees},
                           {"distinct_orbits", t.distinct_orbits}};
  } else {
    out["carriers"] = nullptr;
  }
  Json rationality{{"scope", labels(catalogue, report.rationality.scope)},
                   {"rational", labels(catalogue, report.rationality.rational)},
                   {"irrational", labels(catalogue, report.rationality.irrational)}};
  if (report.rationality.witness) {
    const auto& w = *report.rationality.witness;
    rationality["equal_mean_witness"] = Json{{"first", catalogue.orbits[w.first].label},
                                             {"first_k_mean", literal(w.first_value)},
                                             {"second", catalogue.orbits[w.second].label},
                                             {"second_k_mean", literal(w.second_value)},
                                             {"d", w.d}};
  }
  out["rationality"] = std::move(rationality);
  Json matrix = Json::array();
  for (const auto& row : report.ratios.rational) {
    Json r = Json::array();
    for (bool q : row) r.push_back(q);
    matrix.push_back(std::move(r));
  }
  out["ratio_matrix"] = Json{{"labels", labels(catalogue, [&] {
                                std::vector<std::size_t> all(catalogue.orbits.size());
                                for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
                                return all;
                              }())},
                             {"rational", std::move(matrix)},
                             {"irrational_subset", labels(catalogue, report.ratios.irrational_subset)}};
  Json entries = Json::array();
  for (const auto& e : report.resonance.entries) {
    entries.push_back(Json{{"orbit", catalogue.orbits[e.orbit].label},
                           {"action_over_mean_pi", literal(e.ratio.coefficient())},
                           {"display", e.ratio.to_string()}});
  }
  Json differences = Json::array();
  for (const auto& row : report.resonance.differences) {
    Json r = Json::array();
    for (const auto& x : row) r.push_back(literal(x));
    differences.push_back(std::move(r));
  }
  out["resonance"] = Json{{"entries", std::move(entries)}, {"differences", std::move(differences)}};
  Json verdicts = Json::array();
  for (const auto& v : report.verdicts) verdicts.push_back(verdict_json(v));
  out["verdicts"] = std::move(verdicts);
  out["any_fail"] = report.any_fail();
  return out;
}

Json report_envelope(const std::string& command, Json body) {
  Json out{{"schema", kReportSchema}, {"command", command}};
  for (auto it = body.begin(); it != body.end(); ++it) out[it.key()] = std::move(it.value());
  return out;
}

std::string dump_report(const Json& report) { return report.dump(2) + "\n"; }

namespace {

void walk(const Json& node, const std::string& path, int digits, std::ostringstream& out) {
  if (node.is_object()) {
    for (auto it = node.begin(); it != node.end(); ++it) walk(it.value(), path + "." + it.key(), digits, out);
  } else if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i) walk(node[i], path + "[" + std::to_string(i) + "]", digits, out);
  } else if (node.is_string()) {
    const std::string& text = node.get_ref<const std::string&>();
    try {
      const ExactScalar x = parse_scalar(text);
      if (!x.is_integer()) out << path << " = " << text << " ~ " << x.to_decimal(digits) << "\n";
    } catch (const ScalarError&) {
    }
  }
}

}  // namespace

std::string decimal_sidecar(const Json& report, int digits) {
  std::ostringstream out;
  walk(report, "", digits, out);
  return out.str();
}

}  // namespace cijump
