// Command-line front end: index, jump, analyze, verify.
//
// Exit codes: 0 success, 1 verification failure, 2 input error, 3 search
// exhausted. With --report <path> the canonical JSON report goes to <path>
// and a decimal sidecar with run metadata to <path>.txt.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cijump/analyzer.hpp"
#include "cijump/catalogue_io.hpp"
#include "cijump/exit_code.hpp"
#include "cijump/jump.hpp"
#include "cijump/report.hpp"
#include "cijump/selftest.hpp"

using namespace cijump;

namespace {

constexpr const char* kFixtureEnv = "CIJUMP_FIXTURE_DIR";

struct Common {
  std::string catalogue;
  std::string report;
};

struct RunState {
  std::string command_line;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

RunState g_run;

// Relative catalogue paths that do not exist fall back to the fixture directory.
std::string resolve_catalogue(const std::string& path) {
  if (path.empty()) throw CatalogueParseError(0, 0, "no catalogue given");
  if (std::filesystem::exists(path)) return path;
  const char* dir = std::getenv(kFixtureEnv);
  if (dir != nullptr && std::filesystem::path(path).is_relative()) {
    const auto candidate = std::filesystem::path(dir) / path;
    if (std::filesystem::exists(candidate)) return candidate.string();
  }
  return path;
}

OrbitCatalogue load(const Common& common) {
  const std::string path = resolve_catalogue(common.catalogue);
  try {
    return load_catalogue(path);
  } catch (const CatalogueParseError& e) {
    throw CatalogueParseError(e.line(), e.column(), path + ":" + e.what());
  }
}

ExactScalar scalar_option(const std::string& name, const std::string& text) {
  try {
    return parse_scalar(text);
  } catch (const ScalarError& e) {
    throw JumpError(JumpErrc::kInvalidInput, "--" + name + ": " + e.what());
  }
}

void write_report(const std::string& path, const Json& report) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw JumpError(JumpErrc::kInvalidInput, "cannot write " + path);
  out << dump_report(report);
  const auto elapsed =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - g_run.start).count();
  std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  std::ofstream side(path + ".txt", std::ios::binary);
  side << "# run metadata\n";
  side << "command: " << g_run.command_line << "\n";
  side << "finished_utc: " << stamp << "\n";
  side << "elapsed_ms: " << static_cast<long long>(elapsed) << "\n";
  side << "# decimal renderings (20 digits, truncated)\n";
  side << decimal_sidecar(report);
}

void print_record(const VerificationRecord& record, bool failures_only) {
  for (const auto& l : record.lines) {
    if (failures_only && l.pass) continue;
    std::cout << "  " << (l.pass ? "ok   " : "FAIL ") << l.check << " " << l.subject;
    if (l.l != 0) std::cout << " l=" << l.l;
    std::cout << ": " << l.lhs << " " << l.relation << " " << l.rhs << "\n";
  }
}

// --- index ---------------------------------------------------------------------------

int cmd_index(const Common& common, const std::string& range) {
  std::int64_t lo = 1;
  std::int64_t hi = 3;
  const auto colon = range.find(':');
  try {
    if (colon == std::string::npos) {
      lo = hi = std::stoll(range);
    } else {
      lo = std::stoll(range.substr(0, colon));
      hi = std::stoll(range.substr(colon + 1));
    }
  } catch (const std::exception&) {
    throw JumpError(JumpErrc::kInvalidInput, "--k expects a or a:b");
  }
  if (lo < 1 || hi < lo) throw JumpError(JumpErrc::kInvalidInput, "--k range must satisfy 1 <= a <= b");
  if (hi - lo > 100000) throw JumpError(JumpErrc::kInvalidInput, "--k range too long");
  const OrbitCatalogue catalogue = load(common);
  const Json table = index_table(catalogue, lo, hi);
  std::cout << "orbit  k  mu_-  mu_+  mean  b+  b-  convexity_margin\n";
  for (const auto& row : table.at("rows")) {
    std::cout << row.at("orbit").get<std::string>() << "  " << row.at("k") << "  " << row.at("mu_minus") << "  "
              << row.at("mu_plus") << "  " << row.at("mean_index").get<std::string>() << "  " << row.at("b_plus")
              << "  " << row.at("b_minus") << "  " << row.at("convexity_margin") << "\n";
  }
  write_report(common.report,
               report_envelope("index", Json{{"catalogue", catalogue_summary(catalogue)}, {"table", table}}));
  return 0;
}

// --- jump ------------------------------------------------------------------------------

struct JumpOptions {
  std::int64_t m = 1;
  std::int64_t n_div = 1;
  std::string epsilon = "1/1000";
  std::string eta = "1/20";
  int l0 = 1;
  int l_max = 5;
  std::int64_t t_max = 10'000'000;
  bool even_d = false;
  std::string convention = "formula";
};

Json config_json(const JumpConfig& c, int l_max) {
  return Json{{"M", c.M},
              {"N", c.N},
              {"epsilon", c.epsilon.to_literal()},
              {"eta", c.eta.to_literal()},
              {"l0", c.l0},
              {"l_max", l_max},
              {"T_max", c.T_max},
              {"even_d", c.even_d},
              {"convention", to_string(c.convention)}};
}

int cmd_jump(const Common& common, const JumpOptions& options) {
  JumpConfig config;
  config.M = options.m;
  config.N = options.n_div;
  config.epsilon = scalar_option("epsilon", options.epsilon);
  config.eta = scalar_option("eta", options.eta);
  config.l0 = options.l0;
  config.T_max = options.t_max;
  config.even_d = options.even_d;
  if (options.convention == "formula") {
    config.convention = NegativeIterateConvention::kFormula;
  } else if (options.convention == "path_reversal") {
    config.convention = NegativeIterateConvention::kPathReversal;
  } else {
    throw JumpError(JumpErrc::kInvalidInput, "--convention must be formula or path_reversal");
  }
  if (options.l_max < 1) throw JumpError(JumpErrc::kInvalidInput, "--l-max must be >= 1");
  const OrbitCatalogue catalogue = load(common);

  Json body{{"catalogue", catalogue_summary(catalogue)}, {"config", config_json(config, options.l_max)}};
  JumpSolution solution;
  try {
    solution = solve_jump(catalogue.orbits, config);
  } catch (const SearchExhausted& e) {
    body["status"] = "exhausted";
    body["message"] = e.what();
    body["rejected_hits"] = e.rejected_hits();
    if (e.near_miss()) {
      Json residuals = Json::array();
      for (const auto& r : e.near_miss()->residuals) residuals.push_back(r.to_literal());
      body["near_miss"] = Json{{"T", e.near_miss()->T},
                               {"max_distance", e.near_miss()->max_distance.to_literal()},
                               {"residuals", residuals}};
      std::cout << "search exhausted: " << e.what() << "\n  best near miss T = " << e.near_miss()->T
                << ", max distance " << e.near_miss()->max_distance.to_literal() << " ~ "
                << e.near_miss()->max_distance.to_decimal(6) << "\n";
    } else {
      body["near_miss"] = nullptr;
      std::cout << "search exhausted: " << e.what() << "\n";
    }
    write_report(common.report, report_envelope("jump", body));
    return static_cast<int>(ExitCode::kExhausted);
  }

  const VerificationRecord recurrence =
      verify_recurrence(solution, catalogue.orbits, config.l0, config.eta, config.convention);
  bool convex = true;
  for (const auto& orbit : catalogue.orbits) convex = convex && is_dynamically_convex(orbit, catalogue.n).convex;
  std::optional<VerificationRecord> bounds;
  if (convex) bounds = verify_convexity_bounds(solution, catalogue.orbits, catalogue.n, options.l_max);

  const bool ok = recurrence.all_pass() && (!bounds || bounds->all_pass());
  body["status"] = ok ? "ok" : "verification_failed";
  body["solution"] = solution_to_json(solution);
  body["recurrence"] = record_to_json(recurrence);
  body["convexity_bounds"] = bounds ? record_to_json(*bounds) : Json();
  write_report(common.report, report_envelope("jump", body));

  for (const auto& note : solution.notes) std::cout << "note: " << note << "\n";
  std::cout << "T = " << solution.T << "  d = " << solution.d << "  k =";
  for (auto k : solution.k) std::cout << " " << k;
  std::cout << "\nchi =";
  for (int c : solution.chi.chi) std::cout << " " << c;
  std::cout << "\nrecurrence (l0 = " << config.l0 << "): " << recurrence.lines.size() - recurrence.failures() << "/"
            << recurrence.lines.size() << " pass\n";
  print_record(recurrence, true);
  if (bounds) {
    std::cout << "convexity bounds (l <= " << options.l_max << "): " << bounds->lines.size() - bounds->failures()
              << "/" << bounds->lines.size() << " pass\n";
    print_record(*bounds, true);
  } else {
    std::cout << "convexity bounds skipped: catalogue is not dynamically convex\n";
  }
  return ok ? 0 : static_cast<int>(ExitCode::kVerificationFailure);
}

// --- analyze ------------------------------------------------------------------------------

int cmd_analyze(const Common& common, const std::string& solution_path) {
  const OrbitCatalogue catalogue = load(common);
  std::optional<JumpSolution> solution;
  if (!solution_path.empty()) {
    std::ifstream in(solution_path, std::ios::binary);
    if (!in) throw ReportFormatError("cannot open " + solution_path);
    Json j;
    try {
      j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ReportFormatError(solution_path + ": " + e.what());
    }
    solution = solution_from_json(j);
  }
  const AnalysisReport report = analyze(catalogue, solution ? &*solution : nullptr);
  write_report(common.report, report_envelope("analyze", analysis_to_json(catalogue, report)));

  for (const auto& w : report.warnings) std::cout << "warning: " << w << "\n";
  for (std::size_t i = 0; i < catalogue.orbits.size(); ++i) {
    std::cout << catalogue.orbits[i].label << ": mean index " << report.means[i].to_literal() << " ("
              << (report.means[i].is_rational() ? "rational" : "irrational") << "), action "
              << catalogue.orbits[i].action.to_string() << "\n";
  }
  if (report.carriers) {
    for (const auto& entry : report.carriers->degrees) {
      std::cout << "degree " << entry.degree << ":";
      for (const auto& c : entry.admissible) std::cout << " " << catalogue.orbits[c.orbit].label << "^" << c.k;
      if (entry.admissible.empty()) std::cout << " (none)";
      std::cout << "\n";
    }
  }
  for (const auto& v : report.verdicts) {
    std::cout << to_string(v.status) << " " << v.name << " (margin " << v.margin << "): " << v.detail << "\n";
  }
  return report.any_fail() ? static_cast<int>(ExitCode::kVerificationFailure) : 0;
}

// --- verify -----------------------------------------------------------------------------

int cmd_verify(const std::vector<std::string>& suites, std::string fixture_dir, const std::string& report_path) {
  if (fixture_dir.empty()) {
    if (const char* dir = std::getenv(kFixtureEnv)) fixture_dir = dir;
  }
  if (!fixture_dir.empty() && !std::filesystem::is_directory(fixture_dir)) {
    throw CatalogueParseError(0, 0, "fixture directory " + fixture_dir + " not found");
  }
  SelftestOptions options{suites, fixture_dir};
  const std::vector<PropertyResult> results = run_selftest(options);
  Json rows = Json::array();
  bool ok = true;
  for (const auto& r : results) {
    ok = ok && r.pass;
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.suite << "." << r.name << ": " << r.detail << "\n";
    rows.push_back(Json{{"suite", r.suite}, {"property", r.name}, {"pass", r.pass}, {"detail", r.detail}});
  }
  std::cout << (ok ? "all properties pass" : "some properties FAIL") << " (" << results.size() << " checked)\n";
  write_report(report_path, report_envelope("verify", Json{{"all_pass", ok}, {"results", rows}}));
  return ok ? 0 : static_cast<int>(ExitCode::kVerificationFailure);
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 0; i < argc; ++i) g_run.command_line += (i ? " " : "") + std::string(argv[i]);

  CLI::App app{"Common index jump construction and catalogue analysis"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("catalogue", common.catalogue, "catalogue file");
    sub->add_option("--fixture", common.catalogue, "catalogue file (alternative to the positional argument)");
    sub->add_option("--report", common.report, "write the JSON report here (decimal sidecar at <path>.txt)");
  };

  std::string k_range = "1:3";
  auto* index = app.add_subcommand("index", "index table per orbit and iterate");
  add_common(index);
  index->add_option("--k", k_range, "iterate range a:b (default 1:3)");

  JumpOptions jump_options;
  auto* jump = app.add_subcommand("jump", "construct and verify a common index jump");
  add_common(jump);
  jump->add_option("--m", jump_options.m, "divisor M of every k_i");
  jump->add_option("--n-div", jump_options.n_div, "divisor N of d (M must be a multiple)");
  jump->add_option("--epsilon", jump_options.epsilon, "torus tolerance (exact literal)");
  jump->add_option("--eta", jump_options.eta, "mean gap tolerance (exact literal)");
  jump->add_option("--l0", jump_options.l0, "shift identities checked for 1 <= l <= l0");
  jump->add_option("--l-max", jump_options.l_max, "convexity bounds checked for 1 <= l <= l-max");
  jump->add_option("--t-max", jump_options.t_max, "largest T scanned");
  jump->add_flag("--even-d", jump_options.even_d, "require d even");
  jump->add_option("--convention", jump_options.convention, "negative iterates: formula or path_reversal");

  std::string solution_path;
  auto* analyze_cmd = app.add_subcommand("analyze", "catalogue verdicts, with carriers when a solution is given");
  add_common(analyze_cmd);
  analyze_cmd->add_option("--solution", solution_path, "jump report (or bare solution) JSON");

  std::vector<std::string> suites;
  std::string fixture_dir;
  std::string verify_report;
  auto* verify = app.add_subcommand("verify", "run the property suites");
  verify->add_option("--suite", suites, "suite name (repeatable): scalar, index, jump, analyzer, cli");
  verify->add_option("--fixture", fixture_dir, "fixture directory for round-trip checks");
  verify->add_option("--report", verify_report, "write the JSON summary here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ExitCode::kInputError);
  }

  try {
    if (*index) return cmd_index(common, k_range);
    if (*jump) return cmd_jump(common, jump_options);
    if (*analyze_cmd) return cmd_analyze(common, solution_path);
    if (*verify) return cmd_verify(suites, fixture_dir, verify_report);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(exit_code_for(std::current_exception()));
  }
  return static_cast<int>(ExitCode::kInputError);
}
