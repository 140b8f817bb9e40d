#pragma once

// Property suites shared by the `verify` command and the test binaries.
// Random inputs come from fixed seeds, so every run checks the same cases.

#include <string>
#include <vector>

namespace cijump {

struct PropertyResult {
  std::string suite;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SelftestOptions {
  /// Suite names to run; empty runs all.
  std::vector<std::string> suites;
  /// Directory whose *.cat files join the round-trip checks; may be empty.
  std::string fixture_dir;
};

/// "scalar", "index", "jump", "analyzer", "cli".
const std::vector<std::string>& suite_names();

/// Throws std::invalid_argument for an unknown suite name and
/// CatalogueParseError for an unreadable fixture.
std::vector<PropertyResult> run_selftest(const SelftestOptions& options);

}  // namespace cijump
