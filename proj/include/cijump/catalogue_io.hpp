#pragma once

// Line-oriented catalogue files.
//
//   # comment
//   n: 3
//   field: 3
//   provenance: user
//   orbit: x1; action_pi: 2; reoccurring: yes; blocks: rotation(1/2), trivial_plus
//
// `field` is the radicand shared by every scalar (1 for rational data).
// `action_pi` is the action divided by pi. `multiplicity: k` is optional.
// Ellipsoid catalogues replace the orbit lines by
//
//   provenance: ellipsoid
//   ellipsoid: 2-sqrt(3), 1, sqrt(3)
//
// emit_catalogue writes this canonical form; parse_catalogue(emit_catalogue(c))
// reproduces c and emitting again gives the same bytes.

#include <cstddef>
#include <stdexcept>
#include <string>

#include "cijump/analyzer.hpp"

namespace cijump {

class CatalogueParseError : public std::runtime_error {
 public:
  CatalogueParseError(std::size_t line, std::size_t column, const std::string& message)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

OrbitCatalogue parse_catalogue(const std::string& text);
std::string emit_catalogue(const OrbitCatalogue& catalogue);

/// Reads and parses a file; a missing file is reported at 0:0.
OrbitCatalogue load_catalogue(const std::string& path);

}  // namespace cijump
