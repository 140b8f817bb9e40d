#include "cijump/catalogue_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

namespace cijump {

namespace {

// A slice of one source line with its 1-based starting column.
struct Token {
  std::string text;
  std::size_t column = 1;
};

Token trim(const Token& t) {
  std::size_t b = 0;
  std::size_t e = t.text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(t.text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(t.text[e - 1]))) --e;
  return {t.text.substr(b, e - b), t.column + b};
}

// Splits at `sep` outside parentheses.
std::vector<Token> split(const Token& t, char sep) {
  std::vector<Token> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= t.text.size(); ++i) {
    const char c = i < t.text.size() ? t.text[i] : sep;
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(trim({t.text.substr(start, i - start), t.column + start}));
      start = i + 1;
    }
  }
  return out;
}

// "key: value" -> (key, value); nullopt without a colon.
std::optional<std::pair<Token, Token>> key_value(const Token& t) {
  const auto colon = t.text.find(':');
  if (colon == std::string::npos) return std::nullopt;
  return std::make_pair(trim({t.text.substr(0, colon), t.column}),
                        trim({t.text.substr(colon + 1), t.column + colon + 1}));
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  OrbitCatalogue run() {
    std::istringstream in(text_);
    std::string raw;
    while (std::getline(in, raw)) {
      ++line_;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      const auto hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      const Token content = trim({raw, 1});
      if (content.text.empty()) continue;
      const auto kv = key_value(content);
      if (!kv) fail(content.column, "expected 'key: value'");
      statement(kv->first, kv->second);
    }
    ++line_;
    return finish();
  }

 private:
  [[noreturn]] void fail(std::size_t column, const std::string& message) const {
    throw CatalogueParseError(line_, column, message);
  }

  ExactScalar scalar(const Token& t) {
    if (t.text.empty()) fail(t.column, "missing value");
    ExactScalar value;
    try {
      value = parse_scalar(t.text);
    } catch (const ScalarError& e) {
      fail(t.column + e.position(), e.what());
    }
    if (!value.is_rational()) {
      if (!field_) fail(t.column, "'field' must precede irrational values");
      if (value.radicand() != *field_) {
        fail(t.column, "radicand " + std::to_string(value.radicand()) + " does not match field " +
                           std::to_string(*field_));
      }
    }
    return value;
  }

  std::int64_t integer(const Token& t) {
    const ExactScalar value = scalar(t);
    if (!value.is_integer() || !value.rational_part().get_num().fits_slong_p()) {
      fail(t.column, "expected an integer");
    }
    return value.rational_part().get_num().get_si();
  }

  void once(const Token& key, bool& seen) {
    if (seen) fail(key.column, "duplicate '" + key.text + "'");
    seen = true;
  }

  void statement(const Token& key, const Token& value) {
    if (key.text == "n") {
      once(key, seen_n_);
      const std::int64_t n = integer(value);
      if (n < 2 || n > 64) fail(value.column, "n must be in [2, 64]");
      n_ = static_cast<int>(n);
    } else if (key.text == "field") {
      if (field_) fail(key.column, "duplicate 'field'");
      const std::int64_t d = integer(value);
      if (d < 1) fail(value.column, "field radicand must be positive");
      const ExactScalar root = ExactScalar::sqrt(static_cast<std::uint64_t>(d));
      if (d != 1 && (root.is_rational() || root.radicand() != static_cast<std::uint64_t>(d))) {
        fail(value.column, "field radicand must be 1 or squarefree");
      }
      field_ = static_cast<std::uint64_t>(d);
    } else if (key.text == "provenance") {
      once(key, seen_provenance_);
      if (value.text == "user") {
        provenance_ = Provenance::kUser;
      } else if (value.text == "ellipsoid") {
        provenance_ = Provenance::kEllipsoid;
      } else {
        fail(value.column, "provenance must be 'user' or 'ellipsoid'");
      }
    } else if (key.text == "ellipsoid") {
      once(key, seen_ellipsoid_);
      ellipsoid_line_ = line_;
      ellipsoid_column_ = value.column;
      for (const Token& item : split(value, ',')) alpha_.push_back(scalar(item));
    } else if (key.text == "orbit") {
      orbit(value);
    } else {
      fail(key.column, "unknown key '" + key.text + "'");
    }
  }

  TransverseBlock block(const Token& t) {
    if (t.text.rfind("rotation", 0) == 0) {
      const auto open = t.text.find('(');
      if (open == std::string::npos || t.text.back() != ')') fail(t.column, "expected rotation(<scalar>)");
      const Token inner = trim({t.text.substr(open + 1, t.text.size() - open - 2), t.column + open + 1});
      const ExactScalar rho = scalar(inner);
      if (rho.sign() <= 0) fail(inner.column, "rotation number must be positive");
      return TransverseBlock::rotation(rho);
    }
    try {
      const BlockKind kind = block_kind_from_string(t.text);
      if (kind == BlockKind::kRotation) fail(t.column, "expected rotation(<scalar>)");
      return TransverseBlock::of_kind(kind);
    } catch (const std::invalid_argument&) {
      fail(t.column, "unknown block '" + t.text + "'");
    }
  }

  void orbit(const Token& value) {
    const auto fields = split(value, ';');
    const Token label = fields.front();
    if (label.text.empty() || !std::all_of(label.text.begin(), label.text.end(), [](char c) {
          return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
        })) {
      fail(label.column, "orbit label must be a non-empty word");
    }
    if (!labels_.insert(label.text).second) fail(label.column, "duplicate orbit label '" + label.text + "'");
    OrbitSpectrum spec;
    spec.label = label.text;
    std::set<std::string> seen;
    for (std::size_t f = 1; f < fields.size(); ++f) {
      const auto kv = key_value(fields[f]);
      if (!kv) fail(fields[f].column, "expected 'key: value'");
      const auto& [key, val] = *kv;
      if (!seen.insert(key.text).second) fail(key.column, "duplicate '" + key.text + "'");
      if (key.text == "action_pi") {
        const ExactScalar action = scalar(val);
        if (action.sign() <= 0) fail(val.column, "action must be positive");
        spec.action = PiMultiple(action);
      } else if (key.text == "reoccurring") {
        if (val.text != "yes" && val.text != "no") fail(val.column, "reoccurring must be 'yes' or 'no'");
        spec.reoccurring = val.text == "yes";
      } else if (key.text == "multiplicity") {
        spec.multiplicity = integer(val);
        if (spec.multiplicity < 1) fail(val.column, "multiplicity must be positive");
      } else if (key.text == "blocks") {
        for (const Token& item : split(val, ',')) spec.blocks.push_back(block(item));
      } else {
        fail(key.column, "unknown orbit field '" + key.text + "'");
      }
    }
    if (!seen.count("action_pi")) fail(value.column, "orbit '" + spec.label + "' has no action_pi");
    if (!seen.count("blocks")) fail(value.column, "orbit '" + spec.label + "' has no blocks");
    if (seen_n_ && spec.blocks.size() != static_cast<std::size_t>(n_ - 1)) {
      fail(value.column, "orbit '" + spec.label + "' needs " + std::to_string(n_ - 1) + " blocks, got " +
                             std::to_string(spec.blocks.size()));
    }
    orbits_.push_back(std::move(spec));
  }

  OrbitCatalogue finish() {
    if (!seen_n_) fail(1, "missing 'n'");
    if (!field_) fail(1, "missing 'field'");
    if (!seen_provenance_) fail(1, "missing 'provenance'");
    if (provenance_ == Provenance::kEllipsoid) {
      if (!orbits_.empty()) fail(1, "ellipsoid catalogues take no orbit lines");
      if (!seen_ellipsoid_) fail(1, "missing 'ellipsoid'");
      line_ = ellipsoid_line_;
      if (alpha_.size() != static_cast<std::size_t>(n_)) {
        fail(ellipsoid_column_, "ellipsoid needs n = " + std::to_string(n_) + " weights");
      }
      try {
        return ellipsoid_catalogue(alpha_);
      } catch (const std::exception& e) {
        fail(ellipsoid_column_, e.what());
      }
    }
    if (seen_ellipsoid_) fail(1, "'ellipsoid' requires provenance: ellipsoid");
    if (orbits_.empty()) fail(1, "empty catalogue");
    OrbitCatalogue out;
    out.n = n_;
    out.orbits = std::move(orbits_);
    try {
      validate_catalogue(out);
    } catch (const std::exception& e) {
      fail(1, e.what());
    }
    return out;
  }

  const std::string& text_;
  std::size_t line_ = 0;
  bool seen_n_ = false;
  bool seen_provenance_ = false;
  bool seen_ellipsoid_ = false;
  int n_ = 0;
  std::optional<std::uint64_t> field_;
  Provenance provenance_ = Provenance::kUser;
  std::vector<ExactScalar> alpha_;
  std::size_t ellipsoid_line_ = 0;
  std::size_t ellipsoid_column_ = 1;
  std::vector<OrbitSpectrum> orbits_;
  std::set<std::string> labels_;
};

std::uint64_t field_of(const OrbitCatalogue& catalogue) {
  std::uint64_t d = 1;
  auto take = [&](const ExactScalar& x) { d = common_radicand(ExactScalar::sqrt(d), x); };
  for (const auto& a : catalogue.alpha) take(a);
  for (const auto& orbit : catalogue.orbits) {
    take(orbit.action.coefficient());
    for (const auto& b : orbit.blocks) take(b.rho);
  }
  return d;
}

}  // namespace

OrbitCatalogue parse_catalogue(const std::string& text) { return Parser(text).run(); }

std::string emit_catalogue(const OrbitCatalogue& catalogue) {
  std::ostringstream out;
  out << "n: " << catalogue.n << "\n";
  out << "field: " << field_of(catalogue) << "\n";
  if (catalogue.provenance == Provenance::kEllipsoid) {
    out << "provenance: ellipsoid\n";
    out << "ellipsoid: ";
    for (std::size_t i = 0; i < catalogue.alpha.size(); ++i) {
      out << (i ? ", " : "") << catalogue.alpha[i].to_literal();
    }
    out << "\n";
    return out.str();
  }
  out << "provenance: user\n";
  for (const auto& orbit : catalogue.orbits) {
    out << "orbit: " << orbit.label << "; action_pi: " << orbit.action.coefficient().to_literal()
        << "; reoccurring: " << (orbit.reoccurring ? "yes" : "no");
    if (orbit.multiplicity != 1) out << "; multiplicity: " << orbit.multiplicity;
    out << "; blocks: ";
    for (std::size_t q = 0; q < orbit.blocks.size(); ++q) {
      const auto& b = orbit.blocks[q];
      out << (q ? ", " : "");
      if (b.kind == BlockKind::kRotation) {
        out << "rotation(" << b.rho.to_literal() << ")";
      } else {
        out << to_string(b.kind);
      }
    }
    out << "\n";
  }
  return out.str();
}

OrbitCatalogue load_catalogue(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CatalogueParseError(0, 0, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_catalogue(buffer.str());
}

}  // namespace cijump
