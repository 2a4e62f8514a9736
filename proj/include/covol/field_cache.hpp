#pragma once

// Field-cache text format: one record per line, "D,r1,r2,h" with h empty when
// unknown, sorted by |D| (negative first), no header, every line
// newline-terminated.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fields.hpp"

namespace covol {

class CacheFormatError : public std::runtime_error {
 public:
  CacheFormatError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

// Canonical decimal integer: optional '-', no leading zeros, no '+'.
inline bool parse_canonical_long(const std::string& s, long& out) {
  if (s.empty()) return false;
  std::size_t i = s[0] == '-' ? 1 : 0;
  if (i == s.size()) return false;
  if (s[i] == '0' && s.size() > i + 1) return false;
  if (s == "-0") return false;
  for (std::size_t j = i; j < s.size(); ++j) {
    if (s[j] < '0' || s[j] > '9') return false;
  }
  try {
    out = std::stol(s);
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

}  // namespace detail

inline std::string serialize_record(const QuadraticField& k) {
  std::string s = std::to_string(k.disc) + "," + std::to_string(k.r1) + "," + std::to_string(k.r2) + ",";
  if (k.class_number) s += std::to_string(*k.class_number);
  return s;
}

inline std::string serialize_cache(const std::vector<QuadraticField>& fields) {
  std::string out;
  for (const auto& k : fields) out += serialize_record(k) + "\n";
  return out;
}

/// Parses cache text. With `verify_class_numbers`, imaginary class numbers are
/// recomputed and must match.
inline std::vector<QuadraticField> parse_cache(const std::string& text, bool verify_class_numbers = false) {
  std::vector<QuadraticField> out;
  std::size_t pos = 0, line = 0;
  while (pos < text.size()) {
    ++line;
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) throw CacheFormatError(line, "missing final newline");
    std::string rec = text.substr(pos, nl - pos);
    pos = nl + 1;

    std::vector<std::string> parts;
    std::stringstream ss(rec);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    if (!rec.empty() && rec.back() == ',') parts.emplace_back();
    if (parts.size() != 4) throw CacheFormatError(line, "expected 4 comma-separated fields");

    long D = 0, r1 = 0, r2 = 0, h = 0;
    if (!detail::parse_canonical_long(parts[0], D) || !detail::parse_canonical_long(parts[1], r1) ||
        !detail::parse_canonical_long(parts[2], r2)) {
      throw CacheFormatError(line, "malformed integer");
    }
    if (!is_fundamental_discriminant(D)) throw CacheFormatError(line, std::to_string(D) + " is not a fundamental discriminant");
    QuadraticField k = QuadraticField::make(D);
    if (r1 != k.r1 || r2 != k.r2) throw CacheFormatError(line, "signature does not match the sign of D");
    if (!parts[3].empty()) {
      if (!detail::parse_canonical_long(parts[3], h) || h < 1) throw CacheFormatError(line, "class number must be a positive integer");
      if (verify_class_numbers && D < 0 && class_number_imaginary(D) != h) throw CacheFormatError(line, "wrong class number");
      k.class_number = h;
    }
    if (!out.empty() && !disc_order(out.back().disc, D)) throw CacheFormatError(line, "records out of order");
    out.push_back(k);
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PreconditionError("cannot write " + path);
  out << content;
}

struct RoundTrip {
  std::size_t records = 0;
  bool identical = false;
};

/// parse then serialize; the result must be byte-identical to the input.
inline RoundTrip cache_roundtrip(const std::string& path) {
  std::string text = read_file(path);
  auto fields = parse_cache(text);
  return RoundTrip{fields.size(), serialize_cache(fields) == text};
}

}  // namespace covol
