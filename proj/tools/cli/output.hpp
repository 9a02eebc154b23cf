#pragma once

// Deterministic text output for the command-line tool: 17-significant-digit
// numbers, CSV with a leading `#` metadata block, or JSON lines.

#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "lhsphere/core.hpp"

namespace lhsphere::cli {

#ifdef LHSPHERE_VERSION
inline constexpr const char* kVersion = LHSPHERE_VERSION;
#else
inline constexpr const char* kVersion = "dev";
#endif

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_complex(cplx v) {
  if (v.imag() == 0.0) return format_number(v.real());
  std::string im = format_number(v.imag());
  if (im.front() != '-') im.insert(im.begin(), '+');
  return format_number(v.real()) + im + "j";
}

/// Parses "re" or "re+imj" / "re-imj" (also "imj" alone).
inline cplx parse_complex(std::string_view text) {
  std::string s(text);
  auto to_double = [&](const std::string& part) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    }
    if (used != part.size()) throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    return v;
  };
  if (s.empty()) throw std::invalid_argument("empty complex value");
  if (s.back() != 'j' && s.back() != 'i') return {to_double(s), 0.0};
  s.pop_back();
  // split at the last sign that is not a leading sign or an exponent sign
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      const std::string im = s.substr(k);
      return {to_double(s.substr(0, k)), im == "+" ? 1.0 : im == "-" ? -1.0 : to_double(im)};
    }
  }
  return {0.0, s.empty() || s == "+" ? 1.0 : s == "-" ? -1.0 : to_double(s)};
}

enum class Format { Csv, Jsonl };

using Cell = std::variant<double, long long, std::string>;

struct Metadata {
  std::vector<std::pair<std::string, std::string>> entries;

  void add(std::string key, std::string value) { entries.emplace_back(std::move(key), std::move(value)); }
  void add(std::string key, double value) { add(std::move(key), format_number(value)); }
  void add(std::string key, cplx value) { add(std::move(key), format_complex(value)); }
};

class RecordWriter {
public:
  RecordWriter(std::ostream& out, Format format, std::string_view command, const Metadata& meta,
               std::vector<std::string> columns)
      : out_(out), format_(format), columns_(std::move(columns)) {
    if (format_ == Format::Csv) {
      out_ << "# lhsphere " << kVersion << '\n';
      out_ << "# command: " << command << '\n';
      for (const auto& [k, v] : meta.entries) out_ << "# " << k << ": " << v << '\n';
      for (std::size_t i = 0; i < columns_.size(); ++i) out_ << (i ? "," : "") << columns_[i];
      out_ << '\n';
    } else {
      nlohmann::ordered_json head;
      head["tool"] = std::string("lhsphere ") + kVersion;
      head["command"] = command;
      nlohmann::ordered_json m = nlohmann::ordered_json::object();
      for (const auto& [k, v] : meta.entries) m[k] = v;
      head["meta"] = m;
      head["columns"] = columns_;
      out_ << head.dump() << '\n';
    }
  }

  void write(const std::vector<Cell>& row) {
    if (row.size() != columns_.size()) throw std::logic_error("RecordWriter: row width does not match header");
    if (format_ == Format::Csv) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out_ << ',';
        std::visit(
            [&](const auto& v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, double>) {
                out_ << format_number(v);
              } else {
                out_ << v;
              }
            },
            row[i]);
      }
      out_ << '\n';
    } else {
      nlohmann::ordered_json obj;
      for (std::size_t i = 0; i < row.size(); ++i) {
        std::visit(
            [&](const auto& v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, double>) {
                if (std::isfinite(v)) {
                  obj[columns_[i]] = v;
                } else {
                  obj[columns_[i]] = nullptr;
                }
              } else {
                obj[columns_[i]] = v;
              }
            },
            row[i]);
      }
      out_ << obj.dump() << '\n';
    }
  }

private:
  std::ostream& out_;
  Format format_;
  std::vector<std::string> columns_;
};

}  // namespace lhsphere::cli
