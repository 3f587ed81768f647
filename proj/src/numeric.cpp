#include "tacube/numeric.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>

namespace tacube {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

struct Cursor {
  std::string_view s;
  size_t pos = 0;

  bool done() const { return pos >= s.size(); }
  char peek() const { return pos < s.size() ? s[pos] : '\0'; }
  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool consume(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }
  bool consume(std::string_view lit) {
    if (s.size() - pos >= lit.size() && s.substr(pos, lit.size()) == lit) {
      pos += lit.size();
      return true;
    }
    return false;
  }
  bool consume_word_ci(std::string_view word) {
    if (s.size() - pos >= word.size() && iequals(s.substr(pos, word.size()), word)) {
      pos += word.size();
      return true;
    }
    return false;
  }
};

// Currency prefixes; the euro and pound signs are multi-byte in UTF-8.
constexpr std::array<std::string_view, 3> kCurrencies = {"$", "\xE2\x82\xAC", "\xC2\xA3"};

bool consume_currency(Cursor& c) {
  for (auto cur : kCurrencies) {
    if (c.consume(cur)) return true;
  }
  return false;
}

bool consume_sign(Cursor& c, bool& negative) {
  if (c.consume('-') || c.consume("\xE2\x88\x92")) {  // ASCII minus or U+2212
    negative = true;
    return true;
  }
  if (c.consume('+')) return true;
  return false;
}

// Digits with optional comma thousand-separators and optional fraction.
// Appends the cleaned digits (no commas) to `clean`; returns false on a
// malformed grouping like "12,34".
bool consume_number_body(Cursor& c, std::string& clean) {
  size_t start = c.pos;
  bool any_digit = false;

  if (std::isdigit(static_cast<unsigned char>(c.peek()))) {
    size_t group_start = c.pos;
    while (std::isdigit(static_cast<unsigned char>(c.peek()))) {
      clean += c.peek();
      ++c.pos;
    }
    any_digit = true;
    size_t first_group = c.pos - group_start;
    if (c.peek() == ',') {
      if (first_group > 3) return false;
      while (c.consume(',')) {
        size_t g = 0;
        while (std::isdigit(static_cast<unsigned char>(c.peek()))) {
          clean += c.peek();
          ++c.pos;
          ++g;
        }
        if (g != 3) return false;
      }
    }
  }

  if (c.consume('.')) {
    clean += '.';
    while (std::isdigit(static_cast<unsigned char>(c.peek()))) {
      clean += c.peek();
      ++c.pos;
      any_digit = true;
    }
  }

  return any_digit && c.pos > start;
}

bool consume_scale(Cursor& c, Scale& scale) {
  if (c.consume('%')) {
    scale = Scale::percent;
    return true;
  }
  if (c.consume_word_ci("percent")) {
    scale = Scale::percent;
    return true;
  }
  if (c.consume_word_ci("thousand")) {
    scale = Scale::thousand;
    return true;
  }
  if (c.consume_word_ci("million")) {
    scale = Scale::million;
    return true;
  }
  if (c.consume_word_ci("billion")) {
    scale = Scale::billion;
    return true;
  }
  return false;
}

// Shortest fixed-notation rendering that round-trips the double. Fixed (not
// scientific) keeps the output inside the parse grammar.
std::string format_double_roundtrip(double v) {
  char buf[512];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string_view to_string(Scale scale) {
  switch (scale) {
    case Scale::none: return "none";
    case Scale::thousand: return "thousand";
    case Scale::million: return "million";
    case Scale::billion: return "billion";
    case Scale::percent: return "percent";
  }
  return "none";
}

std::optional<Scale> scale_from_string(std::string_view text) {
  if (text.empty()) return Scale::none;
  if (text == "%") return Scale::percent;
  for (Scale s : {Scale::none, Scale::thousand, Scale::million, Scale::billion, Scale::percent}) {
    if (iequals(text, to_string(s))) return s;
  }
  return std::nullopt;
}

double scale_multiplier(Scale scale) {
  switch (scale) {
    case Scale::none: return 1.0;
    case Scale::thousand: return 1e3;
    case Scale::million: return 1e6;
    case Scale::billion: return 1e9;
    case Scale::percent: return 0.01;
  }
  return 1.0;
}

std::optional<NumericValue> parse_numeric(std::string_view raw) {
  Cursor c{raw};
  c.skip_ws();
  if (c.done()) return std::nullopt;

  NumericValue out;
  bool negative = false;

  bool parenthesized = c.consume('(');
  c.skip_ws();

  // Currency and sign, either order, each at most once.
  bool saw_currency = consume_currency(c);
  c.skip_ws();
  consume_sign(c, negative);
  c.skip_ws();
  if (!saw_currency) consume_currency(c);
  c.skip_ws();

  std::string clean;
  if (negative) clean += '-';
  if (!consume_number_body(c, clean)) return std::nullopt;

  c.skip_ws();
  consume_scale(c, out.scale);

  if (parenthesized) {
    c.skip_ws();
    if (!c.consume(')')) return std::nullopt;
    out.negative_parenthesized = true;
    // "(5)%" puts the percent sign outside the parens.
    if (out.scale == Scale::none && c.consume('%')) out.scale = Scale::percent;
  }

  c.skip_ws();
  if (!c.done()) return std::nullopt;

  double magnitude = 0.0;
  auto res = std::from_chars(clean.data(), clean.data() + clean.size(), magnitude);
  if (res.ec != std::errc() || !std::isfinite(magnitude)) return std::nullopt;
  out.magnitude = magnitude;
  return out;
}

std::string render_numeric(const NumericValue& v) {
  std::string s;
  if (v.negative_parenthesized) s += '(';
  s += format_double_roundtrip(v.magnitude);
  if (v.scale == Scale::percent) {
    s += '%';
  } else if (v.scale != Scale::none) {
    s += ' ';
    s += to_string(v.scale);
  }
  if (v.negative_parenthesized) s += ')';
  return s;
}

}  // namespace tacube
