#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace tacube {

// Magnitude qualifier kept separate from the numeric value. A cell "2 million"
// parses to magnitude 2 with scale million; the multiplication is never
// applied here.
enum class Scale { none, thousand, million, billion, percent };

std::string_view to_string(Scale scale);

// Accepts "thousand", "million", "billion", "percent", "%" (case-insensitive).
std::optional<Scale> scale_from_string(std::string_view text);

// none -> 1, thousand -> 1e3, million -> 1e6, billion -> 1e9, percent -> 0.01.
double scale_multiplier(Scale scale);

struct NumericValue {
  double magnitude = 0.0;  // sign included when written as "-5"; parens are not
  Scale scale = Scale::none;
  bool negative_parenthesized = false;  // accounting convention "(5)" == -5

  // Interpreted magnitude with the parenthesized negation applied.
  double value() const { return negative_parenthesized ? -magnitude : magnitude; }
};

// Parses a raw cell string under the financial-table grammar:
//   [ '(' ] [currency $ € £] [sign] digits[,ddd]* [ '.' digits ] [ws]
//   [ '%' | thousand | million | billion | percent ] [ ')' ] [ '%' ]
// The whole string must be consumed (after trimming whitespace). Commas must
// form proper groups of three. Returns nullopt for anything else; never throws.
std::optional<NumericValue> parse_numeric(std::string_view raw);

// Canonical re-rendering; parse_numeric(render_numeric(v)) recovers v exactly.
std::string render_numeric(const NumericValue& v);

}  // namespace tacube
