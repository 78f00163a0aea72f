#pragma once

#include <string>
#include <string_view>

#include "nclab/algebra.hpp"

namespace nclab {

/// Shortest-independent fixed rendering: 17 significant digits ("%.17g").
std::string format_double(double v);

/// `blocks: d1,...,dB; weights: w1,...,wB`
std::string format_algebra_header(const Algebra& algebra);
AlgebraPtr parse_algebra_header(std::string_view line);

/// Header line, then one line per matrix row of every block with
/// whitespace-separated `re,im` pairs.
std::string format_element(const Element& x);

/// Parses the format written by format_element. Any whitespace may separate
/// entries; the entry count must match the header.
Element parse_element(std::string_view text);

/// As parse_element, but the header must describe `expected`.
Element parse_element(std::string_view text, const AlgebraPtr& expected);

}  // namespace nclab
