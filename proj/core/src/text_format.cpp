#include "nclab/text_format.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "nclab/errors.hpp"

namespace nclab {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw StructuralError("cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

template <class T>
std::vector<T> parse_list(std::string_view s) {
  std::vector<T> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    if (item.empty()) throw StructuralError("empty list item in algebra header");
    if constexpr (std::is_same_v<T, int>) {
      int v = 0;
      auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc() || ptr != item.data() + item.size()) {
        throw StructuralError("cannot parse block dimension '" + std::string(item) + "'");
      }
      out.push_back(v);
    } else {
      out.push_back(parse_double(item));
    }
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

std::string_view after_key(std::string_view part, std::string_view key) {
  part = trim(part);
  if (part.substr(0, key.size()) != key) {
    throw StructuralError("algebra header: expected '" + std::string(key) + "'");
  }
  part.remove_prefix(key.size());
  part = trim(part);
  if (part.empty() || part.front() != ':') throw StructuralError("algebra header: missing ':'");
  part.remove_prefix(1);
  return part;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_algebra_header(const Algebra& algebra) {
  std::string s = "blocks: ";
  for (int b = 0; b < algebra.block_count(); ++b) {
    if (b) s += ",";
    s += std::to_string(algebra.block_dim(b));
  }
  s += "; weights: ";
  for (int b = 0; b < algebra.block_count(); ++b) {
    if (b) s += ",";
    s += format_double(algebra.weight(b));
  }
  return s;
}

AlgebraPtr parse_algebra_header(std::string_view line) {
  const auto semi = line.find(';');
  if (semi == std::string_view::npos) throw StructuralError("algebra header: missing ';'");
  auto dims = parse_list<int>(after_key(line.substr(0, semi), "blocks"));
  auto weights = parse_list<double>(after_key(line.substr(semi + 1), "weights"));
  return Algebra::make(std::move(dims), std::move(weights));
}

std::string format_element(const Element& x) {
  std::string s = format_algebra_header(x.algebra());
  s += "\n";
  for (int b = 0; b < x.block_count(); ++b) {
    const auto& m = x.block(b);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (j) s += " ";
        s += format_double(m(i, j).real());
        s += ",";
        s += format_double(m(i, j).imag());
      }
      s += "\n";
    }
  }
  return s;
}

Element parse_element(std::string_view text) {
  text = trim(text);
  const auto nl = text.find('\n');
  const auto header = text.substr(0, nl);
  auto algebra = parse_algebra_header(header);
  std::string_view body = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

  std::vector<Complex> entries;
  std::size_t pos = 0;
  const auto ws = " \t\r\n";
  while (true) {
    const auto b = body.find_first_not_of(ws, pos);
    if (b == std::string_view::npos) break;
    auto e = body.find_first_of(ws, b);
    if (e == std::string_view::npos) e = body.size();
    const auto tok = body.substr(b, e - b);
    const auto comma = tok.find(',');
    if (comma == std::string_view::npos) {
      throw StructuralError("element entry '" + std::string(tok) + "' is not a re,im pair");
    }
    entries.emplace_back(parse_double(tok.substr(0, comma)), parse_double(tok.substr(comma + 1)));
    pos = e;
  }
  if (static_cast<int>(entries.size()) != algebra->vector_dim()) {
    throw StructuralError("element has " + std::to_string(entries.size()) + " entries, header needs " +
                          std::to_string(algebra->vector_dim()));
  }
  std::vector<Matrix> blocks;
  std::size_t k = 0;
  for (int b = 0; b < algebra->block_count(); ++b) {
    const int n = algebra->block_dim(b);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) m(i, j) = entries[k++];
    }
    blocks.push_back(std::move(m));
  }
  return Element(std::move(algebra), std::move(blocks));
}

Element parse_element(std::string_view text, const AlgebraPtr& expected) {
  Element x = parse_element(text);
  if (!(x.algebra() == *expected)) {
    throw StructuralError("element header '" + format_algebra_header(x.algebra()) +
                          "' does not match algebra '" + format_algebra_header(*expected) + "'");
  }
  return Element(expected, std::vector<Matrix>(x.blocks().begin(), x.blocks().end()));
}

}  // namespace nclab
