#include "nclab/multi_index.hpp"

#include <algorithm>
#include <limits>

#include "nclab/errors.hpp"

namespace nclab {

MultiIndex::MultiIndex(std::initializer_list<int> components) : c_(components) {}

MultiIndex::MultiIndex(std::vector<int> components) : c_(std::move(components)) {}

MultiIndex MultiIndex::constant(int d, int value) {
  return MultiIndex(std::vector<int>(static_cast<std::size_t>(d), value));
}

std::int64_t MultiIndex::cardinality() const {
  std::int64_t n = 1;
  for (int v : c_) {
    if (v <= 0) return 0;
    if (n > std::numeric_limits<std::int64_t>::max() / v) {
      throw BudgetError("multi-index cardinality overflows 64 bits");
    }
    n *= v;
  }
  return n;
}

int MultiIndex::min_component() const {
  if (c_.empty()) throw StructuralError("empty multi-index");
  return *std::min_element(c_.begin(), c_.end());
}

int MultiIndex::max_component() const {
  if (c_.empty()) throw StructuralError("empty multi-index");
  return *std::max_element(c_.begin(), c_.end());
}

std::string MultiIndex::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(c_[i]);
  }
  return s + ")";
}

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
  if (a.dimension() != b.dimension()) throw StructuralError("multi-index dimension mismatch");
  std::vector<int> c(static_cast<std::size_t>(a.dimension()));
  for (int i = 0; i < a.dimension(); ++i) c[static_cast<std::size_t>(i)] = a[i] + b[i];
  return MultiIndex(std::move(c));
}

Box::Box(MultiIndex lower, MultiIndex upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.dimension() != upper_.dimension()) {
    throw StructuralError("box corners have different dimensions");
  }
  if (lower_.dimension() < 1) throw StructuralError("box dimension must be >= 1");
  for (int i = 0; i < lower_.dimension(); ++i) {
    if (lower_[i] < 1) throw StructuralError("box lower corner must be >= 1");
    if (upper_[i] < lower_[i]) throw StructuralError("box upper corner below lower corner");
  }
}

Box Box::from_origin(MultiIndex upper) {
  auto lower = MultiIndex::constant(upper.dimension(), 1);
  return Box(std::move(lower), std::move(upper));
}

Box Box::cube(int d, int lo, int hi) {
  return Box(MultiIndex::constant(d, lo), MultiIndex::constant(d, hi));
}

std::int64_t Box::size() const {
  std::int64_t n = 1;
  for (int i = 0; i < dimension(); ++i) {
    const std::int64_t len = upper_[i] - lower_[i] + 1;
    if (n > std::numeric_limits<std::int64_t>::max() / len) {
      throw BudgetError("box size overflows 64 bits");
    }
    n *= len;
  }
  return n;
}

bool Box::contains(std::span<const int> k) const {
  if (static_cast<int>(k.size()) != dimension()) return false;
  for (int i = 0; i < dimension(); ++i) {
    auto a = static_cast<std::size_t>(i);
    if (k[a] < lower_[i] || k[a] > upper_[i]) return false;
  }
  return true;
}

std::int64_t Box::linear_index(std::span<const int> k) const {
  std::int64_t idx = 0;
  for (int i = 0; i < dimension(); ++i) {
    const std::int64_t len = upper_[i] - lower_[i] + 1;
    idx = idx * len + (k[static_cast<std::size_t>(i)] - lower_[i]);
  }
  return idx;
}

MultiIndex Box::at(std::int64_t linear) const {
  std::vector<int> k(static_cast<std::size_t>(dimension()));
  for (int i = dimension() - 1; i >= 0; --i) {
    const std::int64_t len = upper_[i] - lower_[i] + 1;
    k[static_cast<std::size_t>(i)] = lower_[i] + static_cast<int>(linear % len);
    linear /= len;
  }
  return MultiIndex(std::move(k));
}

std::vector<MultiIndex> Box::indices() const {
  std::vector<MultiIndex> out;
  out.reserve(static_cast<std::size_t>(size()));
  for_each([&](std::span<const int> k) { out.emplace_back(std::vector<int>(k.begin(), k.end())); });
  return out;
}

}  // namespace nclab
