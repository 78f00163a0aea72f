#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace nclab {

/// A point of N^d (all components >= 1 unless stated otherwise).
class MultiIndex {
 public:
  MultiIndex() = default;
  MultiIndex(std::initializer_list<int> components);
  explicit MultiIndex(std::vector<int> components);

  /// (v, v, ..., v) in dimension d.
  static MultiIndex constant(int d, int value);

  int dimension() const noexcept { return static_cast<int>(c_.size()); }
  int operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  int& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
  std::span<const int> components() const noexcept { return c_; }

  /// |N| = N_1 ... N_d
  std::int64_t cardinality() const;
  /// m(n) = min_i n_i
  int min_component() const;
  /// M(n) = max_i n_i
  int max_component() const;

  std::string to_string() const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> c_;
};

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b);

/// Lattice points between two corners, inclusive. Iteration is lexicographic
/// with the last component varying fastest.
class Box {
 public:
  Box() = default;
  Box(MultiIndex lower, MultiIndex upper);

  /// [1, upper]
  static Box from_origin(MultiIndex upper);
  /// [lo, hi]^d
  static Box cube(int d, int lo, int hi);

  int dimension() const noexcept { return lower_.dimension(); }
  const MultiIndex& lower() const noexcept { return lower_; }
  const MultiIndex& upper() const noexcept { return upper_; }

  std::int64_t size() const;
  bool contains(std::span<const int> k) const;
  bool contains(const MultiIndex& k) const { return contains(k.components()); }

  /// Position of k in lexicographic order.
  std::int64_t linear_index(std::span<const int> k) const;
  MultiIndex at(std::int64_t linear) const;

  std::vector<MultiIndex> indices() const;

  /// Calls f(std::span<const int>) for every point in lexicographic order.
  template <class F>
  void for_each(F&& f) const {
    const int d = dimension();
    if (d == 0 || size() == 0) return;
    std::vector<int> k(lower_.components().begin(), lower_.components().end());
    while (true) {
      f(std::span<const int>(k));
      int axis = d - 1;
      while (axis >= 0) {
        auto a = static_cast<std::size_t>(axis);
        if (k[a] < upper_[axis]) {
          ++k[a];
          break;
        }
        k[a] = lower_[axis];
        --axis;
      }
      if (axis < 0) return;
    }
  }

  friend bool operator==(const Box&, const Box&) = default;

 private:
  MultiIndex lower_;
  MultiIndex upper_;
};

}  // namespace nclab
