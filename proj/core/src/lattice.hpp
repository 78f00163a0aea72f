#pragma once

// Flat d-dimensional lattices in lexicographic order (last axis fastest) and
// compensated inclusive prefix sums along one axis.

#include <algorithm>
#include <cstdint>
#include <span>
#include <thread>
#include <vector>

#include "nclab/compensated.hpp"

namespace nclab::detail {

inline std::vector<std::int64_t> strides_of(std::span<const int> lens) {
  std::vector<std::int64_t> s(lens.size(), 1);
  for (int i = static_cast<int>(lens.size()) - 2; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = s[static_cast<std::size_t>(i) + 1] * lens[static_cast<std::size_t>(i) + 1];
  }
  return s;
}

/// Runs f(begin, end) over [0, count) split into contiguous chunks.
template <class F>
void parallel_chunks(std::int64_t count, int threads, F&& f) {
  threads = std::max(1, threads);
  if (threads == 1 || count < 2 * threads) {
    f(std::int64_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  const std::int64_t chunk = (count + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const std::int64_t b = t * chunk;
    const std::int64_t e = std::min(count, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&f, b, e] { f(b, e); });
  }
  for (auto& th : pool) th.join();
}

/// In-place inclusive prefix sum along `axis`. Each lattice point holds
/// `block` consecutive values of T. Every line is summed sequentially in
/// index order, so the result does not depend on `threads`.
template <class T>
void prefix_sum_axis(std::span<T> data, std::span<const int> lens, int axis, int block, int threads) {
  const auto strides = strides_of(lens);
  const auto a = static_cast<std::size_t>(axis);
  const std::int64_t len = lens[a];
  const std::int64_t stride = strides[a];
  std::int64_t total = 1;
  for (int l : lens) total *= l;
  const std::int64_t lines = total / len;

  parallel_chunks(lines, threads, [&](std::int64_t lb, std::int64_t le) {
    std::vector<KahanSum<T>> acc(static_cast<std::size_t>(block));
    for (std::int64_t line = lb; line < le; ++line) {
      const std::int64_t outer = line / stride;
      const std::int64_t inner = line % stride;
      const std::int64_t start = outer * len * stride + inner;
      for (auto& s : acc) s = KahanSum<T>(T{});
      for (std::int64_t j = 0; j < len; ++j) {
        T* p = data.data() + (start + j * stride) * block;
        for (int c = 0; c < block; ++c) {
          acc[static_cast<std::size_t>(c)].add(p[c]);
          p[c] = acc[static_cast<std::size_t>(c)].value();
        }
      }
    }
  });
}

template <class T>
void prefix_sum_all_axes(std::span<T> data, std::span<const int> lens, int block, int threads) {
  for (int axis = 0; axis < static_cast<int>(lens.size()); ++axis) prefix_sum_axis(data, lens, axis, block, threads);
}

}  // namespace nclab::detail
