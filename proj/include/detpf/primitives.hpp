#pragma once

// Data-parallel building blocks: element-wise operations, cyclic rotations
// (global and per-segment), adder-tree reductions, expand, and the two-tree
// cumulative sum (up-sweep of partial sums, then downward propagation where
// a left child becomes parent minus the right child's up-sweep value and a
// right child inherits the parent). Superstep costs: element-wise ops,
// rotations and expand take one superstep; a reduction takes log2(N); the
// cumulative sum takes 2*log2(N). Tree levels shrink geometrically, so the
// total work of a reduction or scan is O(N) while its depth stays
// logarithmic. All counts depend only on the length, never on the values.

#include <functional>
#include <type_traits>

#include "detpf/dist_vector.hpp"
#include "detpf/engine.hpp"

namespace detpf {

struct SegmentSpec {
  std::size_t segment_count = 1;
  std::vector<long long> shifts;

  void validate(std::size_t n) const {
    if (!is_pow2(segment_count))
      throw std::invalid_argument("segment count must be a power of two");
    if (segment_count == 0 || n % segment_count != 0)
      throw std::invalid_argument("segment count must divide the vector length");
    if (shifts.size() != segment_count)
      throw std::invalid_argument("one shift per segment required");
  }
  std::size_t segment_length(std::size_t n) const { return n / segment_count; }
};

template <class T, class F>
auto ew_map(Pass& pass, const DistVector<T>& v, F&& f) {
  using R = std::decay_t<std::invoke_result_t<F, const T&>>;
  DistVector<R> out(v.size());
  pass.map(out, 1, [&](std::size_t i) { return f(v[i]); });
  return out;
}

template <class A, class B, class F>
auto ew_zip(Pass& pass, const DistVector<A>& a, const DistVector<B>& b, F&& f) {
  if (a.size() != b.size()) throw std::invalid_argument("ew_zip: length mismatch");
  using R = std::decay_t<std::invoke_result_t<F, const A&, const B&>>;
  DistVector<R> out(a.size());
  pass.map(out, 2, [&](std::size_t i) { return f(a[i], b[i]); });
  return out;
}

template <class T>
DistVector<T> vif(Pass& pass, const DistVector<unsigned char>& cond, const DistVector<T>& b,
                  const DistVector<T>& c) {
  if (cond.size() != b.size() || b.size() != c.size())
    throw std::invalid_argument("vif: length mismatch");
  DistVector<T> out(b.size());
  pass.map(out, 3, [&](std::size_t i) { return cond[i] ? b[i] : c[i]; });
  return out;
}

// Element at index i lands at (i + delta) mod N.
template <class T>
DistVector<T> rotate(Pass& pass, const DistVector<T>& v, long long delta) {
  if (v.empty()) throw std::invalid_argument("rotate: empty vector");
  DistVector<T> out(v.size());
  pass.rotate_step(out, v, delta);
  return out;
}

template <class T>
DistVector<T> seg_rotate(Pass& pass, const DistVector<T>& v, const SegmentSpec& spec) {
  spec.validate(v.size());
  DistVector<T> out(v.size());
  pass.seg_rotate_step(out, v, spec.segment_length(v.size()), spec.shifts);
  return out;
}

template <class T>
DistVector<T> expand(Pass& pass, const T& x, std::size_t n) {
  if (n == 0) throw std::invalid_argument("expand: length must be >= 1");
  DistVector<T> out(n);
  pass.map(out, 0, [&](std::size_t) { return x; });
  return out;
}

// Per-segment adder-tree reduction; returns one value per segment (the
// level-log2(seg_len) roots). The projection sees the leaf and its index.
// seg_len == v.size() gives the plain reduction.
template <class Leaf, class Prj, class Cmb>
auto seg_tree_reduce(Pass& pass, const DistVector<Leaf>& v, std::size_t seg_len, Prj&& prj,
                     Cmb&& comb) {
  using T = std::decay_t<std::invoke_result_t<Prj, const Leaf&, std::size_t>>;
  const std::size_t n = v.size();
  if (n == 0) throw std::invalid_argument("tree_reduce: empty vector");
  if (!is_pow2(seg_len) || n % seg_len != 0)
    throw std::invalid_argument("tree_reduce: segment length must be a power of two dividing N");
  if (seg_len == 1) {
    DistVector<T> out(n);
    pass.map(out, 1, [&](std::size_t i) { return prj(v[i], i); });
    return out;
  }
  const unsigned s = log2_exact(seg_len);
  DistVector<T> cur(n / 2);
  pass.tree_level_step(cur, n, [&](std::size_t j) {
    return comb(prj(v[2 * j], 2 * j), prj(v[2 * j + 1], 2 * j + 1));
  });
  for (unsigned d = 2; d <= s; ++d) {
    DistVector<T> next(n >> d);
    pass.tree_level_step(next, cur.size(),
                         [&](std::size_t j) { return comb(cur[2 * j], cur[2 * j + 1]); });
    cur = std::move(next);
  }
  return cur;
}

template <class T>
T tree_reduce_sum(Pass& pass, const DistVector<T>& v) {
  return seg_tree_reduce(
      pass, v, v.size(), [](const T& x, std::size_t) { return x; },
      [](T a, T b) { return a + b; })[0];
}

template <class T>
T tree_reduce_max(Pass& pass, const DistVector<T>& v) {
  return seg_tree_reduce(
      pass, v, v.size(), [](const T& x, std::size_t) { return x; },
      [](T a, T b) { return a > b ? a : b; })[0];
}

template <class T>
T tree_reduce_min(Pass& pass, const DistVector<T>& v) {
  return seg_tree_reduce(
      pass, v, v.size(), [](const T& x, std::size_t) { return x; },
      [](T a, T b) { return a < b ? a : b; })[0];
}

struct FirstHit {
  unsigned char flag = 0;
  long long value = -1;
};

inline FirstHit first_hit_comb(FirstHit a, FirstHit b) { return a.flag ? a : b; }

// Index of the first (lowest-index) nonzero element; -1 when all zero.
template <class T>
long long tree_reduce_first_nonzero(Pass& pass, const DistVector<T>& v) {
  const FirstHit root = seg_tree_reduce(
      pass, v, v.size(),
      [](const T& x, std::size_t i) {
        return FirstHit{static_cast<unsigned char>(x != T{}), static_cast<long long>(i)};
      },
      first_hit_comb)[0];
  return root.flag ? root.value : -1;
}

// Reduction over a non-power-of-two length: pads with the supplied identity.
template <class T, class Cmb>
T tree_reduce_padded(Pass& pass, const DistVector<T>& v, const T& identity, Cmb&& comb) {
  if (v.empty()) throw std::invalid_argument("tree_reduce: empty vector");
  std::size_t n = 1;
  while (n < v.size()) n <<= 1;
  DistVector<T> padded(n, identity);
  for (std::size_t i = 0; i < v.size(); ++i) padded[i] = v[i];
  return seg_tree_reduce(
      pass, padded, n, [](const T& x, std::size_t) { return x; }, comb)[0];
}

// Inclusive cumulative sum within each contiguous segment (two-tree method).
template <class Leaf, class Prj>
auto seg_scan_proj(Pass& pass, const DistVector<Leaf>& v, std::size_t seg_len, Prj&& prj) {
  using T = std::decay_t<std::invoke_result_t<Prj, const Leaf&>>;
  const std::size_t n = v.size();
  if (n == 0) throw std::invalid_argument("scan: empty vector");
  if (!is_pow2(seg_len) || n % seg_len != 0)
    throw std::invalid_argument("scan: segment length must be a power of two dividing N");
  if (seg_len == 1) {
    DistVector<T> out(n);
    pass.map(out, 1, [&](std::size_t i) { return prj(v[i]); });
    return out;
  }
  const unsigned s = log2_exact(seg_len);

  // Up-sweep: levels[d-1] holds the level-d partial sums (n/2^d nodes).
  std::vector<DistVector<T>> levels;
  levels.reserve(s);
  {
    DistVector<T> first(n / 2);
    pass.tree_level_step(first, n,
                         [&](std::size_t j) { return prj(v[2 * j]) + prj(v[2 * j + 1]); });
    levels.push_back(std::move(first));
    for (unsigned d = 2; d <= s; ++d) {
      const auto& below = levels.back();
      DistVector<T> lvl(n >> d);
      pass.tree_level_step(lvl, below.size(),
                           [&](std::size_t j) { return below[2 * j] + below[2 * j + 1]; });
      levels.push_back(std::move(lvl));
    }
  }

  // Down-sweep: right child <- parent; left child <- parent - right's up value.
  DistVector<T> down = std::move(levels.back());
  for (unsigned d = s - 1; d >= 1; --d) {
    const auto& up_same = levels[d - 1];  // level-d up values (n/2^d nodes)
    DistVector<T> next(n >> d);
    pass.scan_down_step(next, down.size(), [&](std::size_t j) {
      return (j & 1) ? down[j / 2] : static_cast<T>(down[j / 2] - up_same[j + 1]);
    });
    down = std::move(next);
  }
  DistVector<T> out(n);
  pass.scan_down_step(out, down.size(), [&](std::size_t j) {
    return (j & 1) ? down[j / 2] : static_cast<T>(down[j / 2] - prj(v[j + 1]));
  });
  return out;
}

template <class T>
DistVector<T> inclusive_scan(Pass& pass, const DistVector<T>& v) {
  if (!is_pow2(v.size())) throw std::invalid_argument("scan: length must be a power of two");
  return seg_scan_proj(pass, v, v.size(), [](const T& x) { return x; });
}

template <class T>
DistVector<T> seg_scan(Pass& pass, const DistVector<T>& v, std::size_t seg_len) {
  return seg_scan_proj(pass, v, seg_len, [](const T& x) { return x; });
}

}  // namespace detpf
