#pragma once

// Batcher bitonic sorting network over (sortkey, payload) records. The
// compare-exchange schedule is fixed by the length alone, so runtime and
// communication are data-independent; payloads travel with keys through
// every exchange. The canonical construction sorts ascending; descending
// order is produced by the same network followed by one reversal
// permutation, which pins the tie order deterministically.
//
// A full sort of length N runs log2(N)*(log2(N)+1)/2 compare stages of N/2
// comparisons each; a merge of an already bitonic sequence runs log2(N).

#include "detpf/dist_vector.hpp"
#include "detpf/engine.hpp"

namespace detpf {

template <class P>
struct KeyedPair {
  long long key = 0;
  P payload{};

  friend bool operator==(const KeyedPair& a, const KeyedPair& b) {
    return a.key == b.key && a.payload == b.payload;
  }
};

enum class SortDir { Ascending, Descending };

inline std::size_t bitonic_compare_stages(std::size_t n) {
  const unsigned s = log2_exact(n);
  return static_cast<std::size_t>(s) * (s + 1) / 2;
}

// Sorts every contiguous segment of `seg_len` independently and in place
// (whole vector: seg_len == v.size()). Ascending canonical network.
template <class T, class KeyFn>
void bitonic_sort_segments(Pass& pass, DistVector<T>& v, std::size_t seg_len, KeyFn&& key,
                           SortDir dir) {
  const std::size_t n = v.size();
  if (!is_pow2(seg_len) || n % seg_len != 0)
    throw std::invalid_argument("bitonic_sort: segment length must be a power of two dividing N");
  const std::size_t local_mask = seg_len - 1;
  DistVector<T> scratch(n);
  for (std::size_t k = 2; k <= seg_len; k <<= 1) {
    for (std::size_t j = k >> 1; j > 0; j >>= 1) {
      pass.compare_exchange_step(scratch, v, j, key,
                                 [&](std::size_t i) { return (i & local_mask & k) == 0; });
      std::swap(scratch, v);
    }
  }
  if (dir == SortDir::Descending && seg_len > 1) {
    pass.reverse_step(scratch, v, seg_len);
    std::swap(scratch, v);
  }
}

// Merge of per-segment bitonic sequences into sorted order, log2 stages.
// The precondition (keys bitonic) is contractual, not checked at runtime.
template <class T, class KeyFn>
void bitonic_merge_segments(Pass& pass, DistVector<T>& v, std::size_t seg_len, KeyFn&& key,
                            SortDir dir) {
  const std::size_t n = v.size();
  if (!is_pow2(seg_len) || n % seg_len != 0)
    throw std::invalid_argument("bitonic_merge: segment length must be a power of two dividing N");
  const bool up = dir == SortDir::Ascending;
  DistVector<T> scratch(n);
  for (std::size_t j = seg_len >> 1; j > 0; j >>= 1) {
    pass.compare_exchange_step(scratch, v, j, key, [&](std::size_t) { return up; });
    std::swap(scratch, v);
  }
}

template <class P>
DistVector<KeyedPair<P>> bitonic_sort(Pass& pass, const DistVector<KeyedPair<P>>& v,
                                      SortDir dir) {
  if (!is_pow2(v.size())) throw std::invalid_argument("bitonic_sort: length must be a power of two");
  auto out = v;
  bitonic_sort_segments(pass, out, out.size(), [](const KeyedPair<P>& r) { return r.key; }, dir);
  return out;
}

template <class P>
DistVector<KeyedPair<P>> bitonic_merge(Pass& pass, const DistVector<KeyedPair<P>>& v,
                                       SortDir dir) {
  if (!is_pow2(v.size())) throw std::invalid_argument("bitonic_merge: length must be a power of two");
  auto out = v;
  bitonic_merge_segments(pass, out, out.size(), [](const KeyedPair<P>& r) { return r.key; }, dir);
  return out;
}

}  // namespace detpf
