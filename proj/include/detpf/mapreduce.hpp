#pragma once

// Keyed map/shuffle/reduce adapter over the superstep engine. Mappers emit
// (key, value) pairs per record, the shuffle groups equal keys, and the
// reducer folds each key group to a single value. Output is ordered by key
// so stages chain deterministically (the output of one stage can feed the
// next stage's mapper). Three supersteps: map, shuffle, reduce.

#include <algorithm>
#include <utility>
#include <vector>

#include "detpf/engine.hpp"

namespace detpf {

template <class K, class V>
struct Keyed {
  K key;
  V value;

  friend bool operator==(const Keyed& a, const Keyed& b) {
    return a.key == b.key && a.value == b.value;
  }
};

template <class K, class V, class Rec, class Mapper, class Reducer>
std::vector<Keyed<K, V>> mapreduce_stage(Pass& pass, const std::vector<Rec>& records,
                                         Mapper&& mapper, Reducer&& reducer) {
  const int P = pass.workers();
  const std::size_t n = records.size();
  const std::size_t map_domain = std::max<std::size_t>(n, 1);

  // Map: each worker emits pairs for its own block of records.
  std::vector<std::vector<Keyed<K, V>>> emitted(static_cast<std::size_t>(P));
  pass.custom_step(map_domain, [&](int w, std::size_t lo, std::size_t hi) {
    auto& mine = emitted[static_cast<std::size_t>(w)];
    std::uint64_t writes = 0;
    for (std::size_t i = lo; i < hi && i < n; ++i) {
      mapper(records[i], [&](const K& k, const V& v) {
        mine.push_back({k, v});
        ++writes;
      });
    }
    return std::pair<std::uint64_t, std::uint64_t>(hi - lo, writes);
  });

  // Shuffle: concatenate in worker order (deterministic regardless of the
  // emulation's scheduling), then stable-sort by key to form groups. A pair
  // moves when its mapper's worker differs from its group's reducer.
  struct Tagged {
    K key;
    V value;
    int source;
  };
  std::vector<Tagged> all;
  for (int w = 0; w < P; ++w)
    for (auto& kv : emitted[static_cast<std::size_t>(w)]) all.push_back({kv.key, kv.value, w});
  std::stable_sort(all.begin(), all.end(),
                   [](const Tagged& a, const Tagged& b) { return a.key < b.key; });

  std::vector<std::size_t> group_start;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (i == 0 || all[i].key != all[i - 1].key) group_start.push_back(i);
  group_start.push_back(all.size());
  const std::size_t gcount = group_start.empty() ? 0 : group_start.size() - 1;
  const std::size_t red_domain = std::max<std::size_t>(gcount, 1);
  const BlockMap gbm(red_domain, static_cast<int>(std::min<std::size_t>(
                                     static_cast<std::size_t>(P), red_domain)));

  std::uint64_t moved = 0;
  for (std::size_t g = 0; g < gcount; ++g) {
    const int dst = gbm.owner(g);
    for (std::size_t i = group_start[g]; i < group_start[g + 1]; ++i)
      if (all[i].source != dst) ++moved;
  }
  pass.custom_step(red_domain, [&](int w, std::size_t lo, std::size_t hi) {
    std::uint64_t writes = 0;
    for (std::size_t g = lo; g < hi && g < gcount; ++g)
      writes += group_start[g + 1] - group_start[g];
    (void)w;
    return std::pair<std::uint64_t, std::uint64_t>(0, writes);
  });
  pass.add_moved(moved);

  // Reduce: one output value per key group, in key order.
  std::vector<Keyed<K, V>> out(gcount);
  pass.custom_step(red_domain, [&](int w, std::size_t lo, std::size_t hi) {
    std::uint64_t reads = 0;
    for (std::size_t g = lo; g < hi && g < gcount; ++g) {
      std::vector<V> values;
      values.reserve(group_start[g + 1] - group_start[g]);
      for (std::size_t i = group_start[g]; i < group_start[g + 1]; ++i)
        values.push_back(all[i].value);
      reads += values.size();
      out[g] = {all[group_start[g]].key, reducer(all[group_start[g]].key, values)};
    }
    (void)w;
    return std::pair<std::uint64_t, std::uint64_t>(reads, hi - lo);
  });
  return out;
}

}  // namespace detpf
