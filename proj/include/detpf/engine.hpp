#pragma once

// Barrier-superstep executor over P logical workers, with exact per-pass
// instrumentation (superstep count, per-worker touched elements, cross-
// partition moves). This is an in-process emulation of the BSP/MapReduce
// execution style: within one superstep every worker may read any
// partition of the pre-superstep snapshots but writes only its own
// contiguous block; a barrier separates supersteps. The emulator runs
// workers in a configurable order so tests can demonstrate that results
// do not depend on scheduling.
//
// Superstep accounting rules:
//   touched[w]  = elements read + written by worker w over the pass
//   moved       = elements whose source and destination partitions differ.
//                 For supersteps whose read pattern is fixed at plan time
//                 the count is literal. For the segment gather whose shift
//                 is itself data (redistribution pivots), the schedule a
//                 deterministic-runtime implementation must provision is
//                 charged instead: every element of a segment spanning
//                 more than one block counts once per overlapping worker.
//                 That keeps moved a function of (N, P, pass shape) only.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "detpf/dist_vector.hpp"
#include "detpf/rng.hpp"

namespace detpf {

struct Partition {
  int worker = 0;
  std::size_t lo = 0;
  std::size_t hi = 0;
};

// Balanced contiguous blocks; sizes differ by at most one.
std::vector<Partition> plan_partitions(std::size_t n, int workers);

// Owner lookup for the balanced contiguous layout.
struct BlockMap {
  std::size_t n = 0;
  int workers = 1;
  std::size_t q = 0;  // n / workers
  std::size_t r = 0;  // n % workers

  BlockMap() = default;
  BlockMap(std::size_t n_, int p_)
      : n(n_), workers(p_), q(n_ / static_cast<std::size_t>(p_)),
        r(n_ % static_cast<std::size_t>(p_)) {}

  int owner(std::size_t i) const {
    const std::size_t big = r * (q + 1);
    if (i < big) return static_cast<int>(i / (q + 1));
    return static_cast<int>(r + (i - big) / q);
  }
  std::pair<std::size_t, std::size_t> block(int w) const {
    const auto uw = static_cast<std::size_t>(w);
    if (uw < r) return {uw * (q + 1), (uw + 1) * (q + 1)};
    const std::size_t lo = r * (q + 1) + (uw - r) * q;
    return {lo, lo + q};
  }
  bool uniform_pow2() const {
    return r == 0 && is_pow2(n) && is_pow2(static_cast<std::size_t>(workers));
  }
};

struct PassStats {
  std::string name;
  int workers = 1;
  std::size_t supersteps = 0;
  std::uint64_t moved = 0;
  std::vector<std::uint64_t> touched;
  std::uint64_t max_step_writes = 0;  // max writes by one worker in one superstep
  double wall_seconds = 0.0;

  std::uint64_t touched_total() const {
    return std::accumulate(touched.begin(), touched.end(), std::uint64_t{0});
  }
  std::uint64_t touched_max() const {
    return touched.empty() ? 0 : *std::max_element(touched.begin(), touched.end());
  }
  void merge(const PassStats& o);
  std::string to_json() const;
};

enum class WorkerOrder { Forward, Reverse, Shuffled };

class Pass {
 public:
  Pass(std::string name, int workers, WorkerOrder order = WorkerOrder::Forward,
       std::uint64_t order_seed = 0)
      : workers_(workers), order_(order), order_seed_(order_seed),
        start_(std::chrono::steady_clock::now()) {
    if (workers < 1) throw std::invalid_argument("worker count must be >= 1");
    stats_.name = std::move(name);
    stats_.workers = workers;
    stats_.touched.assign(static_cast<std::size_t>(workers), 0);
  }

  int workers() const { return workers_; }
  std::size_t supersteps() const { return stats_.supersteps; }

  PassStats finish() {
    stats_.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return stats_;
  }

  // out[i] = f(i); f reads `reads_at_i` inputs, all at index i.
  template <class T, class F>
  void map(DistVector<T>& out, int reads_at_i, F&& f) {
    const std::size_t n = out.size();
    const BlockMap bm(n, active_workers(n));
    for_each_block(bm, [&](int w, std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) out[i] = f(i);
      account(w, (hi - lo) * static_cast<std::uint64_t>(reads_at_i + 1), hi - lo);
    });
    end_step();
  }

  // out[i] = f(i) with f additionally reading one vector at i+off when
  // 0 <= i+off < n (the caller handles the boundary value itself).
  template <class T, class F>
  void map_with_offset(DistVector<T>& out, int reads_at_i, std::ptrdiff_t off, F&& f) {
    const std::size_t n = out.size();
    const BlockMap bm(n, active_workers(n));
    for_each_block(bm, [&](int w, std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) out[i] = f(i);
      const std::uint64_t valid = valid_offset_reads(n, lo, hi, off);
      account(w, (hi - lo) * static_cast<std::uint64_t>(reads_at_i + 1) + valid, hi - lo);
    });
    stats_.moved += offset_crossings(bm, off);
    end_step();
  }

  // Cyclic shift: element at index i lands at (i + delta) mod n.
  template <class T>
  void rotate_step(DistVector<T>& out, const DistVector<T>& in, long long delta) {
    const std::size_t n = out.size();
    const long long d = normalize_delta(delta, n);
    const BlockMap bm(n, active_workers(n));
    for_each_block(bm, [&](int w, std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        const std::size_t src = (i + n - static_cast<std::size_t>(d)) % n;
        out[i] = in[src];
      }
      account(w, 2 * (hi - lo), hi - lo);
    });
    stats_.moved += rotate_crossings(bm, d);
    end_step();
  }

  // Per-segment cyclic shifts (one fixed delta per segment).
  template <class T>
  void seg_rotate_step(DistVector<T>& out, const DistVector<T>& in, std::size_t seg_len,
                       const std::vector<long long>& deltas) {
    const std::size_t n = out.size();
    const BlockMap bm(n, active_workers(n));
    for_each_block(bm, [&](int w, std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        const std::size_t seg = i / seg_len, local = i % seg_len;
        const long long d = normalize_delta(deltas[seg], seg_len);
        const std::size_t src =
            seg * seg_len + (local + seg_len - static_cast<std::size_t>(d)) % seg_len;
        out[i] = in[src];
      }
      account(w, 2 * (hi - lo), hi - lo);
    });
    for (std::size_t seg = 0; seg * seg_len < n; ++seg)
      stats_.moved += seg_rotate_crossings(bm, seg * seg_len, seg_len,
                                           normalize_delta(deltas[seg], seg_len));
    end_step();
  }

  // Reversal within each segment (seg_len == n reverses the whole vector).
  template <class T>
  void reverse_step(DistVector<T>& out, const DistVector<T>& in, std::size_t seg_len) {
    const std::size_t n = out.size();
    const BlockMap bm(n, active_workers(n));
    for_each_block(bm, [&](int w, std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        const std::size_t seg = i / seg_len, local = i % seg_len;
        const std::size_t src = seg * seg_len + (seg_len - 1 - local);
        out[i] = in[src];
        if (bm.owner(src) != w) ++pending_moved_;
      }
      account(w, 2 * (hi - lo), hi - lo);
    });
    flush_pending_moved();
    end_step();
  }

  // One adder-tree level: out[j] = f(j) reading in at 2j and 2j+1.
  template <class T, class F>
  void tree_level_step(DistVector<T>& out, std::size_t in_len, F&& f) {
    const std::size_t m = out.size();
    const BlockMap bm_out(m, active_workers(m));
    const BlockMap bm_in(in_len, active_workers(in_len));
    for_each_block(bm_out, [&](int w, std::size_t lo, std::size_t hi) {
      for (std::size_t j = lo; j < hi; ++j) {
        out[j] = f(j);
        if (bm_in.owner(2 * j) != w) ++pending_moved_;
        if (bm_in.owner(2 * j + 1) != w) ++pending_moved_;
      }
      account(w, 3 * (hi - lo), hi - lo);
    });
    flush_pending_moved();
    end_step();
  }

  // Downward scan level: out has twice the parent length; out[j] reads the
  // parent at j/2 and (for left children) the same-level up values at j+1.
  template <class T, class F>
  void scan_down_step(DistVector<T>& out, std::size_t parent_len, F&& f) {
    const std::size_t m = out.size();
    const BlockMap bm_out(m, active_workers(m));
    const BlockMap bm_par(parent_len, active_workers(parent_len));
    for_each_block(bm_out, [&](int w, std::size_t lo, std::size_t hi) {
      std::uint64_t reads = 0;
      for (std::size_t j = lo; j < hi; ++j) {
        out[j] = f(j);
        if (bm_par.owner(j / 2) != w) ++pending_moved_;
        reads += 1;
        if ((j & 1) == 0) {  // left child also reads its sibling's up value
          reads += 1;
          if (j + 1 < m && bm_out.owner(j + 1) != w) ++pending_moved_;
        }
      }
      account(w, reads, hi - lo);
    });
    flush_pending_moved();
    end_step();
  }

  // Bitonic compare-exchange stage: partner = i XOR dist.
  template <class T, class KeyFn, class DirFn>
  void compare_exchange_step(DistVector<T>& out, const DistVector<T>& in, std::size_t dist,
                             KeyFn&& key, DirFn&& ascending) {
    const std::size_t n = out.size();
    const BlockMap bm(n, active_workers(n));
    for_each_block(bm, [&](int w, std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        const std::size_t p = i ^ dist;
        const bool up = ascending(i);
        const bool take_partner = (i < p) ? (up ? key(in[p]) < key(in[i]) : key(in[p]) > key(in[i]))
                                          : (up ? key(in[p]) > key(in[i]) : key(in[p]) < key(in[i]));
        out[i] = take_partner ? in[p] : in[i];
      }
      account(w, 3 * (hi - lo), hi - lo);
    });
    stats_.moved += xor_crossings(bm, dist);
    end_step();
  }

  // Fixed-pattern gather from mixed sources: out[i] = f(i), where f reads one
  // element whose location src(i) = {source length, source index} is known at
  // plan time. Crossings are counted per element against the source layout.
  template <class T, class SrcFn, class F>
  void gather_mixed_step(DistVector<T>& out, SrcFn&& src, F&& f) {
    const std::size_t n = out.size();
    const BlockMap bm(n, active_workers(n));
    for_each_block(bm, [&](int w, std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        out[i] = f(i);
        const auto [slen, sidx] = src(i);
        if (BlockMap(slen, active_workers(slen)).owner(sidx) != w) ++pending_moved_;
      }
      account(w, 2 * (hi - lo), hi - lo);
    });
    flush_pending_moved();
    end_step();
  }

  // Gather whose source index is data (within the segment containing i).
  // Moved charges the provisioned exchange; see the header comment.
  template <class T, class F>
  void seg_dynamic_gather_step(DistVector<T>& out, std::size_t seg_len, int reads_at_i, F&& f) {
    const std::size_t n = out.size();
    const BlockMap bm(n, active_workers(n));
    std::uint64_t provision_total = 0;
    for_each_block(bm, [&](int w, std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) out[i] = f(i);
      const std::uint64_t prov = provisioned_remote(bm, w, lo, hi, seg_len);
      provision_total += prov;
      account(w, (hi - lo) * static_cast<std::uint64_t>(reads_at_i + 1) + prov, hi - lo);
    });
    stats_.moved += provision_total;
    end_step();
  }

  // Custom superstep over an index domain: body(worker, lo, hi) handles one
  // block and returns {reads, writes} for accounting. Used by adapters whose
  // work does not fit the vector shapes (e.g. keyed map/reduce stages).
  template <class Body>
  void custom_step(std::size_t n, Body&& body) {
    const BlockMap bm(n, active_workers(n));
    for_each_block(bm, [&](int w, std::size_t lo, std::size_t hi) {
      const auto [reads, writes] = body(w, lo, hi);
      account(w, reads, writes);
    });
    end_step();
  }

  void add_moved(std::uint64_t m) { stats_.moved += m; }

  // Scatter over an input domain: each worker walks its own input block and
  // may write any output slot. Overlapping writers are applied in worker-id
  // order; per-worker write load is data-dependent (this is the point).
  template <class T, class F>
  void scatter_step(DistVector<T>& out, std::size_t n_in, int reads_per_elem, F&& f) {
    const std::size_t n_out = out.size();
    const BlockMap bm_in(n_in, active_workers(n_in));
    const BlockMap bm_out(n_out, active_workers(n_out));
    struct Write {
      std::size_t dst;
      T value;
    };
    std::vector<std::vector<Write>> buffered(static_cast<std::size_t>(workers_));
    for_each_block(bm_in, [&](int w, std::size_t lo, std::size_t hi) {
      auto& buf = buffered[static_cast<std::size_t>(w)];
      auto emit = [&buf](std::size_t dst, const T& value) { buf.push_back({dst, value}); };
      for (std::size_t i = lo; i < hi; ++i) f(i, emit);
      account(w, (hi - lo) * static_cast<std::uint64_t>(reads_per_elem), 0);
    });
    for (int w = 0; w < workers_; ++w) {
      const auto& buf = buffered[static_cast<std::size_t>(w)];
      for (const auto& wr : buf) {
        out[wr.dst] = wr.value;
        if (bm_out.owner(wr.dst) != w) ++stats_.moved;
      }
      account(w, 0, buf.size());
    }
    end_step();
  }

 private:
  int active_workers(std::size_t n) const {
    return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers_),
                                                  std::max<std::size_t>(n, 1)));
  }

  template <class Body>
  void for_each_block(const BlockMap& bm, Body&& body) {
    std::vector<int> order(static_cast<std::size_t>(bm.workers));
    std::iota(order.begin(), order.end(), 0);
    if (order_ == WorkerOrder::Reverse) {
      std::reverse(order.begin(), order.end());
    } else if (order_ == WorkerOrder::Shuffled) {
      for (std::size_t i = order.size(); i > 1; --i) {
        const std::uint64_t r =
            stream_bits(order_seed_, Stream::Scenario, stats_.supersteps, i);
        std::swap(order[i - 1], order[r % i]);
      }
    }
    for (int w : order) {
      const auto [lo, hi] = bm.block(w);
      if (lo < hi) body(w, lo, hi);
    }
  }

  void account(int w, std::uint64_t reads, std::uint64_t writes) {
    stats_.touched[static_cast<std::size_t>(w)] += reads + writes;
    step_max_writes_ = std::max(step_max_writes_, writes);
  }

  void end_step() {
    ++stats_.supersteps;
    stats_.max_step_writes = std::max(stats_.max_step_writes, step_max_writes_);
    step_max_writes_ = 0;
  }

  void flush_pending_moved() {
    stats_.moved += pending_moved_;
    pending_moved_ = 0;
  }

  static long long normalize_delta(long long delta, std::size_t n) {
    const long long m = static_cast<long long>(n);
    long long d = delta % m;
    if (d < 0) d += m;
    return d;
  }

  static std::uint64_t valid_offset_reads(std::size_t n, std::size_t lo, std::size_t hi,
                                          std::ptrdiff_t off);
  static std::uint64_t offset_crossings(const BlockMap& bm, std::ptrdiff_t off);
  static std::uint64_t rotate_crossings(const BlockMap& bm, long long d);
  static std::uint64_t seg_rotate_crossings(const BlockMap& bm, std::size_t seg_base,
                                            std::size_t seg_len, long long d);
  static std::uint64_t xor_crossings(const BlockMap& bm, std::size_t dist);
  static std::uint64_t provisioned_remote(const BlockMap& bm, int w, std::size_t lo,
                                          std::size_t hi, std::size_t seg_len);

  int workers_;
  WorkerOrder order_;
  std::uint64_t order_seed_;
  std::chrono::steady_clock::time_point start_;
  PassStats stats_;
  std::uint64_t step_max_writes_ = 0;
  std::uint64_t pending_moved_ = 0;
};

}  // namespace detpf
