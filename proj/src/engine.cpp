#include "detpf/engine.hpp"

#include <nlohmann/json.hpp>

namespace detpf {

std::vector<Partition> plan_partitions(std::size_t n, int workers) {
  if (workers < 1) throw std::invalid_argument("worker count must be >= 1");
  if (static_cast<std::size_t>(workers) > n)
    throw std::invalid_argument("worker count must not exceed vector length");
  const BlockMap bm(n, workers);
  std::vector<Partition> parts;
  parts.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    const auto [lo, hi] = bm.block(w);
    parts.push_back({w, lo, hi});
  }
  return parts;
}

void PassStats::merge(const PassStats& o) {
  supersteps += o.supersteps;
  moved += o.moved;
  wall_seconds += o.wall_seconds;
  max_step_writes = std::max(max_step_writes, o.max_step_writes);
  if (touched.size() < o.touched.size()) touched.resize(o.touched.size(), 0);
  for (std::size_t w = 0; w < o.touched.size(); ++w) touched[w] += o.touched[w];
  workers = std::max(workers, o.workers);
}

std::string PassStats::to_json() const {
  nlohmann::json j;
  j["pass"] = name;
  j["workers"] = workers;
  j["supersteps"] = supersteps;
  j["moved"] = moved;
  j["touched"] = touched;
  j["max_step_writes"] = max_step_writes;
  j["wall_seconds"] = wall_seconds;
  return j.dump();
}

namespace {

std::uint64_t interval_overlap(std::size_t a_lo, std::size_t a_hi, std::size_t b_lo,
                               std::size_t b_hi) {
  const std::size_t lo = std::max(a_lo, b_lo);
  const std::size_t hi = std::min(a_hi, b_hi);
  return hi > lo ? hi - lo : 0;
}

}  // namespace

std::uint64_t Pass::valid_offset_reads(std::size_t n, std::size_t lo, std::size_t hi,
                                       std::ptrdiff_t off) {
  // count i in [lo,hi) with 0 <= i+off < n
  const auto slo = static_cast<std::ptrdiff_t>(lo);
  const auto shi = static_cast<std::ptrdiff_t>(hi);
  const std::ptrdiff_t from = std::max<std::ptrdiff_t>(slo, -off);
  const std::ptrdiff_t to = std::min<std::ptrdiff_t>(shi, static_cast<std::ptrdiff_t>(n) - off);
  return to > from ? static_cast<std::uint64_t>(to - from) : 0;
}

std::uint64_t Pass::offset_crossings(const BlockMap& bm, std::ptrdiff_t off) {
  if (off == 0) return 0;
  std::uint64_t crossings = 0;
  for (int w = 0; w < bm.workers; ++w) {
    const auto [lo, hi] = bm.block(w);
    if (lo >= hi) continue;
    // reads land in [lo+off, hi+off) clipped to [0,n); those outside [lo,hi) cross
    const std::ptrdiff_t rlo =
        std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(lo) + off);
    const std::ptrdiff_t rhi = std::min<std::ptrdiff_t>(
        static_cast<std::ptrdiff_t>(bm.n), static_cast<std::ptrdiff_t>(hi) + off);
    if (rhi <= rlo) continue;
    const std::uint64_t total = static_cast<std::uint64_t>(rhi - rlo);
    crossings += total - interval_overlap(static_cast<std::size_t>(rlo),
                                          static_cast<std::size_t>(rhi), lo, hi);
  }
  return crossings;
}

std::uint64_t Pass::rotate_crossings(const BlockMap& bm, long long d) {
  return seg_rotate_crossings(bm, 0, bm.n, d);
}

std::uint64_t Pass::seg_rotate_crossings(const BlockMap& bm, std::size_t seg_base,
                                         std::size_t seg_len, long long d) {
  if (d == 0 || seg_len <= 1) return 0;
  const auto ud = static_cast<std::size_t>(d);
  std::uint64_t crossings = 0;
  // walk the workers overlapping this segment
  int w0 = bm.owner(seg_base);
  int w1 = bm.owner(seg_base + seg_len - 1);
  for (int w = w0; w <= w1; ++w) {
    auto [blo, bhi] = bm.block(w);
    const std::size_t lo = std::max(blo, seg_base);
    const std::size_t hi = std::min(bhi, seg_base + seg_len);
    if (lo >= hi) continue;
    // sources of [lo,hi): shift back by d within the segment, possibly wrapping
    const std::size_t llo = lo - seg_base, lhi = hi - seg_base;
    const std::size_t s1 = (llo + seg_len - ud) % seg_len;
    std::uint64_t local = 0;
    const std::size_t len = lhi - llo;
    if (s1 + len <= seg_len) {
      local = interval_overlap(seg_base + s1, seg_base + s1 + len, lo, hi);
    } else {
      local = interval_overlap(seg_base + s1, seg_base + seg_len, lo, hi) +
              interval_overlap(seg_base, seg_base + (s1 + len - seg_len), lo, hi);
    }
    crossings += (hi - lo) - local;
  }
  return crossings;
}

std::uint64_t Pass::xor_crossings(const BlockMap& bm, std::size_t dist) {
  if (dist == 0) return 0;
  if (bm.uniform_pow2()) {
    const std::size_t block = bm.n / static_cast<std::size_t>(bm.workers);
    return dist >= block ? bm.n : 0;
  }
  std::uint64_t crossings = 0;
  for (std::size_t i = 0; i < bm.n; ++i)
    if (bm.owner(i ^ dist) != bm.owner(i)) ++crossings;
  return crossings;
}

std::uint64_t Pass::provisioned_remote(const BlockMap& bm, int w, std::size_t lo,
                                       std::size_t hi, std::size_t seg_len) {
  std::uint64_t remote = 0;
  for (std::size_t seg = lo / seg_len; seg * seg_len < hi; ++seg) {
    const std::size_t s_lo = seg * seg_len;
    const std::size_t s_hi = std::min(s_lo + seg_len, bm.n);
    const std::uint64_t overlap = interval_overlap(s_lo, s_hi, lo, hi);
    if (overlap > 0) remote += (s_hi - s_lo) - overlap;
  }
  (void)w;
  return remote;
}

}  // namespace detpf
