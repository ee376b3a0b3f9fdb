#include "detpf/resampling.hpp"

#include <cmath>

#include "detpf/primitives.hpp"

namespace detpf {

namespace {

void validate_weights(const DistVector<double>& w, double epsilon) {
  const std::size_t n = w.size();
  if (n == 0) throw std::invalid_argument("weights must be non-empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(w[i] >= 0.0) || !std::isfinite(w[i]))
      throw std::invalid_argument("weights must be finite and non-negative");
    sum += w[i];
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("weights must be normalized to sum 1");
  if (!(epsilon >= 0.0) || epsilon >= 1.0 / static_cast<double>(n))
    throw std::invalid_argument("epsilon must lie in [0, 1/N)");
}

void validate_counts(const CopyCounts& m) {
  long long sum = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] < 0) throw std::invalid_argument("copy counts must be non-negative");
    sum += m[i];
  }
  if (sum != static_cast<long long>(m.size()))
    throw std::invalid_argument("copy counts must sum to N");
}

DistVector<CountedParticle> build_records(Pass& pass, const CopyCounts& m,
                                          const DistVector<Particle>& x) {
  const std::size_t n = m.size();
  auto cum = seg_scan(pass, m, n);
  DistVector<CountedParticle> recs(n);
  pass.map_with_offset(recs, 2, -1, [&](std::size_t i) {
    CountedParticle r;
    r.key = m[i];
    r.payload.state = x[i].state;
    r.payload.key = static_cast<int>(x[i].key);
    r.payload.base = static_cast<int>(i ? cum[i - 1] : 0);
    r.payload.offset = 0;
    return r;
  });
  return recs;
}

long long rec_key(const CountedParticle& r) { return r.key; }

DistVector<CountedParticle> make_atz_records(Pass& pass, const CopyCounts& m,
                                             const DistVector<Particle>& x, AtzMode mode) {
  validate_counts(m);
  if (x.size() != m.size()) throw std::invalid_argument("counts and payloads differ in length");
  const std::size_t n = m.size();
  if (!is_pow2(n)) throw std::invalid_argument("length must be a power of two");
  auto recs = build_records(pass, m, x);
  if (mode == AtzMode::Sort) {
    bitonic_sort_segments(pass, recs, n, rec_key, SortDir::Descending);
    return recs;
  }
  // Scan-compaction: stable scatter of nonzero-count records by prefix rank,
  // zeros filling the tail in input order.
  auto rank = seg_scan_proj(pass, recs, n, [](const CountedParticle& r) {
    return static_cast<long long>(r.key > 0);
  });
  const long long nonzeros = rank[n - 1];
  DistVector<CountedParticle> out(n);
  pass.scatter_step(out, n, 2, [&](std::size_t i, auto&& emit) {
    const long long nz_rank = rank[i];
    const std::size_t dst =
        recs[i].key > 0
            ? static_cast<std::size_t>(nz_rank - 1)
            : static_cast<std::size_t>(nonzeros + (static_cast<long long>(i) + 1 - nz_rank) - 1);
    emit(dst, recs[i]);
  });
  return out;
}

// One divide level applied to every segment of length L at once: each
// segment (counts summing to L, all trailing zeros) becomes two adjacent
// segments of length L/2 with the same properties. The pivot is the first
// position whose running count sum reaches L/2; its count splits into a
// left part (completing the left half) and a right part (heading the right
// half), and when the right part is zero the right half starts one position
// later instead.
void split_level(Pass& pass, DistVector<CountedParticle>& recs, std::size_t L,
                 DistVector<CountedParticle>& right_parts, DistVector<CountedParticle>& scratch) {
  const std::size_t n = recs.size();
  const std::size_t lmask = L - 1;
  const long long half = static_cast<long long>(L / 2);

  auto c = seg_scan_proj(pass, recs, L, rec_key);

  // Per-segment pivot: first index with c >= L/2, plus one when c hits L/2
  // exactly (the zero right-part case); both folded into one reduced value.
  auto pivot = seg_tree_reduce(
      pass, c, L,
      [&](const long long& ci, std::size_t i) {
        return FirstHit{static_cast<unsigned char>(ci >= half),
                        static_cast<long long>(i & lmask) + (ci == half ? 1 : 0)};
      },
      first_hit_comb);

  // Right-part records: pivot keeps the spill (c_p - L/2) and bumps the copy
  // offset by the left-part size; positions right of the pivot pass through.
  pass.map_with_offset(right_parts, 2, -1, [&](std::size_t i) {
    const long long ci = c[i];
    const long long cm1 = (i & lmask) ? c[i - 1] : 0;
    CountedParticle r = recs[i];
    if (cm1 >= half) return r;
    if (ci >= half) {
      r.key = ci - half;
      r.payload.offset += static_cast<int>(half - cm1);
      return r;
    }
    r.key = 0;
    return r;
  });

  // Left halves trim the pivot to the left-part size and zero what follows;
  // right halves gather the shifted right parts.
  pass.seg_dynamic_gather_step(scratch, L, 3, [&](std::size_t i) {
    const std::size_t local = i & lmask;
    if (local < static_cast<std::size_t>(half)) {
      const long long ci = c[i];
      const long long cm1 = local ? c[i - 1] : 0;
      CountedParticle r = recs[i];
      if (ci < half) return r;
      if (cm1 < half) {
        r.key = half - cm1;
        return r;
      }
      r.key = 0;
      return r;
    }
    const std::size_t seg = i / L;
    const std::size_t src = seg * L + static_cast<std::size_t>(pivot[seg].value) +
                            (local - static_cast<std::size_t>(half));
    return right_parts[src];
  });
  std::swap(recs, scratch);
}

// Re-sort the right halves produced by a split (the odd segments of length
// h) in descending order. They are extracted into a compact vector so the
// compare stages touch only the data being sorted.
void sort_right_halves(Pass& pass, DistVector<CountedParticle>& recs, std::size_t h,
                       DistVector<CountedParticle>& scratch) {
  const std::size_t n = recs.size();
  DistVector<CountedParticle> compact(n / 2);
  pass.gather_mixed_step(
      compact,
      [&](std::size_t q) {
        const std::size_t g = q / h;
        return std::pair<std::size_t, std::size_t>(n, (2 * g + 1) * h + (q % h));
      },
      [&](std::size_t q) {
        const std::size_t g = q / h;
        return recs[(2 * g + 1) * h + (q % h)];
      });
  bitonic_sort_segments(pass, compact, h, rec_key, SortDir::Descending);
  pass.gather_mixed_step(
      scratch,
      [&](std::size_t i) {
        const std::size_t seg = i / h;
        if (seg & 1) {
          const std::size_t q = (seg / 2) * h + (i % h);
          return std::pair<std::size_t, std::size_t>(n / 2, q);
        }
        return std::pair<std::size_t, std::size_t>(n, i);
      },
      [&](std::size_t i) {
        const std::size_t seg = i / h;
        if (seg & 1) return compact[(seg / 2) * h + (i % h)];
        return recs[i];
      });
  std::swap(recs, scratch);
}

DistVector<Particle> unpack_records(Pass& pass, const DistVector<CountedParticle>& recs) {
  DistVector<Particle> out(recs.size());
  pass.map(out, 1, [&](std::size_t i) {
    const auto& p = recs[i].payload;
    return Particle{p.state, static_cast<long long>(p.base) + p.offset};
  });
  return out;
}

DistVector<Particle> run_redistribute(Pass& pass, const CopyCounts& m,
                                      const DistVector<Particle>& x, bool nested_sorts,
                                      AtzMode mode) {
  const std::size_t n = m.size();
  if (n < 2 || !is_pow2(n))
    throw std::invalid_argument("redistribution needs a power-of-two length >= 2");
  auto recs = make_atz_records(pass, m, x, mode);
  DistVector<CountedParticle> right_parts(n), scratch(n);
  for (std::size_t L = n; L >= 2; L >>= 1) {
    split_level(pass, recs, L, right_parts, scratch);
    if (nested_sorts && L >= 4) sort_right_halves(pass, recs, L / 2, scratch);
  }
  return unpack_records(pass, recs);
}

}  // namespace

bool is_atz(const CopyCounts& m) {
  bool seen_zero = false;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] == 0) {
      seen_zero = true;
    } else if (seen_zero) {
      return false;
    }
  }
  return true;
}

double draw_epsilon(std::uint64_t seed, std::uint64_t step, std::size_t n) {
  const double u = static_cast<double>(stream_bits(seed, Stream::Epsilon, step, 0) >> 11) *
                   0x1.0p-53;  // [0, 1)
  return u / static_cast<double>(n);
}

CumulativeWeights cumulative_weights(Pass& pass, const DistVector<double>& w, double epsilon) {
  validate_weights(w, epsilon);
  auto c = seg_scan(pass, w, w.size());
  DistVector<double> shifted(w.size());
  pass.map(shifted, 1, [&](std::size_t i) { return c[i] + epsilon; });
  return CumulativeWeights{std::move(shifted), epsilon};
}

CopyCounts mvr_counts(Pass& pass, const DistVector<double>& w, double epsilon) {
  validate_weights(w, epsilon);
  const std::size_t n = w.size();
  auto c = seg_scan(pass, w, n);
  const double dn = static_cast<double>(n);
  CopyCounts m(n);
  pass.map_with_offset(m, 1, -1, [&](std::size_t i) -> long long {
    const double cm1 = epsilon + (i ? c[i - 1] : 0.0);
    const auto fm1 = static_cast<long long>(std::floor(dn * cm1));
    if (i == n - 1) return static_cast<long long>(n) - fm1;
    const auto fi = static_cast<long long>(std::floor(dn * (epsilon + c[i])));
    return fi - fm1;
  });
  for (std::size_t i = 0; i < n; ++i)
    if (m[i] < 0) throw std::runtime_error("mvr_counts: cumulative sum not monotone");
  return m;
}

AtzResult make_atz(Pass& pass, const CopyCounts& m, const DistVector<Particle>& x, AtzMode mode) {
  auto recs = make_atz_records(pass, m, x, mode);
  AtzResult res;
  res.m.resize(recs.size());
  res.x.resize(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    res.m[i] = recs[i].key;
    res.x[i] = Particle{recs[i].payload.state, recs[i].payload.key};
  }
  return res;
}

SplitResult split_node(Pass& pass, const CopyCounts& m, const DistVector<Particle>& x) {
  const std::size_t n = m.size();
  if (n < 2 || !is_pow2(n))
    throw std::invalid_argument("split_node needs a power-of-two length >= 2");
  validate_counts(m);
  if (!is_atz(m)) throw std::invalid_argument("split_node input must be all-trailing-zeros");
  if (x.size() != n) throw std::invalid_argument("counts and payloads differ in length");

  DistVector<CountedParticle> recs(n);
  for (std::size_t i = 0; i < n; ++i)
    recs[i] = CountedParticle{m[i], SplitPayload{x[i].state, static_cast<int>(x[i].key), 0, 0}};
  DistVector<CountedParticle> right_parts(n), scratch(n);
  split_level(pass, recs, n, right_parts, scratch);

  SplitResult out;
  const std::size_t h = n / 2;
  out.left_m.resize(h);
  out.left_x.resize(h);
  out.right_m.resize(h);
  out.right_x.resize(h);
  for (std::size_t i = 0; i < h; ++i) {
    out.left_m[i] = recs[i].key;
    out.left_x[i] = Particle{recs[i].payload.state, recs[i].payload.key};
    out.right_m[i] = recs[h + i].key;
    out.right_x[i] = Particle{recs[h + i].payload.state, recs[h + i].payload.key};
  }
  return out;
}

DistVector<Particle> redistribute_atz(Pass& pass, const CopyCounts& m,
                                      const DistVector<Particle>& x, AtzMode mode) {
  return run_redistribute(pass, m, x, false, mode);
}

DistVector<Particle> redistribute_nested(Pass& pass, const CopyCounts& m,
                                         const DistVector<Particle>& x) {
  return run_redistribute(pass, m, x, true, AtzMode::Sort);
}

DistVector<Particle> redistribute_naive(Pass& pass, const CopyCounts& m,
                                        const DistVector<Particle>& x) {
  validate_counts(m);
  if (x.size() != m.size()) throw std::invalid_argument("counts and payloads differ in length");
  const std::size_t n = m.size();
  auto c = seg_scan(pass, m, n);
  DistVector<Particle> out(n);
  pass.scatter_step(out, n, 3, [&](std::size_t i, auto&& emit) {
    const long long base = i ? c[i - 1] : 0;
    const long long count = c[i] - base;
    for (long long r = 0; r < count; ++r)
      emit(static_cast<std::size_t>(base + r), Particle{x[i].state, base + r});
  });
  return out;
}

std::pair<CopyCounts, DistVector<Particle>> sequential_oracle(const DistVector<double>& w,
                                                              double epsilon,
                                                              const DistVector<Particle>& x) {
  validate_weights(w, epsilon);
  const std::size_t n = w.size();
  if (x.size() != n) throw std::invalid_argument("weights and payloads differ in length");
  const double dn = static_cast<double>(n);
  CopyCounts m(n);
  auto prev = static_cast<long long>(std::floor(dn * epsilon));
  double cum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 == n) {
      m[i] = static_cast<long long>(n) - prev;
    } else {
      cum += w[i];
      const auto fi = static_cast<long long>(std::floor(dn * (epsilon + cum)));
      m[i] = fi - prev;
      prev = fi;
    }
  }
  return {m, sequential_redistribute(m, x)};
}

DistVector<Particle> sequential_redistribute(const CopyCounts& m, const DistVector<Particle>& x) {
  validate_counts(m);
  DistVector<Particle> out(m.size());
  std::size_t slot = 0;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (long long r = 0; r < m[i]; ++r, ++slot)
      out[slot] = Particle{x[i].state, static_cast<long long>(slot)};
  return out;
}

}  // namespace detpf
