#pragma once

// Minimum variance (systematic) resampling counts and the three
// redistribution strategies: the divide-and-conquer variant that re-sorts
// each level's right half (O((log N)^3) supersteps), the improved variant
// that keeps every node an all-trailing-zeros sequence and needs no sort
// after the initial one (O((log N)^2) supersteps), and the naive baseline
// whose per-worker write load is data-dependent. A single-pass sequential
// resampler defines exactness: every variant must reproduce its output
// multiset, and the canonical output keys are the slots the copies would
// occupy in the sequential output.

#include <cstdint>
#include <utility>

#include "detpf/dist_vector.hpp"
#include "detpf/engine.hpp"
#include "detpf/sortnet.hpp"

namespace detpf {

struct Particle {
  double state = 0.0;
  long long key = 0;

  friend bool operator==(const Particle& a, const Particle& b) {
    return a.state == b.state && a.key == b.key;
  }
};

using CopyCounts = DistVector<long long>;

struct CumulativeWeights {
  DistVector<double> c;  // c[i] = epsilon + sum of w[0..i]
  double epsilon = 0.0;
};

// Payload carried through redistribution: the ancestor's state and key plus
// the bookkeeping that pins each copy's canonical output slot (base = slot
// of the ancestor's first copy, offset = copy rank, bumped when a pivot's
// copies split between two halves).
struct SplitPayload {
  double state = 0.0;
  int key = 0;
  int base = 0;
  int offset = 0;
};
using CountedParticle = KeyedPair<SplitPayload>;

enum class AtzMode { Sort, Compact };

bool is_atz(const CopyCounts& m);

double draw_epsilon(std::uint64_t seed, std::uint64_t step, std::size_t n);

CumulativeWeights cumulative_weights(Pass& pass, const DistVector<double>& w, double epsilon);

CopyCounts mvr_counts(Pass& pass, const DistVector<double>& w, double epsilon);

struct AtzResult {
  CopyCounts m;
  DistVector<Particle> x;
};
AtzResult make_atz(Pass& pass, const CopyCounts& m, const DistVector<Particle>& x,
                   AtzMode mode = AtzMode::Sort);

struct SplitResult {
  CopyCounts left_m;
  DistVector<Particle> left_x;
  CopyCounts right_m;
  DistVector<Particle> right_x;
};
SplitResult split_node(Pass& pass, const CopyCounts& m, const DistVector<Particle>& x);

DistVector<Particle> redistribute_atz(Pass& pass, const CopyCounts& m,
                                      const DistVector<Particle>& x,
                                      AtzMode mode = AtzMode::Sort);

DistVector<Particle> redistribute_nested(Pass& pass, const CopyCounts& m,
                                         const DistVector<Particle>& x);

DistVector<Particle> redistribute_naive(Pass& pass, const CopyCounts& m,
                                        const DistVector<Particle>& x);

std::pair<CopyCounts, DistVector<Particle>> sequential_oracle(const DistVector<double>& w,
                                                              double epsilon,
                                                              const DistVector<Particle>& x);

// Sequential redistribution given counts (index order, keys = output slots).
DistVector<Particle> sequential_redistribute(const CopyCounts& m, const DistVector<Particle>& x);

}  // namespace detpf
