#pragma once

// Independent reference implementations used as test oracles. These stay
// deliberately naive (straight loops, literal counting) and never call the
// library's data-parallel code paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace reference {

template <class T>
std::vector<T> inclusive_scan(const std::vector<T>& v) {
  std::vector<T> out(v.size());
  T run{};
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = (run = run + v[i]);
  return out;
}

template <class T>
std::vector<T> seg_inclusive_scan(const std::vector<T>& v, std::size_t seg_len) {
  std::vector<T> out(v.size());
  for (std::size_t s = 0; s * seg_len < v.size(); ++s) {
    T run{};
    for (std::size_t i = s * seg_len; i < (s + 1) * seg_len; ++i) out[i] = (run = run + v[i]);
  }
  return out;
}

template <class T>
std::vector<T> rotate(const std::vector<T>& v, long long delta) {
  const auto n = static_cast<long long>(v.size());
  std::vector<T> out(v.size());
  for (long long i = 0; i < n; ++i) out[((i + delta) % n + n) % n] = v[i];
  return out;
}

// Straightforward simulation of the canonical ascending Batcher network; the
// descending direction reverses the ascending result (ties come out in
// reversed input order, which is the library's documented canonical order).
template <class T, class KeyFn>
std::vector<T> bitonic_sort_simulated(std::vector<T> v, KeyFn key, bool ascending) {
  const std::size_t n = v.size();
  for (std::size_t k = 2; k <= n; k <<= 1) {
    for (std::size_t j = k >> 1; j > 0; j >>= 1) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t l = i ^ j;
        if (l <= i) continue;
        const bool up = (i & k) == 0;
        if (up ? key(v[i]) > key(v[l]) : key(v[i]) < key(v[l])) std::swap(v[i], v[l]);
      }
    }
  }
  if (!ascending) std::reverse(v.begin(), v.end());
  return v;
}

// Literal grid-point counting: the number of integers k with
// N*C_{i-1} < k <= N*C_i, where C_i = eps + w_1 + ... + w_i and the final
// interval absorbs every remaining grid point (so the counts sum to N).
inline std::vector<long long> grid_point_counts(const std::vector<double>& w, double eps) {
  const std::size_t n = w.size();
  const double dn = static_cast<double>(n);
  std::vector<double> c(n);
  double run = 0.0;
  for (std::size_t i = 0; i < n; ++i) c[i] = (run += w[i]) + eps;
  std::vector<long long> m(n, 0);
  std::size_t i = 0;
  for (long long k = 1; k <= static_cast<long long>(n); ++k) {
    if (i + 1 < n) {
      while (i + 1 < n && !(static_cast<double>(k) <= dn * c[i])) ++i;
    }
    ++m[i];
  }
  return m;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double mu = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace reference
