#pragma once

// Fixed-length vector partitioned into contiguous per-worker blocks.
// The universal operand of the data-parallel primitives. The partition
// itself lives with the executing pass (it is a function of length and
// worker count), not with the data.

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace detpf {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline unsigned log2_exact(std::size_t n) {
  if (!is_pow2(n)) throw std::invalid_argument("length must be a power of two");
  unsigned k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

template <typename T>
class DistVector {
 public:
  DistVector() = default;
  explicit DistVector(std::size_t n) : data_(n) {}
  DistVector(std::size_t n, const T& fill) : data_(n, fill) {}
  DistVector(std::initializer_list<T> init) : data_(init) {}
  explicit DistVector(std::vector<T> v) : data_(std::move(v)) {}

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  const std::vector<T>& vec() const { return data_; }
  std::vector<T>& vec() { return data_; }

  void resize(std::size_t n) { data_.resize(n); }

  friend bool operator==(const DistVector& a, const DistVector& b) {
    return a.data_ == b.data_;
  }

 private:
  std::vector<T> data_;
};

}  // namespace detpf
