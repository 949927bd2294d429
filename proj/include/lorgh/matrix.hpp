#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lorgh {

// Dense row-major n x n matrix.
template <typename T>
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, T fill = T{}) : n_(n), data_(n * n, fill) {}

  std::size_t size() const { return n_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<T> row(std::size_t i) { return {data_.data() + i * n_, n_}; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }
  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

  bool operator==(const SquareMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

// Square boolean matrix packed into 64-bit words, one padded run of words per row.
class BitMatrix {
 public:
  using Word = std::uint64_t;

  BitMatrix() = default;
  explicit BitMatrix(std::size_t n) : n_(n), wpr_((n + 63) / 64), bits_(n * wpr_, 0) {}

  static BitMatrix identity(std::size_t n) {
    BitMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i);
    return m;
  }

  std::size_t size() const { return n_; }
  std::size_t words_per_row() const { return wpr_; }

  bool test(std::size_t i, std::size_t j) const {
    return (bits_[i * wpr_ + (j >> 6)] >> (j & 63)) & 1U;
  }
  void set(std::size_t i, std::size_t j, bool v = true) {
    Word& w = bits_[i * wpr_ + (j >> 6)];
    const Word mask = Word{1} << (j & 63);
    w = v ? (w | mask) : (w & ~mask);
  }

  std::span<Word> row(std::size_t i) { return {bits_.data() + i * wpr_, wpr_}; }
  std::span<const Word> row(std::size_t i) const { return {bits_.data() + i * wpr_, wpr_}; }

  std::size_t count_row(std::size_t i) const {
    std::size_t c = 0;
    for (Word w : row(i)) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (Word w : bits_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  // row(i) |= row(k)
  void or_row(std::size_t i, std::size_t k) {
    Word* a = bits_.data() + i * wpr_;
    const Word* b = bits_.data() + k * wpr_;
    for (std::size_t w = 0; w < wpr_; ++w) a[w] |= b[w];
  }

  template <typename F>
  void for_each_in_row(std::size_t i, F&& f) const {
    const Word* r = bits_.data() + i * wpr_;
    for (std::size_t w = 0; w < wpr_; ++w) {
      Word x = r[w];
      while (x) {
        const int b = std::countr_zero(x);
        f(w * 64 + static_cast<std::size_t>(b));
        x &= x - 1;
      }
    }
  }

  std::vector<std::size_t> row_indices(std::size_t i) const {
    std::vector<std::size_t> out;
    for_each_in_row(i, [&](std::size_t j) { out.push_back(j); });
    return out;
  }

  BitMatrix transposed() const {
    BitMatrix t(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for_each_in_row(i, [&](std::size_t j) { t.set(j, i); });
    return t;
  }

  bool operator==(const BitMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::size_t wpr_ = 0;
  std::vector<Word> bits_;
};

inline std::size_t and_count(std::span<const BitMatrix::Word> a, std::span<const BitMatrix::Word> b) {
  std::size_t c = 0;
  for (std::size_t w = 0; w < a.size(); ++w) c += static_cast<std::size_t>(std::popcount(a[w] & b[w]));
  return c;
}

inline bool and_any(std::span<const BitMatrix::Word> a, std::span<const BitMatrix::Word> b) {
  for (std::size_t w = 0; w < a.size(); ++w)
    if (a[w] & b[w]) return true;
  return false;
}

// Warshall closure on bit rows: afterwards m(i,j) holds iff j is reachable from i.
inline void transitive_closure_inplace(BitMatrix& m) {
  const std::size_t n = m.size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (m.test(i, k)) m.or_row(i, k);
}

}  // namespace lorgh
