#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <utility>

#include "nearflow/errors.hpp"
#include "nearflow/rational.hpp"

namespace nearflow {

/// Dense square matrix of exact rationals, row-major. Dimensions up to 4 are
/// stored inline so the hot law sweeps never touch the allocator.
class RMatrix {
 public:
  static constexpr std::size_t kInlineCap = 16;

  RMatrix() : n_(0) {}
  explicit RMatrix(std::size_t n) : n_(n) {
    if (n * n > kInlineCap) heap_.reset(new Rational[n * n]);
  }

  RMatrix(const RMatrix& o) : n_(o.n_) {
    const std::size_t len = n_ * n_;
    if (len > kInlineCap) heap_.reset(new Rational[len]);
    Rational* dst = data();
    const Rational* src = o.data();
    for (std::size_t i = 0; i < len; ++i) dst[i] = src[i];
  }
  RMatrix(RMatrix&& o) noexcept : n_(o.n_), heap_(std::move(o.heap_)) {
    if (!heap_) {
      const std::size_t len = n_ * n_;
      for (std::size_t i = 0; i < len; ++i) buf_[i] = std::move(o.buf_[i]);
    }
    o.n_ = 0;
  }
  RMatrix& operator=(const RMatrix& o) {
    if (this != &o) *this = RMatrix(o);
    return *this;
  }
  RMatrix& operator=(RMatrix&& o) noexcept {
    if (this != &o) {
      n_ = o.n_;
      heap_ = std::move(o.heap_);
      if (!heap_) {
        const std::size_t len = n_ * n_;
        for (std::size_t i = 0; i < len; ++i) buf_[i] = std::move(o.buf_[i]);
      }
      o.n_ = 0;
    }
    return *this;
  }

  static RMatrix identity(std::size_t n) {
    RMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Rational(1);
    return m;
  }
  static RMatrix zero(std::size_t n) { return RMatrix(n); }
  static RMatrix scalar(std::size_t n, const Rational& c) {
    RMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = c;
    return m;
  }

  std::size_t dim() const { return n_; }

  Rational* data() { return heap_ ? heap_.get() : buf_.data(); }
  const Rational* data() const { return heap_ ? heap_.get() : buf_.data(); }

  Rational& operator()(std::size_t i, std::size_t j) { return data()[i * n_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data()[i * n_ + j]; }

  friend RMatrix operator+(const RMatrix& a, const RMatrix& b) {
    check(a, b);
    RMatrix r(a.n_);
    for (std::size_t i = 0; i < a.n_ * a.n_; ++i) r.data()[i] = a.data()[i] + b.data()[i];
    return r;
  }
  friend RMatrix operator-(const RMatrix& a, const RMatrix& b) {
    check(a, b);
    RMatrix r(a.n_);
    for (std::size_t i = 0; i < a.n_ * a.n_; ++i) r.data()[i] = a.data()[i] - b.data()[i];
    return r;
  }
  friend RMatrix operator-(const RMatrix& a) {
    RMatrix r(a.n_);
    for (std::size_t i = 0; i < a.n_ * a.n_; ++i) r.data()[i] = -a.data()[i];
    return r;
  }
  friend RMatrix operator*(const Rational& c, const RMatrix& a) {
    RMatrix r(a.n_);
    for (std::size_t i = 0; i < a.n_ * a.n_; ++i) r.data()[i] = c * a.data()[i];
    return r;
  }
  friend RMatrix operator*(const RMatrix& a, const RMatrix& b) {
    check(a, b);
    const std::size_t n = a.n_;
    RMatrix r(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const Rational& aik = a(i, k);
        if (aik.is_zero()) continue;
        for (std::size_t j = 0; j < n; ++j) {
          const Rational& bkj = b(k, j);
          if (bkj.is_zero()) continue;
          r(i, j) += aik * bkj;
        }
      }
    return r;
  }

  friend bool operator==(const RMatrix& a, const RMatrix& b) {
    if (a.n_ != b.n_) return false;
    for (std::size_t i = 0; i < a.n_ * a.n_; ++i)
      if (a.data()[i] != b.data()[i]) return false;
    return true;
  }
  friend bool operator!=(const RMatrix& a, const RMatrix& b) { return !(a == b); }

  bool is_zero() const {
    for (std::size_t i = 0; i < n_ * n_; ++i)
      if (!data()[i].is_zero()) return false;
    return true;
  }

  /// Exact Gauss-Jordan inverse. Singularity means a column with no nonzero
  /// pivot, detected exactly; there is no tolerance anywhere.
  std::optional<RMatrix> try_inverse() const {
    const std::size_t n = n_;
    RMatrix a = *this;
    RMatrix inv = identity(n);
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t piv = col;
      while (piv < n && a(piv, col).is_zero()) ++piv;
      if (piv == n) return std::nullopt;
      if (piv != col) {
        for (std::size_t j = 0; j < n; ++j) {
          std::swap(a(piv, j), a(col, j));
          std::swap(inv(piv, j), inv(col, j));
        }
      }
      const Rational d = a(col, col).inverse();
      for (std::size_t j = 0; j < n; ++j) {
        a(col, j) *= d;
        inv(col, j) *= d;
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (i == col || a(i, col).is_zero()) continue;
        const Rational f = a(i, col);
        for (std::size_t j = 0; j < n; ++j) {
          a(i, j) -= f * a(col, j);
          inv(i, j) -= f * inv(col, j);
        }
      }
    }
    return inv;
  }

 private:
  static void check(const RMatrix& a, const RMatrix& b) {
    if (a.n_ != b.n_) throw DimensionMismatch("matrix dimensions differ");
  }

  std::size_t n_;
  std::array<Rational, kInlineCap> buf_;
  std::unique_ptr<Rational[]> heap_;
};

}  // namespace nearflow
