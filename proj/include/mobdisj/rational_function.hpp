#pragma once

#include <algorithm>
#include <vector>

#include "mobdisj/error.hpp"

namespace mobdisj {

/// Polynomial with coefficients low-to-high degree; the zero polynomial is empty.
template <class T>
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }

  /// -1 for the zero polynomial.
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const noexcept { return c_.empty(); }
  const std::vector<T>& coefficients() const noexcept { return c_; }

  /// Horner evaluation.
  T operator()(const T& x) const {
    if (c_.empty()) return x - x;
    T acc = c_.back();
    for (auto it = c_.rbegin() + 1; it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }
  std::vector<T> c_;
};

/// h(X)/g(X) with g not identically zero.
template <class T>
class RationalFunction {
 public:
  RationalFunction(Polynomial<T> numerator, Polynomial<T> denominator)
      : h_(std::move(numerator)), g_(std::move(denominator)) {
    if (g_.is_zero()) fail(ErrorCode::InvalidArgument, "denominator is the zero polynomial");
  }

  const Polynomial<T>& numerator() const noexcept { return h_; }
  const Polynomial<T>& denominator() const noexcept { return g_; }

  /// max(deg g, deg h); the zero polynomial has degree -1.
  int max_degree() const noexcept { return std::max(h_.degree(), g_.degree()); }

  /// True when h/g is a constant function, i.e. h * lead(g) = g * lead(h).
  bool is_constant() const {
    if (h_.is_zero()) return true;
    if (h_.degree() != g_.degree()) return false;
    const T lg = g_.coefficients().back(), lh = h_.coefficients().back();
    for (std::size_t i = 0; i < h_.coefficients().size(); ++i) {
      if (!(h_.coefficients()[i] * lg == g_.coefficients()[i] * lh)) return false;
    }
    return true;
  }

 private:
  Polynomial<T> h_;
  Polynomial<T> g_;
};

}  // namespace mobdisj
