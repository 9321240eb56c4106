#pragma once

// Compensated complex summation with a fixed chunking and in-order reduction,
// so totals are bit-identical for any worker count.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "mobdisj/parallel.hpp"

namespace mobdisj {

/// Neumaier (improved Kahan-Babuska) summation, separately per component.
class SumAccumulator {
 public:
  void add(std::complex<double> z) {
    add_real(re_, re_c_, z.real());
    add_real(im_, im_c_, z.imag());
    ++count_;
  }
  void add(double x) { add(std::complex<double>(x, 0.0)); }

  std::complex<double> value() const { return {re_ + re_c_, im_ + im_c_}; }
  std::size_t count() const noexcept { return count_; }

 private:
  static void add_real(double& sum, double& comp, double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }

  double re_ = 0.0, im_ = 0.0;
  double re_c_ = 0.0, im_c_ = 0.0;
  std::size_t count_ = 0;
};

inline constexpr std::size_t kSumChunk = std::size_t{1} << 16;

/// Sum of term(i) for i in [0, count). Chunks of kSumChunk terms are summed
/// independently (possibly in parallel) and then combined in ascending order.
template <class Term>
std::complex<double> chunked_sum(std::size_t count, Term&& term, unsigned threads = 1) {
  const std::size_t chunks = (count + kSumChunk - 1) / kSumChunk;
  std::vector<std::complex<double>> partial(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    SumAccumulator acc;
    const std::size_t lo = c * kSumChunk;
    const std::size_t hi = std::min(count, lo + kSumChunk);
    for (std::size_t i = lo; i < hi; ++i) acc.add(term(i));
    partial[c] = acc.value();
  });
  SumAccumulator total;
  for (const auto& z : partial) total.add(z);
  return total.value();
}

}  // namespace mobdisj
