#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace liftline {

/// Finite-support probability mass function on {0, 1, ..., K}.
/// Immutable after construction; entries below 1e-15 are clamped to zero
/// and the mass renormalized.
class Pmf {
 public:
  /// Builds from raw probabilities indexed by value. Throws if any entry is
  /// negative or the total mass is not within `sum_tol` of 1.
  explicit Pmf(std::vector<double> probs, double sum_tol = 1e-6);

  static Pmf delta(int k);
  static Pmf poisson(double mean, double tail_tol = 1e-15);
  static Pmf binomial(int n, double p);

  /// Largest value with positive probability.
  int support_max() const { return static_cast<int>(p_.size()) - 1; }

  /// P[X = k]; zero outside the support.
  double at(int k) const {
    return (k >= 0 && k < static_cast<int>(p_.size())) ? p_[k] : 0.0;
  }

  /// P[X <= k]; exact 1 for k >= support_max.
  double cdf(int k) const;

  double mean() const;
  double variance() const;

  /// Generating function sum_k p(k) z^k, Horner evaluation.
  std::complex<double> pgf(std::complex<double> z) const;

  /// Binomial thinning: each unit survives independently with probability
  /// `keep`. Output support never exceeds the input support.
  Pmf thin(double keep) const;

  const std::vector<double>& probs() const { return p_; }

  double tv_distance(const Pmf& other) const;

  friend Pmf convolve(const Pmf& a, const Pmf& b);

 private:
  struct raw_tag {};
  Pmf(std::vector<double> probs, raw_tag);

  std::vector<double> p_;
};

Pmf convolve(const Pmf& a, const Pmf& b);

}  // namespace liftline
