#include "liftline/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace liftline {

namespace {
constexpr double kDust = 1e-15;

void clean(std::vector<double>& p) {
  for (double& x : p) {
    if (x < kDust) x = 0.0;
  }
  while (p.size() > 1 && p.back() == 0.0) p.pop_back();
  double sum = std::accumulate(p.begin(), p.end(), 0.0);
  if (sum <= 0.0) throw std::invalid_argument("pmf: total mass is zero");
  for (double& x : p) x /= sum;
}
}  // namespace

Pmf::Pmf(std::vector<double> probs, double sum_tol) {
  if (probs.empty()) throw std::invalid_argument("pmf: empty support");
  for (double x : probs) {
    if (!(x >= -kDust) || !std::isfinite(x))
      throw std::invalid_argument("pmf: negative or non-finite entry");
  }
  for (double& x : probs) x = std::max(x, 0.0);
  double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (std::abs(sum - 1.0) > sum_tol)
    throw std::invalid_argument("pmf: mass does not sum to 1");
  clean(probs);
  p_ = std::move(probs);
}

Pmf::Pmf(std::vector<double> probs, raw_tag) {
  clean(probs);
  p_ = std::move(probs);
}

Pmf Pmf::delta(int k) {
  if (k < 0) throw std::invalid_argument("pmf: negative atom");
  std::vector<double> p(static_cast<size_t>(k) + 1, 0.0);
  p[static_cast<size_t>(k)] = 1.0;
  return Pmf(std::move(p), raw_tag{});
}

Pmf Pmf::poisson(double mean, double tail_tol) {
  if (mean < 0) throw std::invalid_argument("pmf: negative poisson mean");
  if (mean == 0.0) return delta(0);
  std::vector<double> p;
  double term = std::exp(-mean);
  double acc = term;
  p.push_back(term);
  for (int k = 1; acc < 1.0 - tail_tol || term > tail_tol; ++k) {
    term *= mean / k;
    acc += term;
    p.push_back(term);
    if (k > 10000) break;
  }
  return Pmf(std::move(p), raw_tag{});
}

Pmf Pmf::binomial(int n, double prob) {
  if (n < 0 || prob < 0.0 || prob > 1.0)
    throw std::invalid_argument("pmf: bad binomial parameters");
  std::vector<double> p(static_cast<size_t>(n) + 1, 0.0);
  // log-space recurrence keeps extreme tails finite
  double term = std::pow(1.0 - prob, n);
  if (prob == 1.0) {
    p[static_cast<size_t>(n)] = 1.0;
    return Pmf(std::move(p), raw_tag{});
  }
  for (int k = 0; k <= n; ++k) {
    p[static_cast<size_t>(k)] = term;
    if (k < n) term *= (static_cast<double>(n - k) / (k + 1)) * (prob / (1.0 - prob));
  }
  return Pmf(std::move(p), raw_tag{});
}

double Pmf::cdf(int k) const {
  if (k < 0) return 0.0;
  if (k >= support_max()) return 1.0;
  double acc = 0.0;
  for (int j = 0; j <= k; ++j) acc += p_[static_cast<size_t>(j)];
  return std::min(acc, 1.0);
}

double Pmf::mean() const {
  double m = 0.0;
  for (size_t k = 0; k < p_.size(); ++k) m += static_cast<double>(k) * p_[k];
  return m;
}

double Pmf::variance() const {
  double m = mean();
  double m2 = 0.0;
  for (size_t k = 0; k < p_.size(); ++k)
    m2 += static_cast<double>(k) * static_cast<double>(k) * p_[k];
  return std::max(0.0, m2 - m * m);
}

std::complex<double> Pmf::pgf(std::complex<double> z) const {
  std::complex<double> acc = 0.0;
  for (size_t k = p_.size(); k-- > 0;) acc = acc * z + p_[k];
  return acc;
}

Pmf Pmf::thin(double keep) const {
  if (keep < 0.0 || keep > 1.0)
    throw std::invalid_argument("pmf: keep probability outside [0,1]");
  if (keep == 1.0) return *this;
  if (keep == 0.0) return delta(0);
  std::vector<double> out(p_.size(), 0.0);
  for (int j = 0; j <= support_max(); ++j) {
    double pj = p_[static_cast<size_t>(j)];
    if (pj == 0.0) continue;
    // Binomial(j, keep) row via recurrence
    double term = std::pow(1.0 - keep, j);
    for (int k = 0; k <= j; ++k) {
      out[static_cast<size_t>(k)] += pj * term;
      if (k < j) term *= (static_cast<double>(j - k) / (k + 1)) * (keep / (1.0 - keep));
    }
  }
  return Pmf(std::move(out), raw_tag{});
}

double Pmf::tv_distance(const Pmf& other) const {
  int kmax = std::max(support_max(), other.support_max());
  double acc = 0.0;
  for (int k = 0; k <= kmax; ++k) acc += std::abs(at(k) - other.at(k));
  return 0.5 * acc;
}

Pmf convolve(const Pmf& a, const Pmf& b) {
  std::vector<double> out(
      static_cast<size_t>(a.support_max() + b.support_max()) + 1, 0.0);
  for (int i = 0; i <= a.support_max(); ++i) {
    double ai = a.at(i);
    if (ai == 0.0) continue;
    for (int j = 0; j <= b.support_max(); ++j)
      out[static_cast<size_t>(i + j)] += ai * b.at(j);
  }
  return Pmf(std::move(out), Pmf::raw_tag{});
}

}  // namespace liftline
