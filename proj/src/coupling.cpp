#include "liftline/coupling.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace liftline {

namespace {
Pmf from_cdf(const std::vector<double>& cdf) {
  std::vector<double> p(cdf.size());
  double prev = 0.0;
  for (size_t k = 0; k < cdf.size(); ++k) {
    p[k] = std::max(0.0, cdf[k] - prev);
    prev = cdf[k];
  }
  return Pmf(std::move(p), 1e-6);
}

void check_cap(int eta, int gamma) {
  if (gamma < 1 || eta < 1 || eta > gamma)
    throw std::invalid_argument("coupling: cap must satisfy 1 <= eta <= gamma");
}
}  // namespace

Pmf capacity_dist(const Pmf& stay, int eta, int gamma) {
  check_cap(eta, gamma);
  if (stay.support_max() > gamma)
    throw std::invalid_argument("coupling: stay support exceeds gamma");
  std::vector<double> cdf(static_cast<size_t>(eta) + 1);
  for (int k = 0; k <= eta; ++k) {
    cdf[static_cast<size_t>(k)] =
        (k >= eta) ? 1.0 : 1.0 - stay.cdf(gamma - k - 1);
  }
  return from_cdf(cdf);
}

Pmf board_dist(const Pmf& z, const Pmf& capacity) {
  int kmax = std::min(z.support_max(), capacity.support_max());
  std::vector<double> cdf(static_cast<size_t>(kmax) + 1);
  for (int k = 0; k <= kmax; ++k) {
    cdf[static_cast<size_t>(k)] =
        1.0 - (1.0 - capacity.cdf(k)) * (1.0 - z.cdf(k));
  }
  cdf[static_cast<size_t>(kmax)] = 1.0;
  return from_cdf(cdf);
}

Pmf ride_dist_stable(const Pmf& z, const Pmf& stay, int eta, int gamma) {
  check_cap(eta, gamma);
  std::vector<double> cdf(static_cast<size_t>(gamma) + 1);
  for (int k = 0; k <= gamma; ++k) {
    double v;
    if (k == gamma) {
      v = 1.0;
    } else if (k >= eta) {
      v = stay.cdf(k - eta);
      for (int j = k - eta + 1; j <= k; ++j) v += z.cdf(k - j) * stay.at(j);
    } else {
      v = 0.0;
      for (int j = 0; j <= k; ++j) v += z.cdf(k - j) * stay.at(j);
    }
    cdf[static_cast<size_t>(k)] = std::min(v, 1.0);
  }
  return from_cdf(cdf);
}

Pmf ride_dist_unstable(const Pmf& stay, int eta, int gamma) {
  check_cap(eta, gamma);
  std::vector<double> cdf(static_cast<size_t>(gamma) + 1);
  for (int k = 0; k <= gamma; ++k) {
    if (k == gamma)
      cdf[static_cast<size_t>(k)] = 1.0;
    else if (k >= eta)
      cdf[static_cast<size_t>(k)] = stay.cdf(k - eta);
    else
      cdf[static_cast<size_t>(k)] = 0.0;
  }
  return from_cdf(cdf);
}

Pmf ride_dist(const Pmf& z, const Pmf& stay, int eta, int gamma, bool stable) {
  return stable ? ride_dist_stable(z, stay, eta, gamma)
                : ride_dist_unstable(stay, eta, gamma);
}

}  // namespace liftline
