#include "liftline/batchq.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace liftline {

namespace {

using cd = std::complex<double>;

cd pgf_at_inverse(const Pmf& capacity, cd z) {
  // C*(1/z) without forming 1/z powers explicitly beyond Horner
  return capacity.pgf(1.0 / z);
}

// 1 - A*(z) C*(1/z) and its derivative, A*(z) = exp((z-1) load).
cd eq_residual(double load, const Pmf& capacity, cd z) {
  return 1.0 - std::exp((z - 1.0) * load) * pgf_at_inverse(capacity, z);
}

std::vector<cd> companion_seeds(double load, const Pmf& capacity, int degree) {
  // Polynomial form of z^eta - exp((z-1) load) sum_j c(j) z^(eta-j),
  // exponential truncated to Taylor degree `degree`.
  int eta = capacity.support_max();
  std::vector<double> expo(static_cast<size_t>(degree) + 1);
  double term = std::exp(-load);
  for (int k = 0; k <= degree; ++k) {
    expo[static_cast<size_t>(k)] = term;
    term *= load / (k + 1);
  }
  std::vector<double> poly(static_cast<size_t>(degree + eta) + 1, 0.0);
  const auto& c = capacity.probs();
  for (int k = 0; k <= degree; ++k)
    for (int j = 0; j <= eta; ++j)
      poly[static_cast<size_t>(k + eta - j)] -= expo[static_cast<size_t>(k)] * c[static_cast<size_t>(j)];
  poly[static_cast<size_t>(eta)] += 1.0;
  double max_abs = 0.0;
  for (double v : poly) max_abs = std::max(max_abs, std::abs(v));
  while (poly.size() > 1 && std::abs(poly.back()) < 1e-13 * max_abs)
    poly.pop_back();
  int n = static_cast<int>(poly.size()) - 1;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -poly[static_cast<size_t>(i)] / poly[static_cast<size_t>(n)];
  Eigen::VectorXcd eig = comp.eigenvalues();
  std::vector<cd> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(eig(i));
  return out;
}

// Entire-function form P(z) = z^eta - A(z) sum_j c(j) z^(eta-j): free of
// negative powers, so roots near the origin stay well conditioned. Returns
// the value, derivative, and the magnitude scale of the cancelling terms.
struct PolyEval {
  cd value, deriv;
  double scale;
};

PolyEval poly_eval(double load, const Pmf& capacity, cd z) {
  int eta = capacity.support_max();
  const auto& c = capacity.probs();
  cd s = 0.0, sp = 0.0;  // sum c(j) z^(eta-j) and its derivative
  for (int j = 0; j <= eta; ++j) {
    double cj = c[static_cast<size_t>(j)];
    if (cj == 0.0) continue;
    int p = eta - j;
    cd zp = std::pow(z, p);
    s += cj * zp;
    if (p > 0) sp += cj * static_cast<double>(p) * std::pow(z, p - 1);
  }
  cd a = std::exp((z - 1.0) * load);
  cd zeta = std::pow(z, eta);
  PolyEval out;
  out.value = zeta - a * s;
  out.deriv = static_cast<double>(eta) * std::pow(z, eta - 1) -
              a * (load * s + sp);
  out.scale = std::abs(zeta) + std::abs(a * s);
  return out;
}

std::vector<cd> polish_and_select(double load, const Pmf& capacity,
                                  const std::vector<cd>& seeds) {
  std::vector<cd> inside;
  for (cd z : seeds) {
    if (std::abs(z) > 1.2) continue;
    bool ok = false;
    for (int it = 0; it < 80; ++it) {
      PolyEval e = poly_eval(load, capacity, z);
      if (std::abs(e.value) < 1e-13 * std::max(e.scale, 1e-30)) {
        ok = true;
        break;
      }
      if (std::abs(e.deriv) < 1e-300) break;
      cd step = e.value / e.deriv;
      z -= step;
      if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(z))) {
        PolyEval f = poly_eval(load, capacity, z);
        ok = std::abs(f.value) < 1e-9 * std::max(f.scale, 1e-30);
        break;
      }
    }
    if (!ok) continue;
    if (std::abs(z) >= 1.0 - 1e-12) continue;
    // the unit root is handled analytically; near saturation Newton can pull
    // it a few ulps inside the circle
    if (std::abs(z - 1.0) < 1e-9) continue;
    bool dup = false;
    for (cd w : inside)
      if (std::abs(w - z) < 1e-7) dup = true;
    if (!dup) inside.push_back(z);
  }
  return inside;
}

// Iterative radix-2 FFT, sign -1 = forward (exp(-2 pi i nk / N)).
void fft(std::vector<cd>& a, int sign) {
  size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = sign * 2.0 * M_PI / static_cast<double>(len);
    cd wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      cd w = 1.0;
      for (size_t k = 0; k < len / 2; ++k) {
        cd u = a[i + k];
        cd v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void require_stable(double load, const Pmf& capacity) {
  if (capacity.mean() <= load)
    throw BatchqError("station is not stable: E[C] <= lambda * beta");
}

}  // namespace

RootSet find_roots(double load, const Pmf& capacity) {
  require_stable(load, capacity);
  int eta = capacity.support_max();
  if (eta < 1) throw BatchqError("capacity has empty support above zero");
  RootSet rs;
  rs.roots.push_back(1.0);
  if (eta == 1) return rs;
  if (load < 1e-12)
    throw BatchqError("load too small for root extraction; queue is empty");
  int degree = std::max({40, eta + 20, static_cast<int>(3.0 * load) + 30});
  std::vector<cd> inside;
  for (int attempt = 0; attempt < 3; ++attempt) {
    inside = polish_and_select(load, capacity, companion_seeds(load, capacity, degree));
    if (static_cast<int>(inside.size()) == eta - 1) break;
    degree += 40;
  }
  if (static_cast<int>(inside.size()) != eta - 1)
    throw BatchqError("root extraction failed: expected " +
                      std::to_string(eta - 1) + " interior roots, found " +
                      std::to_string(inside.size()));
  for (cd z : inside) {
    PolyEval e = poly_eval(load, capacity, z);
    if (std::abs(e.value) > 1e-9 * std::max(e.scale, 1e-30))
      throw BatchqError("root residual above tolerance");
  }
  std::sort(inside.begin(), inside.end(), [](cd a, cd b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  rs.roots.insert(rs.roots.end(), inside.begin(), inside.end());
  return rs;
}

double tail_decay_root(double load, const Pmf& capacity) {
  require_stable(load, capacity);
  if (load < 1e-12) return 1e12;
  auto h = [&](double x) {
    return load * (x - 1.0) + std::log(capacity.pgf(1.0 / x).real());
  };
  double lo = 1.0 + 1e-9;
  double hi = 2.0;
  int guard = 0;
  while (h(hi) < 0.0 && ++guard < 60) hi *= 2.0;
  if (h(hi) < 0.0) return 1e12;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (h(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

int default_k_max(double load, const Pmf& capacity, double tol) {
  double x0 = tail_decay_root(load, capacity);
  double k = std::log(1.0 / tol) / std::log(x0);
  int out = static_cast<int>(std::ceil(k)) + 30;
  return std::clamp(out, 32, 200000);
}

Pmf z_stationary(double load, const Pmf& capacity, const RootSet& roots,
                 int k_max) {
  require_stable(load, capacity);
  if (load < 1e-12) return Pmf::delta(0);
  if (k_max < 0) k_max = default_k_max(load, capacity);
  double prefactor = capacity.mean() - load;
  auto interior = roots.interior();
  // normalization constants 1 / (1 - mu_j)
  cd prod_norm = 1.0;
  for (cd mu : interior) prod_norm *= (1.0 - mu);

  size_t n_grid = next_pow2(static_cast<size_t>(std::max(1024, 2 * (k_max + 1))));
  for (int attempt = 0; attempt < 8; ++attempt, n_grid *= 2) {
    std::vector<cd> vals(n_grid);
    for (size_t n = 0; n < n_grid; ++n) {
      double ang = M_PI * (2.0 * static_cast<double>(n) + 1.0) / static_cast<double>(n_grid);
      cd z(std::cos(ang), std::sin(ang));
      cd num = (1.0 - 1.0 / z) * std::exp((z - 1.0) * load);
      cd den = eq_residual(load, capacity, z);
      cd prod = 1.0;
      for (cd mu : interior) prod *= (1.0 - mu / z);
      vals[n] = prefactor * num / den * prod / prod_norm;
    }
    // p(k) = exp(-i pi k / N) / N * IDFT-style sum over the offset grid
    fft(vals, -1);
    std::vector<double> p(static_cast<size_t>(k_max) + 1);
    bool neg_heavy = false;
    for (int k = 0; k <= k_max; ++k) {
      double ang = -M_PI * static_cast<double>(k) / static_cast<double>(n_grid);
      cd tw(std::cos(ang), std::sin(ang));
      double v = (vals[static_cast<size_t>(k)] * tw).real() / static_cast<double>(n_grid);
      if (v < -1e-8) neg_heavy = true;
      p[static_cast<size_t>(k)] = std::max(v, 0.0);
    }
    double sum = std::accumulate(p.begin(), p.end(), 0.0);
    double boundary = p[static_cast<size_t>(k_max)];
    if (!neg_heavy && std::abs(sum - 1.0) < 1e-8 && boundary < 1e-10)
      return Pmf(std::move(p), 1e-6);
    if (n_grid > (1u << 22)) break;
  }
  throw BatchqError("queue pmf truncation error: tail mass above tolerance");
}

Pmf z_oracle(double load, const Pmf& capacity, int k_max) {
  require_stable(load, capacity);
  if (load < 1e-12) return Pmf::delta(0);
  Pmf arrivals = Pmf::poisson(load, 1e-15);
  const auto& a = arrivals.probs();
  const auto& c = capacity.probs();
  int eta = capacity.support_max();
  const int K = k_max;
  const int amax = static_cast<int>(a.size()) - 1;
  // One-step transition on the truncated state space {0..K}: a queue of i
  // sheds min(i, C) riders, then gains Poisson arrivals; overflow past K is
  // folded into the boundary state. Column i of M lists where mass at i goes.
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(K + 1) * static_cast<size_t>(eta + amax + 2));
  std::vector<double> depart(static_cast<size_t>(eta) + 1);
  for (int i = 0; i <= K; ++i) {
    // after departures, mass from i sits at j = max(i - C, 0)
    std::fill(depart.begin(), depart.end(), 0.0);
    int reach = std::min(i, eta);
    for (int cc = 0; cc <= eta; ++cc)
      depart[static_cast<size_t>(std::min(cc, reach))] +=
          c[static_cast<size_t>(cc)];
    for (int cc = 0; cc <= reach; ++cc) {
      double w = depart[static_cast<size_t>(cc)];
      if (w == 0.0) continue;
      int j = i - cc;
      int top = std::min(amax, K - j);
      double rest = 1.0;
      for (int k = 0; k < top; ++k) {
        trip.emplace_back(j + k, i, w * a[static_cast<size_t>(k)]);
        rest -= a[static_cast<size_t>(k)];
      }
      // remaining arrival mass (including the Poisson tail) hits >= j+top
      trip.emplace_back(j + top, i, w * std::max(rest, 0.0));
    }
  }
  // stationarity (M - I) pi = 0 with the boundary row replaced by sum = 1
  Eigen::SparseMatrix<double> A(K + 1, K + 1);
  A.setFromTriplets(trip.begin(), trip.end());
  for (int i = 0; i <= K; ++i) A.coeffRef(i, i) -= 1.0;
  for (int i = 0; i <= K; ++i) A.coeffRef(K, i) = 1.0;
  A.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
  if (lu.info() != Eigen::Success)
    throw BatchqError("z_oracle: stationary solve failed to factorize");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(K + 1);
  rhs[K] = 1.0;
  Eigen::VectorXd sol = lu.solve(rhs);
  if (lu.info() != Eigen::Success)
    throw BatchqError("z_oracle: stationary solve failed");
  std::vector<double> pi(static_cast<size_t>(K) + 1);
  for (int i = 0; i <= K; ++i)
    pi[static_cast<size_t>(i)] = std::max(sol[i], 0.0);
  if (pi[static_cast<size_t>(K)] > 1e-10)
    throw BatchqError("z_oracle: k_max too small, boundary mass above 1e-10");
  double sum = std::accumulate(pi.begin(), pi.end(), 0.0);
  for (double& x : pi) x /= sum;
  return Pmf(std::move(pi), 1e-6);
}

Pmf left_behind(const Pmf& z, const Pmf& capacity) {
  int zmax = z.support_max();
  int eta = capacity.support_max();
  std::vector<double> out(static_cast<size_t>(zmax) + 1, 0.0);
  double l0 = 0.0;
  for (int k = 0; k <= zmax; ++k) {
    double pk = z.at(k);
    if (pk == 0.0) continue;
    l0 += pk * (1.0 - capacity.cdf(k - 1));  // P[C >= k]
  }
  out[0] = l0;
  for (int j = 1; j <= zmax; ++j) {
    double acc = 0.0;
    for (int cc = 0; cc <= eta; ++cc) acc += capacity.at(cc) * z.at(j + cc);
    out[static_cast<size_t>(j)] = acc;
  }
  return Pmf(std::move(out), 1e-6);
}

Pmf queue_time_stationary(const Pmf& z, const Pmf& capacity, double lambda,
                          double beta) {
  Pmf left = left_behind(z, capacity);
  if (lambda * beta < 1e-14) return left;
  const int n_tau = 64;
  Pmf pois_full = Pmf::poisson(lambda * beta, 1e-15);
  std::vector<double> acc(
      static_cast<size_t>(left.support_max() + pois_full.support_max()) + 1, 0.0);
  for (int i = 0; i < n_tau; ++i) {
    double tau = (i + 0.5) * beta / n_tau;
    Pmf pois = Pmf::poisson(lambda * tau, 1e-15);
    for (int a = 0; a <= left.support_max(); ++a) {
      double pa = left.at(a);
      if (pa == 0.0) continue;
      for (int b = 0; b <= pois.support_max(); ++b)
        acc[static_cast<size_t>(a + b)] += pa * pois.at(b) / n_tau;
    }
  }
  return Pmf(std::move(acc), 1e-6);
}

WaitingTime waiting_time(const Pmf& z, const Pmf& capacity, double lambda,
                         double beta) {
  if (capacity.support_max() == 0)
    throw BatchqError("waiting time diverges: capacity is identically zero");
  Pmf left = left_behind(z, capacity);
  Pmf pois_full = Pmf::poisson(std::max(lambda, 0.0) * beta, 1e-15);
  int n_max_state = left.support_max() + pois_full.support_max();

  // P[n* = n | N] table from iterated capacity convolutions.
  // F_n(N) = P[C_1 + ... + C_n <= N]; row n of G is F_{n-1} - F_n.
  std::vector<std::vector<double>> G;  // G[n-1][N]
  {
    std::vector<double> F_prev(static_cast<size_t>(n_max_state) + 1, 1.0);
    Pmf csum = capacity;
    for (int n = 1; n <= 200000; ++n) {
      std::vector<double> F(static_cast<size_t>(n_max_state) + 1);
      for (int N = 0; N <= n_max_state; ++N) F[static_cast<size_t>(N)] = csum.cdf(N);
      std::vector<double> row(static_cast<size_t>(n_max_state) + 1);
      for (int N = 0; N <= n_max_state; ++N)
        row[static_cast<size_t>(N)] =
            std::max(0.0, F_prev[static_cast<size_t>(N)] - F[static_cast<size_t>(N)]);
      G.push_back(std::move(row));
      if (F[static_cast<size_t>(n_max_state)] < 1e-14) break;
      if (n == 200000)
        throw BatchqError("waiting time: cabin-count distribution does not close");
      F_prev = std::move(F);
      csum = convolve(csum, capacity);
    }
  }
  int n_rows = static_cast<int>(G.size());
  // moments of (n* - 1) given N
  std::vector<double> m1(static_cast<size_t>(n_max_state) + 1, 0.0);
  std::vector<double> m2(static_cast<size_t>(n_max_state) + 1, 0.0);
  for (int n = 1; n <= n_rows; ++n) {
    double e = static_cast<double>(n - 1);
    for (int N = 0; N <= n_max_state; ++N) {
      double g = G[static_cast<size_t>(n - 1)][static_cast<size_t>(N)];
      m1[static_cast<size_t>(N)] += e * g;
      m2[static_cast<size_t>(N)] += e * e * g;
    }
  }

  double step = beta / 64.0;
  size_t n_bins = static_cast<size_t>(n_rows + 1) * 64 + 2;
  WaitingTime best;
  double prev_mean = -1.0;
  for (int n_tau = 64; n_tau <= 1024; n_tau *= 2) {
    double mean = 0.0, mom2 = 0.0;
    std::vector<double> pdf(n_bins, 0.0);
    for (int i = 0; i < n_tau; ++i) {
      double tau = (i + 0.5) * beta / n_tau;
      double w_tau = 1.0 / n_tau;
      Pmf pois = Pmf::poisson(lambda * tau, 1e-15);
      // N = left + arrivals before the tagged customer
      std::vector<double> pN(static_cast<size_t>(n_max_state) + 1, 0.0);
      for (int a = 0; a <= left.support_max(); ++a) {
        double pa = left.at(a);
        if (pa == 0.0) continue;
        for (int b = 0; b <= pois.support_max(); ++b)
          pN[static_cast<size_t>(a + b)] += pa * pois.at(b);
      }
      double base = beta - tau;
      double A1 = 0.0, A2 = 0.0;
      for (int N = 0; N <= n_max_state; ++N) {
        double p = pN[static_cast<size_t>(N)];
        if (p == 0.0) continue;
        A1 += p * m1[static_cast<size_t>(N)];
        A2 += p * m2[static_cast<size_t>(N)];
        for (int n = 1; n <= n_rows; ++n) {
          double g = G[static_cast<size_t>(n - 1)][static_cast<size_t>(N)];
          if (g < 1e-16) continue;
          double w = base + (n - 1) * beta;
          size_t bin = std::min(n_bins - 1, static_cast<size_t>(w / step));
          pdf[bin] += w_tau * p * g;
        }
      }
      mean += w_tau * (base + beta * A1);
      mom2 += w_tau * (base * base + 2.0 * base * beta * A1 + beta * beta * A2);
    }
    best.mean = mean;
    best.variance = std::max(0.0, mom2 - mean * mean);
    best.grid_step = step;
    best.cdf.assign(n_bins, 0.0);
    double c = 0.0;
    for (size_t b = 0; b < n_bins; ++b) {
      c += pdf[b];
      best.cdf[b] = std::min(c, 1.0);
    }
    if (prev_mean > 0.0 && std::abs(mean - prev_mean) < 1e-8 * prev_mean) break;
    prev_mean = mean;
  }
  return best;
}

QueueSolution solve_station(double lambda, double beta, const Pmf& capacity) {
  double load = lambda * beta;
  require_stable(load, capacity);
  QueueSolution sol;
  if (load < 1e-9) {
    sol.z = Pmf::delta(0);
  } else {
    RootSet roots = find_roots(load, capacity);
    sol.z = z_stationary(load, capacity, roots);
  }
  sol.left = left_behind(sol.z, capacity);
  sol.q = queue_time_stationary(sol.z, capacity, lambda, beta);
  sol.wait = waiting_time(sol.z, capacity, lambda, beta);
  return sol;
}

}  // namespace liftline
