#include "mplex/pg.hpp"

#include <atomic>
#include <cmath>

// PG(1,c) by the alternating-series rejection method on J*(1, |c|/2)
// (Devroye-type two-regime envelope: truncated inverse-Gaussian below the
// split point, truncated exponential above it). Branch masses are computed
// in log space so large |c| cannot overflow the ratio.

namespace mplex::pg {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPi2 = kPi * kPi;
constexpr double kLogPi = 1.1447298858494001741;
constexpr double kLog2Pi = 1.8378770664093454836;

std::atomic<uint64_t> g_cap_anomalies{0};

// a_n(x) of the alternating series, split at the envelope point t
double aterm(int n, double x, double t) {
  double h = n + 0.5;
  double lg;
  if (x <= t)
    lg = kLogPi + std::log(h) + 1.5 * (std::log(2.0 / kPi) - std::log(x)) -
         2.0 * h * h / x;
  else
    lg = kLogPi + std::log(h) - 0.5 * kPi2 * h * h * x;
  return std::exp(lg);
}

// inverse-Gaussian(mu, lambda=1) draw (Michael-Schucany-Haas)
double randinvg(double mu, Rng& g) {
  double u = rnorm(g);
  double v = u * u;
  double muv = mu * v;
  double out = mu + 0.5 * mu * (muv - std::sqrt(4.0 * muv + muv * muv));
  if (runif(g) > mu / (mu + out)) out = mu * mu / out;
  return out;
}

// Gamma(1/2, rate 1/2) truncated to [c, inf); shifted-exponential proposal
double truncgamma(double c, Rng& g) {
  for (;;) {
    double x = 2.0 * rexp(g) + c;
    if (runif(g) <= std::sqrt(c / x)) return x;
  }
}

// inverse-Gaussian(1/z, 1) truncated to (0, t)
double tinvgauss(double z, double t, Rng& g) {
  if (z < 1.0 / t) {  // mu > t: sample the reciprocal from a truncated gamma
    for (;;) {
      double x = 1.0 / truncgamma(1.0 / t, g);
      if (std::log(runif_pos(g)) < -0.5 * z * z * x) return x;
    }
  }
  double mu = 1.0 / z;
  for (;;) {
    double x = randinvg(mu, g);
    if (x < t) return x;
  }
}

}  // namespace

double exp_branch_prob(double z) {
  double t = kTrunc;
  double k = 0.125 * kPi2 + 0.5 * z * z;
  double loga = std::log(4.0) - kLogPi - z;
  double base = loga + std::log(k) + k * t;
  double rt = std::sqrt(1.0 / t);
  double f1 = base + log_norm_cdf(rt * (t * z - 1.0));
  double f2 = base + 2.0 * z + log_norm_cdf(-rt * (t * z + 1.0));
  double lpq = logsumexp({f1, f2});  // log(p/q), p = IG mass, q = exp mass
  return sigmoid(-lpq);
}

double sample_pg1(double c, Rng& g) {
  if (!std::isfinite(c)) throw NumericError("sample_pg1: c not finite");
  double z = 0.5 * std::fabs(c);
  double t = kTrunc;
  double k = 0.125 * kPi2 + 0.5 * z * z;
  double ratio = exp_branch_prob(z);

  double x = t;  // last proposal, returned if the cap trips
  for (int tries = 0; tries < 200; ++tries) {
    x = runif(g) < ratio ? t + rexp(g) / k : tinvgauss(z, t, g);

    double sn = aterm(0, x, t);
    double u = runif(g) * sn;
    bool even = false;
    bool rejected = false;
    for (int n = 1; n <= 200; ++n) {
      sn += (even ? 1.0 : -1.0) * aterm(n, x, t);
      if (!even && u <= sn) return 0.25 * x;
      if (even && u > sn) {
        rejected = true;
        break;
      }
      even = !even;
    }
    if (!rejected) break;  // series cap: treat as accept, flag below
  }
  g_cap_anomalies.fetch_add(1, std::memory_order_relaxed);
  return 0.25 * x;
}

uint64_t cap_anomalies() { return g_cap_anomalies.load(std::memory_order_relaxed); }

void reset_cap_anomalies() { g_cap_anomalies.store(0, std::memory_order_relaxed); }

}  // namespace mplex::pg
