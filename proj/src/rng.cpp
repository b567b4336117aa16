#include "mplex/rng.hpp"

#include <algorithm>
#include <numeric>

namespace mplex {

double norm_ppf(double p) {
  // Wichura (1988), algorithm AS241, PPND16
  if (!(p > 0.0 && p < 1.0)) throw NumericError("norm_ppf: p outside (0,1)");
  double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

double log_norm_cdf(double x) {
  if (x > -37.0) {
    double c = norm_cdf(x);
    if (c > 0.0) return std::log(c);
  }
  // asymptotic expansion of Mills ratio in the far left tail
  double x2 = x * x;
  double corr = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2) +
                105.0 / (x2 * x2 * x2 * x2);
  return -0.5 * x2 - std::log(-x) - 0.91893853320467274178 + std::log(corr);
}

double rgamma(Rng& g, double shape) {
  if (!(shape > 0.0)) throw NumericError("rgamma: shape must be positive");
  if (shape < 1.0) {
    double u = runif_pos(g);
    return rgamma(g, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = rnorm(g);
    double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    double v = t * t * t;
    double u = runif_pos(g);
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

namespace {

// Robert (1995): exponential-rejection for N(0,1) on [a, inf), a >= 0
double rtail_std(Rng& g, double a) {
  double lambda = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    double x = a + rexp(g) / lambda;
    double d = x - lambda;
    if (std::log(runif_pos(g)) <= -0.5 * d * d) return x;
  }
}

// standard normal on [a, b]
double rtruncnorm_std(Rng& g, double a, double b) {
  if (!(a <= b)) throw UsageError("rtruncnorm: lo > hi");
  if (a == kNegInf && b == kInf) return rnorm(g);
  if (b <= 0.0) return -rtruncnorm_std(g, -b, -a);
  // now b > 0
  if (a <= 6.0) {
    double fa = a == kNegInf ? 0.0 : norm_cdf(a);
    double fb = b == kInf ? 1.0 : norm_cdf(b);
    if (fb - fa > 1e-14) {
      double u = fa + runif_pos(g) * (fb - fa);
      u = std::min(std::max(u, 1e-300), 1.0 - 1e-16);
      double x = norm_ppf(u);
      return std::min(std::max(x, a == kNegInf ? -kInf : a), b);
    }
  }
  // far right tail (interval mass too small for the inverse CDF)
  for (;;) {
    double x = rtail_std(g, std::max(a, 0.0));
    if (x <= b) return x;
  }
}

}  // namespace

double rtruncnorm(Rng& g, double mu, double sigma, double lo, double hi) {
  if (!(sigma > 0.0)) throw NumericError("rtruncnorm: sigma must be positive");
  double a = lo == kNegInf ? kNegInf : (lo - mu) / sigma;
  double b = hi == kInf ? kInf : (hi - mu) / sigma;
  return mu + sigma * rtruncnorm_std(g, a, b);
}

std::vector<double> rdirichlet(Rng& g, const std::vector<double>& alpha) {
  std::vector<double> out(alpha.size());
  double sum = 0.0;
  for (size_t i = 0; i < alpha.size(); ++i) {
    out[i] = rgamma(g, alpha[i]);
    sum += out[i];
  }
  if (sum <= 0.0) {  // all gammas underflowed; fall back to the largest alpha
    size_t imax = std::max_element(alpha.begin(), alpha.end()) - alpha.begin();
    std::fill(out.begin(), out.end(), 0.0);
    out[imax] = 1.0;
    return out;
  }
  for (double& x : out) x /= sum;
  return out;
}

int rcategorical_logits(Rng& g, const std::vector<double>& logw) {
  if (logw.empty()) throw UsageError("rcategorical_logits: empty support");
  double m = kNegInf;
  for (double w : logw) m = std::max(m, w);
  if (m == kNegInf) throw NumericError("rcategorical_logits: all weights are -inf");
  double total = 0.0;
  std::vector<double> cum(logw.size());
  for (size_t i = 0; i < logw.size(); ++i) {
    total += std::exp(logw[i] - m);
    cum[i] = total;
  }
  double u = runif(g) * total;
  for (size_t i = 0; i < cum.size(); ++i)
    if (u < cum[i]) return static_cast<int>(i);
  return static_cast<int>(cum.size()) - 1;
}

std::vector<int> sample_without_replacement(Rng& g, int n, int k) {
  if (k < 0 || k > n) throw UsageError("sample_without_replacement: bad k");
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    int j = i + static_cast<int>(g() % static_cast<uint64_t>(n - i));
    std::swap(pool[i], pool[j]);
  }
  std::vector<int> out(pool.begin(), pool.begin() + k);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace mplex
