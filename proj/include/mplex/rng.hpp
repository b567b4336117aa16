#pragma once

#include "mplex/util.hpp"

namespace mplex {

// splitmix64 stream; cheap to construct, bit-reproducible everywhere.
// distinct (seed, s1, s2, s3) tuples give decorrelated substreams.
struct Rng {
  uint64_t s = 0;

  Rng() = default;
  explicit Rng(uint64_t seed, uint64_t s1 = 0, uint64_t s2 = 0, uint64_t s3 = 0) {
    s = splitmix64(seed);
    s = splitmix64(s ^ s1);
    s = splitmix64(s ^ s2);
    s = splitmix64(s ^ s3);
  }

  uint64_t operator()() {
    s += 0x9e3779b97f4a7c15ull;
    uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

inline double runif(Rng& g) { return (g() >> 11) * 0x1.0p-53; }  // [0,1)

inline double runif_pos(Rng& g) {  // (0,1)
  double u;
  do u = runif(g);
  while (u <= 0.0);
  return u;
}

inline double rexp(Rng& g) { return -std::log(runif_pos(g)); }

inline bool rbernoulli(Rng& g, double p) { return runif(g) < p; }

// standard normal quantile (Wichura's AS241, double precision)
double norm_ppf(double p);
double norm_cdf(double x);
double log_norm_cdf(double x);  // stable far into the left tail

inline double rnorm(Rng& g) { return norm_ppf(runif_pos(g)); }
inline double rnorm(Rng& g, double mu, double sigma) { return mu + sigma * rnorm(g); }

// Marsaglia-Tsang, scale 1
double rgamma(Rng& g, double shape);

// N(mu, sigma^2) restricted to [lo, hi]; inverse-CDF in the central regime,
// exponential-rejection (Robert 1995) in far tails
double rtruncnorm(Rng& g, double mu, double sigma, double lo, double hi);

std::vector<double> rdirichlet(Rng& g, const std::vector<double>& alpha);

// index draw from unnormalized log-weights (log-sum-exp normalized)
int rcategorical_logits(Rng& g, const std::vector<double>& logw);

// k distinct values from {0,...,n-1} (partial Fisher-Yates), sorted
std::vector<int> sample_without_replacement(Rng& g, int n, int k);

}  // namespace mplex
