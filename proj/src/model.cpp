#include "mplex/model.hpp"

#include "mplex/ident.hpp"

namespace mplex::model {

double edge_logit(const BinMat& A_k, const Eigen::MatrixXd& Gamma_k,
                  const BinMat& X_prev, double C_k, int i, int j) {
  int q = A_k.cols;
  double acc = 0.0;
  for (int s = 0; s < q; ++s) {
    if (!A_k.at(i, s)) continue;
    for (int t = 0; t < q; ++t)
      if (A_k.at(j, t) && X_prev.at(s, t)) acc += Gamma_k(s, t);
  }
  return C_k + acc;
}

double layer_loglik(const BinMat& X_k, const BinMat& X_prev, const BinMat& A_k,
                    double C_k, const Eigen::MatrixXd& Gamma_k) {
  double ll = 0.0;
  for (int i = 0; i < X_k.rows; ++i)
    for (int j = i + 1; j < X_k.cols; ++j)
      ll += log_edge(X_k.at(i, j), edge_logit(A_k, Gamma_k, X_prev, C_k, i, j));
  return ll;
}

double log_joint(const NetworkShape& shape, const ConnectionMatrices& conn,
                 const ContinuousParams& params, const LayeredSample& x) {
  double ll = std::log(params.nu[encode_adj(x.X[0])]);
  for (int k = 1; k <= shape.K; ++k)
    ll += layer_loglik(x.X[k], x.X[k - 1], conn.layer(k), params.C[k - 1], params.gamma(k));
  return ll;
}

double marginal_loglik_obs(const BinMat& X_K, const NetworkShape& shape,
                           const ConnectionMatrices& conn, const ContinuousParams& params,
                           uint64_t budget) {
  int K = shape.K;
  uint64_t total = 1;
  for (int k = 0; k < K; ++k) {
    int u = shape.u(k);
    if (u >= 63 || (total >> (63 - u)) != 0)
      throw BudgetError("marginal_loglik_obs: configuration space too large");
    total <<= u;
    if (total > budget) throw BudgetError("marginal_loglik_obs: enumeration budget exceeded");
  }

  LayeredSample x;
  x.X.resize(K + 1);
  x.X[K] = X_K;

  // odometer over latent-layer codes, streaming log-sum-exp
  std::vector<uint64_t> code(K, 0);
  for (int k = 0; k < K; ++k) x.X[k] = decode_adj(shape.p[k], 0);
  double m = kNegInf, s = 0.0;
  for (uint64_t it = 0;; ++it) {
    double ll = log_joint(shape, conn, params, x);
    if (ll > m) {
      s = s * std::exp(m - ll) + 1.0;
      m = ll;
    } else {
      s += std::exp(ll - m);
    }
    if (it + 1 == total) break;
    for (int k = K - 1; k >= 0; --k) {
      uint64_t span = 1ull << shape.u(k);
      code[k] = (code[k] + 1) % span;
      x.X[k] = decode_adj(shape.p[k], code[k]);
      if (code[k] != 0) break;
    }
  }
  if (m == kNegInf) return kNegInf;
  return m + std::log(s);
}

std::vector<LayeredSample> simulate(const NetworkShape& shape, const ConnectionMatrices& conn,
                                    const ContinuousParams& params, int N, uint64_t seed) {
  shape.validate();
  conn.validate(shape);
  params.validate(shape);
  if (N < 0) throw UsageError("simulate: N must be nonnegative");

  std::vector<LayeredSample> out(N);
  std::vector<double> lognu(params.nu.size());
  for (size_t i = 0; i < params.nu.size(); ++i) lognu[i] = std::log(params.nu[i]);

  parallel_chunks(N, [&](int lo, int hi) {
    for (int n = lo; n < hi; ++n) {
      Rng g(seed, 0x5157u, static_cast<uint64_t>(n));
      LayeredSample& x = out[n];
      x.X.resize(shape.layers());
      x.X[0] = decode_adj(shape.p[0], static_cast<uint64_t>(rcategorical_logits(g, lognu)));
      for (int k = 1; k <= shape.K; ++k) {
        BinMat& xk = x.X[k];
        xk = BinMat(shape.p[k], shape.p[k]);
        for (int i = 0; i < shape.p[k]; ++i) xk.at(i, i) = 1;
        for (int i = 0; i < shape.p[k]; ++i)
          for (int j = i + 1; j < shape.p[k]; ++j) {
            double psi = edge_logit(conn.layer(k), params.gamma(k), x.X[k - 1],
                                    params.C[k - 1], i, j);
            uint8_t b = rbernoulli(g, sigmoid(psi));
            xk.at(i, j) = xk.at(j, i) = b;
          }
      }
    }
  });
  return out;
}

HsbmData generate_hsbm(const HsbmSpec& spec, int N, uint64_t seed) {
  int p = spec.nodes;
  int L = static_cast<int>(spec.groups.size());
  if (static_cast<int>(spec.ranges.size()) != L + 1)
    throw UsageError("generate_hsbm: need one range per shared-depth level");
  for (int l = 0; l < L; ++l) {
    if (spec.groups[l] < 1 || p % spec.groups[l] != 0)
      throw UsageError("generate_hsbm: group counts must divide node count");
    if (l > 0 && spec.groups[l] % spec.groups[l - 1] != 0)
      throw UsageError("generate_hsbm: groups must be nested");
  }

  HsbmData out;
  out.labels.resize(L);
  for (int l = 0; l < L; ++l) {
    out.labels[l].resize(p);
    for (int i = 0; i < p; ++i) out.labels[l][i] = i * spec.groups[l] / p;
  }

  Rng g(seed, 0x4853u);
  out.prob = Eigen::MatrixXd::Ones(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) {
      int depth = 0;
      for (int l = 0; l < L; ++l)
        if (out.labels[l][i] == out.labels[l][j]) depth = l + 1;
      auto [lo, hi] = spec.ranges[depth];
      double pr = lo + (hi - lo) * runif(g);
      out.prob(i, j) = out.prob(j, i) = pr;
    }

  out.X.resize(N);
  for (int n = 0; n < N; ++n) {
    Rng gn(seed, 0x4853u + 1, static_cast<uint64_t>(n));
    BinMat& x = out.X[n];
    x = BinMat(p, p);
    for (int i = 0; i < p; ++i) x.at(i, i) = 1;
    for (int i = 0; i < p; ++i)
      for (int j = i + 1; j < p; ++j) {
        uint8_t b = rbernoulli(gn, out.prob(i, j));
        x.at(i, j) = x.at(j, i) = b;
      }
  }
  return out;
}

namespace {

// smallest non-identity unit-diagonal d x d matrix (off-diagonal bits in
// row-major order, first bit most significant) with row sums <= S and
// pairwise-distinct subset fingerprints; uncertified single-bit fallback
// beyond the fingerprint enumerator's budget
BinMat mixing_block(int d, int S) {
  std::vector<std::pair<int, int>> off;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (i != j) off.emplace_back(i, j);
  auto build = [&](uint64_t code) {
    BinMat M(d, d);
    for (int i = 0; i < d; ++i) M.at(i, i) = 1;
    for (size_t q = 0; q < off.size(); ++q)
      if ((code >> (off.size() - 1 - q)) & 1) M.at(off[q].first, off[q].second) = 1;
    return M;
  };
  if (d > 6) return build(1ull << (off.size() - 1));
  uint64_t lim = 1ull << off.size();
  for (uint64_t code = 1; code < lim; ++code) {
    BinMat M = build(code);
    bool ok = true;
    for (int i = 0; i < d && ok; ++i)
      if (M.row_sum(i) > S) ok = false;
    if (!ok) continue;
    if (ident::in_class_Md(M).in_class) return M;
  }
  throw NumericError("mixing_block: no admissible matrix found");
}

}  // namespace

std::pair<ConnectionMatrices, ContinuousParams> sim_truth(const NetworkShape& shape, int S) {
  shape.validate();
  if (S < 2) throw UsageError("sim_truth: S must be >= 2");
  ConnectionMatrices conn;
  for (int k = 1; k <= shape.K; ++k) {
    int rows = shape.p[k], d = shape.p[k - 1];
    if (rows < 2 * d) throw UsageError("sim_truth: requires p_k >= 2 p_{k-1}");
    BinMat A(rows, d);
    for (int i = 0; i < d; ++i) A.at(i, i) = 1;
    BinMat M = mixing_block(d, S);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) A.at(d + i, j) = M.at(i, j);
    for (int r = 2 * d; r < rows; ++r) {
      int a = (r - 2 * d) % d, b = (a + 1) % d;
      A.at(r, a) = 1;
      if (b != a) A.at(r, b) = 1;
    }
    conn.A.push_back(std::move(A));
  }
  ContinuousParams par;
  size_t M0 = 1ull << shape.u(0);
  par.nu.assign(M0, 1.0 / static_cast<double>(M0));
  par.C.assign(shape.K, -7.0);
  for (int k = 1; k <= shape.K; ++k) {
    int d = shape.p[k - 1];
    par.Gamma.push_back(Eigen::MatrixXd::Constant(d, d, 4.0) +
                        6.0 * Eigen::MatrixXd::Identity(d, d));
  }
  conn.validate(shape, S);
  par.validate(shape);
  return {conn, par};
}

}  // namespace mplex::model
