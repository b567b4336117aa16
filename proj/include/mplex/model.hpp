#pragma once

#include "mplex/rng.hpp"
#include "mplex/types.hpp"

namespace mplex::model {

// edge logit psi_{k,i,j} = C_k + a_i^T (Gamma_k hadamard X_{k-1}) a_j
double edge_logit(const BinMat& A_k, const Eigen::MatrixXd& Gamma_k,
                  const BinMat& X_prev, double C_k, int i, int j);

// log Bernoulli(x | sigmoid(psi)) = x*psi - log(1+e^psi)
inline double log_edge(int x, double psi) { return x * psi - softplus(psi); }

// sum of log edge terms over i<j at one layer transition
double layer_loglik(const BinMat& X_k, const BinMat& X_prev, const BinMat& A_k,
                    double C_k, const Eigen::MatrixXd& Gamma_k);

// log P(X_0..X_K | A, Theta) for one individual
double log_joint(const NetworkShape& shape, const ConnectionMatrices& conn,
                 const ContinuousParams& params, const LayeredSample& x);

// log P(X_K | A, Theta), latent layers summed out by enumeration.
// refuses (BudgetError) when prod_k 2^{u(k)}, k < K, exceeds the budget.
double marginal_loglik_obs(const BinMat& X_K, const NetworkShape& shape,
                           const ConnectionMatrices& conn, const ContinuousParams& params,
                           uint64_t budget = 1ull << 20);

// N independent individuals; per-individual substreams make the output
// invariant to evaluation order
std::vector<LayeredSample> simulate(const NetworkShape& shape, const ConnectionMatrices& conn,
                                    const ContinuousParams& params, int N, uint64_t seed);

// hierarchical SBM benchmark generator: nested node groups, one shared
// probability matrix per dataset, then N Bernoulli adjacency draws
struct HsbmSpec {
  int nodes = 27;
  std::vector<int> groups = {3, 9};  // coarsest to finest; each divides nodes
  // ranges[d]: U(lo,hi) for pairs whose deepest shared level is d-1 (d=0: none)
  std::vector<std::pair<double, double>> ranges = {{0.0, 0.1}, {0.4, 0.5}, {0.7, 0.8}};
};

struct HsbmData {
  Eigen::MatrixXd prob;
  std::vector<BinMat> X;
  std::vector<std::vector<int>> labels;  // labels[level][node]
};

HsbmData generate_hsbm(const HsbmSpec& spec, int N, uint64_t seed);

// deterministic benchmark truth for a shape with p_k >= 2 p_{k-1}: each A_k
// stacks an identity block, a certified distinct-fingerprint block, and
// cyclic two-entry filler rows; C_k = -7, Gamma_k = 4 J + 6 I, nu uniform
std::pair<ConnectionMatrices, ContinuousParams> sim_truth(const NetworkShape& shape, int S = 2);

}  // namespace mplex::model
