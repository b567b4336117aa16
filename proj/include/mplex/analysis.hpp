#pragma once

#include "mplex/gibbs.hpp"

namespace mplex::analysis {

struct WaicResult {
  double waic = 0, lppd = 0, p_waic = 0;
};
// ll[t][n]: per kept iteration t, per individual n
WaicResult waic(const std::vector<std::vector<double>>& ll);

// rows of the matrix: records carrying a log-likelihood vector for the
// given phase ('g' standard, 's' subsampling, 0 = any)
std::vector<std::vector<double>> loglik_matrix(const gibbs::ChainTrace& tr, char phase = 'g');

struct GrResult {
  double rhat = 1.0;
  bool degenerate = false;  // zero within-chain variance
};
GrResult gelman_rubin(const std::vector<std::vector<double>>& chains);

struct GewekeResult {
  double z = 0.0;
  bool degenerate = false;  // constant window(s)
};
GewekeResult geweke(const std::vector<double>& trace, double first_frac = 0.1,
                    double last_frac = 0.5);

// scalar extraction handles for the continuous parameters
struct ParamRef {
  int k = 1;      // layer
  int s = 0, t = 0;
  bool is_C = true;
  std::string name() const;
};
std::vector<ParamRef> param_list(const NetworkShape& shape);
std::vector<double> param_series(const gibbs::ChainTrace& tr, const ParamRef& ref);

struct ParamSummary {
  std::string name;
  double mean = 0, sd = 0, q05 = 0, q50 = 0, q95 = 0;
};
std::vector<ParamSummary> posterior_summaries(const gibbs::ChainTrace& tr);

// per-(n, entry) posterior means of latent layer k (k in 0..K-1), N x u(k)
Eigen::MatrixXd latent_means(const gibbs::ChainTrace& tr, int k);

// column-aligns every record to a reference connection stack (default: the
// first record), applying the induced relabeling to Gamma, nu, X codes
gibbs::ChainTrace relabel(const gibbs::ChainTrace& tr,
                          const ConnectionMatrices* reference = nullptr);

// joint posterior mode over recorded connection stacks (ties: first seen)
ConnectionMatrices posterior_mode_A(const gibbs::ChainTrace& tr);

struct ClusterAssignment {
  std::vector<uint64_t> code;      // per individual, bit l = 1{xbar > threshold}
  std::vector<double> thresholds;  // per entry
};
// xbars: N x L; default thresholds are per-entry medians
ClusterAssignment cluster_individuals(const Eigen::MatrixXd& xbars,
                                      const std::vector<double>* thresholds = nullptr);
// entries whose grand mean lies strictly inside (lo, hi)
std::vector<int> active_entries(const Eigen::MatrixXd& xbars, double lo = 0.01, double hi = 0.99);

// posterior probability per masked entry (mask order), averaged imputations
std::vector<double> predict_missing(const gibbs::ChainTrace& tr, const gibbs::EdgeMask& mask);

// Mann-Whitney AUC, ties counted half
double auc(const std::vector<int>& labels, const std::vector<double>& scores);

struct CommunityMetrics {
  double nmi = 0, accuracy = 0;
};
CommunityMetrics community_metrics(const std::vector<int>& pred, const std::vector<int>& truth);

// minimum Hamming distance between two 0/1 matrices over column permutations
// (exact assignment); perm_out[s] = source column placed at slot s
int hamming_best_perm(const BinMat& A, const BinMat& ref, std::vector<int>* perm_out = nullptr);

}  // namespace mplex::analysis
