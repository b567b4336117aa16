#pragma once

#include <array>
#include <optional>

#include "mplex/model.hpp"
#include "mplex/rng.hpp"
#include "mplex/types.hpp"

namespace mplex::gibbs {

struct PriorHyper {
  double mu_C = 0.0, s2_C = 1.0;
  double mu_gamma = 0.0, s2_gamma = 1.0;  // Gamma diagonal
  double mu_delta = 0.0, s2_delta = 1.0;  // Gamma off-diagonal
  double alpha = 1.0;                     // Dirichlet concentration for nu
};

struct SamplerConfig {
  PriorHyper prior;
  int S = 2;
  std::optional<TruncationBounds> trunc;
  int batch = 0;  // |B| for subsampling sweeps; 0 means N
  long iters_sub = 0, burnin_sub = 0;
  long iters_std = 0, burnin_std = 0;
  long thin = 1;
  uint64_t seed = 0;
  bool subset_latents_only = false;  // refresh latents only for n in B
  bool record_sub_loglik = false;
  bool freeze_params = false;  // latent-only chain (A, C, Gamma, nu held fixed)

  void validate(int N) const;
};

// missing entries at layer K: excluded from every likelihood sum, imputed
// each sweep for prediction
struct EdgeMask {
  int pK = 0, N = 0;
  std::vector<std::vector<int>> pos;  // per n, sorted distinct tri indices

  bool empty() const;
  int total() const;
  bool masked(int n, int e) const;
  uint64_t digest() const;
  void validate() const;

  static EdgeMask random(int N, int pK, double frac, uint64_t seed);
  static EdgeMask from_entries(int N, int pK, const std::vector<std::array<int, 3>>& entries);
};

struct TraceRecord {
  long iter = 0;
  char phase = 'g';  // 's' = subsampling sweep, 'g' = standard sweep
  ConnectionMatrices conn;
  ContinuousParams params;
  std::vector<uint64_t> x0;                    // per-n canonical codes
  std::vector<std::vector<std::string>> xint;  // [n][k-1] tri strings, k in 1..K-1
  std::vector<uint8_t> imp;     // imputed masked entries, mask order (n-major)
  std::vector<double> loglik;   // per-n observed-layer log-likelihood; may be empty
};

struct ChainTrace {
  NetworkShape shape;
  int S = 2;
  int N = 0;
  uint64_t seed = 0;
  uint64_t mask_digest = 0;
  std::string config_json;  // resolved configuration, filled by the I/O layer
  std::vector<TraceRecord> records;
};

class GibbsState {
 public:
  // observed: N symmetric unit-diagonal p_K x p_K samples. mask may be null.
  // init_conn / init_params null -> drawn from the prior. Latents are
  // forward-simulated from the starting parameters.
  GibbsState(const NetworkShape& shape, std::vector<BinMat> observed, const EdgeMask* mask,
             const SamplerConfig& cfg, const ConnectionMatrices* init_conn = nullptr,
             const ContinuousParams* init_params = nullptr);

  // --- single-site conditionals (log space), exposed for exactness tests ---
  std::vector<double> row_A_logweights(int k, int i) const;
  std::pair<double, double> cond_C(int k) const;            // (mu, var)
  std::pair<double, double> cond_Gamma(int k, int s, int t) const;
  std::vector<double> nu_alpha() const;
  std::vector<double> x0_logweights(int n) const;           // over canonical codes
  double xk_logodds(int n, int k, int i, int j) const;      // 1 <= k <= K-1

  // --- single-site updates ---
  void update_omegas(Rng& g);  // every (n, k, i<j); masked positions skipped
  void update_row_A(int k, int i, Rng& g);
  void update_C(int k, Rng& g);
  void update_Gamma(int k, int s, int t, Rng& g);
  void update_nu(Rng& g);
  void update_X0(int n, Rng& g);
  void update_Xk_entry(int n, int k, int i, int j, Rng& g);
  void impute_masked(Rng& g);

  // --- full sweeps (deterministic given seed and sweep count) ---
  void sweep_standard();
  void sweep_subsampling();

  // --- accessors ---
  const NetworkShape& shape() const { return shape_; }
  int N() const { return N_; }
  const ConnectionMatrices& conn() const { return conn_; }
  const ContinuousParams& params() const { return params_; }
  const std::vector<LayeredSample>& latents() const { return lat_; }
  const std::vector<int>& batch() const { return batch_; }
  double scale() const { return scale_; }
  long sweep_no() const { return sweep_no_; }
  double psi(int n, int k, int i, int j) const;    // k in 1..K
  double omega(int n, int k, int i, int j) const;
  const std::vector<uint64_t>& candidates(int k) const { return cand_[k - 1]; }
  std::vector<double> loglik_obs() const;          // per n, masked entries excluded
  std::vector<uint8_t> imputed_values() const;     // mask order (n-major)

  // test hooks: mutate state then restore cache coherence
  ConnectionMatrices& conn_mut() { return conn_; }
  ContinuousParams& params_mut() { return params_; }
  std::vector<LayeredSample>& latents_mut() { return lat_; }
  void set_omega(int n, int k, int i, int j, double w);
  void rebuild_psi();
  void check_finite() const;  // throws NumericError on NaN/Inf parameters

 private:
  struct X0Tables {
    std::vector<int> cls;                  // class id per layer-1 pair
    std::vector<std::vector<double>> psi;  // [class][code]
    std::vector<std::vector<double>> sp;   // softplus(psi)
    std::vector<double> lognu;
    int ncodes = 0;
  };
  struct Aff {  // one layer-(k+1) pair whose logit contains X_{k,i,j}
    int e2, u, v;
    uint8_t mult;
  };
  using AffList = std::vector<Aff>;
  struct GammaPair {  // layer-k pair with nonzero kappa for a Gamma entry
    int e, i, j;
    uint8_t mult;
  };

  X0Tables build_x0_tables() const;
  std::vector<AffList> build_aff_layer(int k) const;  // k in 1..K-1
  std::vector<double> x0_logweights_with(int n, const X0Tables& tab) const;
  void update_X0_with(int n, Rng& g, const X0Tables& tab);
  double xk_logodds_with(int n, int k, int i, int j, const std::vector<AffList>& aff) const;
  void update_Xk_entry_with(int n, int k, int i, int j, Rng& g, const std::vector<AffList>& aff);
  void gamma_pairs(int k, int s, int t, std::vector<GammaPair>& out) const;
  void set_batch_all();
  void run_sweep_body(bool latents_subset_only);

  NetworkShape shape_;
  SamplerConfig cfg_;
  int N_ = 0;
  ConnectionMatrices conn_;
  ContinuousParams params_;
  std::vector<LayeredSample> lat_;
  std::vector<std::vector<std::vector<double>>> omega_;  // [n][k-1][tri]
  std::vector<std::vector<std::vector<double>>> psi_;    // [n][k-1][tri]
  std::vector<std::vector<int>> mask_pos_;               // per n, sorted; empty if none
  std::vector<std::vector<std::pair<int, int>>> mask_pair_;  // (i,j) per mask position
  std::vector<std::vector<uint8_t>> mask_flag_;          // per n, u(K) flags; empty if none
  std::vector<std::vector<uint64_t>> cand_;              // per k-1, ascending masks
  std::vector<std::vector<std::vector<int>>> cand_supp_;  // support lists of cand_
  std::vector<int> batch_, all_idx_;
  double scale_ = 1.0;
  long sweep_no_ = 0;
  uint64_t seed_ = 0;
};

ChainTrace run_chain(const std::vector<BinMat>& observed, const EdgeMask* mask,
                     const SamplerConfig& cfg, const NetworkShape& shape,
                     const ConnectionMatrices* init_conn = nullptr,
                     const ContinuousParams* init_params = nullptr);

// row-pattern candidates: all masks over p_prev bits with 1..S ones,
// ascending numeric order; refuses above the enumeration budget
std::vector<uint64_t> row_candidates(int p_prev, int S, uint64_t cap = 1ull << 20);

}  // namespace mplex::gibbs
