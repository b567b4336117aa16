#include "mplex/gibbs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "mplex/pg.hpp"

namespace mplex::gibbs {

namespace {

// substream tags; distinct per update phase so per-n draws are order-free
constexpr uint64_t TAG_OMEGA = 0x6f6d6567ull;
constexpr uint64_t TAG_X0 = 0x78300000ull;
constexpr uint64_t TAG_XINT = 0x78696e74ull;
constexpr uint64_t TAG_IMPUTE = 0x696d7075ull;
constexpr uint64_t TAG_PARAMS = 0x70617273ull;
constexpr uint64_t TAG_BATCH = 0x62617463ull;
constexpr uint64_t TAG_INIT = 0x696e6974ull;
constexpr uint64_t TAG_LATINIT = 0x6c617469ull;

uint64_t row_mask(const BinMat& A, int i) {
  uint64_t m = 0;
  for (int t = 0; t < A.cols; ++t)
    if (A.at(i, t)) m |= 1ull << t;
  return m;
}

std::vector<int> mask_support(uint64_t m) {
  std::vector<int> s;
  while (m) {
    s.push_back(std::countr_zero(m));
    m &= m - 1;
  }
  return s;
}

std::pair<double, double> c_bounds(const SamplerConfig& cfg) {
  if (cfg.trunc) return {cfg.trunc->C_lo, cfg.trunc->C_hi};
  return {kNegInf, kInf};
}

std::pair<double, double> g_bounds(const SamplerConfig& cfg, bool diag) {
  double lo = 0.0, hi = kInf;
  if (cfg.trunc) {
    lo = diag ? cfg.trunc->gamma_lo : cfg.trunc->delta_lo;
    hi = diag ? cfg.trunc->gamma_hi : cfg.trunc->delta_hi;
  }
  return {std::max(0.0, lo), hi};
}

}  // namespace

void SamplerConfig::validate(int N) const {
  if (S < 1) throw UsageError("config: S must be >= 1");
  if (prior.s2_C <= 0 || prior.s2_gamma <= 0 || prior.s2_delta <= 0)
    throw UsageError("config: prior variances must be positive");
  if (prior.alpha <= 0) throw UsageError("config: alpha must be positive");
  if (batch != 0 && (batch < 1 || batch > N))
    throw UsageError("config: batch size must lie in [1, N]");
  if (iters_sub < 0 || iters_std < 0 || burnin_sub < 0 || burnin_std < 0)
    throw UsageError("config: negative iteration counts");
  if (thin < 1) throw UsageError("config: thin must be >= 1");
  if (trunc) {
    if (!(trunc->C_lo < trunc->C_hi) || !(trunc->gamma_lo < trunc->gamma_hi) ||
        !(trunc->delta_lo < trunc->delta_hi))
      throw UsageError("config: empty truncation interval");
  }
}

std::vector<uint64_t> row_candidates(int p_prev, int S, uint64_t cap) {
  if (p_prev < 1) throw UsageError("row_candidates: empty previous layer");
  if (p_prev > 62) throw BudgetError("row_candidates: previous layer too wide to enumerate");
  int smax = std::min(S, p_prev);
  double count = 0;
  for (int s = 1; s <= smax; ++s) {
    double c = 1;
    for (int r = 0; r < s; ++r) c = c * (p_prev - r) / (r + 1);
    count += c;
    if (count > static_cast<double>(cap))
      throw BudgetError("row_candidates: candidate space exceeds enumeration budget");
  }
  std::vector<uint64_t> out;
  out.reserve(static_cast<size_t>(count));
  for (int s = 1; s <= smax; ++s) {
    uint64_t v = (1ull << s) - 1, lim = 1ull << p_prev;
    while (v < lim) {
      out.push_back(v);
      uint64_t t = v | (v - 1);
      v = (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
      if (v == 0) break;  // wrap guard for s == p_prev
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------- EdgeMask

bool EdgeMask::empty() const {
  for (const auto& p : pos)
    if (!p.empty()) return false;
  return true;
}

int EdgeMask::total() const {
  int t = 0;
  for (const auto& p : pos) t += static_cast<int>(p.size());
  return t;
}

bool EdgeMask::masked(int n, int e) const {
  const auto& v = pos[n];
  return std::binary_search(v.begin(), v.end(), e);
}

uint64_t EdgeMask::digest() const {
  uint64_t h = splitmix64(0x6d61736bull ^ static_cast<uint64_t>(N));
  h = splitmix64(h ^ static_cast<uint64_t>(pK));
  for (int n = 0; n < N; ++n)
    for (int e : pos[n])
      h = splitmix64(h ^ (static_cast<uint64_t>(n) * 0x1000003ull + static_cast<uint64_t>(e)));
  return h;
}

void EdgeMask::validate() const {
  if (N < 0 || pK < 2) throw UsageError("mask: bad dimensions");
  if (static_cast<int>(pos.size()) != N) throw UsageError("mask: wrong sample count");
  int u = tri_count(pK);
  for (const auto& v : pos) {
    for (size_t t = 0; t < v.size(); ++t) {
      if (v[t] < 0 || v[t] >= u) throw UsageError("mask: entry out of range");
      if (t > 0 && v[t] <= v[t - 1]) throw UsageError("mask: entries must be sorted and distinct");
    }
  }
}

EdgeMask EdgeMask::random(int N, int pK, double frac, uint64_t seed) {
  if (frac < 0.0 || frac >= 1.0) throw UsageError("mask: fraction must lie in [0,1)");
  EdgeMask m;
  m.N = N;
  m.pK = pK;
  m.pos.resize(N);
  int u = tri_count(pK);
  long long total = static_cast<long long>(N) * u;
  int want = static_cast<int>(std::llround(frac * total));
  if (want == 0) return m;
  Rng g(seed, 0x6d736bull);
  std::vector<int> flat = sample_without_replacement(g, static_cast<int>(total), want);
  for (int f : flat) m.pos[f / u].push_back(f % u);
  return m;
}

EdgeMask EdgeMask::from_entries(int N, int pK, const std::vector<std::array<int, 3>>& entries) {
  EdgeMask m;
  m.N = N;
  m.pK = pK;
  m.pos.resize(N);
  for (const auto& t : entries) {
    int n = t[0], i = t[1], j = t[2];
    if (n < 0 || n >= N || i < 0 || j <= i || j >= pK)
      throw UsageError("mask: entry [n,i,j] out of range or not upper-triangular");
    m.pos[n].push_back(tri_index(pK, i, j));
  }
  for (auto& v : m.pos) {
    std::sort(v.begin(), v.end());
    if (std::adjacent_find(v.begin(), v.end()) != v.end())
      throw UsageError("mask: duplicate entry");
  }
  return m;
}

// -------------------------------------------------------------- GibbsState

GibbsState::GibbsState(const NetworkShape& shape, std::vector<BinMat> observed,
                       const EdgeMask* mask, const SamplerConfig& cfg,
                       const ConnectionMatrices* init_conn, const ContinuousParams* init_params)
    : shape_(shape), cfg_(cfg), N_(static_cast<int>(observed.size())), seed_(cfg.seed) {
  shape_.validate();
  if (shape_.p[0] > 4) throw UsageError("sampler: p_0 must be <= 4");
  cfg_.validate(N_);
  int K = shape_.K, pK = shape_.p[K];
  for (const BinMat& x : observed) {
    if (x.rows != pK || x.cols != pK || !x.is_symmetric_unit_diag())
      throw UsageError("sampler: observed matrices must be symmetric unit-diagonal of size p_K");
  }
  if (mask && !mask->empty()) {
    mask->validate();
    if (mask->N != N_ || mask->pK != pK) throw UsageError("sampler: mask does not match data");
    mask_pos_ = mask->pos;
    mask_flag_.assign(N_, std::vector<uint8_t>(shape_.u(K), 0));
    mask_pair_.resize(N_);
    for (int n = 0; n < N_; ++n)
      for (int e : mask_pos_[n]) {
        mask_flag_[n][e] = 1;
        mask_pair_[n].push_back(tri_unindex(pK, e));
      }
  }

  cand_.resize(K);
  cand_supp_.resize(K);
  for (int k = 1; k <= K; ++k) {
    cand_[k - 1] = row_candidates(shape_.p[k - 1], cfg_.S);
    cand_supp_[k - 1].reserve(cand_[k - 1].size());
    for (uint64_t c : cand_[k - 1]) cand_supp_[k - 1].push_back(mask_support(c));
  }

  Rng g0(seed_, TAG_INIT);
  if (init_conn) {
    init_conn->validate(shape_, cfg_.S);
    conn_ = *init_conn;
  } else {
    conn_.A.clear();
    for (int k = 1; k <= K; ++k) {
      BinMat A(shape_.p[k], shape_.p[k - 1]);
      const auto& cand = cand_[k - 1];
      for (int i = 0; i < A.rows; ++i) {
        auto idx = static_cast<size_t>(runif(g0) * cand.size());
        if (idx >= cand.size()) idx = cand.size() - 1;
        for (int t : cand_supp_[k - 1][idx]) A.at(i, t) = 1;
      }
      conn_.A.push_back(std::move(A));
    }
  }
  if (init_params) {
    init_params->validate(shape_);
    params_ = *init_params;
  } else {
    size_t M = 1ull << shape_.u(0);
    params_.nu = rdirichlet(g0, std::vector<double>(M, cfg_.prior.alpha));
    auto [clo, chi] = c_bounds(cfg_);
    params_.C.resize(K);
    for (int k = 0; k < K; ++k)
      params_.C[k] = rtruncnorm(g0, cfg_.prior.mu_C, std::sqrt(cfg_.prior.s2_C), clo, chi);
    params_.Gamma.clear();
    for (int k = 1; k <= K; ++k) {
      int d = shape_.p[k - 1];
      Eigen::MatrixXd G(d, d);
      auto [glo, ghi] = g_bounds(cfg_, true);
      auto [dlo, dhi] = g_bounds(cfg_, false);
      for (int s = 0; s < d; ++s)
        G(s, s) = rtruncnorm(g0, cfg_.prior.mu_gamma, std::sqrt(cfg_.prior.s2_gamma), glo, ghi);
      for (int s = 0; s < d; ++s)
        for (int t = s + 1; t < d; ++t)
          G(s, t) = G(t, s) =
              rtruncnorm(g0, cfg_.prior.mu_delta, std::sqrt(cfg_.prior.s2_delta), dlo, dhi);
      params_.Gamma.push_back(std::move(G));
    }
  }

  // forward-simulate the latent stack; observed layer gets masked entries drawn
  lat_.resize(N_);
  psi_.resize(N_);
  omega_.resize(N_);
  for (int n = 0; n < N_; ++n) {
    Rng g(seed_, TAG_LATINIT, static_cast<uint64_t>(n));
    lat_[n].X.resize(K + 1);
    psi_[n].resize(K);
    omega_[n].resize(K);
    double u = runif(g), acc = 0.0;
    size_t M = params_.nu.size(), code = 0;
    for (size_t m = 0; m < M; ++m) {
      acc += params_.nu[m];
      code = m;
      if (u < acc) break;
    }
    lat_[n].X[0] = decode_adj(shape_.p[0], code);
    for (int k = 1; k <= K; ++k) {
      int pk = shape_.p[k];
      psi_[n][k - 1].resize(shape_.u(k));
      omega_[n][k - 1].assign(shape_.u(k), 0.25);
      if (k < K) {
        BinMat X(pk, pk);
        for (int i = 0; i < pk; ++i) X.at(i, i) = 1;
        int e = 0;
        for (int i = 0; i < pk; ++i)
          for (int j = i + 1; j < pk; ++j, ++e) {
            double ps = model::edge_logit(conn_.layer(k), params_.gamma(k), lat_[n].X[k - 1],
                                          params_.C[k - 1], i, j);
            psi_[n][k - 1][e] = ps;
            if (rbernoulli(g, sigmoid(ps))) X.at(i, j) = X.at(j, i) = 1;
          }
        lat_[n].X[k] = std::move(X);
      } else {
        lat_[n].X[K] = observed[n];
        int e = 0;
        for (int i = 0; i < pK; ++i)
          for (int j = i + 1; j < pK; ++j, ++e)
            psi_[n][K - 1][e] = model::edge_logit(conn_.layer(K), params_.gamma(K),
                                                  lat_[n].X[K - 1], params_.C[K - 1], i, j);
        if (!mask_pos_.empty())
          for (size_t t = 0; t < mask_pos_[n].size(); ++t) {
            auto [i, j] = mask_pair_[n][t];
            uint8_t b = rbernoulli(g, sigmoid(psi_[n][K - 1][mask_pos_[n][t]])) ? 1 : 0;
            lat_[n].X[K].at(i, j) = lat_[n].X[K].at(j, i) = b;
          }
      }
    }
  }

  all_idx_.resize(N_);
  for (int n = 0; n < N_; ++n) all_idx_[n] = n;
  set_batch_all();
}

void GibbsState::set_batch_all() {
  batch_ = all_idx_;
  scale_ = 1.0;
}

double GibbsState::psi(int n, int k, int i, int j) const {
  return psi_[n][k - 1][tri_index(shape_.p[k], i, j)];
}

double GibbsState::omega(int n, int k, int i, int j) const {
  return omega_[n][k - 1][tri_index(shape_.p[k], i, j)];
}

void GibbsState::set_omega(int n, int k, int i, int j, double w) {
  if (w <= 0) throw UsageError("omega must be positive");
  omega_[n][k - 1][tri_index(shape_.p[k], i, j)] = w;
}

void GibbsState::rebuild_psi() {
  for (int n = 0; n < N_; ++n)
    for (int k = 1; k <= shape_.K; ++k) {
      int pk = shape_.p[k], e = 0;
      psi_[n][k - 1].resize(shape_.u(k));
      for (int i = 0; i < pk; ++i)
        for (int j = i + 1; j < pk; ++j, ++e)
          psi_[n][k - 1][e] = model::edge_logit(conn_.layer(k), params_.gamma(k),
                                                lat_[n].X[k - 1], params_.C[k - 1], i, j);
    }
}

void GibbsState::check_finite() const {
  for (double c : params_.C)
    if (!std::isfinite(c)) throw NumericError("non-finite C at sweep " + std::to_string(sweep_no_));
  for (const auto& G : params_.Gamma)
    if (!G.allFinite()) throw NumericError("non-finite Gamma at sweep " + std::to_string(sweep_no_));
  for (double v : params_.nu)
    if (!std::isfinite(v)) throw NumericError("non-finite nu at sweep " + std::to_string(sweep_no_));
}

// ------------------------------------------------------------ conditionals

std::vector<double> GibbsState::row_A_logweights(int k, int i) const {
  const auto& cand = cand_[k - 1];
  const auto& supp = cand_supp_[k - 1];
  const BinMat& A = conn_.layer(k);
  int pk = shape_.p[k], pp = shape_.p[k - 1], K = shape_.K;
  double Ck = params_.C[k - 1];
  const Eigen::MatrixXd& G = params_.gamma(k);

  std::vector<uint64_t> vm(pk);
  for (int j = 0; j < pk; ++j) vm[j] = row_mask(A, j);

  std::vector<double> logw(cand.size(), 0.0);
  std::vector<uint64_t> keys;
  std::vector<double> cnt0, cnt1;
  std::vector<double> w(pp);
  for (int n : batch_) {
    const BinMat& Xk = lat_[n].X[k];
    const BinMat& Xp = lat_[n].X[k - 1];
    keys.clear();
    cnt0.clear();
    cnt1.clear();
    for (int j = 0; j < pk; ++j) {
      if (j == i) continue;
      if (k == K && !mask_flag_.empty() &&
          mask_flag_[n][tri_index(pk, std::min(i, j), std::max(i, j))])
        continue;
      uint64_t key = vm[j];
      size_t gi = 0;
      for (; gi < keys.size(); ++gi)
        if (keys[gi] == key) break;
      if (gi == keys.size()) {
        keys.push_back(key);
        cnt0.push_back(0);
        cnt1.push_back(0);
      }
      if (Xk.at(i, j))
        cnt1[gi] += 1;
      else
        cnt0[gi] += 1;
    }
    for (size_t gi = 0; gi < keys.size(); ++gi) {
      uint64_t v = keys[gi];
      for (int s = 0; s < pp; ++s) {
        double acc = 0.0;
        uint64_t m = v;
        while (m) {
          int t = std::countr_zero(m);
          m &= m - 1;
          if (Xp.at(s, t)) acc += G(s, t);
        }
        w[s] = acc;
      }
      double tot = cnt0[gi] + cnt1[gi];
      for (size_t c = 0; c < cand.size(); ++c) {
        double ps = Ck;
        for (int s : supp[c]) ps += w[s];
        logw[c] += cnt1[gi] * ps - tot * softplus(ps);
      }
    }
  }
  if (scale_ != 1.0)
    for (double& lw : logw) lw *= scale_;
  return logw;
}

void GibbsState::update_row_A(int k, int i, Rng& g) {
  std::vector<double> logw = row_A_logweights(k, i);
  int idx = rcategorical_logits(g, logw);
  const BinMat& A = conn_.layer(k);
  uint64_t oldm = row_mask(A, i), newm = cand_[k - 1][idx];
  if (newm == oldm) return;
  BinMat& Am = conn_.layer(k);
  for (int t = 0; t < Am.cols; ++t) Am.at(i, t) = (newm >> t) & 1;

  // refresh cached logits on edges incident to i, for every sample
  int pk = shape_.p[k], K = shape_.K;
  (void)K;
  double Ck = params_.C[k - 1];
  const Eigen::MatrixXd& G = params_.gamma(k);
  const auto& si = cand_supp_[k - 1][idx];
  std::vector<std::vector<int>> sj(pk);
  for (int j = 0; j < pk; ++j)
    if (j != i) sj[j] = mask_support(row_mask(Am, j));
  for (int n = 0; n < N_; ++n) {
    const BinMat& Xp = lat_[n].X[k - 1];
    for (int j = 0; j < pk; ++j) {
      if (j == i) continue;
      double ps = Ck;
      for (int s : si)
        for (int t : sj[j])
          if (Xp.at(s, t)) ps += G(s, t);
      psi_[n][k - 1][tri_index(pk, std::min(i, j), std::max(i, j))] = ps;
    }
  }
}

std::pair<double, double> GibbsState::cond_C(int k) const {
  int pk = shape_.p[k], K = shape_.K;
  double Ck = params_.C[k - 1];
  double sw = 0.0, sm = 0.0;
  for (int n : batch_) {
    const BinMat& Xk = lat_[n].X[k];
    const auto& om = omega_[n][k - 1];
    const auto& ps = psi_[n][k - 1];
    int e = 0;
    for (int i = 0; i < pk; ++i)
      for (int j = i + 1; j < pk; ++j, ++e) {
        if (k == K && !mask_flag_.empty() && mask_flag_[n][e]) continue;
        sw += om[e];
        sm += Xk.at(i, j) - 0.5 - om[e] * (ps[e] - Ck);
      }
  }
  double prec = 1.0 / cfg_.prior.s2_C + scale_ * sw;
  double var = 1.0 / prec;
  double mu = var * (cfg_.prior.mu_C / cfg_.prior.s2_C + scale_ * sm);
  return {mu, var};
}

void GibbsState::update_C(int k, Rng& g) {
  auto [mu, var] = cond_C(k);
  auto [lo, hi] = c_bounds(cfg_);
  double nc = rtruncnorm(g, mu, std::sqrt(var), lo, hi);
  double d = nc - params_.C[k - 1];
  params_.C[k - 1] = nc;
  if (d != 0.0)
    for (int n = 0; n < N_; ++n)
      for (double& ps : psi_[n][k - 1]) ps += d;
}

void GibbsState::gamma_pairs(int k, int s, int t, std::vector<GammaPair>& out) const {
  out.clear();
  const BinMat& A = conn_.layer(k);
  int pk = shape_.p[k], e = 0;
  for (int i = 0; i < pk; ++i)
    for (int j = i + 1; j < pk; ++j, ++e) {
      uint8_t m = (s == t) ? (A.at(i, s) & A.at(j, s))
                           : static_cast<uint8_t>(A.at(i, s) * A.at(j, t) + A.at(i, t) * A.at(j, s));
      if (m) out.push_back({e, i, j, m});
    }
}

std::pair<double, double> GibbsState::cond_Gamma(int k, int s, int t) const {
  bool diag = (s == t);
  int K = shape_.K;
  double cur = params_.gamma(k)(s, t);
  std::vector<GammaPair> pairs;
  gamma_pairs(k, s, t, pairs);
  double sw = 0.0, sm = 0.0;
  for (int n : batch_) {
    if (!diag && !lat_[n].X[k - 1].at(s, t)) continue;
    const BinMat& Xk = lat_[n].X[k];
    const auto& om = omega_[n][k - 1];
    const auto& ps = psi_[n][k - 1];
    for (const GammaPair& q : pairs) {
      if (k == K && !mask_flag_.empty() && mask_flag_[n][q.e]) continue;
      double kap = q.mult;
      sw += om[q.e] * kap * kap;
      sm += (Xk.at(q.i, q.j) - 0.5 - om[q.e] * (ps[q.e] - kap * cur)) * kap;
    }
  }
  double mu0 = diag ? cfg_.prior.mu_gamma : cfg_.prior.mu_delta;
  double s20 = diag ? cfg_.prior.s2_gamma : cfg_.prior.s2_delta;
  double prec = 1.0 / s20 + scale_ * sw;
  double var = 1.0 / prec;
  double mu = var * (mu0 / s20 + scale_ * sm);
  return {mu, var};
}

void GibbsState::update_Gamma(int k, int s, int t, Rng& g) {
  auto [mu, var] = cond_Gamma(k, s, t);
  auto [lo, hi] = g_bounds(cfg_, s == t);
  double nv = rtruncnorm(g, mu, std::sqrt(var), lo, hi);
  double cur = params_.gamma(k)(s, t);
  params_.gamma(k)(s, t) = params_.gamma(k)(t, s) = nv;
  double d = nv - cur;
  if (d == 0.0) return;
  std::vector<GammaPair> pairs;
  gamma_pairs(k, s, t, pairs);
  for (int n = 0; n < N_; ++n) {
    if (s != t && !lat_[n].X[k - 1].at(s, t)) continue;
    auto& ps = psi_[n][k - 1];
    for (const GammaPair& q : pairs) ps[q.e] += q.mult * d;
  }
}

std::vector<double> GibbsState::nu_alpha() const {
  std::vector<double> a(params_.nu.size(), cfg_.prior.alpha);
  for (int n : batch_) a[encode_adj(lat_[n].X[0])] += scale_;
  return a;
}

void GibbsState::update_nu(Rng& g) { params_.nu = rdirichlet(g, nu_alpha()); }

GibbsState::X0Tables GibbsState::build_x0_tables() const {
  X0Tables tab;
  int p0 = shape_.p[0], p1 = shape_.p[1], u0 = shape_.u(0), u1 = shape_.u(1);
  tab.ncodes = 1 << u0;
  const BinMat& A1 = conn_.layer(1);
  const Eigen::MatrixXd& G = params_.gamma(1);
  double C1 = params_.C[0];

  std::vector<uint64_t> vm(p1);
  for (int j = 0; j < p1; ++j) vm[j] = row_mask(A1, j);

  tab.cls.resize(u1);
  std::vector<uint64_t> keys;
  std::vector<std::pair<uint64_t, uint64_t>> pats;
  int e = 0;
  for (int i = 0; i < p1; ++i)
    for (int j = i + 1; j < p1; ++j, ++e) {
      uint64_t lo = std::min(vm[i], vm[j]), hi = std::max(vm[i], vm[j]);
      uint64_t key = (hi << 6) | lo;  // p_0 <= 4 so masks fit 6 bits
      size_t c = 0;
      for (; c < keys.size(); ++c)
        if (keys[c] == key) break;
      if (c == keys.size()) {
        keys.push_back(key);
        pats.emplace_back(lo, hi);
      }
      tab.cls[e] = static_cast<int>(c);
    }

  size_t nc = keys.size();
  tab.psi.assign(nc, std::vector<double>(tab.ncodes));
  tab.sp.assign(nc, std::vector<double>(tab.ncodes));
  std::vector<double> coeff(u0);
  for (size_t c = 0; c < nc; ++c) {
    auto [va, vb] = pats[c];
    double base = C1;
    uint64_t both = va & vb;
    while (both) {
      int s = std::countr_zero(both);
      both &= both - 1;
      base += G(s, s);
    }
    for (int eb = 0; eb < u0; ++eb) {
      auto [s, t] = tri_unindex(p0, eb);
      int m = static_cast<int>(((va >> s) & (vb >> t) & 1) + ((va >> t) & (vb >> s) & 1));
      coeff[eb] = m * G(s, t);
    }
    for (int m = 0; m < tab.ncodes; ++m) {
      double ps = base;
      for (int eb = 0; eb < u0; ++eb)
        if ((m >> (u0 - 1 - eb)) & 1) ps += coeff[eb];
      tab.psi[c][m] = ps;
      tab.sp[c][m] = softplus(ps);
    }
  }
  tab.lognu.resize(tab.ncodes);
  for (int m = 0; m < tab.ncodes; ++m) tab.lognu[m] = std::log(params_.nu[m]);
  return tab;
}

std::vector<double> GibbsState::x0_logweights_with(int n, const X0Tables& tab) const {
  int p1 = shape_.p[1];
  const BinMat& X1 = lat_[n].X[1];
  size_t nc = tab.psi.size();
  std::vector<double> c1(nc, 0.0), ct(nc, 0.0);
  bool m1 = (shape_.K == 1) && !mask_flag_.empty();
  int e = 0;
  for (int i = 0; i < p1; ++i)
    for (int j = i + 1; j < p1; ++j, ++e) {
      if (m1 && mask_flag_[n][e]) continue;
      int c = tab.cls[e];
      ct[c] += 1;
      if (X1.at(i, j)) c1[c] += 1;
    }
  std::vector<double> logw(tab.ncodes);
  for (int m = 0; m < tab.ncodes; ++m) {
    double s = tab.lognu[m];
    for (size_t c = 0; c < nc; ++c) s += c1[c] * tab.psi[c][m] - ct[c] * tab.sp[c][m];
    logw[m] = s;
  }
  return logw;
}

std::vector<double> GibbsState::x0_logweights(int n) const {
  return x0_logweights_with(n, build_x0_tables());
}

void GibbsState::update_X0_with(int n, Rng& g, const X0Tables& tab) {
  std::vector<double> logw = x0_logweights_with(n, tab);
  int m = rcategorical_logits(g, logw);
  lat_[n].X[0] = decode_adj(shape_.p[0], static_cast<uint64_t>(m));
  auto& ps = psi_[n][0];
  for (int e = 0; e < shape_.u(1); ++e) ps[e] = tab.psi[tab.cls[e]][m];
}

void GibbsState::update_X0(int n, Rng& g) { update_X0_with(n, g, build_x0_tables()); }

std::vector<GibbsState::AffList> GibbsState::build_aff_layer(int k) const {
  int pk = shape_.p[k], pk1 = shape_.p[k + 1];
  std::vector<AffList> aff(shape_.u(k));
  const BinMat& A = conn_.layer(k + 1);
  std::vector<std::vector<int>> supp(pk1);
  for (int r = 0; r < pk1; ++r) supp[r] = mask_support(row_mask(A, r));
  std::vector<std::pair<int, uint8_t>> tmp;
  int e2 = 0;
  for (int u = 0; u < pk1; ++u)
    for (int v = u + 1; v < pk1; ++v, ++e2) {
      tmp.clear();
      for (int s : supp[u])
        for (int t : supp[v]) {
          if (s == t) continue;
          int e = tri_index(pk, std::min(s, t), std::max(s, t));
          size_t q = 0;
          for (; q < tmp.size(); ++q)
            if (tmp[q].first == e) break;
          if (q == tmp.size())
            tmp.emplace_back(e, 1);
          else
            ++tmp[q].second;
        }
      for (auto [e, m] : tmp) aff[e].push_back({e2, u, v, m});
    }
  return aff;
}

double GibbsState::xk_logodds_with(int n, int k, int i, int j,
                                   const std::vector<AffList>& aff) const {
  int pk = shape_.p[k], K = shape_.K;
  int e = tri_index(pk, i, j);
  int cur = lat_[n].X[k].at(i, j);
  double lo = psi_[n][k - 1][e];
  double gij = params_.gamma(k + 1)(i, j);
  const BinMat& Xup = lat_[n].X[k + 1];
  bool mk = (k + 1 == K) && !mask_flag_.empty();
  for (const Aff& a : aff[e]) {
    if (mk && mask_flag_[n][a.e2]) continue;
    double delta = gij * a.mult;
    double base = psi_[n][k][a.e2] - cur * delta;
    lo += Xup.at(a.u, a.v) * delta - softplus(base + delta) + softplus(base);
  }
  return lo;
}

double GibbsState::xk_logodds(int n, int k, int i, int j) const {
  if (k < 1 || k >= shape_.K) throw UsageError("xk_logodds: k must be interior");
  return xk_logodds_with(n, k, i, j, build_aff_layer(k));
}

void GibbsState::update_Xk_entry_with(int n, int k, int i, int j, Rng& g,
                                      const std::vector<AffList>& aff) {
  double lo = xk_logodds_with(n, k, i, j, aff);
  int cur = lat_[n].X[k].at(i, j);
  int b = rbernoulli(g, sigmoid(lo)) ? 1 : 0;
  if (b == cur) return;
  lat_[n].X[k].at(i, j) = lat_[n].X[k].at(j, i) = static_cast<uint8_t>(b);
  int e = tri_index(shape_.p[k], i, j);
  double step = (b - cur) * params_.gamma(k + 1)(i, j);
  auto& ps = psi_[n][k];
  for (const Aff& a : aff[e]) ps[a.e2] += step * a.mult;
}

void GibbsState::update_Xk_entry(int n, int k, int i, int j, Rng& g) {
  if (k < 1 || k >= shape_.K) throw UsageError("update_Xk_entry: k must be interior");
  update_Xk_entry_with(n, k, i, j, g, build_aff_layer(k));
}

void GibbsState::update_omegas(Rng& g) {
  int K = shape_.K;
  for (int n = 0; n < N_; ++n)
    for (int k = 1; k <= K; ++k) {
      const auto& ps = psi_[n][k - 1];
      auto& om = omega_[n][k - 1];
      for (int e = 0; e < shape_.u(k); ++e) {
        if (k == K && !mask_flag_.empty() && mask_flag_[n][e]) continue;
        om[e] = pg::sample_pg1(ps[e], g);
      }
    }
}

void GibbsState::impute_masked(Rng& g) {
  if (mask_pos_.empty()) return;
  int K = shape_.K;
  for (int n = 0; n < N_; ++n)
    for (size_t t = 0; t < mask_pos_[n].size(); ++t) {
      auto [i, j] = mask_pair_[n][t];
      uint8_t b = rbernoulli(g, sigmoid(psi_[n][K - 1][mask_pos_[n][t]])) ? 1 : 0;
      lat_[n].X[K].at(i, j) = lat_[n].X[K].at(j, i) = b;
    }
}

// ------------------------------------------------------------------ sweeps

void GibbsState::run_sweep_body(bool latents_subset_only) {
  const std::vector<int>& lset = latents_subset_only ? batch_ : all_idx_;
  int M = static_cast<int>(lset.size());
  int K = shape_.K;
  auto us = static_cast<uint64_t>(sweep_no_);

  parallel_chunks(M, [&](int lo, int hi) {
    for (int t = lo; t < hi; ++t) {
      int n = lset[t];
      Rng g(seed_, TAG_OMEGA, us, static_cast<uint64_t>(n));
      for (int k = 1; k <= K; ++k) {
        const auto& ps = psi_[n][k - 1];
        auto& om = omega_[n][k - 1];
        for (int e = 0; e < shape_.u(k); ++e) {
          if (k == K && !mask_flag_.empty() && mask_flag_[n][e]) continue;
          om[e] = pg::sample_pg1(ps[e], g);
        }
      }
    }
  });

  {
    X0Tables tab = build_x0_tables();
    parallel_chunks(M, [&](int lo, int hi) {
      for (int t = lo; t < hi; ++t) {
        int n = lset[t];
        Rng g(seed_, TAG_X0, us, static_cast<uint64_t>(n));
        update_X0_with(n, g, tab);
      }
    });
  }

  if (K >= 2) {
    std::vector<std::vector<AffList>> aff(K - 1);
    for (int k = 1; k < K; ++k) aff[k - 1] = build_aff_layer(k);
    parallel_chunks(M, [&](int lo, int hi) {
      for (int t = lo; t < hi; ++t) {
        int n = lset[t];
        Rng g(seed_, TAG_XINT, us, static_cast<uint64_t>(n));
        for (int k = 1; k < K; ++k) {
          int pk = shape_.p[k];
          for (int i = 0; i < pk; ++i)
            for (int j = i + 1; j < pk; ++j) update_Xk_entry_with(n, k, i, j, g, aff[k - 1]);
        }
      }
    });
  }

  if (!mask_pos_.empty()) {
    parallel_chunks(M, [&](int lo, int hi) {
      for (int t = lo; t < hi; ++t) {
        int n = lset[t];
        if (mask_pos_[n].empty()) continue;
        Rng g(seed_, TAG_IMPUTE, us, static_cast<uint64_t>(n));
        for (size_t q = 0; q < mask_pos_[n].size(); ++q) {
          auto [i, j] = mask_pair_[n][q];
          uint8_t b = rbernoulli(g, sigmoid(psi_[n][K - 1][mask_pos_[n][q]])) ? 1 : 0;
          lat_[n].X[K].at(i, j) = lat_[n].X[K].at(j, i) = b;
        }
      }
    });
  }

  if (cfg_.freeze_params) return;

  Rng pg(seed_, TAG_PARAMS, us);
  for (int k = 1; k <= K; ++k)
    for (int i = 0; i < shape_.p[k]; ++i) update_row_A(k, i, pg);
  for (int k = 1; k <= K; ++k) update_C(k, pg);
  for (int k = 1; k <= K; ++k) {
    int d = shape_.p[k - 1];
    for (int s = 0; s < d; ++s)
      for (int t = s; t < d; ++t) update_Gamma(k, s, t, pg);
  }
  update_nu(pg);
}

void GibbsState::sweep_standard() {
  ++sweep_no_;
  set_batch_all();
  run_sweep_body(false);
}

void GibbsState::sweep_subsampling() {
  ++sweep_no_;
  int B = cfg_.batch == 0 ? N_ : cfg_.batch;
  if (B < N_) {
    Rng g(seed_, TAG_BATCH, static_cast<uint64_t>(sweep_no_));
    batch_ = sample_without_replacement(g, N_, B);
    scale_ = static_cast<double>(N_) / B;
  } else {
    set_batch_all();
  }
  run_sweep_body(cfg_.subset_latents_only);
}

std::vector<double> GibbsState::loglik_obs() const {
  int K = shape_.K, pK = shape_.p[K];
  std::vector<double> ll(N_, 0.0);
  for (int n = 0; n < N_; ++n) {
    const BinMat& X = lat_[n].X[K];
    const auto& ps = psi_[n][K - 1];
    double s = 0.0;
    int e = 0;
    for (int i = 0; i < pK; ++i)
      for (int j = i + 1; j < pK; ++j, ++e) {
        if (!mask_flag_.empty() && mask_flag_[n][e]) continue;
        s += model::log_edge(X.at(i, j), ps[e]);
      }
    ll[n] = s;
  }
  return ll;
}

std::vector<uint8_t> GibbsState::imputed_values() const {
  std::vector<uint8_t> out;
  if (mask_pos_.empty()) return out;
  int K = shape_.K;
  for (int n = 0; n < N_; ++n)
    for (const auto& [i, j] : mask_pair_[n]) out.push_back(lat_[n].X[K].at(i, j));
  return out;
}

// --------------------------------------------------------------- run_chain

ChainTrace run_chain(const std::vector<BinMat>& observed, const EdgeMask* mask,
                     const SamplerConfig& cfg, const NetworkShape& shape,
                     const ConnectionMatrices* init_conn, const ContinuousParams* init_params) {
  if (observed.empty()) throw UsageError("run_chain: dataset is empty");
  GibbsState st(shape, observed, mask, cfg, init_conn, init_params);
  int N = st.N(), K = shape.K;

  ChainTrace tr;
  tr.shape = shape;
  tr.S = cfg.S;
  tr.N = N;
  tr.seed = cfg.seed;
  tr.mask_digest = (mask && !mask->empty()) ? mask->digest() : 0;

  auto keep = [](long t, long burn, long thin) { return t > burn && (t - burn) % thin == 0; };
  auto record = [&](char phase, bool want_ll) {
    TraceRecord r;
    r.iter = st.sweep_no();
    r.phase = phase;
    r.conn = st.conn();
    r.params = st.params();
    r.x0.resize(N);
    r.xint.resize(N);
    for (int n = 0; n < N; ++n) {
      const LayeredSample& ls = st.latents()[n];
      r.x0[n] = encode_adj(ls.X[0]);
      for (int k = 1; k < K; ++k) r.xint[n].push_back(adj_to_tri_string(ls.X[k]));
    }
    r.imp = st.imputed_values();
    if (want_ll) r.loglik = st.loglik_obs();
    tr.records.push_back(std::move(r));
  };

  for (long t = 1; t <= cfg.iters_sub; ++t) {
    st.sweep_subsampling();
    st.check_finite();
    if (keep(t, cfg.burnin_sub, cfg.thin)) record('s', cfg.record_sub_loglik);
  }
  for (long t = 1; t <= cfg.iters_std; ++t) {
    st.sweep_standard();
    st.check_finite();
    if (keep(t, cfg.burnin_std, cfg.thin)) record('g', true);
  }
  return tr;
}

}  // namespace mplex::gibbs
