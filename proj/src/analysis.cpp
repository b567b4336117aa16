#include "mplex/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include "mplex/spectral.hpp"

namespace mplex::analysis {

namespace {

double quantile_sorted(const std::vector<double>& v, double p) {
  size_t n = v.size();
  if (n == 1) return v[0];
  double h = p * (n - 1);
  auto lo = static_cast<size_t>(h);
  if (lo + 1 >= n) return v[n - 1];
  double f = h - lo;
  return v[lo] + f * (v[lo + 1] - v[lo]);
}

std::pair<double, double> mean_sd(const std::vector<double>& v) {
  size_t n = v.size();
  double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
  if (n < 2) return {m, 0.0};
  double s2 = 0;
  for (double x : v) s2 += (x - m) * (x - m);
  return {m, std::sqrt(s2 / (n - 1))};
}

}  // namespace

WaicResult waic(const std::vector<std::vector<double>>& ll) {
  if (ll.empty()) throw UsageError("waic: no iterations");
  size_t T = ll.size(), N = ll[0].size();
  for (const auto& row : ll)
    if (row.size() != N) throw UsageError("waic: ragged log-likelihood matrix");
  WaicResult r;
  std::vector<double> col(T);
  for (size_t n = 0; n < N; ++n) {
    for (size_t t = 0; t < T; ++t) col[t] = ll[t][n];
    r.lppd += logsumexp(col) - std::log(static_cast<double>(T));
    if (T >= 2) {
      auto [m, sd] = mean_sd(col);
      r.p_waic += sd * sd;
    }
  }
  r.waic = -2.0 * (r.lppd - r.p_waic);
  return r;
}

std::vector<std::vector<double>> loglik_matrix(const gibbs::ChainTrace& tr, char phase) {
  std::vector<std::vector<double>> out;
  for (const auto& rec : tr.records)
    if (!rec.loglik.empty() && (phase == 0 || rec.phase == phase)) out.push_back(rec.loglik);
  return out;
}

GrResult gelman_rubin(const std::vector<std::vector<double>>& chains) {
  size_t M = chains.size();
  if (M < 2) throw UsageError("gelman_rubin: need at least 2 chains");
  size_t L = chains[0].size();
  for (const auto& c : chains)
    if (c.size() != L) throw UsageError("gelman_rubin: unequal chain lengths");
  if (L < 4) throw UsageError("gelman_rubin: chains shorter than 4");

  std::vector<double> means(M);
  double grand = 0;
  for (size_t j = 0; j < M; ++j) {
    means[j] = std::accumulate(chains[j].begin(), chains[j].end(), 0.0) / L;
    grand += means[j];
  }
  grand /= M;
  double W = 0, B = 0;
  for (size_t j = 0; j < M; ++j) {
    double s2 = 0;
    for (double x : chains[j]) s2 += (x - means[j]) * (x - means[j]);
    W += s2 / (L - 1);
    B += (means[j] - grand) * (means[j] - grand);
  }
  W /= M;
  B *= static_cast<double>(L) / (M - 1);
  if (W <= 0.0) return {1.0, true};
  double vplus = (L - 1.0) / L * W + B / L;
  return {std::sqrt(vplus / W), false};
}

GewekeResult geweke(const std::vector<double>& trace, double first_frac, double last_frac) {
  size_t T = trace.size();
  if (T < 20) throw UsageError("geweke: trace shorter than 20");
  if (!(first_frac > 0 && last_frac > 0 && first_frac + last_frac <= 1.0))
    throw UsageError("geweke: bad window fractions");
  auto nf = static_cast<size_t>(first_frac * T);
  auto nl = static_cast<size_t>(last_frac * T);

  // batch-means variance of a window mean; from_end anchors the batches at
  // the window's tail so the two windows stay maximally separated
  auto window = [&](size_t beg, size_t n, bool from_end) {
    size_t nb = std::min<size_t>(10, n);
    size_t b = n / nb;
    size_t used = nb * b;
    size_t start = from_end ? beg + n - used : beg;
    double m = 0;
    std::vector<double> bm(nb, 0.0);
    for (size_t i = 0; i < used; ++i) {
      m += trace[start + i];
      bm[i / b] += trace[start + i];
    }
    m /= used;
    double s2 = 0;
    for (double& x : bm) {
      x /= b;
      s2 += (x - m) * (x - m);
    }
    s2 /= (nb - 1);
    return std::pair<double, double>{m, s2 / nb};
  };

  auto [mf, vf] = window(0, nf, false);
  auto [ml, vl] = window(T - nl, nl, true);
  if (vf + vl <= 0.0) return {0.0, true};
  return {(mf - ml) / std::sqrt(vf + vl), false};
}

std::string ParamRef::name() const {
  if (is_C) return "C_" + std::to_string(k);
  return "Gamma_" + std::to_string(k) + "[" + std::to_string(s) + "," + std::to_string(t) + "]";
}

std::vector<ParamRef> param_list(const NetworkShape& shape) {
  std::vector<ParamRef> out;
  for (int k = 1; k <= shape.K; ++k) out.push_back({k, 0, 0, true});
  for (int k = 1; k <= shape.K; ++k) {
    int d = shape.p[k - 1];
    for (int s = 0; s < d; ++s)
      for (int t = s; t < d; ++t) out.push_back({k, s, t, false});
  }
  return out;
}

std::vector<double> param_series(const gibbs::ChainTrace& tr, const ParamRef& ref) {
  std::vector<double> v;
  v.reserve(tr.records.size());
  for (const auto& rec : tr.records)
    v.push_back(ref.is_C ? rec.params.C[ref.k - 1] : rec.params.gamma(ref.k)(ref.s, ref.t));
  return v;
}

std::vector<ParamSummary> posterior_summaries(const gibbs::ChainTrace& tr) {
  if (tr.records.empty()) throw UsageError("posterior_summaries: empty trace");
  std::vector<ParamSummary> out;
  for (const ParamRef& ref : param_list(tr.shape)) {
    std::vector<double> v = param_series(tr, ref);
    ParamSummary s;
    s.name = ref.name();
    std::tie(s.mean, s.sd) = mean_sd(v);
    std::sort(v.begin(), v.end());
    s.q05 = quantile_sorted(v, 0.05);
    s.q50 = quantile_sorted(v, 0.50);
    s.q95 = quantile_sorted(v, 0.95);
    out.push_back(std::move(s));
  }
  return out;
}

Eigen::MatrixXd latent_means(const gibbs::ChainTrace& tr, int k) {
  if (tr.records.empty()) throw UsageError("latent_means: empty trace");
  if (k < 0 || k >= tr.shape.K) throw UsageError("latent_means: layer must be latent");
  int N = tr.N, u = tr.shape.u(k);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(N, u);
  for (const auto& rec : tr.records) {
    for (int n = 0; n < N; ++n) {
      if (k == 0) {
        uint64_t code = rec.x0[n];
        for (int e = 0; e < u; ++e) acc(n, e) += static_cast<double>((code >> (u - 1 - e)) & 1);
      } else {
        const std::string& s = rec.xint[n][k - 1];
        for (int e = 0; e < u; ++e) acc(n, e) += (s[e] == '1');
      }
    }
  }
  return acc / static_cast<double>(tr.records.size());
}

namespace {

// reindex an adjacency: out(s,t) = in(perm[s], perm[t])
BinMat permute_adj(const BinMat& X, const std::vector<int>& perm) {
  int p = X.rows;
  BinMat out(p, p);
  for (int s = 0; s < p; ++s)
    for (int t = 0; t < p; ++t) out.at(s, t) = X.at(perm[s], perm[t]);
  return out;
}

void apply_perm(gibbs::TraceRecord& rec, const NetworkShape& shape, int k,
                const std::vector<int>& perm) {
  // columns of A_{k+1}
  BinMat& A = rec.conn.layer(k + 1);
  BinMat na(A.rows, A.cols);
  for (int r = 0; r < A.rows; ++r)
    for (int s = 0; s < A.cols; ++s) na.at(r, s) = A.at(r, perm[s]);
  A = std::move(na);
  // Gamma_{k+1} rows and columns (layer-k node indices)
  Eigen::MatrixXd& G = rec.params.gamma(k + 1);
  Eigen::MatrixXd ng(G.rows(), G.cols());
  for (int s = 0; s < G.rows(); ++s)
    for (int t = 0; t < G.cols(); ++t) ng(s, t) = G(perm[s], perm[t]);
  G = std::move(ng);
  if (k >= 1) {
    // rows of A_k and the layer-k latent adjacencies
    BinMat& Ak = rec.conn.layer(k);
    BinMat nk(Ak.rows, Ak.cols);
    for (int s = 0; s < Ak.rows; ++s)
      for (int t = 0; t < Ak.cols; ++t) nk.at(s, t) = Ak.at(perm[s], t);
    Ak = std::move(nk);
    int pk = shape.p[k];
    for (auto& xs : rec.xint) {
      BinMat X = adj_from_tri_string(pk, xs[k - 1]);
      xs[k - 1] = adj_to_tri_string(permute_adj(X, perm));
    }
  } else {
    // layer-0 node relabeling: remap configuration codes and nu
    int p0 = shape.p[0], u0 = shape.u(0);
    size_t M = 1ull << u0;
    std::vector<uint64_t> cm(M);
    for (size_t m = 0; m < M; ++m)
      cm[m] = encode_adj(permute_adj(decode_adj(p0, m), perm));
    for (uint64_t& c : rec.x0) c = cm[c];
    std::vector<double> nn(M);
    for (size_t m = 0; m < M; ++m) nn[cm[m]] = rec.params.nu[m];
    rec.params.nu = std::move(nn);
  }
}

}  // namespace

gibbs::ChainTrace relabel(const gibbs::ChainTrace& tr, const ConnectionMatrices* reference) {
  if (tr.records.empty()) throw UsageError("relabel: empty trace");
  const ConnectionMatrices ref = reference ? *reference : tr.records.front().conn;
  if (static_cast<int>(ref.A.size()) != tr.shape.K) throw UsageError("relabel: reference shape mismatch");

  gibbs::ChainTrace out = tr;
  for (auto& rec : out.records) {
    for (int k = tr.shape.K - 1; k >= 0; --k) {
      const BinMat& A = rec.conn.layer(k + 1);
      const BinMat& R = ref.layer(k + 1);
      if (A.rows != R.rows || A.cols != R.cols) throw UsageError("relabel: reference shape mismatch");
      int rows = A.rows, cols = A.cols;
      // scaled-Hamming cost with an identity bonus: strictly smaller total
      // Hamming always wins; ties resolve toward the identity permutation
      Eigen::MatrixXd cost(cols, cols);
      for (int c = 0; c < cols; ++c)
        for (int c2 = 0; c2 < cols; ++c2) {
          int h = 0;
          for (int r = 0; r < rows; ++r) h += A.at(r, c) != R.at(r, c2);
          cost(c, c2) = static_cast<double>((rows + 1) * h - (c == c2 ? 1 : 0));
        }
      std::vector<int> perm = spectral::min_cost_assignment(cost);
      bool ident = true;
      for (int s = 0; s < cols; ++s)
        if (perm[s] != s) {
          ident = false;
          break;
        }
      if (!ident) apply_perm(rec, tr.shape, k, perm);
    }
  }
  return out;
}

ConnectionMatrices posterior_mode_A(const gibbs::ChainTrace& tr) {
  if (tr.records.empty()) throw UsageError("posterior_mode_A: empty trace");
  std::unordered_map<std::string, std::pair<int, size_t>> seen;
  for (size_t t = 0; t < tr.records.size(); ++t) {
    std::string key;
    for (const BinMat& A : tr.records[t].conn.A) {
      for (int i = 0; i < A.rows; ++i) key += A.row_string(i);
      key += '|';
    }
    auto it = seen.find(key);
    if (it == seen.end())
      seen.emplace(std::move(key), std::make_pair(1, t));
    else
      ++it->second.first;
  }
  int best = -1;
  size_t arg = 0;
  for (const auto& [key, v] : seen)
    if (v.first > best || (v.first == best && v.second < arg)) {
      best = v.first;
      arg = v.second;
    }
  return tr.records[arg].conn;
}

ClusterAssignment cluster_individuals(const Eigen::MatrixXd& xbars,
                                      const std::vector<double>* thresholds) {
  int N = static_cast<int>(xbars.rows()), L = static_cast<int>(xbars.cols());
  if (L < 1) throw UsageError("cluster_individuals: no entries selected");
  if (L > 63) throw UsageError("cluster_individuals: too many entries for binary codes");
  ClusterAssignment out;
  if (thresholds) {
    if (static_cast<int>(thresholds->size()) != L)
      throw UsageError("cluster_individuals: threshold count mismatch");
    out.thresholds = *thresholds;
  } else {
    out.thresholds.resize(L);
    std::vector<double> col(N);
    for (int l = 0; l < L; ++l) {
      for (int n = 0; n < N; ++n) col[n] = xbars(n, l);
      std::sort(col.begin(), col.end());
      out.thresholds[l] = quantile_sorted(col, 0.5);
    }
  }
  out.code.resize(N, 0);
  for (int n = 0; n < N; ++n)
    for (int l = 0; l < L; ++l)
      if (xbars(n, l) > out.thresholds[l]) out.code[n] |= 1ull << l;
  return out;
}

std::vector<int> active_entries(const Eigen::MatrixXd& xbars, double lo, double hi) {
  std::vector<int> out;
  for (int l = 0; l < xbars.cols(); ++l) {
    double m = xbars.col(l).mean();
    if (m > lo && m < hi) out.push_back(l);
  }
  return out;
}

std::vector<double> predict_missing(const gibbs::ChainTrace& tr, const gibbs::EdgeMask& mask) {
  if (tr.mask_digest != mask.digest()) throw UsageError("predict_missing: trace/mask mismatch");
  int total = mask.total();
  std::vector<double> acc(total, 0.0);
  long cnt = 0;
  for (const auto& rec : tr.records) {
    if (static_cast<int>(rec.imp.size()) != total)
      throw UsageError("predict_missing: imputation length mismatch");
    for (int e = 0; e < total; ++e) acc[e] += rec.imp[e];
    ++cnt;
  }
  if (cnt == 0) throw UsageError("predict_missing: empty trace");
  for (double& v : acc) v /= cnt;
  return acc;
}

double auc(const std::vector<int>& labels, const std::vector<double>& scores) {
  size_t n = labels.size();
  if (scores.size() != n || n == 0) throw UsageError("auc: label/score size mismatch");
  long n1 = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw UsageError("auc: labels must be 0/1");
    n1 += l;
  }
  long n0 = static_cast<long>(n) - n1;
  if (n1 == 0 || n0 == 0) throw UsageError("auc: need both classes");
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  double rank_sum_pos = 0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
    double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t t = i; t < j; ++t)
      if (labels[idx[t]] == 1) rank_sum_pos += avg_rank;
    i = j;
  }
  double U = rank_sum_pos - static_cast<double>(n1) * (n1 + 1) / 2.0;
  return U / (static_cast<double>(n1) * static_cast<double>(n0));
}

CommunityMetrics community_metrics(const std::vector<int>& pred, const std::vector<int>& truth) {
  size_t n = pred.size();
  if (truth.size() != n || n == 0) throw UsageError("community_metrics: size mismatch");
  std::map<int, int> pm, tm;
  for (int v : pred)
    if (!pm.count(v)) pm[v] = static_cast<int>(pm.size());
  for (int v : truth)
    if (!tm.count(v)) tm[v] = static_cast<int>(tm.size());
  int r = static_cast<int>(pm.size()), c = static_cast<int>(tm.size());
  Eigen::MatrixXd cont = Eigen::MatrixXd::Zero(r, c);
  for (size_t i = 0; i < n; ++i) cont(pm[pred[i]], tm[truth[i]]) += 1.0;

  Eigen::VectorXd rp = cont.rowwise().sum() / n, cp = cont.colwise().sum().transpose() / n;
  double I = 0, H1 = 0, H2 = 0;
  for (int i = 0; i < r; ++i)
    if (rp(i) > 0) H1 -= rp(i) * std::log(rp(i));
  for (int j = 0; j < c; ++j)
    if (cp(j) > 0) H2 -= cp(j) * std::log(cp(j));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) {
      double pij = cont(i, j) / n;
      if (pij > 0) I += pij * std::log(pij / (rp(i) * cp(j)));
    }
  CommunityMetrics out;
  out.nmi = (H1 + H2 <= 0.0) ? 1.0 : 2.0 * I / (H1 + H2);

  // accuracy maximized over injective label matchings (exact assignment)
  bool flip = r < c;
  const Eigen::MatrixXd& M = cont;
  Eigen::MatrixXd cost = flip ? Eigen::MatrixXd(-M.transpose()) : Eigen::MatrixXd(-M);
  std::vector<int> pick = spectral::min_cost_assignment(cost);
  double matched = 0;
  for (size_t s = 0; s < pick.size(); ++s)
    matched += flip ? cont(static_cast<int>(s), pick[s]) : cont(pick[s], static_cast<int>(s));
  out.accuracy = matched / n;
  return out;
}

int hamming_best_perm(const BinMat& A, const BinMat& ref, std::vector<int>* perm_out) {
  if (A.rows != ref.rows || A.cols != ref.cols)
    throw UsageError("hamming_best_perm: dimension mismatch");
  int rows = A.rows, cols = A.cols;
  Eigen::MatrixXd cost(cols, cols);
  for (int c = 0; c < cols; ++c)
    for (int c2 = 0; c2 < cols; ++c2) {
      int h = 0;
      for (int r = 0; r < rows; ++r) h += A.at(r, c) != ref.at(r, c2);
      cost(c, c2) = h;
    }
  std::vector<int> perm = spectral::min_cost_assignment(cost);
  int total = 0;
  for (int s = 0; s < cols; ++s) total += static_cast<int>(cost(perm[s], s));
  if (perm_out) *perm_out = perm;
  return total;
}

}  // namespace mplex::analysis
