#include "mplex.h"

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <json.hpp>

#include "mplex/analysis.hpp"
#include "mplex/gibbs.hpp"
#include "mplex/ident.hpp"
#include "mplex/io.hpp"
#include "mplex/model.hpp"
#include "mplex/spectral.hpp"

using json = nlohmann::json;
using namespace mplex;

struct mplex_dataset {
  io::Dataset d;
};
struct mplex_mask {
  gibbs::EdgeMask m;
};
struct mplex_trace {
  gibbs::ChainTrace t;
};

namespace {

thread_local std::string g_err;

template <typename F>
int guarded(F&& f) {
  try {
    f();
    g_err.clear();
    return MPLEX_OK;
  } catch (const NumericError& e) {
    g_err = e.what();
    return MPLEX_ERR_NUMERIC;
  } catch (const UsageError& e) {
    g_err = e.what();
    return MPLEX_ERR_USAGE;
  } catch (const std::exception& e) {
    g_err = e.what();
    return MPLEX_ERR_USAGE;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) throw UsageError(what);
}

json parse_config(const char* config_json) {
  require(config_json != nullptr, "config: null pointer");
  json j = json::parse(config_json, nullptr, false);
  if (j.is_discarded()) throw UsageError("config: invalid JSON");
  if (!j.is_object()) throw UsageError("config: expected a JSON object");
  return j;
}

// ---------------------------------------------------------------- sampler keys

// shared fit/select sampler settings; fills the resolved config as it reads
gibbs::SamplerConfig read_sampler_keys(io::ConfigReader& cfg, json& rc) {
  gibbs::SamplerConfig sc;
  sc.S = cfg.get_or<int>("S", 2);
  sc.prior.mu_C = cfg.get_or<double>("mu_C", 0.0);
  sc.prior.s2_C = cfg.get_or<double>("s2_C", 1.0);
  sc.prior.mu_gamma = cfg.get_or<double>("mu_gamma", 0.0);
  sc.prior.s2_gamma = cfg.get_or<double>("s2_gamma", 1.0);
  sc.prior.mu_delta = cfg.get_or<double>("mu_delta", 0.0);
  sc.prior.s2_delta = cfg.get_or<double>("s2_delta", 1.0);
  sc.prior.alpha = cfg.get_or<double>("alpha", 1.0);
  sc.batch = cfg.get_or<int>("batch", 0);
  sc.iters_sub = cfg.get_or<long>("iters_sub", 0);
  sc.burnin_sub = cfg.get_or<long>("burnin_sub", 0);
  sc.iters_std = cfg.get_or<long>("iters_std", 1000);
  sc.burnin_std = cfg.get_or<long>("burnin_std", 200);
  sc.thin = cfg.get_or<long>("thin", 1);
  sc.seed = cfg.get<uint64_t>("seed");
  sc.subset_latents_only = cfg.get_or<bool>("subset_latents_only", false);
  sc.record_sub_loglik = cfg.get_or<bool>("record_sub_loglik", false);
  sc.freeze_params = cfg.get_or<bool>("freeze_params", false);

  // truncation keys are kept only when given (defaults are unbounded)
  static const char* tkeys[] = {"C_lo", "C_hi", "gamma_lo", "gamma_hi", "delta_lo", "delta_hi"};
  bool any_trunc = false;
  for (const char* t : tkeys) any_trunc = any_trunc || cfg.has(t);
  if (any_trunc) {
    TruncationBounds tb;
    if (cfg.has("C_lo")) rc["C_lo"] = tb.C_lo = cfg.get<double>("C_lo");
    if (cfg.has("C_hi")) rc["C_hi"] = tb.C_hi = cfg.get<double>("C_hi");
    if (cfg.has("gamma_lo")) rc["gamma_lo"] = tb.gamma_lo = cfg.get<double>("gamma_lo");
    if (cfg.has("gamma_hi")) rc["gamma_hi"] = tb.gamma_hi = cfg.get<double>("gamma_hi");
    if (cfg.has("delta_lo")) rc["delta_lo"] = tb.delta_lo = cfg.get<double>("delta_lo");
    if (cfg.has("delta_hi")) rc["delta_hi"] = tb.delta_hi = cfg.get<double>("delta_hi");
    sc.trunc = tb;
  }

  rc["S"] = sc.S;
  rc["mu_C"] = sc.prior.mu_C;
  rc["s2_C"] = sc.prior.s2_C;
  rc["mu_gamma"] = sc.prior.mu_gamma;
  rc["s2_gamma"] = sc.prior.s2_gamma;
  rc["mu_delta"] = sc.prior.mu_delta;
  rc["s2_delta"] = sc.prior.s2_delta;
  rc["alpha"] = sc.prior.alpha;
  rc["batch"] = sc.batch;
  rc["iters_sub"] = sc.iters_sub;
  rc["burnin_sub"] = sc.burnin_sub;
  rc["iters_std"] = sc.iters_std;
  rc["burnin_std"] = sc.burnin_std;
  rc["thin"] = sc.thin;
  rc["seed"] = sc.seed;
  rc["subset_latents_only"] = sc.subset_latents_only;
  rc["record_sub_loglik"] = sc.record_sub_loglik;
  rc["freeze_params"] = sc.freeze_params;
  return sc;
}

json conn_rows(const ConnectionMatrices& conn) {
  json out = json::array();
  for (const BinMat& a : conn.A) {
    json rows = json::array();
    for (int i = 0; i < a.rows; ++i) rows.push_back(a.row_string(i));
    out.push_back(rows);
  }
  return out;
}

gibbs::ChainTrace phase_view(const gibbs::ChainTrace& tr, char ph) {
  gibbs::ChainTrace out = tr;
  out.records.clear();
  for (const auto& r : tr.records)
    if (r.phase == ph) out.records.push_back(r);
  return out;
}

// ---------------------------------------------------------------- simulate

json cmd_simulate(const json& raw) {
  io::ConfigReader cfg(raw);
  json rc;
  std::string preset = cfg.get_or<std::string>("preset", "");
  if (!preset.empty()) rc["preset"] = preset;

  std::vector<int> p;
  int S = 2, N = 0;
  bool hsbm = false;
  if (preset == "sim-small") {
    p = cfg.get_or<std::vector<int>>("p", {3, 6, 16});
    S = cfg.get_or<int>("S", 2);
    N = cfg.get_or<int>("N", 300);
  } else if (preset == "hsbm27") {
    p = cfg.get_or<std::vector<int>>("p", {3, 9, 27});
    S = cfg.get_or<int>("S", 1);
    N = cfg.get_or<int>("N", 50);
    hsbm = true;
    if (p != std::vector<int>{3, 9, 27}) throw UsageError("simulate: hsbm27 is a fixed design");
  } else if (preset.empty()) {
    p = cfg.get<std::vector<int>>("p");
    S = cfg.get_or<int>("S", 2);
    N = cfg.get<int>("N");
  } else {
    throw UsageError("simulate: unknown preset \"" + preset + "\"");
  }
  if (N < 0) throw UsageError("simulate: N must be >= 0");
  uint64_t seed = cfg.get<uint64_t>("seed");
  std::string out_data = cfg.get<std::string>("out_data");
  std::string out_truth = cfg.get_or<std::string>("out_truth", "");
  std::string truth_in = cfg.get_or<std::string>("truth_in", "");
  cfg.finish();

  rc["p"] = p;
  rc["S"] = S;
  rc["N"] = N;
  rc["seed"] = seed;
  rc["out_data"] = out_data;
  if (!out_truth.empty()) rc["out_truth"] = out_truth;
  if (!truth_in.empty()) rc["truth_in"] = truth_in;

  NetworkShape shape(p);
  shape.validate();

  io::TruthFile tf;
  std::vector<BinMat> observed;
  if (hsbm) {
    model::HsbmSpec spec;
    model::HsbmData hd = model::generate_hsbm(spec, N, seed);
    observed = std::move(hd.X);
    tf.shape = shape;
    tf.S = S;
    BinMat A1(9, 3), A2(27, 9);
    for (int i = 0; i < 27; ++i) {
      A2.at(i, hd.labels[1][i]) = 1;
      A1.at(hd.labels[1][i], hd.labels[0][i]) = 1;
    }
    tf.conn.A = {A1, A2};
    tf.params.nu.assign(1ull << shape.u(0), 1.0 / static_cast<double>(1ull << shape.u(0)));
    tf.params.C = {0.0, 0.0};
    tf.params.Gamma = {Eigen::MatrixXd::Ones(3, 3), Eigen::MatrixXd::Ones(9, 9)};
    json prob = json::array();
    for (int i = 0; i < 27; ++i) {
      json row = json::array();
      for (int j = 0; j < 27; ++j) row.push_back(hd.prob(i, j));
      prob.push_back(row);
    }
    tf.extra["generator"] = "hsbm";
    tf.extra["params_placeholder"] = true;
    tf.extra["prob"] = prob;
    tf.extra["labels_coarse"] = hd.labels[0];
    tf.extra["labels_leaf"] = hd.labels[1];
  } else {
    if (!truth_in.empty()) {
      io::TruthFile src = io::load_truth(truth_in);
      if (src.shape.p != p) throw UsageError("simulate: truth_in shape differs from config p");
      tf = std::move(src);
      tf.extra["generator"] = "file";
    } else {
      auto [conn, params] = model::sim_truth(shape, S);
      tf.shape = shape;
      tf.S = S;
      tf.conn = std::move(conn);
      tf.params = std::move(params);
      tf.extra["generator"] = "builtin";
    }
    std::vector<LayeredSample> draws = model::simulate(shape, tf.conn, tf.params, N, seed);
    observed.reserve(draws.size());
    for (auto& s : draws) observed.push_back(std::move(s.X.back()));
  }

  io::save_dataset(out_data, observed, p.back());
  if (!out_truth.empty()) {
    tf.extra["config"] = rc;
    io::save_truth(out_truth, tf);
  }

  json res;
  res["command"] = "simulate";
  res["config"] = rc;
  res["p_K"] = p.back();
  res["N"] = N;
  res["out_data"] = out_data;
  res["out_truth"] = out_truth.empty() ? json() : json(out_truth);
  return res;
}

// ---------------------------------------------------------------- fit

json cmd_fit(const json& raw) {
  io::ConfigReader cfg(raw);
  json rc;
  std::string data_path = cfg.get<std::string>("data");
  std::string mask_path = cfg.get_or<std::string>("mask", "");
  std::vector<int> p = cfg.get<std::vector<int>>("p");
  gibbs::SamplerConfig sc = read_sampler_keys(cfg, rc);
  std::string init = cfg.get_or<std::string>("init", "spectral");
  std::string init_conn_path = cfg.get_or<std::string>("init_conn", "");
  std::string init_truth_path = cfg.get_or<std::string>("init_truth", "");
  std::string out_trace = cfg.get<std::string>("out_trace");
  std::string out_summary = cfg.get_or<std::string>("out_summary", "");
  cfg.finish();

  rc["data"] = data_path;
  if (!mask_path.empty()) rc["mask"] = mask_path;
  rc["p"] = p;
  rc["init"] = init;
  if (!init_conn_path.empty()) rc["init_conn"] = init_conn_path;
  if (!init_truth_path.empty()) rc["init_truth"] = init_truth_path;
  rc["out_trace"] = out_trace;
  if (!out_summary.empty()) rc["out_summary"] = out_summary;

  if (init != "spectral" && init != "prior")
    throw UsageError("fit: init must be \"spectral\" or \"prior\"");

  NetworkShape shape(p);
  shape.validate();
  io::Dataset ds = io::load_dataset(data_path);
  if (ds.pK != p.back()) throw UsageError("fit: dataset has p_K=" + std::to_string(ds.pK) +
                                          ", config expects " + std::to_string(p.back()));
  int N = static_cast<int>(ds.samples.size());
  sc.validate(N);

  gibbs::EdgeMask mask;
  bool have_mask = false;
  if (!mask_path.empty()) {
    mask = io::load_mask(mask_path);
    if (mask.pK != ds.pK || mask.N != N) throw UsageError("fit: mask does not match dataset");
    have_mask = !mask.empty();
  }

  ConnectionMatrices init_conn;
  ContinuousParams init_params;
  const ConnectionMatrices* icp = nullptr;
  const ContinuousParams* ipp = nullptr;
  spectral::InitDiagnostics diag;
  bool have_diag = false;
  if (!init_truth_path.empty()) {
    io::TruthFile t = io::load_truth(init_truth_path);
    if (t.shape.p != p) throw UsageError("fit: init_truth shape differs from config p");
    init_conn = std::move(t.conn);
    init_params = std::move(t.params);
    icp = &init_conn;
    ipp = &init_params;
  } else if (!init_conn_path.empty()) {
    io::ConnFile c = io::load_conn(init_conn_path);
    if (c.shape.p != p) throw UsageError("fit: init_conn shape differs from config p");
    init_conn = std::move(c.conn);
    icp = &init_conn;
  } else if (init == "spectral") {
    init_conn = spectral::multilayer_init(ds.samples, shape, sc.S, &diag, sc.seed);
    icp = &init_conn;
    have_diag = true;
  }

  auto t0 = std::chrono::steady_clock::now();
  gibbs::ChainTrace tr =
      gibbs::run_chain(ds.samples, have_mask ? &mask : nullptr, sc, shape, icp, ipp);
  double runtime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  tr.config_json = rc.dump();
  io::save_trace(out_trace, tr);

  gibbs::ChainTrace rl = analysis::relabel(tr);
  long n_std = 0, n_sub = 0;
  for (const auto& r : rl.records) (r.phase == 'g' ? n_std : n_sub)++;
  gibbs::ChainTrace dtr = n_std > 0 ? phase_view(rl, 'g') : rl;

  json params = json::array();
  if (!dtr.records.empty()) {
    std::vector<analysis::ParamSummary> sums = analysis::posterior_summaries(dtr);
    std::vector<analysis::ParamRef> refs = analysis::param_list(shape);
    for (size_t q = 0; q < refs.size(); ++q) {
      std::vector<double> series = analysis::param_series(dtr, refs[q]);
      json pj;
      pj["name"] = sums[q].name;
      pj["mean"] = sums[q].mean;
      pj["sd"] = sums[q].sd;
      pj["q05"] = sums[q].q05;
      pj["q50"] = sums[q].q50;
      pj["q95"] = sums[q].q95;
      size_t half = series.size() / 2;
      if (half >= 4) {
        std::vector<std::vector<double>> halves = {
            {series.begin(), series.begin() + half}, {series.end() - half, series.end()}};
        analysis::GrResult gr = analysis::gelman_rubin(halves);
        pj["rhat_split"] = gr.degenerate ? json() : json(gr.rhat);
      } else {
        pj["rhat_split"] = json();
      }
      if (series.size() >= 20) {
        analysis::GewekeResult gw = analysis::geweke(series);
        pj["geweke_z"] = gw.degenerate ? json() : json(gw.z);
      } else {
        pj["geweke_z"] = json();
      }
      params.push_back(pj);
    }
  }

  json waic_j;
  {
    std::vector<std::vector<double>> ll = analysis::loglik_matrix(tr, 'g');
    if (ll.empty() && sc.record_sub_loglik) ll = analysis::loglik_matrix(tr, 's');
    if (!ll.empty()) {
      analysis::WaicResult w = analysis::waic(ll);
      waic_j = {{"waic", w.waic}, {"lppd", w.lppd}, {"p_waic", w.p_waic}};
    }
  }

  json res;
  res["format"] = "mpx-summary-v1";
  res["command"] = "fit";
  res["config"] = rc;
  res["N"] = N;
  res["p"] = p;
  res["n_records"] = tr.records.size();
  res["n_std"] = n_std;
  res["n_sub"] = n_sub;
  res["n_masked"] = have_mask ? mask.total() : 0;
  res["runtime_sec"] = runtime;
  res["params"] = params;
  res["waic"] = waic_j;
  if (!rl.records.empty()) res["mode_A"] = conn_rows(analysis::posterior_mode_A(rl));
  if (have_diag) res["spectral_max_assign_dist"] = diag.max_assign_dist;
  if (!out_summary.empty()) {
    // summary files must be byte-identical across reruns; wall time is not
    json file_res = res;
    file_res.erase("runtime_sec");
    io::write_json_file(out_summary, file_res);
  }
  return res;
}

// ---------------------------------------------------------------- select

json cmd_select(const json& raw) {
  io::ConfigReader cfg(raw);
  json rc;
  std::string data_path = cfg.get<std::string>("data");
  std::vector<int> p0_grid = cfg.get_or<std::vector<int>>("p0_grid", {2, 3, 4});
  int p1_max = cfg.get_or<int>("p1_max", 10);
  gibbs::SamplerConfig base = read_sampler_keys(cfg, rc);
  std::string init = cfg.get_or<std::string>("init", "spectral");
  std::string out_table = cfg.get_or<std::string>("out_table", "");
  cfg.finish();

  rc["data"] = data_path;
  rc["p0_grid"] = p0_grid;
  rc["p1_max"] = p1_max;
  rc["init"] = init;
  if (!out_table.empty()) rc["out_table"] = out_table;
  if (init != "spectral" && init != "prior")
    throw UsageError("select: init must be \"spectral\" or \"prior\"");

  io::Dataset ds = io::load_dataset(data_path);
  int N = static_cast<int>(ds.samples.size());
  int pK = ds.pK;

  json table = json::array();
  double best = kInf;
  json argmin;
  for (int p0 : p0_grid) {
    if (p0 < 2) throw UsageError("select: p0_grid entries must be >= 2");
    for (int p1 = 2 * p0; p1 <= std::min(p1_max, pK / 2); ++p1) {
      json row;
      row["p0"] = p0;
      row["p1"] = p1;
      try {
        NetworkShape shape({p0, p1, pK});
        gibbs::SamplerConfig sc = base;
        sc.seed = splitmix64(base.seed ^ (static_cast<uint64_t>(p0) * 1000 + p1));
        sc.validate(N);
        ConnectionMatrices ic;
        const ConnectionMatrices* icp = nullptr;
        row["init"] = init;
        if (init == "spectral") {
          // mis-specified widths can defeat the spectral pipeline; fall back
          // to a prior draw so every cell still yields a comparable WAIC
          try {
            ic = spectral::multilayer_init(ds.samples, shape, sc.S, nullptr, sc.seed);
            icp = &ic;
          } catch (const std::exception&) {
            row["init"] = "prior-fallback";
          }
        }
        gibbs::ChainTrace tr = gibbs::run_chain(ds.samples, nullptr, sc, shape, icp);
        std::vector<std::vector<double>> ll = analysis::loglik_matrix(tr, 'g');
        if (ll.empty() && sc.record_sub_loglik) ll = analysis::loglik_matrix(tr, 's');
        if (ll.empty()) throw UsageError("select: no recorded log-likelihood");
        analysis::WaicResult w = analysis::waic(ll);
        row["waic"] = w.waic;
        row["lppd"] = w.lppd;
        row["p_waic"] = w.p_waic;
        row["error"] = json();
        if (w.waic < best) {
          best = w.waic;
          argmin = {{"p0", p0}, {"p1", p1}};
        }
      } catch (const std::exception& e) {
        row["error"] = std::string(e.what());
      }
      table.push_back(row);
    }
  }

  json res;
  res["command"] = "select";
  res["config"] = rc;
  res["p_K"] = pK;
  res["N"] = N;
  res["table"] = table;
  res["argmin"] = argmin;
  if (table.empty()) res["warning"] = "empty grid: no (p0, p1) satisfies the width constraints";
  if (!out_table.empty()) io::write_json_file(out_table, res);
  return res;
}

// ---------------------------------------------------------------- identify

json md_report_json(const ident::MdReport& r) {
  json out;
  out["in_class"] = r.in_class;
  if (r.bad_diag >= 0) out["bad_diag"] = r.bad_diag;
  if (!r.s1.empty() || !r.s2.empty()) {
    json s1 = json::array(), s2 = json::array();
    for (auto [a, b] : r.s1) s1.push_back({a, b});
    for (auto [a, b] : r.s2) s2.push_back({a, b});
    out["collision"] = {{"s1", s1}, {"s2", s2}};
  }
  return out;
}

json cmd_identify(const json& raw) {
  io::ConfigReader cfg(raw);
  json rc;
  std::string conn_path = cfg.get<std::string>("conn");
  int S = cfg.get_or<int>("S", 2);
  uint64_t node_cap = cfg.get_or<uint64_t>("node_cap", 1ull << 21);
  bool shortcut = cfg.get_or<bool>("shortcut", true);
  std::string out = cfg.get_or<std::string>("out", "");
  cfg.finish();
  rc["conn"] = conn_path;
  rc["S"] = S;
  rc["node_cap"] = node_cap;
  rc["shortcut"] = shortcut;
  if (!out.empty()) rc["out"] = out;

  io::ConnFile cf = io::load_conn(conn_path);
  const ConnectionMatrices& conn = cf.conn;

  json layers = json::array();
  for (int k = 1; k <= cf.shape.K; ++k) {
    const BinMat& a = conn.layer(k);
    json lj;
    lj["k"] = k;
    lj["rows"] = a.rows;
    lj["cols"] = a.cols;
    // the distinct-fingerprint test applies to square unit-diagonal blocks
    lj["Md"] = (a.rows == a.cols && a.rows <= 6) ? md_report_json(ident::in_class_Md(a)) : json();
    lj["A21"] = ident::tri_name(ident::in_A21_layer(a, node_cap));
    layers.push_back(lj);
  }

  ident::Tri a21 = ident::in_A21(conn, node_cap);
  bool a22 = ident::in_A22(conn);
  bool a23 = ident::in_A23(conn);
  ident::Tri a2 = ident::in_A2(conn, S, shortcut, node_cap);

  json res;
  res["command"] = "identify";
  res["config"] = rc;
  res["p"] = cf.shape.p;
  res["layers"] = layers;
  res["A1"] = ident::in_A1(conn);
  res["A2"] = {{"status", ident::tri_name(a2)},
               {"A21", ident::tri_name(a21)},
               {"A22", a22},
               {"A23", a23},
               {"all_ones_free", [&] {
                  for (const BinMat& a : conn.A)
                    if (ident::has_all_ones_column(a)) return false;
                  return true;
                }()}};
  if (!out.empty()) io::write_json_file(out, res);
  return res;
}

// ---------------------------------------------------------------- predict

json cmd_predict(const json& raw) {
  io::ConfigReader cfg(raw);
  json rc;
  std::string trace_path = cfg.get<std::string>("trace");
  std::string mask_path = cfg.get<std::string>("mask");
  std::string data_path = cfg.get_or<std::string>("data", "");
  std::string out = cfg.get_or<std::string>("out", "");
  cfg.finish();
  rc["trace"] = trace_path;
  rc["mask"] = mask_path;
  if (!data_path.empty()) rc["data"] = data_path;
  if (!out.empty()) rc["out"] = out;

  gibbs::EdgeMask mask = io::load_mask(mask_path);
  json preds = json::array();
  json auc_j;
  if (!mask.empty()) {
    gibbs::ChainTrace tr = io::load_trace(trace_path);
    std::vector<double> prob = analysis::predict_missing(tr, mask);
    std::vector<int> labels;
    bool have_truth = false;
    io::Dataset ds;
    if (!data_path.empty()) {
      ds = io::load_dataset(data_path);
      if (ds.pK != mask.pK || static_cast<int>(ds.samples.size()) != mask.N)
        throw UsageError("predict: dataset does not match mask");
      have_truth = true;
    }
    size_t q = 0;
    for (int n = 0; n < mask.N; ++n)
      for (int e : mask.pos[n]) {
        auto [i, j] = tri_unindex(mask.pK, e);
        json pj;
        pj["n"] = n;
        pj["i"] = i;
        pj["j"] = j;
        pj["prob"] = prob[q];
        if (have_truth) {
          int y = ds.samples[n].at(i, j);
          pj["truth"] = y;
          labels.push_back(y);
        }
        preds.push_back(pj);
        ++q;
      }
    if (have_truth) {
      long n1 = 0;
      for (int l : labels) n1 += l;
      if (n1 > 0 && n1 < static_cast<long>(labels.size()))
        auc_j = analysis::auc(labels, prob);
    }
  }

  json res;
  res["command"] = "predict";
  res["config"] = rc;
  res["n_masked"] = preds.size();
  res["predictions"] = preds;
  res["auc"] = auc_j;
  if (!out.empty()) io::write_json_file(out, res);
  return res;
}

using CmdFn = json (*)(const json&);

int run_command(CmdFn fn, const char* config_json, char** result_json) {
  return guarded([&] {
    require(result_json != nullptr, "result: null pointer");
    json res = fn(parse_config(config_json));
    *result_json = dup_string(res.dump(2));
  });
}

}  // namespace

extern "C" {

const char* mplex_version(void) { return "1.0.0"; }

const char* mplex_last_error(void) { return g_err.c_str(); }

void mplex_string_free(char* s) { std::free(s); }

int mplex_dataset_load(const char* path, mplex_dataset** out) {
  return guarded([&] {
    require(path && out, "dataset_load: null pointer");
    *out = new mplex_dataset{io::load_dataset(path)};
  });
}

int mplex_dataset_save(const mplex_dataset* d, const char* path) {
  return guarded([&] {
    require(d && path, "dataset_save: null pointer");
    io::save_dataset(path, d->d.samples, d->d.pK);
  });
}

int mplex_dataset_dims(const mplex_dataset* d, int* nodes, int* samples) {
  return guarded([&] {
    require(d != nullptr, "dataset_dims: null pointer");
    if (nodes) *nodes = d->d.pK;
    if (samples) *samples = static_cast<int>(d->d.samples.size());
  });
}

void mplex_dataset_free(mplex_dataset* d) { delete d; }

int mplex_mask_load(const char* path, mplex_mask** out) {
  return guarded([&] {
    require(path && out, "mask_load: null pointer");
    *out = new mplex_mask{io::load_mask(path)};
  });
}

int mplex_mask_save(const mplex_mask* m, const char* path) {
  return guarded([&] {
    require(m && path, "mask_save: null pointer");
    io::save_mask(path, m->m);
  });
}

int mplex_mask_dims(const mplex_mask* m, int* nodes, int* samples, int* entries) {
  return guarded([&] {
    require(m != nullptr, "mask_dims: null pointer");
    if (nodes) *nodes = m->m.pK;
    if (samples) *samples = m->m.N;
    if (entries) *entries = m->m.total();
  });
}

void mplex_mask_free(mplex_mask* m) { delete m; }

int mplex_trace_load(const char* path, mplex_trace** out) {
  return guarded([&] {
    require(path && out, "trace_load: null pointer");
    *out = new mplex_trace{io::load_trace(path)};
  });
}

int mplex_trace_save(const mplex_trace* t, const char* path) {
  return guarded([&] {
    require(t && path, "trace_save: null pointer");
    io::save_trace(path, t->t);
  });
}

int mplex_trace_dims(const mplex_trace* t, int* layers, int* samples, int* records) {
  return guarded([&] {
    require(t != nullptr, "trace_dims: null pointer");
    if (layers) *layers = t->t.shape.K;
    if (samples) *samples = t->t.N;
    if (records) *records = static_cast<int>(t->t.records.size());
  });
}

void mplex_trace_free(mplex_trace* t) { delete t; }

int mplex_simulate(const char* c, char** r) { return run_command(cmd_simulate, c, r); }
int mplex_fit(const char* c, char** r) { return run_command(cmd_fit, c, r); }
int mplex_select(const char* c, char** r) { return run_command(cmd_select, c, r); }
int mplex_identify(const char* c, char** r) { return run_command(cmd_identify, c, r); }
int mplex_predict(const char* c, char** r) { return run_command(cmd_predict, c, r); }

}  // extern "C"
