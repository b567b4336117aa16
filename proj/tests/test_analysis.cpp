#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mplex/analysis.hpp"
#include "mplex/model.hpp"
#include "mplex/rng.hpp"
#include "oracles.hpp"

using namespace mplex;
using gibbs::ChainTrace;
using gibbs::TraceRecord;

namespace {

ChainTrace empty_trace(const NetworkShape& shape, int N) {
  ChainTrace tr;
  tr.shape = shape;
  tr.S = 2;
  tr.N = N;
  return tr;
}

// minimal record: only the fields a given test reads need to be meaningful
TraceRecord rec_with_C(double c) {
  TraceRecord r;
  r.params.C = {c};
  return r;
}

ContinuousParams base_params_23() {
  ContinuousParams p;
  p.nu = {0.3, 0.7};
  p.C = {-1.0, -0.5};
  Eigen::MatrixXd g1(2, 2), g2(3, 3);
  g1 << 2.0, 0.5, 0.5, 1.5;
  g2 << 1.1, 0.2, 0.3, 0.2, 1.7, 0.4, 0.3, 0.4, 0.9;
  p.Gamma = {g1, g2};
  return p;
}

// node relabeling of latent layer k applied to one record, written from the
// model symmetry itself: permute A_{k+1} columns, conjugate Gamma_{k+1},
// permute A_k rows and the layer-k adjacencies (codes and nu at k = 0)
TraceRecord transform_record(const TraceRecord& rec, const NetworkShape& shape, int k,
                             const std::vector<int>& perm) {
  TraceRecord out = rec;
  BinMat& A = out.conn.layer(k + 1);
  for (int r = 0; r < A.rows; ++r)
    for (int s = 0; s < A.cols; ++s) A.at(r, s) = rec.conn.layer(k + 1).at(r, perm[s]);
  Eigen::MatrixXd& G = out.params.gamma(k + 1);
  for (int s = 0; s < G.rows(); ++s)
    for (int t = 0; t < G.cols(); ++t) G(s, t) = rec.params.gamma(k + 1)(perm[s], perm[t]);
  if (k >= 1) {
    BinMat& Ak = out.conn.layer(k);
    for (int s = 0; s < Ak.rows; ++s)
      for (int t = 0; t < Ak.cols; ++t) Ak.at(s, t) = rec.conn.layer(k).at(perm[s], t);
    for (size_t n = 0; n < rec.xint.size(); ++n) {
      BinMat X = adj_from_tri_string(shape.p[k], rec.xint[n][k - 1]);
      BinMat Y(X.rows, X.cols);
      for (int s = 0; s < X.rows; ++s)
        for (int t = 0; t < X.cols; ++t) Y.at(s, t) = X.at(perm[s], perm[t]);
      out.xint[n][k - 1] = adj_to_tri_string(Y);
    }
  } else {
    int p0 = shape.p[0];
    size_t M = 1ull << shape.u(0);
    std::vector<uint64_t> cm(M);
    for (size_t m = 0; m < M; ++m) {
      BinMat X = decode_adj(p0, m);
      BinMat Y(p0, p0);
      for (int s = 0; s < p0; ++s)
        for (int t = 0; t < p0; ++t) Y.at(s, t) = X.at(perm[s], perm[t]);
      cm[m] = encode_adj(Y);
    }
    for (size_t n = 0; n < rec.x0.size(); ++n) out.x0[n] = cm[rec.x0[n]];
    for (size_t m = 0; m < M; ++m) out.params.nu[cm[m]] = rec.params.nu[m];
  }
  return out;
}

bool params_equal(const ContinuousParams& a, const ContinuousParams& b) {
  if (a.nu != b.nu || a.C != b.C || a.Gamma.size() != b.Gamma.size()) return false;
  for (size_t k = 0; k < a.Gamma.size(); ++k)
    if ((a.Gamma[k] - b.Gamma[k]).cwiseAbs().maxCoeff() != 0.0) return false;
  return true;
}

}  // namespace

TEST_CASE("waic matches hand-computed pointwise quantities") {
  double a = std::log(0.2), b = std::log(0.4);
  auto r = analysis::waic({{a}, {b}});
  CHECK(r.lppd == doctest::Approx(std::log(0.3)).epsilon(1e-12));
  double s2 = (b - a) * (b - a) / 2.0;  // sample variance of the two points
  CHECK(r.p_waic == doctest::Approx(s2).epsilon(1e-12));
  CHECK(r.waic == doctest::Approx(-2.0 * (std::log(0.3) - s2)).epsilon(1e-12));

  // additivity over individuals
  double c = std::log(0.5), d = std::log(0.1);
  auto r2 = analysis::waic({{a, c}, {b, d}});
  auto rc = analysis::waic({{c}, {d}});
  CHECK(r2.lppd == doctest::Approx(r.lppd + rc.lppd).epsilon(1e-12));
  CHECK(r2.p_waic == doctest::Approx(r.p_waic + rc.p_waic).epsilon(1e-12));

  // single kept iteration: no variance penalty
  auto r1 = analysis::waic({{a, c}});
  CHECK(r1.p_waic == 0.0);
  CHECK(r1.lppd == doctest::Approx(a + c).epsilon(1e-12));

  // a model with uniformly higher pointwise likelihood wins
  auto good = analysis::waic({{std::log(0.9)}, {std::log(0.8)}});
  auto bad = analysis::waic({{std::log(0.1)}, {std::log(0.2)}});
  CHECK(good.waic < bad.waic);

  CHECK_THROWS_AS(analysis::waic({}), UsageError);
  CHECK_THROWS_AS(analysis::waic({{1.0, 2.0}, {1.0}}), UsageError);
}

TEST_CASE("loglik matrix filters records by phase") {
  ChainTrace tr = empty_trace(NetworkShape({2, 4}), 2);
  TraceRecord r1, r2, r3, r4;
  r1.phase = 's';
  r1.loglik = {-1.0, -2.0};
  r2.phase = 'g';
  r2.loglik = {-3.0, -4.0};
  r3.phase = 'g';  // no likelihood stored
  r4.phase = 's';
  r4.loglik = {-5.0, -6.0};
  tr.records = {r1, r2, r3, r4};

  auto g = analysis::loglik_matrix(tr);
  REQUIRE(g.size() == 1);
  CHECK(g[0] == std::vector<double>{-3.0, -4.0});
  auto s = analysis::loglik_matrix(tr, 's');
  REQUIRE(s.size() == 2);
  CHECK(s[1] == std::vector<double>{-5.0, -6.0});
  CHECK(analysis::loglik_matrix(tr, 0).size() == 3);
}

TEST_CASE("split statistic matches a hand calculation") {
  // identical means: pooled variance shrinks the ratio below one
  auto r = analysis::gelman_rubin({{1, 2, 3, 4}, {1, 2, 3, 4}});
  CHECK(!r.degenerate);
  CHECK(r.rhat == doctest::Approx(std::sqrt(0.75)).epsilon(1e-12));

  // wildly separated chains blow the statistic up
  auto far = analysis::gelman_rubin({{1, 2, 1, 2}, {101, 102, 101, 102}});
  CHECK(far.rhat == doctest::Approx(std::sqrt(5000.25 / (1.0 / 3.0))).epsilon(1e-9));
  CHECK(far.rhat > 100.0);

  // flat chains are flagged, not divided by zero
  auto flat = analysis::gelman_rubin({{2, 2, 2, 2}, {2, 2, 2, 2}});
  CHECK(flat.degenerate);
  CHECK(flat.rhat == 1.0);

  // well-mixed synthetic chains sit near one
  Rng g(404);
  std::vector<std::vector<double>> chains(3, std::vector<double>(500));
  for (auto& c : chains)
    for (double& x : c) x = rnorm(g);
  auto ok = analysis::gelman_rubin(chains);
  CHECK(ok.rhat < 1.05);
  CHECK(ok.rhat > 0.95);

  CHECK_THROWS_AS(analysis::gelman_rubin({{1, 2, 3, 4}}), UsageError);
  CHECK_THROWS_AS(analysis::gelman_rubin({{1, 2, 3, 4}, {1, 2, 3}}), UsageError);
  CHECK_THROWS_AS(analysis::gelman_rubin({{1, 2, 3}, {1, 2, 3}}), UsageError);
}

TEST_CASE("geweke flags drift and calibrates on stationary input") {
  // stationary traces: z behaves like a standard normal
  Rng g(505);
  std::vector<double> zs;
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<double> tr(600);
    for (double& x : tr) x = rnorm(g);
    auto r = analysis::geweke(tr);
    CHECK(!r.degenerate);
    CHECK(std::abs(r.z) < 5.0);
    zs.push_back(r.z);
  }
  double m = 0, v = 0;
  for (double z : zs) m += z;
  m /= zs.size();
  for (double z : zs) v += (z - m) * (z - m);
  v /= (zs.size() - 1);
  CHECK(std::abs(m) < 0.8);
  CHECK(v > 0.25);
  CHECK(v < 3.5);

  // a level shift between the windows is detected
  std::vector<double> drift(400);
  for (size_t i = 0; i < drift.size(); ++i) drift[i] = (i < 200 ? 0.0 : 5.0) + 0.1 * rnorm(g);
  CHECK(std::abs(analysis::geweke(drift).z) > 5.0);

  // constant trace: flagged degenerate instead of 0/0
  std::vector<double> flat(100, 3.25);
  auto fr = analysis::geweke(flat);
  CHECK(fr.degenerate);
  CHECK(fr.z == 0.0);

  CHECK_THROWS_AS(analysis::geweke(std::vector<double>(10, 0.0)), UsageError);
  std::vector<double> t40(40, 0.0);
  CHECK_THROWS_AS(analysis::geweke(t40, 0.6, 0.5), UsageError);
  CHECK_THROWS_AS(analysis::geweke(t40, 0.0, 0.5), UsageError);
}

TEST_CASE("parameter handles cover C then Gamma upper triangles") {
  NetworkShape shape({2, 3, 4});
  auto list = analysis::param_list(shape);
  REQUIRE(list.size() == 2 + 3 + 6);
  CHECK(list[0].name() == "C_1");
  CHECK(list[1].name() == "C_2");
  CHECK(list[2].name() == "Gamma_1[0,0]");
  CHECK(list[4].name() == "Gamma_1[1,1]");
  CHECK(list[5].name() == "Gamma_2[0,0]");
  CHECK(list.back().name() == "Gamma_2[2,2]");

  ChainTrace tr = empty_trace(NetworkShape({2, 4}), 1);
  for (int t = 0; t < 5; ++t) {
    TraceRecord r = rec_with_C(0.5 * t);
    Eigen::MatrixXd g(2, 2);
    g << 1.0 + t, 0.25, 0.25, 2.0;
    r.params.Gamma = {g};
    tr.records.push_back(r);
  }
  auto c1 = analysis::param_series(tr, {1, 0, 0, true});
  CHECK(c1 == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
  auto g00 = analysis::param_series(tr, {1, 0, 0, false});
  CHECK(g00 == std::vector<double>{1.0, 2.0, 3.0, 4.0, 5.0});
}

TEST_CASE("posterior summaries report moments and interpolated quantiles") {
  ChainTrace tr = empty_trace(NetworkShape({2, 4}), 1);
  for (int t = 1; t <= 20; ++t) {
    TraceRecord r = rec_with_C(t);
    r.params.Gamma = {Eigen::MatrixXd::Constant(2, 2, 1.0)};
    tr.records.push_back(r);
  }
  auto s = analysis::posterior_summaries(tr);
  REQUIRE(s.size() == 4);  // C_1 + three Gamma entries
  CHECK(s[0].name == "C_1");
  CHECK(s[0].mean == doctest::Approx(10.5).epsilon(1e-12));
  CHECK(s[0].sd == doctest::Approx(std::sqrt(35.0)).epsilon(1e-12));  // n(n+1)/12
  CHECK(s[0].q05 == doctest::Approx(1.95).epsilon(1e-12));
  CHECK(s[0].q50 == doctest::Approx(10.5).epsilon(1e-12));
  CHECK(s[0].q95 == doctest::Approx(19.05).epsilon(1e-12));
  CHECK(s[1].sd == 0.0);
  CHECK(s[1].q50 == 1.0);
  CHECK_THROWS_AS(analysis::posterior_summaries(empty_trace(NetworkShape({2, 4}), 1)), UsageError);
}

TEST_CASE("latent means average codes and tri strings") {
  NetworkShape shape({2, 3, 4});
  ChainTrace tr = empty_trace(shape, 2);
  TraceRecord r1, r2;
  r1.x0 = {1, 0};
  r2.x0 = {1, 1};
  r1.xint = {{"101"}, {"000"}};
  r2.xint = {{"011"}, {"100"}};
  tr.records = {r1, r2};

  auto m0 = analysis::latent_means(tr, 0);
  REQUIRE(m0.rows() == 2);
  REQUIRE(m0.cols() == 1);
  CHECK(m0(0, 0) == doctest::Approx(1.0));
  CHECK(m0(1, 0) == doctest::Approx(0.5));

  auto m1 = analysis::latent_means(tr, 1);
  REQUIRE(m1.cols() == 3);
  CHECK(m1(0, 0) == doctest::Approx(0.5));
  CHECK(m1(0, 1) == doctest::Approx(0.5));
  CHECK(m1(0, 2) == doctest::Approx(1.0));
  CHECK(m1(1, 0) == doctest::Approx(0.5));
  CHECK(m1(1, 1) == doctest::Approx(0.0));
  CHECK(m1(1, 2) == doctest::Approx(0.0));

  CHECK_THROWS_AS(analysis::latent_means(tr, 2), UsageError);
  CHECK_THROWS_AS(analysis::latent_means(tr, -1), UsageError);
  CHECK_THROWS_AS(analysis::latent_means(empty_trace(shape, 2), 0), UsageError);
}

TEST_CASE("relabel undoes planted permutations exactly") {
  NetworkShape shape({2, 3, 4});
  TraceRecord rec0;
  rec0.conn.A = {parse_bin_rows({"10", "01", "11"}),
                 parse_bin_rows({"100", "010", "001", "110"})};
  rec0.params = base_params_23();
  rec0.x0 = {0, 1};
  rec0.xint = {{"101"}, {"010"}};

  // image of rec0 under a layer-1 rotation followed by a layer-0 swap
  TraceRecord rec1 = transform_record(rec0, shape, 1, {1, 2, 0});
  rec1 = transform_record(rec1, shape, 0, {1, 0});
  CHECK(!(rec1.conn == rec0.conn));

  ChainTrace tr = empty_trace(shape, 2);
  tr.records = {rec0, rec1};
  auto out = analysis::relabel(tr);
  CHECK(out.records[0].conn == rec0.conn);  // reference record untouched
  CHECK(out.records[1].conn == rec0.conn);
  CHECK(params_equal(out.records[1].params, rec0.params));
  CHECK(out.records[1].x0 == rec0.x0);
  CHECK(out.records[1].xint == rec0.xint);

  // aligning to an explicit reference maps every record onto it
  TraceRecord recA = transform_record(rec0, shape, 1, {2, 0, 1});
  ChainTrace tr2 = empty_trace(shape, 2);
  tr2.records = {recA, rec1};
  auto out2 = analysis::relabel(tr2, &rec0.conn);
  CHECK(out2.records[0].conn == rec0.conn);
  CHECK(out2.records[1].conn == rec0.conn);

  // idempotence
  auto again = analysis::relabel(out);
  for (size_t r = 0; r < out.records.size(); ++r) {
    CHECK(again.records[r].conn == out.records[r].conn);
    CHECK(params_equal(again.records[r].params, out.records[r].params));
    CHECK(again.records[r].x0 == out.records[r].x0);
  }

  CHECK_THROWS_AS(analysis::relabel(empty_trace(shape, 2)), UsageError);
  ConnectionMatrices badref;
  badref.A = {parse_bin_rows({"10", "01", "11"})};
  CHECK_THROWS_AS(analysis::relabel(tr, &badref), UsageError);
}

TEST_CASE("relabel leaves every record's joint density unchanged") {
  NetworkShape shape({2, 3, 4});
  Rng g(606);
  ConnectionMatrices conn;
  conn.A = {parse_bin_rows({"10", "01", "11"}), parse_bin_rows({"100", "010", "001", "011"})};
  ContinuousParams params = base_params_23();
  auto draws = model::simulate(shape, conn, params, 3, 661);
  std::vector<BinMat> obs;
  for (auto& d : draws) obs.push_back(d.X[2]);

  gibbs::SamplerConfig cfg;
  cfg.seed = 31;
  cfg.iters_std = 8;
  auto tr = gibbs::run_chain(obs, nullptr, cfg, shape);
  auto out = analysis::relabel(tr);
  REQUIRE(out.records.size() == tr.records.size());
  for (size_t r = 0; r < tr.records.size(); ++r)
    for (int n = 0; n < 3; ++n) {
      auto build = [&](const TraceRecord& rec) {
        LayeredSample x;
        x.X = {decode_adj(2, rec.x0[n]), adj_from_tri_string(3, rec.xint[n][0]), obs[n]};
        return model::log_joint(shape, rec.conn, rec.params, x);
      };
      CHECK(build(tr.records[r]) == doctest::Approx(build(out.records[r])).epsilon(1e-10));
    }
}

TEST_CASE("posterior mode counts connection stacks, first seen wins ties") {
  NetworkShape shape({2, 4});
  ConnectionMatrices X, Y, Z;
  X.A = {parse_bin_rows({"10", "01", "11", "10"})};
  Y.A = {parse_bin_rows({"01", "01", "11", "10"})};
  Z.A = {parse_bin_rows({"10", "01", "11", "01"})};

  ChainTrace tr = empty_trace(shape, 1);
  for (const auto& c : {X, Y, X, Z, X}) {
    TraceRecord r;
    r.conn = c;
    tr.records.push_back(r);
  }
  CHECK(analysis::posterior_mode_A(tr) == X);

  ChainTrace tie = empty_trace(shape, 1);
  for (const auto& c : {Y, X, Y, X}) {
    TraceRecord r;
    r.conn = c;
    tie.records.push_back(r);
  }
  CHECK(analysis::posterior_mode_A(tie) == Y);
  CHECK_THROWS_AS(analysis::posterior_mode_A(empty_trace(shape, 1)), UsageError);
}

TEST_CASE("individual clustering thresholds posterior means") {
  Eigen::MatrixXd xb(4, 2);
  xb << 0.9, 0.1, 0.8, 0.2, 0.1, 0.9, 0.2, 0.8;
  auto c = analysis::cluster_individuals(xb);
  REQUIRE(c.thresholds.size() == 2);
  CHECK(c.thresholds[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(c.thresholds[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(c.code == std::vector<uint64_t>{1, 1, 2, 2});

  std::vector<double> th = {0.05, 0.05};
  auto c2 = analysis::cluster_individuals(xb, &th);
  CHECK(c2.code == std::vector<uint64_t>{3, 3, 3, 3});

  std::vector<double> bad = {0.5};
  CHECK_THROWS_AS(analysis::cluster_individuals(xb, &bad), UsageError);
  CHECK_THROWS_AS(analysis::cluster_individuals(Eigen::MatrixXd(4, 0)), UsageError);
  CHECK_THROWS_AS(analysis::cluster_individuals(Eigen::MatrixXd::Zero(2, 64)), UsageError);
}

TEST_CASE("active entries are those with interior grand means") {
  Eigen::MatrixXd xb(4, 4);
  xb.col(0).setZero();
  xb.col(1).setConstant(0.5);
  xb.col(2).setOnes();
  xb.col(3).setConstant(0.005);
  CHECK(analysis::active_entries(xb) == std::vector<int>{1});
  CHECK(analysis::active_entries(xb, 0.001, 0.999) == std::vector<int>{1, 3});
}

TEST_CASE("missing-entry prediction averages imputations in mask order") {
  auto mask = gibbs::EdgeMask::from_entries(2, 4, {{0, 1, 3}, {1, 0, 2}});
  ChainTrace tr = empty_trace(NetworkShape({2, 4}), 2);
  tr.mask_digest = mask.digest();
  for (auto imp : {std::vector<uint8_t>{1, 0}, {1, 1}, {0, 1}}) {
    TraceRecord r;
    r.imp = imp;
    tr.records.push_back(r);
  }
  auto p = analysis::predict_missing(tr, mask);
  REQUIRE(p.size() == 2);
  CHECK(p[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  auto other = gibbs::EdgeMask::from_entries(2, 4, {{0, 1, 3}});
  CHECK_THROWS_AS(analysis::predict_missing(tr, other), UsageError);
  ChainTrace bare = empty_trace(NetworkShape({2, 4}), 2);
  bare.mask_digest = mask.digest();
  CHECK_THROWS_AS(analysis::predict_missing(bare, mask), UsageError);
  ChainTrace ragged = tr;
  ragged.records[1].imp = {1};
  CHECK_THROWS_AS(analysis::predict_missing(ragged, mask), UsageError);
}

TEST_CASE("auc: hand values, ties, and monotone invariance") {
  CHECK(analysis::auc({1, 1, 0, 0}, {0.9, 0.8, 0.7, 0.1}) == doctest::Approx(1.0));
  CHECK(analysis::auc({0, 0, 1, 1}, {0.9, 0.8, 0.7, 0.1}) == doctest::Approx(0.0));
  CHECK(analysis::auc({1, 0}, {0.5, 0.5}) == doctest::Approx(0.5));
  CHECK(analysis::auc({1, 0, 1, 0}, {0.9, 0.8, 0.3, 0.1}) == doctest::Approx(0.75));
  // one tied pair across classes counts half
  CHECK(analysis::auc({1, 0, 1, 0}, {0.9, 0.9, 0.3, 0.1}) == doctest::Approx(0.625));

  Rng g(707);
  std::vector<int> lab(40);
  std::vector<double> sc(40), scexp(40);
  for (int i = 0; i < 40; ++i) {
    lab[i] = runif(g) < 0.5;
    sc[i] = 2.0 * runif(g) - 1.0;
    scexp[i] = std::exp(3.0 * sc[i]);
  }
  CHECK(analysis::auc(lab, sc) == doctest::Approx(analysis::auc(lab, scexp)).epsilon(1e-12));

  CHECK_THROWS_AS(analysis::auc({1, 0}, {0.5}), UsageError);
  CHECK_THROWS_AS(analysis::auc({1, 2}, {0.5, 0.6}), UsageError);
  CHECK_THROWS_AS(analysis::auc({1, 1}, {0.5, 0.6}), UsageError);
  CHECK_THROWS_AS(analysis::auc({}, {}), UsageError);
}

TEST_CASE("community metrics: agreement, permutation, independence") {
  auto same = analysis::community_metrics({0, 0, 1, 1, 2, 2}, {0, 0, 1, 1, 2, 2});
  CHECK(same.nmi == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(same.accuracy == doctest::Approx(1.0).epsilon(1e-12));

  auto perm = analysis::community_metrics({2, 2, 0, 0, 1, 1}, {0, 0, 1, 1, 2, 2});
  CHECK(perm.nmi == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(perm.accuracy == doctest::Approx(1.0).epsilon(1e-12));

  auto indep = analysis::community_metrics({0, 1, 0, 1}, {0, 0, 1, 1});
  CHECK(indep.nmi == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(indep.accuracy == doctest::Approx(0.5).epsilon(1e-12));

  // label-count mismatch on either side still matches injectively
  auto more_pred = analysis::community_metrics({0, 1, 2, 2}, {0, 1, 1, 1});
  CHECK(more_pred.accuracy == doctest::Approx(0.75).epsilon(1e-12));
  auto more_truth = analysis::community_metrics({0, 0, 1, 1}, {0, 1, 2, 2});
  CHECK(more_truth.accuracy == doctest::Approx(0.75).epsilon(1e-12));

  // symmetry of the information measure
  Rng g(808);
  std::vector<int> a(30), b(30);
  for (int i = 0; i < 30; ++i) {
    a[i] = static_cast<int>(runif(g) * 3);
    b[i] = static_cast<int>(runif(g) * 4);
  }
  auto ab = analysis::community_metrics(a, b);
  auto ba = analysis::community_metrics(b, a);
  CHECK(ab.nmi == doctest::Approx(ba.nmi).epsilon(1e-12));

  auto trivial = analysis::community_metrics({5, 5, 5}, {5, 5, 5});
  CHECK(trivial.nmi == doctest::Approx(1.0));
  CHECK(trivial.accuracy == doctest::Approx(1.0));

  CHECK_THROWS_AS(analysis::community_metrics({0, 1}, {0}), UsageError);
  CHECK_THROWS_AS(analysis::community_metrics({}, {}), UsageError);
}

TEST_CASE("column-permutation Hamming distance") {
  BinMat ref = parse_bin_rows({"100", "010", "001", "110"});
  BinMat swapped(4, 3);
  std::vector<int> sw = {1, 2, 0};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 3; ++c) swapped.at(r, c) = ref.at(r, sw[c]);
  std::vector<int> perm;
  CHECK(analysis::hamming_best_perm(swapped, ref, &perm) == 0);
  for (int s = 0; s < 3; ++s) CHECK(sw[perm[s]] == s);

  BinMat off = swapped;
  off.at(3, 0) = 1 - off.at(3, 0);
  CHECK(analysis::hamming_best_perm(off, ref) == 1);
  CHECK(analysis::hamming_best_perm(ref, ref) == 0);

  BinMat wide(4, 4);
  CHECK_THROWS_AS(analysis::hamming_best_perm(wide, ref), UsageError);
}
