#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "mplex/io.hpp"
#include "mplex/model.hpp"
#include "mplex/rng.hpp"

using namespace mplex;
namespace fs = std::filesystem;
using io::json;

namespace {

std::string tmp_path(const std::string& name) {
  return (fs::temp_directory_path() / ("mplex_io_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

void spit(const std::string& path, const std::string& body) {
  std::ofstream f(path);
  f << body;
}

ContinuousParams demo_params(const NetworkShape& shape, Rng& g) {
  ContinuousParams p;
  size_t m = 1ull << shape.u(0);
  p.nu.resize(m);
  double s = 0;
  for (double& w : p.nu) s += (w = 0.1 + runif(g));
  for (double& w : p.nu) w /= s;
  for (int k = 1; k <= shape.K; ++k) {
    p.C.push_back(2.0 * runif(g) - 1.0);
    int d = shape.p[k - 1];
    Eigen::MatrixXd G(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b) G(a, b) = G(b, a) = 0.2 + 1.5 * runif(g);
    p.Gamma.push_back(G);
  }
  return p;
}

ConnectionMatrices demo_conn(const NetworkShape& shape, int S, Rng& g) {
  ConnectionMatrices c;
  for (int k = 1; k <= shape.K; ++k) {
    BinMat a(shape.p[k], shape.p[k - 1]);
    for (int i = 0; i < a.rows; ++i) {
      int ones = 1 + static_cast<int>(runif(g) * S);
      for (int q = 0; q < ones; ++q) a.at(i, static_cast<int>(runif(g) * a.cols)) = 1;
    }
    c.A.push_back(a);
  }
  return c;
}

bool params_equal(const ContinuousParams& a, const ContinuousParams& b) {
  if (a.nu != b.nu || a.C != b.C || a.Gamma.size() != b.Gamma.size()) return false;
  for (size_t k = 0; k < a.Gamma.size(); ++k)
    if ((a.Gamma[k] - b.Gamma[k]).cwiseAbs().maxCoeff() != 0.0) return false;
  return true;
}

}  // namespace

TEST_CASE("dataset files round-trip bit-exactly") {
  NetworkShape shape({2, 5});
  Rng g(12);
  auto conn = demo_conn(shape, 2, g);
  auto params = demo_params(shape, g);
  auto draws = model::simulate(shape, conn, params, 6, 77);
  std::vector<BinMat> samples;
  for (auto& d : draws) samples.push_back(d.X[1]);

  std::string path = tmp_path("ds.json");
  io::save_dataset(path, samples, 5);
  auto d = io::load_dataset(path);
  CHECK(d.pK == 5);
  REQUIRE(d.samples.size() == 6);
  for (int n = 0; n < 6; ++n) CHECK(d.samples[n] == samples[n]);

  // saving the reloaded data reproduces the file byte for byte
  std::string path2 = tmp_path("ds2.json");
  io::save_dataset(path2, d.samples, d.pK);
  CHECK(slurp(path) == slurp(path2));

  // an empty dataset is representable
  io::save_dataset(path2, {}, 4);
  auto e = io::load_dataset(path2);
  CHECK(e.pK == 4);
  CHECK(e.samples.empty());

  BinMat bad(5, 5);  // zero diagonal
  CHECK_THROWS_AS(io::save_dataset(path2, {bad}, 5), UsageError);
  CHECK_THROWS_AS(io::save_dataset(path2, {samples[0]}, 4), UsageError);
  CHECK_THROWS_AS(io::load_dataset(tmp_path("missing.json")), UsageError);

  spit(path2, "{not json");
  CHECK_THROWS_AS(io::load_dataset(path2), UsageError);
  spit(path2, R"({"format":"mpx-v2","p_K":4,"N":0,"samples":[]})");
  CHECK_THROWS_AS(io::load_dataset(path2), UsageError);
  spit(path2, R"({"format":"mpx-v1","p_K":4,"N":2,"samples":["000000"]})");
  CHECK_THROWS_AS(io::load_dataset(path2), UsageError);
  spit(path2, R"({"format":"mpx-v1","p_K":4,"N":1,"samples":["00000"]})");
  CHECK_THROWS_AS(io::load_dataset(path2), UsageError);
  spit(path2, R"({"format":"mpx-v1","p_K":4,"samples":[]})");
  CHECK_THROWS_AS(io::load_dataset(path2), UsageError);
  spit(path2, R"({"format":"mpx-v1","p_K":4,"N":1,"samples":["0a0000"]})");
  CHECK_THROWS_AS(io::load_dataset(path2), UsageError);
}

TEST_CASE("mask files round-trip and stay validated") {
  auto m = gibbs::EdgeMask::random(5, 6, 0.2, 99);
  std::string path = tmp_path("mask.json");
  io::save_mask(path, m);
  auto r = io::load_mask(path);
  CHECK(r.N == m.N);
  CHECK(r.pK == m.pK);
  CHECK(r.pos == m.pos);
  CHECK(r.digest() == m.digest());

  std::string path2 = tmp_path("mask2.json");
  io::save_mask(path2, r);
  CHECK(slurp(path) == slurp(path2));

  gibbs::EdgeMask bad;
  bad.N = 2;
  bad.pK = 1;  // too narrow
  bad.pos = {{}, {}};
  CHECK_THROWS_AS(io::save_mask(path2, bad), UsageError);

  spit(path2, R"({"format":"mpx-v1","p_K":6,"N":5,"entries":[[0,3,3]]})");
  CHECK_THROWS_AS(io::load_mask(path2), UsageError);
  spit(path2, R"({"format":"mpx-v1","p_K":6,"N":5,"entries":[[0,1]]})");
  CHECK_THROWS_AS(io::load_mask(path2), UsageError);
  spit(path2, R"({"format":"mpx-v1","p_K":6,"N":5,"entries":[[0,1,2],[0,1,2]]})");
  CHECK_THROWS_AS(io::load_mask(path2), UsageError);
}

TEST_CASE("connection files carry the shape and the stack") {
  NetworkShape shape({2, 3, 5});
  Rng g(21);
  auto conn = demo_conn(shape, 2, g);
  std::string path = tmp_path("conn.json");
  io::save_conn(path, shape, conn);
  auto r = io::load_conn(path);
  CHECK(r.shape.p == shape.p);
  CHECK(r.conn == conn);

  ConnectionMatrices wrong = conn;
  wrong.A.pop_back();
  CHECK_THROWS_AS(io::save_conn(path, shape, wrong), UsageError);

  std::string path2 = tmp_path("conn2.json");
  spit(path2, R"({"format":"mpx-conn-v1","p":[2,3],"A":[["10","01","11"],["100"]]})");
  CHECK_THROWS_AS(io::load_conn(path2), UsageError);
  spit(path2, R"({"format":"mpx-conn-v1","p":[2,3],"A":[["10","01"]]})");
  CHECK_THROWS_AS(io::load_conn(path2), UsageError);
  spit(path2, R"({"format":"mpx-conn-v1","p":[2,3],"A":[["1x","01","11"]]})");
  CHECK_THROWS_AS(io::load_conn(path2), UsageError);
  spit(path2, R"({"format":"mpx-conn-v1","p":[3,2],"A":[["10","01"]]})");
  CHECK_THROWS_AS(io::load_conn(path2), UsageError);  // widths must not shrink
}

TEST_CASE("truth files round-trip parameters exactly") {
  NetworkShape shape({3, 6});
  auto [conn, params] = model::sim_truth(shape, 2);
  io::TruthFile t;
  t.shape = shape;
  t.S = 2;
  t.conn = conn;
  t.params = params;
  t.extra = json{{"seed", 17}, {"note", "bench"}};

  std::string path = tmp_path("truth.json");
  io::save_truth(path, t);
  auto r = io::load_truth(path);
  CHECK(r.shape.p == shape.p);
  CHECK(r.S == 2);
  CHECK(r.conn == conn);
  CHECK(params_equal(r.params, params));
  CHECK(r.extra == t.extra);

  // extras are optional on disk
  io::TruthFile t2 = t;
  t2.extra = json::object();
  std::string path2 = tmp_path("truth2.json");
  io::save_truth(path2, t2);
  auto r2 = io::load_truth(path2);
  CHECK(r2.extra == json::object());

  // validation refuses a stack that violates the sparsity cap
  io::TruthFile t3 = t;
  t3.S = 1;  // rows of the benchmark stack have up to two ones
  CHECK_THROWS_AS(io::save_truth(path2, t3), UsageError);
}

TEST_CASE("trace files: newline-delimited records round-trip") {
  NetworkShape shape({2, 3, 4});
  Rng g(31);
  auto conn = demo_conn(shape, 2, g);
  auto params = demo_params(shape, g);
  auto draws = model::simulate(shape, conn, params, 3, 171);
  std::vector<BinMat> obs;
  for (auto& d : draws) obs.push_back(d.X[2]);
  auto mask = gibbs::EdgeMask::from_entries(3, 4, {{0, 1, 3}, {2, 0, 2}});

  gibbs::SamplerConfig cfg;
  cfg.seed = 13;
  cfg.iters_sub = 3;
  cfg.iters_std = 4;
  cfg.record_sub_loglik = true;
  auto tr = gibbs::run_chain(obs, &mask, cfg, shape);
  tr.config_json = R"({"model":{"p":[2,3,4]},"seed":13})";

  std::string path = tmp_path("trace.ndjson");
  io::save_trace(path, tr);
  auto r = io::load_trace(path);
  CHECK(r.shape.p == shape.p);
  CHECK(r.S == tr.S);
  CHECK(r.N == 3);
  CHECK(r.seed == 13);
  CHECK(r.mask_digest == mask.digest());
  CHECK(json::parse(r.config_json) == json::parse(tr.config_json));
  REQUIRE(r.records.size() == tr.records.size());
  for (size_t t = 0; t < tr.records.size(); ++t) {
    const auto& a = tr.records[t];
    const auto& b = r.records[t];
    CHECK(a.iter == b.iter);
    CHECK(a.phase == b.phase);
    CHECK(a.conn == b.conn);
    CHECK(params_equal(a.params, b.params));
    CHECK(a.x0 == b.x0);
    CHECK(a.xint == b.xint);
    CHECK(a.imp == b.imp);
    CHECK(a.loglik == b.loglik);
  }

  // second save of the parsed trace is byte-identical
  std::string path2 = tmp_path("trace2.ndjson");
  io::save_trace(path2, r);
  CHECK(slurp(path) == slurp(path2));

  // blank lines between records are tolerated
  spit(path2, slurp(path) + "\n\n");
  auto r2 = io::load_trace(path2);
  CHECK(r2.records.size() == r.records.size());

  // a single-layer trace has no interior-layer field at all
  NetworkShape flat({2, 4});
  gibbs::SamplerConfig cfg1;
  cfg1.seed = 2;
  cfg1.iters_std = 2;
  std::vector<BinMat> obs1 = {decode_adj(4, 9), decode_adj(4, 33)};
  auto tr1 = gibbs::run_chain(obs1, nullptr, cfg1, flat);
  std::string path3 = tmp_path("trace3.ndjson");
  io::save_trace(path3, tr1);
  CHECK(slurp(path3).find("xint") == std::string::npos);
  auto r3 = io::load_trace(path3);
  CHECK(r3.records.size() == 2);
  CHECK(r3.records[0].imp.empty());
  CHECK(r3.records[0].loglik.size() == 2);

  spit(path3, "");
  CHECK_THROWS_AS(io::load_trace(path3), UsageError);
  spit(path3, "{bad header\n");
  CHECK_THROWS_AS(io::load_trace(path3), UsageError);
  spit(path3, R"({"format":"mpx-trace-v1","p":[2,4],"S":2,"N":1,"seed":0,"mask_digest":0})"
              "\n"
              R"({"iter":1,"phase":"q","A":[["10","01","11","10"]],"C":[0.0],"nu":[0.5,0.5],"Gamma":[[1.0,0.2,1.0]],"x0":[0]})"
              "\n");
  CHECK_THROWS_AS(io::load_trace(path3), UsageError);
  spit(path3, R"({"format":"mpx-trace-v1","p":[2,4],"S":2,"N":2,"seed":0,"mask_digest":0})"
              "\n"
              R"({"iter":1,"phase":"g","A":[["10","01","11","10"]],"C":[0.0],"nu":[0.5,0.5],"Gamma":[[1.0,0.2,1.0]],"x0":[0]})"
              "\n");
  CHECK_THROWS_AS(io::load_trace(path3), UsageError);  // x0 shorter than N
}

TEST_CASE("json file helpers and parameter converters") {
  std::string path = tmp_path("plain.json");
  json j{{"a", 1}, {"b", {1, 2, 3}}};
  io::write_json_file(path, j);
  CHECK(io::read_json_file(path) == j);
  CHECK_THROWS_AS(io::read_json_file(tmp_path("nope.json")), UsageError);

  NetworkShape shape({2, 4});
  Rng g(44);
  auto params = demo_params(shape, g);
  auto back = io::params_from_json(io::params_to_json(params), shape);
  CHECK(params_equal(back, params));

  json pj = io::params_to_json(params);
  pj["Gamma"][0] = {1.0, 0.2};  // triangle too short
  CHECK_THROWS_AS(io::params_from_json(pj, shape), UsageError);
  json pj2 = io::params_to_json(params);
  pj2.erase("nu");
  CHECK_THROWS_AS(io::params_from_json(pj2, shape), UsageError);

  auto conn = demo_conn(shape, 2, g);
  auto cj = io::conn_to_json(conn);
  CHECK(io::conn_from_json(cj, shape) == conn);
  CHECK_THROWS_AS(io::conn_from_json(json::array(), shape), UsageError);
}

TEST_CASE("config reader consumes every key exactly once") {
  io::ConfigReader r(json{{"a", 1}, {"b", 2.5}, {"s", "x"}});
  CHECK(r.has("a"));
  CHECK(!r.has("z"));
  CHECK(r.get<int>("a") == 1);
  CHECK(r.get_or<double>("b", 0.0) == 2.5);
  CHECK(r.get_or<int>("missing", 7) == 7);
  CHECK_THROWS_AS(r.finish(), UsageError);  // "s" never consumed
  CHECK(r.get<std::string>("s") == "x");
  CHECK_NOTHROW(r.finish());

  io::ConfigReader r2(json{{"a", "not a number"}});
  CHECK_THROWS_AS(r2.get<int>("a"), UsageError);
  io::ConfigReader r3(json::object());
  CHECK_THROWS_AS(r3.get<int>("a"), UsageError);
  CHECK_THROWS_AS(io::ConfigReader(json::array()), UsageError);
}
