#include "mplex/io.hpp"

#include <algorithm>
#include <fstream>

namespace mplex::io {

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open file: " + path);
  return f;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write file: " + path);
  return f;
}

json parse(std::istream& in, const std::string& what) {
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(what + ": invalid JSON: " + e.what());
  }
}

void expect_format(const json& j, const std::string& tag, const std::string& what) {
  if (!j.is_object() || !j.contains("format") || j.at("format") != tag)
    throw UsageError(what + ": expected format \"" + tag + "\"");
}

}  // namespace

json read_json_file(const std::string& path) {
  auto f = open_in(path);
  return parse(f, path);
}

void write_json_file(const std::string& path, const json& j) {
  auto f = open_out(path);
  f << j.dump(2) << "\n";
}

// ----------------------------------------------------------------- dataset

Dataset load_dataset(const std::string& path) {
  json j = read_json_file(path);
  expect_format(j, "mpx-v1", path);
  Dataset d;
  try {
    d.pK = j.at("p_K").get<int>();
    int N = j.at("N").get<int>();
    const auto& arr = j.at("samples");
    if (!arr.is_array() || static_cast<int>(arr.size()) != N)
      throw UsageError(path + ": samples array does not match N");
    int u = tri_count(d.pK);
    for (const auto& s : arr) {
      std::string bits = s.get<std::string>();
      if (static_cast<int>(bits.size()) != u)
        throw UsageError(path + ": sample string has wrong length");
      d.samples.push_back(adj_from_tri_string(d.pK, bits));
    }
  } catch (const json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
  return d;
}

void save_dataset(const std::string& path, const std::vector<BinMat>& samples, int pK) {
  json arr = json::array();
  for (const BinMat& x : samples) {
    if (x.rows != pK || !x.is_symmetric_unit_diag())
      throw UsageError("save_dataset: sample is not a symmetric unit-diagonal p_K matrix");
    arr.push_back(adj_to_tri_string(x));
  }
  json j{{"format", "mpx-v1"}, {"p_K", pK}, {"N", samples.size()}, {"samples", std::move(arr)}};
  write_json_file(path, j);
}

// -------------------------------------------------------------------- mask

gibbs::EdgeMask load_mask(const std::string& path) {
  json j = read_json_file(path);
  expect_format(j, "mpx-v1", path);
  try {
    int pK = j.at("p_K").get<int>();
    int N = j.at("N").get<int>();
    std::vector<std::array<int, 3>> entries;
    for (const auto& e : j.at("entries")) {
      if (!e.is_array() || e.size() != 3) throw UsageError(path + ": mask entry is not [n,i,j]");
      entries.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<int>()});
    }
    return gibbs::EdgeMask::from_entries(N, pK, entries);
  } catch (const json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

void save_mask(const std::string& path, const gibbs::EdgeMask& m) {
  m.validate();
  json arr = json::array();
  for (int n = 0; n < m.N; ++n)
    for (int e : m.pos[n]) {
      auto [i, jx] = tri_unindex(m.pK, e);
      arr.push_back(json::array({n, i, jx}));
    }
  json j{{"format", "mpx-v1"}, {"p_K", m.pK}, {"N", m.N}, {"entries", std::move(arr)}};
  write_json_file(path, j);
}

// -------------------------------------------------------- conn/params json

json conn_to_json(const ConnectionMatrices& conn) {
  json layers = json::array();
  for (const BinMat& A : conn.A) {
    json rows = json::array();
    for (int i = 0; i < A.rows; ++i) rows.push_back(A.row_string(i));
    layers.push_back(std::move(rows));
  }
  return layers;
}

ConnectionMatrices conn_from_json(const json& j, const NetworkShape& shape) {
  if (!j.is_array() || static_cast<int>(j.size()) != shape.K)
    throw UsageError("connection matrices: wrong layer count");
  ConnectionMatrices conn;
  for (int k = 1; k <= shape.K; ++k) {
    std::vector<std::string> rows;
    for (const auto& r : j[k - 1]) rows.push_back(r.get<std::string>());
    BinMat A = parse_bin_rows(rows);
    if (A.rows != shape.p[k] || A.cols != shape.p[k - 1])
      throw UsageError("connection matrices: layer " + std::to_string(k) + " has wrong size");
    conn.A.push_back(std::move(A));
  }
  return conn;
}

json params_to_json(const ContinuousParams& p) {
  json gam = json::array();
  for (const auto& G : p.Gamma) {
    json tri = json::array();
    for (int s = 0; s < G.rows(); ++s)
      for (int t = s; t < G.cols(); ++t) tri.push_back(G(s, t));
    gam.push_back(std::move(tri));
  }
  return json{{"nu", p.nu}, {"C", p.C}, {"Gamma", gam}};
}

ContinuousParams params_from_json(const json& j, const NetworkShape& shape) {
  ContinuousParams p;
  try {
    p.nu = j.at("nu").get<std::vector<double>>();
    p.C = j.at("C").get<std::vector<double>>();
    const auto& gam = j.at("Gamma");
    if (static_cast<int>(gam.size()) != shape.K)
      throw UsageError("params: wrong Gamma layer count");
    for (int k = 1; k <= shape.K; ++k) {
      int d = shape.p[k - 1];
      auto tri = gam[k - 1].get<std::vector<double>>();
      if (static_cast<int>(tri.size()) != d * (d + 1) / 2)
        throw UsageError("params: Gamma triangle has wrong length");
      Eigen::MatrixXd G(d, d);
      size_t q = 0;
      for (int s = 0; s < d; ++s)
        for (int t = s; t < d; ++t, ++q) G(s, t) = G(t, s) = tri[q];
      p.Gamma.push_back(std::move(G));
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("params: ") + e.what());
  }
  p.validate(shape);
  return p;
}

// -------------------------------------------------------------- conn files

ConnFile load_conn(const std::string& path) {
  json j = read_json_file(path);
  expect_format(j, "mpx-conn-v1", path);
  ConnFile out;
  try {
    out.shape = NetworkShape(j.at("p").get<std::vector<int>>());
    out.shape.validate();
    out.conn = conn_from_json(j.at("A"), out.shape);
  } catch (const json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
  return out;
}

void save_conn(const std::string& path, const NetworkShape& shape, const ConnectionMatrices& conn) {
  conn.validate(shape);
  json j{{"format", "mpx-conn-v1"}, {"p", shape.p}, {"A", conn_to_json(conn)}};
  write_json_file(path, j);
}

// ------------------------------------------------------------- truth files

TruthFile load_truth(const std::string& path) {
  json j = read_json_file(path);
  expect_format(j, "mpx-truth-v1", path);
  TruthFile t;
  try {
    t.shape = NetworkShape(j.at("p").get<std::vector<int>>());
    t.shape.validate();
    t.S = j.at("S").get<int>();
    t.conn = conn_from_json(j.at("A"), t.shape);
    t.params = params_from_json(j.at("params"), t.shape);
    t.extra = j.value("extra", json::object());
  } catch (const json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
  return t;
}

void save_truth(const std::string& path, const TruthFile& t) {
  t.conn.validate(t.shape, t.S);
  t.params.validate(t.shape);
  json j{{"format", "mpx-truth-v1"}, {"p", t.shape.p},      {"S", t.S},
         {"A", conn_to_json(t.conn)}, {"params", params_to_json(t.params)}};
  if (!t.extra.is_null() && !t.extra.empty()) j["extra"] = t.extra;
  write_json_file(path, j);
}

// ------------------------------------------------------------------- trace

void save_trace(const std::string& path, const gibbs::ChainTrace& tr) {
  auto f = open_out(path);
  json hdr{{"format", "mpx-trace-v1"}, {"p", tr.shape.p},   {"S", tr.S},
           {"N", tr.N},                {"seed", tr.seed},   {"mask_digest", tr.mask_digest}};
  hdr["config"] = tr.config_json.empty() ? json::object() : json::parse(tr.config_json);
  f << hdr.dump() << "\n";
  for (const auto& rec : tr.records) {
    json r{{"iter", rec.iter},
           {"phase", std::string(1, rec.phase)},
           {"A", conn_to_json(rec.conn)},
           {"C", rec.params.C},
           {"nu", rec.params.nu},
           {"x0", rec.x0}};
    json gam = json::array();
    for (const auto& G : rec.params.Gamma) {
      json tri = json::array();
      for (int s = 0; s < G.rows(); ++s)
        for (int t = s; t < G.cols(); ++t) tri.push_back(G(s, t));
      gam.push_back(std::move(tri));
    }
    r["Gamma"] = std::move(gam);
    if (tr.shape.K >= 2) r["xint"] = rec.xint;
    if (!rec.imp.empty()) r["imp"] = rec.imp;
    if (!rec.loglik.empty()) r["loglik"] = rec.loglik;
    f << r.dump() << "\n";
  }
}

gibbs::ChainTrace load_trace(const std::string& path) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line)) throw UsageError(path + ": empty trace file");
  json hdr;
  try {
    hdr = json::parse(line);
  } catch (const json::exception& e) {
    throw UsageError(path + ": bad trace header: " + e.what());
  }
  expect_format(hdr, "mpx-trace-v1", path);

  gibbs::ChainTrace tr;
  try {
    tr.shape = NetworkShape(hdr.at("p").get<std::vector<int>>());
    tr.shape.validate();
    tr.S = hdr.at("S").get<int>();
    tr.N = hdr.at("N").get<int>();
    tr.seed = hdr.at("seed").get<uint64_t>();
    tr.mask_digest = hdr.at("mask_digest").get<uint64_t>();
    if (hdr.contains("config")) tr.config_json = hdr.at("config").dump();

    int K = tr.shape.K;
    size_t lineno = 1;
    while (std::getline(f, line)) {
      ++lineno;
      if (line.empty()) continue;
      json r = json::parse(line);
      gibbs::TraceRecord rec;
      rec.iter = r.at("iter").get<long>();
      std::string ph = r.at("phase").get<std::string>();
      if (ph != "s" && ph != "g") throw UsageError(path + ": bad phase marker");
      rec.phase = ph[0];
      rec.conn = conn_from_json(r.at("A"), tr.shape);
      rec.params.C = r.at("C").get<std::vector<double>>();
      rec.params.nu = r.at("nu").get<std::vector<double>>();
      const auto& gam = r.at("Gamma");
      for (int k = 1; k <= K; ++k) {
        int d = tr.shape.p[k - 1];
        auto tri = gam[k - 1].get<std::vector<double>>();
        if (static_cast<int>(tri.size()) != d * (d + 1) / 2)
          throw UsageError(path + ": Gamma triangle has wrong length");
        Eigen::MatrixXd G(d, d);
        size_t q = 0;
        for (int s = 0; s < d; ++s)
          for (int t = s; t < d; ++t, ++q) G(s, t) = G(t, s) = tri[q];
        rec.params.Gamma.push_back(std::move(G));
      }
      rec.x0 = r.at("x0").get<std::vector<uint64_t>>();
      if (static_cast<int>(rec.x0.size()) != tr.N) throw UsageError(path + ": x0 length mismatch");
      if (K >= 2) {
        rec.xint = r.at("xint").get<std::vector<std::vector<std::string>>>();
        if (static_cast<int>(rec.xint.size()) != tr.N)
          throw UsageError(path + ": xint length mismatch");
      }
      if (r.contains("imp")) rec.imp = r.at("imp").get<std::vector<uint8_t>>();
      if (r.contains("loglik")) rec.loglik = r.at("loglik").get<std::vector<double>>();
      tr.records.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
  return tr;
}

// ------------------------------------------------------------ ConfigReader

ConfigReader::ConfigReader(json j) : j_(std::move(j)) {
  if (!j_.is_object()) throw UsageError("config: expected a JSON object");
}

bool ConfigReader::has(const std::string& key) const { return j_.contains(key); }

void ConfigReader::finish() const {
  std::string unknown;
  for (const auto& [key, val] : j_.items()) {
    if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) {
      if (!unknown.empty()) unknown += ", ";
      unknown += "\"" + key + "\"";
    }
  }
  if (!unknown.empty()) throw UsageError("config: unknown keys: " + unknown);
}

}  // namespace mplex::io
