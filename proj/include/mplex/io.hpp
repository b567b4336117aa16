#pragma once

#include <json.hpp>

#include "mplex/gibbs.hpp"

namespace mplex::io {

using json = nlohmann::json;

struct Dataset {
  int pK = 0;
  std::vector<BinMat> samples;
};

Dataset load_dataset(const std::string& path);
void save_dataset(const std::string& path, const std::vector<BinMat>& samples, int pK);

gibbs::EdgeMask load_mask(const std::string& path);
void save_mask(const std::string& path, const gibbs::EdgeMask& m);

struct ConnFile {
  NetworkShape shape;
  ConnectionMatrices conn;
};
ConnFile load_conn(const std::string& path);
void save_conn(const std::string& path, const NetworkShape& shape, const ConnectionMatrices& conn);

// simulation ground truth: generating parameters plus free-form extras
// (resolved config, benchmark probabilities/labels, ...)
struct TruthFile {
  NetworkShape shape;
  int S = 2;
  ConnectionMatrices conn;
  ContinuousParams params;
  json extra;
};
TruthFile load_truth(const std::string& path);
void save_truth(const std::string& path, const TruthFile& t);

// newline-delimited JSON: one header object, then one object per record
void save_trace(const std::string& path, const gibbs::ChainTrace& tr);
gibbs::ChainTrace load_trace(const std::string& path);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

// strict flat-object reader: every key must be consumed exactly once
class ConfigReader {
 public:
  explicit ConfigReader(json j);
  bool has(const std::string& key) const;

  template <typename T>
  T get(const std::string& key) {  // required key
    if (!has(key)) throw UsageError("config: missing required key \"" + key + "\"");
    return take<T>(key);
  }

  template <typename T>
  T get_or(const std::string& key, T def) {
    if (!has(key)) return def;
    return take<T>(key);
  }

  void finish() const;  // throws UsageError on unconsumed (unknown) keys

 private:
  template <typename T>
  T take(const std::string& key) {
    seen_.push_back(key);
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw UsageError("config: key \"" + key + "\": " + e.what());
    }
  }

  json j_;
  std::vector<std::string> seen_;
};

// json <-> domain conversion helpers shared by files and the CLI
json conn_to_json(const ConnectionMatrices& conn);
ConnectionMatrices conn_from_json(const json& j, const NetworkShape& shape);
json params_to_json(const ContinuousParams& p);
ContinuousParams params_from_json(const json& j, const NetworkShape& shape);

}  // namespace mplex::io
