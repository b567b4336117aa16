#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mplex.h"

namespace {

int run_command(int (*fn)(const char*, char**), const std::string& cfg_path) {
  std::ifstream in(cfg_path);
  if (!in) {
    std::cerr << "mplex: cannot open config file: " << cfg_path << "\n";
    return MPLEX_ERR_USAGE;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();

  char* result = nullptr;
  int code = fn(text.c_str(), &result);
  if (code != MPLEX_OK) {
    std::cerr << "mplex: error: " << mplex_last_error() << "\n";
    return code;
  }
  std::cout << result << "\n";
  mplex_string_free(result);
  return MPLEX_OK;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiplex network hierarchy toolkit"};
  app.set_version_flag("--version", mplex_version());
  app.require_subcommand(1);

  struct Sub {
    CLI::App* cmd;
    std::string config;
    int (*fn)(const char*, char**);
  };
  std::vector<Sub> subs;
  subs.reserve(8);  // option bindings hold references into the vector
  auto add = [&](const char* name, const char* desc, int (*fn)(const char*, char**)) {
    subs.push_back({app.add_subcommand(name, desc), std::string(), fn});
    subs.back().cmd->add_option("config", subs.back().config, "JSON config file")
        ->required();
  };
  add("simulate", "draw a synthetic dataset (and its generating truth)", mplex_simulate);
  add("fit", "run the Gibbs sampler on a dataset, write trace + summary", mplex_fit);
  add("select", "fit a (p0, p1) grid and rank shapes by WAIC", mplex_select);
  add("identify", "certify identifiability conditions of a connection stack", mplex_identify);
  add("predict", "posterior probabilities for masked entries of a fitted trace", mplex_predict);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);  // prints help/version or the error message
    return code == 0 ? 0 : MPLEX_ERR_USAGE;
  }

  for (const Sub& s : subs)
    if (s.cmd->parsed()) return run_command(s.fn, s.config);
  return MPLEX_ERR_USAGE;  // unreachable: a subcommand is required
}
