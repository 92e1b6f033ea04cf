// Copyright 2026 The sgcache Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy of
// the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations under
// the License.


// sgcsim: run, sweep, validate or model a flash cache configuration.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "sgc/core/error.hpp"
#include "sgc/harness/config.hpp"
#include "sgc/harness/runner.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool deterministic = false;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "write output here instead of stdout");
  cmd->add_option("--seed", o.seed, "override the config seed");
  cmd->add_flag("--deterministic", o.deterministic, "single-threaded, no timing output");
}

sgc::harness::RunConfig load(const Options& o) {
  nlohmann::json doc = sgc::harness::load_document(o.config);
  if (o.seed) doc = sgc::harness::with_override(doc, "seed", *o.seed);
  return sgc::harness::parse_config(doc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Set-group flash cache simulator"};
  app.require_subcommand(1);
  Options opt;
  CLI::App* run = app.add_subcommand("run", "replay a workload and print metric snapshots");
  CLI::App* sweep = app.add_subcommand("sweep", "one steady-state row per swept parameter value");
  CLI::App* model = app.add_subcommand("model", "closed-form predictions for the config");
  CLI::App* validate = app.add_subcommand("validate", "compare simulation with the models");
  for (CLI::App* cmd : {run, sweep, model, validate}) add_common(cmd, opt);

  CLI11_PARSE(app, argc, argv);

  const auto start = std::chrono::steady_clock::now();
  int status = 0;
  try {
    const sgc::harness::RunConfig config = load(opt);
    std::ofstream file;
    if (!opt.out.empty()) {
      file.open(opt.out);
      if (!file) throw sgc::ConfigError("--out: cannot open " + opt.out);
    }
    std::ostream& out = opt.out.empty() ? std::cout : file;

    if (*run) {
      sgc::harness::run(config, &out);
    } else if (*sweep) {
      sgc::harness::sweep(config, out);
    } else if (*model) {
      sgc::harness::write_model(config, out);
    } else {
      status = sgc::harness::write_validation(sgc::harness::validate(config), out) ? 0 : 1;
    }
    out.flush();
    if (!out) throw sgc::Error("write failed");
  } catch (const sgc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  if (!opt.deterministic) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << "elapsed " << secs << " s\n";
  }
  return status;
}
