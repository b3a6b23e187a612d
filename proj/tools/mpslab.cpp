// Command-line front end: `mpslab run <config>` executes a registered
// experiment from a configuration file, `mpslab list` dumps the registry,
// `mpslab selftest` runs the quick construction-level checks.
//
// Exit codes: 0 success, 1 inequality violation, 2 configuration error,
// 3 resource rejection, 4 numerical failure.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mpslab/linalg.hpp"
#include "mpslab/runner.hpp"

namespace {

int do_run(const std::string& config_path, const std::string& out_override,
           long long seed_override, int threads_override) {
  std::ifstream is(config_path);
  if (!is) {
    std::cerr << "error: cannot open config file '" << config_path << "'\n";
    return static_cast<int>(mpslab::RunStatus::config_error);
  }
  std::stringstream buffer;
  buffer << is.rdbuf();

  std::vector<mpslab::ConfigError> errors;
  mpslab::ConfigDoc doc = mpslab::ConfigDoc::parse_text(buffer.str(), errors);

  // command-line overrides win over both config and environment
  if (!out_override.empty()) {
    mpslab::ConfigValue v;
    v.kind = mpslab::ConfigValue::Kind::string;
    v.s = out_override;
    doc.set("output_dir", v);
  }
  if (seed_override >= 0) {
    mpslab::ConfigValue v;
    v.kind = mpslab::ConfigValue::Kind::integer;
    v.i = seed_override;
    doc.set("seed", v);
  }
  if (threads_override > 0) {
    mpslab::ConfigValue v;
    v.kind = mpslab::ConfigValue::Kind::integer;
    v.i = threads_override;
    doc.set("thread_count", v);
  }

  auto cfg = mpslab::build_config(doc, errors);
  if (!errors.empty() || !cfg) {
    std::cerr << "configuration errors in " << config_path << ":\n";
    for (const auto& e : errors) {
      std::cerr << "  ";
      if (e.line > 0) std::cerr << "line " << e.line << ": ";
      if (!e.key.empty()) std::cerr << "key '" << e.key << "': ";
      std::cerr << e.message << "\n";
    }
    return static_cast<int>(mpslab::RunStatus::config_error);
  }

  mpslab::RunOutcome outcome = mpslab::run_experiment(*cfg);
  std::cout << "experiment " << cfg->experiment << ": ";
  switch (outcome.status) {
    case mpslab::RunStatus::ok: std::cout << "ok"; break;
    case mpslab::RunStatus::violations: std::cout << "VIOLATIONS"; break;
    case mpslab::RunStatus::config_error: std::cout << "config error"; break;
    case mpslab::RunStatus::resource_limit: std::cout << "resource rejection"; break;
    case mpslab::RunStatus::numerical_failure: std::cout << "numerical failure"; break;
  }
  if (!outcome.message.empty()) std::cout << " (" << outcome.message << ")";
  std::cout << "\n";
  for (const auto& a : outcome.artifacts) std::cout << "  wrote " << cfg->output_dir << "/" << a << "\n";
  return static_cast<int>(outcome.status);
}

void do_list() {
  for (const auto& info : mpslab::experiment_registry()) {
    std::cout << info.name << (info.stochastic ? "  [seeded]" : "") << "\n    " << info.summary
              << "\n";
    for (const auto& [key, doc] : info.keys) {
      std::cout << "      " << key << ": " << doc << "\n";
    }
  }
  std::cout << "common keys: experiment, seed, output_dir, dense_threshold, thread_count\n";
}

}  // namespace

int main(int argc, char** argv) {
  mpslab::linalg::set_blas_threads(1);

  CLI::App app{"matrix product state laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  long long seed_override = -1;
  int threads_override = 0;

  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("config", config_path, "configuration file path")->required();
  run->add_option("--out", out_override, "output directory override");
  run->add_option("--seed", seed_override, "seed override");
  run->add_option("--threads", threads_override, "thread count override");

  auto* list = app.add_subcommand("list", "list registered experiments");
  auto* selftest = app.add_subcommand("selftest", "run quick construction-level checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return do_run(config_path, out_override, seed_override, threads_override);
    if (list->parsed()) {
      do_list();
      return 0;
    }
    if (selftest->parsed()) {
      return mpslab::run_selftest(std::cout) == 0 ? 0 : 4;
    }
  } catch (const mpslab::ResourceLimitError& e) {
    std::cerr << "resource rejection: " << e.what() << "\n";
    return static_cast<int>(mpslab::RunStatus::resource_limit);
  } catch (const mpslab::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(mpslab::RunStatus::config_error);
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return static_cast<int>(mpslab::RunStatus::numerical_failure);
  }
  return 0;
}
