#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "lpplab/harness.hpp"

namespace {

// Precedence: CLI flag > config file > LPPLAB_SEED > default.
void apply_seed_fallback(lpplab::ExperimentConfig& cfg, bool seed_given,
                         bool seed_in_file) {
  if (seed_given || seed_in_file) return;
  if (const char* env = std::getenv("LPPLAB_SEED")) {
    cfg.seed = std::strtoull(env, nullptr, 10);
  }
}

std::string join_doubles(const std::vector<double>& xs) {
  std::ostringstream os;
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lpplab: verification harness for exponential last-passage percolation"};
  app.require_subcommand(1);

  lpplab::ExperimentConfig cfg;
  std::string config_path;
  std::string directions_csv;
  std::string heights_csv;
  bool with_hist = false;
  std::string export_kind = "exact";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file; flags override");
    cmd->add_option("--seed", cfg.seed, "master seed (fallback: LPPLAB_SEED)");
    cmd->add_option("--replicas", cfg.replicas, "Monte Carlo replicas");
    cmd->add_option("--k", cfg.k, "grid width of the Busemann box");
    cmd->add_option("--l", cfg.ell, "grid height of the Busemann box");
    cmd->add_option("--d", cfg.d, "number of directions");
    cmd->add_option("--r", directions_csv, "directions, comma separated");
    cmd->add_option("--heights", heights_csv, "prelimit heights, comma separated");
    cmd->add_option("--burn-in", cfg.burn_in, "queue burn-in columns");
    cmd->add_option("--out", cfg.out, "output path");
    cmd->add_option("--format", cfg.format, "report format: json or csv");
    cmd->add_option("--jobs", cfg.jobs, "worker threads (0 = hardware)");
    cmd->add_flag("--quick", cfg.quick, "reduced-size smoke mode");
  };

  CLI::App* run = app.add_subcommand("run", "run a verification suite");
  run->add_option("--suite", cfg.suite,
                  "deterministic|busmar|invariance|burke|cdf|independence|shen|thin|lln|all");
  add_common(run);

  CLI::App* exp = app.add_subcommand("export", "export sample replicas to CSV");
  exp->add_option("--kind", export_kind, "exact or prelimit");
  exp->add_flag("--hist", with_hist, "also write a 64-bin histogram side file");
  add_common(exp);

  CLI11_PARSE(app, argc, argv);

  try {
    bool seed_in_file = false;
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw std::invalid_argument("cannot open config " + config_path);
      nlohmann::json j = nlohmann::json::parse(is);
      seed_in_file = j.contains("seed");
      lpplab::ExperimentConfig from_file = lpplab::ExperimentConfig::from_json(j);
      // Start from the file, then re-apply any explicit flags.
      std::swap(cfg, from_file);
      CLI::App* active = run->parsed() ? run : exp;
      for (const CLI::Option* opt : active->get_options()) {
        if (opt->count() == 0) continue;
        std::string name = opt->get_name();
        if (name == "--seed") cfg.seed = from_file.seed;
        else if (name == "--replicas") cfg.replicas = from_file.replicas;
        else if (name == "--k") cfg.k = from_file.k;
        else if (name == "--l") cfg.ell = from_file.ell;
        else if (name == "--d") cfg.d = from_file.d;
        else if (name == "--burn-in") cfg.burn_in = from_file.burn_in;
        else if (name == "--out") cfg.out = from_file.out;
        else if (name == "--format") cfg.format = from_file.format;
        else if (name == "--jobs") cfg.jobs = from_file.jobs;
        else if (name == "--quick") cfg.quick = from_file.quick;
        else if (name == "--suite") cfg.suite = from_file.suite;
      }
    }
    if (!directions_csv.empty()) {
      cfg.directions.clear();
      std::istringstream ss(directions_csv);
      std::string tok;
      while (std::getline(ss, tok, ',')) cfg.directions.push_back(std::stod(tok));
    }
    if (!heights_csv.empty()) {
      cfg.heights.clear();
      std::istringstream ss(heights_csv);
      std::string tok;
      while (std::getline(ss, tok, ',')) cfg.heights.push_back(std::stoi(tok));
    }
    apply_seed_fallback(cfg, run->parsed() ? run->count("--seed") > 0
                                           : exp->count("--seed") > 0,
                        seed_in_file);

    if (run->parsed()) {
      lpplab::SuiteReport report = lpplab::run_suite(cfg);
      for (const lpplab::TestReport& c : report.cases) {
        std::printf("%-4s %-58s stat=%-12.6g thr=%-10.6g", c.pass ? "ok" : "FAIL",
                    c.name.c_str(), c.statistic, c.threshold);
        if (c.p_value) std::printf(" p=%.4g", *c.p_value);
        std::printf("\n");
      }
      std::printf("suite %s: %s (%zu cases, %.1f s)\n", report.suite.c_str(),
                  report.pass ? "PASS" : "FAIL", report.cases.size(),
                  report.wall_ms / 1000.0);
      if (!cfg.out.empty())
        std::printf("report written to %s\n", cfg.out.c_str());
      return report.pass ? 0 : 1;
    }

    lpplab::sample_export(cfg, export_kind, with_hist);
    std::printf("exported %d replicas (k=%d l=%d d=%d r=%s) to %s\n", cfg.replicas,
                cfg.k, cfg.ell, cfg.d, join_doubles(cfg.directions).c_str(),
                cfg.out.c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
