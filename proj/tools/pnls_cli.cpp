#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pnls/catalog.hpp"
#include "pnls/config.hpp"
#include "pnls/errors.hpp"
#include "pnls/runner.hpp"

namespace fs = std::filesystem;

namespace {

void report(const pnls::RunResult& r, const std::string& what) {
  if (r.exit_code == 0) {
    std::printf("ok   %s -> %s (%.1f s)\n", what.c_str(), r.output_dir.string().c_str(), r.wall_seconds);
  } else {
    std::fprintf(stderr, "FAIL %s: %s: %s\n", what.c_str(), r.error_code.c_str(), r.message.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral NLS simulator with partial harmonic confinement"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  std::string output_dir;
  app.add_option("--threads", threads, "Worker threads (OpenMP threads for run/verify, concurrent scenarios for sweep)")
      ->check(CLI::PositiveNumber);
  app.add_option("--output-dir", output_dir, "Override the output directory");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run one scenario config");
  run->add_option("config", config_path, "Scenario JSON file")->required();

  std::string pattern;
  auto* sweep = app.add_subcommand("sweep", "Run every config matching a glob, one scenario per worker");
  sweep->add_option("pattern", pattern, "Glob such as 'scenarios/*.json' (quote it)")->required();

  std::string entry;
  bool list = false;
  auto* verify = app.add_subcommand("verify", "Run an acceptance scenario from the catalog and print pass/fail");
  verify->add_option("name", entry, "Catalog name or number, or 'all'");
  verify->add_flag("--list", list, "List catalog entries");

  std::string export_dir;
  auto* scenarios = app.add_subcommand("scenarios", "Write the catalog's scenario configs as JSON files");
  scenarios->add_option("dir", export_dir, "Destination directory")->required();

  CLI11_PARSE(app, argc, argv);

  const std::optional<fs::path> out_override =
      output_dir.empty() ? std::nullopt : std::optional<fs::path>(fs::path(output_dir));
  if (threads > 0 && !sweep->parsed()) omp_set_num_threads(threads);

  try {
    if (run->parsed()) {
      const pnls::RunResult r = pnls::run_config_file(config_path, {out_override});
      report(r, config_path);
      return r.exit_code;
    }
    if (sweep->parsed()) {
      const auto configs = pnls::expand_glob(pattern);
      if (configs.empty()) {
        std::fprintf(stderr, "no config matches %s\n", pattern.c_str());
        return 2;
      }
      const auto results = pnls::run_sweep(configs, threads > 0 ? threads : 1, {out_override});
      int status = 0;
      for (std::size_t i = 0; i < configs.size(); ++i) {
        report(results[i], configs[i].string());
        status = std::max(status, results[i].exit_code);
      }
      return status;
    }
    if (verify->parsed()) {
      if (list || entry.empty()) {
        for (const auto& e : pnls::catalog()) {
          std::printf("%2d  %-22s %s (budget %.0f s)\n", e.id, e.name.c_str(), e.title.c_str(), e.budget_seconds);
        }
        return list ? 0 : 2;
      }
      pnls::CatalogContext ctx{out_override};
      bool ok = true;
      if (entry == "all") {
        for (const auto& e : pnls::catalog()) {
          const auto res = pnls::run_criterion(e, ctx);
          std::printf("%s\n", res.line().c_str());
          std::fflush(stdout);
          ok = ok && res.pass();
        }
      } else {
        const auto res = pnls::run_criterion(pnls::catalog_entry(entry), ctx);
        std::printf("%s\n", res.line().c_str());
        ok = res.pass();
      }
      return ok ? 0 : 1;
    }
    if (scenarios->parsed()) {
      fs::create_directories(export_dir);
      for (const auto& [name, cfg] : pnls::catalog_scenarios()) {
        const fs::path p = fs::path(export_dir) / (name + ".json");
        std::ofstream(p) << pnls::serialize_config(cfg);
        std::printf("wrote %s\n", p.string().c_str());
      }
      return 0;
    }
  } catch (const pnls::Error& e) {
    std::fprintf(stderr, "%s: %s\n", e.code().c_str(), e.what());
    return 2;
  }
  return 0;
}
