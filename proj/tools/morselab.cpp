#include "morselab/error.hpp"
#include "morselab/harness.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using morselab::harness::Json;

namespace {

constexpr int kUsageError = 3;

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw morselab::Error(morselab::Errc::Config, "cannot write " + path.string());
  out << text;
}

void print_report(const morselab::harness::Report& r) {
  std::cout << r.scenario << ": " << to_string(r.status()) << '\n';
  for (const auto& c : r.checks) {
    std::cout << "  " << (c.pass ? "PASS " : "FAIL ") << c.name << "  [" << c.lhs.dump() << ' ' << c.relation << ' '
              << c.rhs.dump() << "]\n";
  }
  for (const auto& n : r.notes) std::cout << "  note: " << n << '\n';
}

std::vector<int> parse_n_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw morselab::Error(morselab::Errc::Config, "--N expects comma-separated integers, got '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Morse index identities on structured grids"};
  app.require_subcommand(1);
  app.set_version_flag("--version", morselab::harness::kVersion);

  std::string scenario, config_file, out_dir, n_text;
  std::uint64_t seed = 0;
  int count = 0, workers = 0;
  bool emit_traces = false, json = false, timing = false;

  auto* verify = app.add_subcommand("verify", "Run one scenario and report its identity checks");
  verify->add_option("scenario", scenario, "Scenario name")->required()->check(CLI::IsMember(morselab::harness::scenario_names()));
  verify->add_option("--config", config_file, "JSON config file (defaults when omitted)");
  auto* seed_opt = verify->add_option("--seed", seed, "Override the config seed");
  verify->add_option("--out", out_dir, "Directory for the report and traces");
  verify->add_flag("--emit-traces", emit_traces, "Write CSV eigenvalue branches and nodal labelings");
  verify->add_flag("--json", json, "Print the report as JSON on stdout");
  verify->add_flag("--timing", timing, "Include wall time in the report");

  auto* suite = app.add_subcommand("suite", "Run the randomized identity suite");
  suite->add_option("--seed", seed, "Suite seed")->required();
  suite->add_option("--count", count, "Number of random scenarios")->required();
  suite->add_option("--workers", workers, "Worker threads (0 = hardware concurrency)");
  suite->add_option("--out", out_dir, "Directory for the suite report");
  suite->add_flag("--json", json, "Print the suite report as JSON on stdout");

  auto* converge = app.add_subcommand("converge", "Index convergence against closed forms");
  converge->add_option("scenario", scenario, "doubled-1d or friedlander")->required()->check(CLI::IsMember({"doubled-1d", "friedlander"}));
  converge->add_option("--N", n_text, "Comma-separated grid sizes")->required();
  converge->add_option("--config", config_file, "JSON config file");
  converge->add_flag("--json", json, "Print the table as JSON on stdout");

  auto* config = app.add_subcommand("config", "Print the default config of a scenario");
  config->add_option("scenario", scenario, "Scenario name")->required()->check(CLI::IsMember(morselab::harness::scenario_names()));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*config) {
      std::cout << morselab::harness::default_config(scenario).dump(2) << '\n';
      return 0;
    }
    if (*verify) {
      Json cfg = config_file.empty() ? morselab::harness::default_config(scenario)
                                     : morselab::harness::load_config(config_file, scenario);
      if (*seed_opt) cfg["seed"] = seed;
      if (!out_dir.empty()) cfg["output"]["dir"] = out_dir;
      if (emit_traces) cfg["output"]["emit_traces"] = true;
      cfg = morselab::harness::resolve_config(scenario, cfg);
      const auto start = std::chrono::steady_clock::now();
      auto report = morselab::harness::run_scenario(cfg);
      if (timing) report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      const std::string text = report.to_json().dump(2) + "\n";
      if (!cfg["output"]["dir"].is_null()) {
        const fs::path dir = cfg["output"]["dir"].get<std::string>();
        write_file(dir / (scenario + ".json"), text);
        for (const auto& [name, csv] : report.traces) write_file(dir / name, csv);
      }
      if (json) {
        std::cout << text;
      } else {
        print_report(report);
      }
      return report.exit_code();
    }
    if (*suite) {
      const auto result = morselab::harness::run_suite(seed, count, workers);
      const std::string text = result.to_json().dump(2) + "\n";
      if (!out_dir.empty()) write_file(fs::path(out_dir) / "suite.json", text);
      if (json) {
        std::cout << text;
      } else {
        std::cout << "suite seed " << seed << ": " << result.passed << "/" << result.count << " pass, " << result.failed
                  << " fail, " << result.indeterminate << " indeterminate\n";
        if (result.first_failure) {
          std::cout << "first failing id " << *result.first_failure << "; replay config:\n"
                    << morselab::harness::suite_config(seed, *result.first_failure).dump(2) << '\n';
        }
      }
      return result.exit_code();
    }
    if (*converge) {
      const Json cfg = config_file.empty() ? morselab::harness::default_config(scenario)
                                           : morselab::harness::load_config(config_file, scenario);
      const auto table = morselab::harness::convergence_study(scenario, parse_n_list(n_text), cfg);
      if (json) {
        std::cout << table.to_json().dump(2) << '\n';
      } else {
        std::cout << "expected " << table.expected.dump() << '\n';
        for (const auto& row : table.rows) {
          std::cout << "N=" << row.n << "  " << row.indices.dump() << (row.matches ? "  ok" : "  differs") << '\n';
        }
        std::cout << "stable from N = " << (table.stable_from ? std::to_string(*table.stable_from) : "none") << '\n';
      }
      return table.stable_from ? 0 : 1;
    }
  } catch (const morselab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return 0;
}
