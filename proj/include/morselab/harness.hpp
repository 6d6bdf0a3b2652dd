#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace morselab::harness {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

const std::vector<std::string>& scenario_names();

/// Complete default configuration of a scenario. Every knob a scenario reads
/// appears here.
Json default_config(const std::string& scenario);

/// Overlay `user` onto the scenario defaults. Unknown keys, type mismatches
/// and invalid values raise Errc::Config with the offending key path.
/// Objects with a "kind" key (domain, potential, partition) restart from the
/// defaults of the requested kind.
Json resolve_config(const std::string& scenario, const Json& user);

/// Parses a JSON config file and resolves it against `scenario` (or the
/// file's own "scenario" key when `scenario` is empty).
Json load_config(const std::filesystem::path& file, const std::string& scenario = {});

struct Check {
  std::string name;
  Json lhs;
  Json rhs;
  std::string relation;  // "==" or "<="
  bool pass = false;
};

enum class Status { Pass, Fail, Indeterminate };
std::string to_string(Status status);

struct Report {
  std::string scenario;
  Json config;
  Json indices = Json::object();
  std::vector<Check> checks;
  std::vector<std::string> notes;
  bool indeterminate = false;
  std::optional<double> wall_time;
  // File name -> CSV contents, written only on request.
  std::map<std::string, std::string> traces;

  Status status() const;
  int exit_code() const;  // 0 pass, 1 violation, 2 indeterminate
  Json to_json() const;

  void check_eq(const std::string& name, long long lhs, long long rhs);
  void check_le(const std::string& name, const Json& lhs, const Json& rhs);
};

/// Runs one scenario from a resolved config. Deterministic in the config.
/// Numerical failures that a small spectral shift can resolve
/// (Indeterminate, ASingular) are retried with seeded jitter on lambda.
Report run_scenario(const Json& config);

/// Config of suite scenario `id`: random rectangle, random split line,
/// random per-vertex potential.
Json suite_config(std::uint64_t seed, int id, const std::string& scenario = "mormas");

struct SuiteEntry {
  int id = 0;
  Status status = Status::Pass;
  std::vector<Report> reports;  // mormas, dnbracket, friedlander, homotopy
};

struct SuiteResult {
  std::uint64_t seed = 0;
  int count = 0;
  std::vector<SuiteEntry> entries;  // by id
  int passed = 0;
  int failed = 0;
  int indeterminate = 0;
  std::optional<int> first_failure;
  Json to_json() const;
  int exit_code() const;
};

inline const std::vector<std::string>& suite_scenarios() {
  static const std::vector<std::string> names{"mormas", "dnbracket", "friedlander", "homotopy"};
  return names;
}

/// Runs `count` random scenarios on `workers` threads (0 = hardware
/// concurrency); results are ordered by id regardless of scheduling.
SuiteResult run_suite(std::uint64_t seed, int count, int workers = 0);

struct ConvergenceRow {
  int n = 0;
  Json indices;
  bool matches = false;
};

struct ConvergenceTable {
  std::string scenario;
  Json expected;
  std::vector<ConvergenceRow> rows;
  std::optional<int> stable_from;  // smallest N after which every row matches
  Json to_json() const;
};

/// Discrete indices against closed-form continuum values as N grows.
/// Supports doubled-1d and friedlander (1D interval).
ConvergenceTable convergence_study(const std::string& scenario, const std::vector<int>& n_list,
                                   const Json& config);

}  // namespace morselab::harness
