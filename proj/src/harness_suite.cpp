#include "harness_internal.hpp"

#include "morselab/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

namespace morselab::harness {

using detail::config_error;

Json suite_config(std::uint64_t seed, int id, const std::string& scenario) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id)};
  std::mt19937_64 rng(seq);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int nx = pick(4, 40);
  const int ny = pick(4, 40);
  const int axis = pick(0, 1);
  const int index = pick(1, (axis == 0 ? nx : ny) - 1);
  auto side = [&] { return pick(0, 1) == 0 ? "dirichlet" : "neumann"; };
  Json bc{{"left", side()}, {"right", side()}, {"bottom", side()}, {"top", side()}};
  // The split line ends on these sides; Sigma may not touch a Neumann face.
  if (axis == 0) {
    bc["bottom"] = "dirichlet";
    bc["top"] = "dirichlet";
  } else {
    bc["left"] = "dirichlet";
    bc["right"] = "dirichlet";
  }
  const std::uint64_t v_seed = rng() >> 1;
  Json user{{"scenario", scenario},
            {"seed", seed},
            {"domain", {{"kind", "rectangle"}, {"cells", {nx, ny}}, {"size", {1.0, 1.0}}, {"bc", bc}}},
            {"potential", {{"kind", "random"}, {"vmax", 200.0}, {"seed", v_seed}}},
            {"partition", {{"kind", "line"}, {"axis", axis}, {"index", index}}}};
  return resolve_config(scenario, user);
}

Json SuiteResult::to_json() const {
  Json out;
  out["seed"] = seed;
  out["count"] = count;
  out["version"] = kVersion;
  out["run"] = entries.size();
  out["passed"] = passed;
  out["failed"] = failed;
  out["indeterminate"] = indeterminate;
  if (first_failure) {
    const SuiteEntry& e = entries[static_cast<std::size_t>(*first_failure)];
    Json failing = Json::array();
    for (const Report& r : e.reports) {
      if (r.status() != Status::Pass) failing.push_back(r.to_json());
    }
    out["first_failure"] = {{"id", *first_failure}, {"config", suite_config(seed, *first_failure)}, {"reports", failing}};
  } else {
    out["first_failure"] = nullptr;
  }
  Json list = Json::array();
  for (const SuiteEntry& e : entries) {
    Json item{{"id", e.id}, {"status", to_string(e.status)}};
    Json failed_checks = Json::array();
    for (const Report& r : e.reports) {
      for (const Check& c : r.checks) {
        if (!c.pass) failed_checks.push_back(r.scenario + ": " + c.name);
      }
    }
    item["failed_checks"] = std::move(failed_checks);
    list.push_back(std::move(item));
  }
  out["scenarios"] = std::move(list);
  return out;
}

int SuiteResult::exit_code() const {
  if (failed > 0) return 1;
  return indeterminate > 0 ? 2 : 0;
}

SuiteResult run_suite(std::uint64_t seed, int count, int workers) {
  if (count < 1) config_error("suite count must be at least 1");
  if (workers <= 0) workers = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  workers = std::min(workers, count);

  std::vector<std::optional<SuiteEntry>> slots(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  // Lowest failing id seen so far; ids above it are not started.
  std::atomic<int> stop_after{count};
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      const int id = next.fetch_add(1);
      if (id >= count || id > stop_after.load()) return;
      SuiteEntry entry;
      entry.id = id;
      for (const std::string& name : suite_scenarios()) {
        try {
          entry.reports.push_back(run_scenario(suite_config(seed, id, name)));
        } catch (const Error& e) {
          Report r;
          r.scenario = name;
          r.config = suite_config(seed, id, name);
          r.checks.push_back({"scenario error", e.what(), nullptr, "none", false});
          entry.reports.push_back(std::move(r));
        }
      }
      bool fail = false, indeterminate = false;
      for (const Report& r : entry.reports) {
        fail = fail || r.status() == Status::Fail;
        indeterminate = indeterminate || r.status() == Status::Indeterminate;
      }
      entry.status = fail ? Status::Fail : indeterminate ? Status::Indeterminate : Status::Pass;
      if (fail) {
        int current = stop_after.load();
        while (id < current && !stop_after.compare_exchange_weak(current, id)) {
        }
      }
      std::lock_guard lock(error_mutex);
      slots[static_cast<std::size_t>(id)] = std::move(entry);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  SuiteResult out;
  out.seed = seed;
  out.count = count;
  // Keep the prefix up to the first failure so the result does not depend on
  // how far other workers got.
  const int last = std::min(count - 1, stop_after.load());
  for (int id = 0; id <= last; ++id) {
    auto& slot = slots[static_cast<std::size_t>(id)];
    if (!slot) continue;
    out.entries.push_back(std::move(*slot));
    const SuiteEntry& e = out.entries.back();
    if (e.status == Status::Pass) ++out.passed;
    if (e.status == Status::Fail) {
      ++out.failed;
      if (!out.first_failure) out.first_failure = e.id;
    }
    if (e.status == Status::Indeterminate) ++out.indeterminate;
  }
  return out;
}

Json ConvergenceTable::to_json() const {
  Json out;
  out["scenario"] = scenario;
  out["version"] = kVersion;
  out["expected"] = expected;
  Json rows_json = Json::array();
  for (const auto& r : rows) rows_json.push_back({{"N", r.n}, {"indices", r.indices}, {"matches", r.matches}});
  out["rows"] = std::move(rows_json);
  out["stable_from"] = stable_from ? Json(*stable_from) : Json(nullptr);
  return out;
}

ConvergenceTable convergence_study(const std::string& scenario, const std::vector<int>& n_list, const Json& config) {
  if (n_list.empty()) config_error("N list must not be empty");
  for (std::size_t i = 1; i < n_list.size(); ++i) {
    if (n_list[i] <= n_list[i - 1]) config_error("N list must be strictly increasing");
  }
  ConvergenceTable table;
  table.scenario = scenario;
  if (scenario == "doubled-1d") {
    const Json& d = config["doubled"];
    const double theta = std::sqrt(d["C"].get<double>()) * d["ell"].get<double>() / 2.0;
    table.expected = {{"maslov", detail::doubled_signed(theta)}};
    for (const int n : n_list) {
      if (n < 2 || n % 2 != 0) config_error("doubled-1d needs even N >= 2");
      Json c = config;
      c["doubled"]["N"] = n;
      const Report r = run_scenario(c);
      ConvergenceRow row;
      row.n = n;
      row.indices = {{"maslov", r.indices.value("maslov", 0)},
                     {"mor_G", r.indices.value("mor_G", 0)},
                     {"mor_N1", r.indices.value("mor_N1", 0)},
                     {"mor_D2", r.indices.value("mor_D2", 0)}};
      row.matches = !r.indeterminate && row.indices["maslov"] == table.expected["maslov"];
      table.rows.push_back(std::move(row));
    }
  } else if (scenario == "friedlander") {
    const Json& dom = config["domain"];
    const Json& pot = config["potential"];
    if (dom["kind"] != "interval" || pot["kind"] != "constant") {
      config_error("friedlander convergence needs an interval domain and a constant potential");
    }
    const double ell = dom["length"].get<double>();
    const double shift = pot["value"].get<double>() - config["lambda"].get<double>();
    // Continuum eigenvalues (j pi / ell)^2 + V - lambda; Neumann from j = 0.
    int neumann = 0, dirichlet = 0;
    for (int j = 0; std::pow(j * std::numbers::pi / ell, 2) + shift < 0.0; ++j) {
      ++neumann;
      if (j > 0) ++dirichlet;
    }
    table.expected = {{"mor_N", neumann}, {"mor_D", dirichlet}, {"difference", neumann - dirichlet}};
    for (const int n : n_list) {
      if (n < 2) config_error("friedlander needs N >= 2");
      Json c = config;
      c["domain"]["cells"] = n;
      c["partition"] = {{"kind", "none"}};
      const Report r = run_scenario(c);
      ConvergenceRow row;
      row.n = n;
      const Json& b = r.indices.contains("boundary") ? r.indices["boundary"] : Json::object();
      row.indices = {{"mor_N", b.value("mor_N", -1)}, {"mor_D", b.value("mor_D", -1)},
                     {"difference", b.value("mor_N_minus_mor_D", -1)}};
      row.matches = !r.indeterminate && row.indices == table.expected;
      table.rows.push_back(std::move(row));
    }
  } else {
    config_error("convergence studies support doubled-1d and friedlander");
  }
  for (auto it = table.rows.rbegin(); it != table.rows.rend() && it->matches; ++it) table.stable_from = it->n;
  return table;
}

}  // namespace morselab::harness
