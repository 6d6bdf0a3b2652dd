#include "harness_internal.hpp"

#include "morselab/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace morselab::harness {

namespace detail {

void config_error(const std::string& what) { throw Error(Errc::Config, what); }

}  // namespace detail

using detail::config_error;

namespace {

Json domain_defaults(const std::string& kind) {
  if (kind == "interval") {
    return {{"kind", "interval"}, {"cells", 200}, {"length", 1.0},
            {"bc", {{"left", "dirichlet"}, {"right", "dirichlet"}}}};
  }
  if (kind == "rectangle") {
    return {{"kind", "rectangle"},
            {"cells", {20, 16}},
            {"size", {1.0, 1.0}},
            {"bc", {{"left", "dirichlet"}, {"right", "dirichlet"}, {"bottom", "dirichlet"}, {"top", "dirichlet"}}}};
  }
  if (kind == "lshape") return {{"kind", "lshape"}, {"n", 8}, {"h", 0.0625}, {"bc", "dirichlet"}};
  if (kind == "mask") {
    return {{"kind", "mask"}, {"rows", {"###", "###", "###"}}, {"h", 0.5}, {"bc", "dirichlet"}};
  }
  if (kind == "necked") {
    return {{"kind", "necked"}, {"block", 8}, {"neck", 4}, {"h", 0.0625}, {"bc", "dirichlet"}};
  }
  config_error("domain.kind must be one of interval, rectangle, lshape, mask, necked (got '" + kind + "')");
}

Json potential_defaults(const std::string& kind) {
  if (kind == "constant") return {{"kind", "constant"}, {"value", -60.0}};
  if (kind == "table") return {{"kind", "table"}, {"values", Json::array()}};
  if (kind == "file") return {{"kind", "file"}, {"path", ""}};
  if (kind == "random") {
    return {{"kind", "random"}, {"vmax", 200.0}, {"seed", nullptr}, {"mirror_axis", nullptr}, {"perturbation", 0.0}};
  }
  config_error("potential.kind must be one of constant, table, file, random (got '" + kind + "')");
}

Json partition_defaults(const std::string& kind) {
  if (kind == "line") return {{"kind", "line"}, {"axis", 0}, {"index", nullptr}, {"lower_is_omega1", true}};
  if (kind == "none") return {{"kind", "none"}};
  config_error("partition.kind must be line or none (got '" + kind + "')");
}

Json numerics_defaults() {
  return {{"zero_tol", linalg::kDefaultZeroTol},
          {"t_grid", 512},
          {"bisection_tol", 1e-10},
          {"max_depth", 16},
          {"lambda_grid", 64},
          {"theta_min", 1e-4},
          {"theta_points", 32},
          {"jitter_attempts", 3},
          {"nodal_zero_tol", 1e-8},
          {"gap_tol", 1e-6},
          {"epsilon", nullptr}};
}

Json base(const std::string& scenario, Json domain, Json potential, Json partition) {
  Json c;
  c["scenario"] = scenario;
  c["seed"] = 0;
  c["lambda"] = 0.0;
  if (!domain.is_null()) {
    c["domain"] = std::move(domain);
    c["potential"] = std::move(potential);
    c["partition"] = std::move(partition);
  }
  c["numerics"] = numerics_defaults();
  c["output"] = {{"dir", nullptr}, {"emit_traces", false}};
  return c;
}

// Recursively overlay `user` onto `target`; `path` names the current key.
void overlay(Json& target, const Json& user, const std::string& path);

void overlay_kind(Json& target, const Json& user, const std::string& path, Json (*defaults)(const std::string&)) {
  if (!user.is_object()) config_error(path + " must be an object");
  if (user.contains("kind")) {
    if (!user["kind"].is_string()) config_error(path + ".kind must be a string");
    const std::string kind = user["kind"].get<std::string>();
    if (kind != target["kind"].get<std::string>()) target = defaults(kind);
  }
  overlay(target, user, path);
}

bool compatible(const Json& def, const Json& val) {
  if (def.is_null()) return true;
  if (def.is_number()) return val.is_number();
  if (def.is_boolean()) return val.is_boolean();
  if (def.is_string()) return val.is_string();
  if (def.is_array()) return val.is_array();
  if (def.is_object()) return val.is_object();
  return false;
}

void overlay(Json& target, const Json& user, const std::string& path) {
  if (!user.is_object()) config_error((path.empty() ? std::string("config") : path) + " must be an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!target.contains(it.key())) config_error("unknown key '" + key + "'");
    Json& slot = target[it.key()];
    if (key == "domain") {
      overlay_kind(slot, *it, key, domain_defaults);
    } else if (key == "potential") {
      overlay_kind(slot, *it, key, potential_defaults);
    } else if (key == "partition") {
      overlay_kind(slot, *it, key, partition_defaults);
    } else if (slot.is_object() && !slot.empty()) {
      if (!it->is_object()) config_error(key + " must be an object");
      overlay(slot, *it, key);
    } else {
      // Knobs defaulting to null are type-checked by validate().
      if (!compatible(slot, *it)) config_error("type mismatch at '" + key + "'");
      slot = *it;
    }
  }
}

int positive_int(const Json& v, const std::string& key, int min) {
  if (!v.is_number_integer() || v.get<long long>() < min) {
    config_error(key + " must be an integer >= " + std::to_string(min));
  }
  return v.get<int>();
}

double positive_real(const Json& v, const std::string& key) {
  if (!v.is_number() || !(v.get<double>() > 0.0) || !std::isfinite(v.get<double>())) {
    config_error(key + " must be a positive number");
  }
  return v.get<double>();
}

grid::BoundaryCondition parse_bc(const Json& v, const std::string& key, bool allow_periodic) {
  if (!v.is_string()) config_error(key + " must be a string");
  const std::string s = v.get<std::string>();
  if (s == "dirichlet") return grid::BoundaryCondition::Dirichlet;
  if (s == "neumann") return grid::BoundaryCondition::Neumann;
  if (s == "periodic" && allow_periodic) return grid::BoundaryCondition::Periodic;
  config_error(key + " must be dirichlet or neumann" + std::string(allow_periodic ? " or periodic" : ""));
}

void validate_domain(const Json& d) {
  const std::string kind = d["kind"].get<std::string>();
  if (kind == "interval") {
    positive_int(d["cells"], "domain.cells", 2);
    positive_real(d["length"], "domain.length");
    parse_bc(d["bc"]["left"], "domain.bc.left", true);
    parse_bc(d["bc"]["right"], "domain.bc.right", true);
  } else if (kind == "rectangle") {
    if (d["cells"].size() != 2) config_error("domain.cells must have two entries");
    if (d["size"].size() != 2) config_error("domain.size must have two entries");
    positive_int(d["cells"][0], "domain.cells[0]", 2);
    positive_int(d["cells"][1], "domain.cells[1]", 2);
    positive_real(d["size"][0], "domain.size[0]");
    positive_real(d["size"][1], "domain.size[1]");
    for (const char* side : {"left", "right", "bottom", "top"}) {
      parse_bc(d["bc"][side], std::string("domain.bc.") + side, true);
    }
  } else if (kind == "lshape") {
    positive_int(d["n"], "domain.n", 1);
    positive_real(d["h"], "domain.h");
    parse_bc(d["bc"], "domain.bc", false);
  } else if (kind == "mask") {
    const Json& rows = d["rows"];
    if (rows.empty()) config_error("domain.rows must not be empty");
    std::size_t width = 0;
    for (const auto& row : rows) {
      if (!row.is_string()) config_error("domain.rows entries must be strings");
      const std::string s = row.get<std::string>();
      if (width == 0) width = s.size();
      if (s.size() != width || s.empty()) config_error("domain.rows must be non-empty and of equal length");
      if (s.find_first_not_of("#.") != std::string::npos) config_error("domain.rows use '#' (inside) and '.' (outside)");
    }
    positive_real(d["h"], "domain.h");
    parse_bc(d["bc"], "domain.bc", false);
  } else if (kind == "necked") {
    positive_int(d["block"], "domain.block", 2);
    positive_int(d["neck"], "domain.neck", 1);
    positive_real(d["h"], "domain.h");
    parse_bc(d["bc"], "domain.bc", false);
  }
}

void validate_potential(const Json& p) {
  const std::string kind = p["kind"].get<std::string>();
  if (kind == "constant") {
    if (!p["value"].is_number()) config_error("potential.value must be a number");
  } else if (kind == "table") {
    for (const auto& x : p["values"]) {
      if (!x.is_number()) config_error("potential.values must be numbers");
    }
  } else if (kind == "file") {
    if (p["path"].get<std::string>().empty()) config_error("potential.path must name a file");
  } else if (kind == "random") {
    positive_real(p["vmax"], "potential.vmax");
    if (!p["seed"].is_null() && (!p["seed"].is_number_integer() || p["seed"].get<long long>() < 0)) {
      config_error("potential.seed must be null or a non-negative integer");
    }
    const Json& axis = p["mirror_axis"];
    if (!axis.is_null() && (!axis.is_number_integer() || axis.get<int>() < 0 || axis.get<int>() > 1)) {
      config_error("potential.mirror_axis must be null, 0 or 1");
    }
    if (!p["perturbation"].is_number() || p["perturbation"].get<double>() < 0.0) {
      config_error("potential.perturbation must be a non-negative number");
    }
  }
}

void validate_partition(const Json& p) {
  if (p["kind"].get<std::string>() == "none") return;
  const Json& axis = p["axis"];
  if (!axis.is_number_integer() || axis.get<int>() < 0 || axis.get<int>() > 1) config_error("partition.axis must be 0 or 1");
  if (!p["index"].is_null() && !p["index"].is_number_integer()) config_error("partition.index must be null or an integer");
}

void validate_numerics(const Json& n) {
  positive_real(n["zero_tol"], "numerics.zero_tol");
  positive_int(n["t_grid"], "numerics.t_grid", 2);
  positive_real(n["bisection_tol"], "numerics.bisection_tol");
  positive_int(n["max_depth"], "numerics.max_depth", 0);
  positive_int(n["lambda_grid"], "numerics.lambda_grid", 2);
  const double theta_min = positive_real(n["theta_min"], "numerics.theta_min");
  if (theta_min >= 0.5 * M_PI) config_error("numerics.theta_min must be below pi/2");
  positive_int(n["theta_points"], "numerics.theta_points", 2);
  positive_int(n["jitter_attempts"], "numerics.jitter_attempts", 0);
  positive_real(n["nodal_zero_tol"], "numerics.nodal_zero_tol");
  positive_real(n["gap_tol"], "numerics.gap_tol");
  if (!n["epsilon"].is_null()) positive_real(n["epsilon"], "numerics.epsilon");
}

void validate(const Json& c) {
  if (!c["seed"].is_number_integer() || c["seed"].get<long long>() < 0) config_error("seed must be a non-negative integer");
  if (!c["lambda"].is_number()) config_error("lambda must be a number");
  if (c.contains("domain")) {
    validate_domain(c["domain"]);
    validate_potential(c["potential"]);
    validate_partition(c["partition"]);
  }
  validate_numerics(c["numerics"]);
  if (!c["output"]["dir"].is_null() && !c["output"]["dir"].is_string()) config_error("output.dir must be null or a string");
  if (c.contains("doubled")) {
    const Json& d = c["doubled"];
    positive_real(d["ell"], "doubled.ell");
    positive_real(d["C"], "doubled.C");
    const int n = positive_int(d["N"], "doubled.N", 2);
    if (n % 2 != 0) config_error("doubled.N must be even");
  }
  if (c.contains("nodal")) {
    positive_int(c["nodal"]["modes"], "nodal.modes", 0);
    positive_int(c["nodal"]["courant_k"], "nodal.courant_k", 0);
  }
  if (c.contains("sweep")) {
    const std::string r = c["sweep"]["realization"].get<std::string>();
    if (r != "G" && r != "D1" && r != "N1" && r != "D2" && r != "N2") {
      config_error("sweep.realization must be one of G, D1, N1, D2, N2");
    }
    if (r != "G" && c["partition"]["kind"] == "none") config_error("sweep.realization " + r + " needs a partition");
  }
  if (c.contains("perturb")) {
    const Json& grid = c["perturb"]["c_grid"];
    if (!grid.is_null() && (!grid.is_array() || grid.empty())) config_error("perturb.c_grid must be null or a non-empty array");
    for (const auto& x : grid) {
      if (!x.is_number() || !(x.get<double>() > 0.0)) config_error("perturb.c_grid must hold positive numbers");
    }
  }
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"mormas", "dnbracket", "friedlander", "doubled-1d", "perturb",
                                              "nodal",  "periodic",  "robin",       "homotopy",   "lambda-sweep"};
  return names;
}

Json default_config(const std::string& scenario) {
  const Json none = partition_defaults("none");
  const Json line = partition_defaults("line");
  Json random = potential_defaults("random");
  auto interval = [](int cells, const char* left, const char* right) {
    Json d = domain_defaults("interval");
    d["cells"] = cells;
    d["bc"] = {{"left", left}, {"right", right}};
    return d;
  };
  auto constant = [](double value) {
    Json p = potential_defaults("constant");
    p["value"] = value;
    return p;
  };

  if (scenario == "mormas" || scenario == "dnbracket" || scenario == "homotopy") {
    return base(scenario, domain_defaults("rectangle"), random, line);
  }
  if (scenario == "friedlander") return base(scenario, interval(200, "dirichlet", "dirichlet"), constant(-50.0), none);
  if (scenario == "doubled-1d") {
    Json c = base(scenario, nullptr, nullptr, nullptr);
    c["doubled"] = {{"ell", 2.0}, {"C", 1.44}, {"N", 2000}};
    return c;
  }
  if (scenario == "perturb") {
    Json d = domain_defaults("rectangle");
    d["cells"] = {20, 12};
    d["size"] = {2.0, 1.0};
    random["vmax"] = 100.0;
    random["mirror_axis"] = 0;
    random["perturbation"] = 0.5;
    Json c = base(scenario, d, random, line);
    c["perturb"] = {{"c_grid", nullptr}};
    return c;
  }
  if (scenario == "nodal") {
    Json d = domain_defaults("rectangle");
    d["cells"] = {60, 36};
    d["size"] = {1.0, 0.6};
    Json c = base(scenario, d, constant(0.0), none);
    c["nodal"] = {{"modes", 8}, {"courant_k", 20}};
    return c;
  }
  if (scenario == "periodic") return base(scenario, interval(400, "periodic", "periodic"), constant(-50.0), none);
  if (scenario == "robin") return base(scenario, interval(200, "neumann", "neumann"), constant(-50.0), none);
  if (scenario == "lambda-sweep") {
    Json c = base(scenario, interval(200, "dirichlet", "dirichlet"), constant(-50.0), none);
    c["sweep"] = {{"realization", "G"}};
    return c;
  }
  config_error("unknown scenario '" + scenario + "'");
}

Json resolve_config(const std::string& scenario, const Json& user) {
  Json c = default_config(scenario);
  if (!user.is_object()) config_error("config must be a JSON object");
  if (user.contains("scenario") && user["scenario"] != scenario) {
    config_error("config names scenario " + user["scenario"].dump() + " but '" + scenario + "' was requested");
  }
  overlay(c, user, "");
  validate(c);
  return c;
}

Json load_config(const std::filesystem::path& file, const std::string& scenario) {
  std::ifstream in(file);
  if (!in) config_error("cannot open config file " + file.string());
  Json user;
  try {
    user = Json::parse(in, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    config_error("cannot parse " + file.string() + ": " + e.what());
  }
  std::string name = scenario;
  if (name.empty()) {
    if (!user.is_object() || !user.contains("scenario") || !user["scenario"].is_string()) {
      config_error("config file does not name a scenario");
    }
    name = user["scenario"].get<std::string>();
  }
  return resolve_config(name, user);
}

namespace detail {

grid::GridDomain build_domain(const Json& d) {
  using grid::BoundaryCondition;
  const std::string kind = d["kind"].get<std::string>();
  if (kind == "interval") {
    const auto left = parse_bc(d["bc"]["left"], "domain.bc.left", true);
    const auto right = parse_bc(d["bc"]["right"], "domain.bc.right", true);
    auto g = grid::build_interval(d["cells"].get<int>(), d["length"].get<double>(), left, right);
    if (left == BoundaryCondition::Periodic && right == BoundaryCondition::Periodic) {
      g = grid::periodic_identification(g, 0);
    }
    return g;
  }
  if (kind == "rectangle") {
    grid::SideConditions bc;
    bc.left = parse_bc(d["bc"]["left"], "domain.bc.left", true);
    bc.right = parse_bc(d["bc"]["right"], "domain.bc.right", true);
    bc.bottom = parse_bc(d["bc"]["bottom"], "domain.bc.bottom", true);
    bc.top = parse_bc(d["bc"]["top"], "domain.bc.top", true);
    auto g = grid::build_rectangle(d["cells"][0].get<int>(), d["cells"][1].get<int>(), d["size"][0].get<double>(),
                                   d["size"][1].get<double>(), bc);
    if (bc.left == BoundaryCondition::Periodic && bc.right == BoundaryCondition::Periodic) {
      g = grid::periodic_identification(g, 0);
    }
    if (bc.bottom == BoundaryCondition::Periodic && bc.top == BoundaryCondition::Periodic) {
      g = grid::periodic_identification(g, 1);
    }
    g.validate();
    return g;
  }
  const auto bc = parse_bc(d["bc"], "domain.bc", false);
  const double h = d["h"].get<double>();
  if (kind == "lshape") return grid::build_l_shape(d["n"].get<int>(), h, bc);
  if (kind == "necked") return grid::build_necked_domain(d["block"].get<int>(), d["neck"].get<int>(), h, bc);
  // Mask rows are written top row first.
  std::vector<std::vector<bool>> mask;
  const Json& rows = d["rows"];
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    std::vector<bool> row;
    for (const char ch : it->get<std::string>()) row.push_back(ch == '#');
    mask.push_back(std::move(row));
  }
  return grid::build_mask_domain(mask, h, bc);
}

assemble::Potential build_potential(const Json& p, const grid::GridDomain& domain, std::uint64_t default_seed) {
  const std::string kind = p["kind"].get<std::string>();
  const auto n = static_cast<std::size_t>(domain.lattice_size());
  if (kind == "constant") return assemble::Potential::constant(p["value"].get<double>());
  if (kind == "table") {
    std::vector<double> values = p["values"].get<std::vector<double>>();
    if (values.size() != n) {
      config_error("potential.values has " + std::to_string(values.size()) + " entries; the lattice has " +
                   std::to_string(n));
    }
    return assemble::Potential::table(std::move(values));
  }
  if (kind == "file") {
    const std::string path = p["path"].get<std::string>();
    std::ifstream in(path);
    if (!in) config_error("cannot open potential file " + path);
    std::vector<double> values;
    double x = 0.0;
    while (in >> x) values.push_back(x);
    if (!in.eof()) config_error("potential file " + path + " holds a non-numeric token");
    if (values.size() != n) {
      config_error("potential file " + path + " has " + std::to_string(values.size()) + " values; the lattice has " +
                   std::to_string(n));
    }
    return assemble::Potential::table(std::move(values));
  }
  const double vmax = p["vmax"].get<double>();
  const std::uint64_t seed = p["seed"].is_null() ? default_seed : p["seed"].get<std::uint64_t>();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-vmax, vmax);
  std::vector<double> values(n);
  for (double& v : values) v = dist(rng);
  if (!p["mirror_axis"].is_null()) {
    const int axis = p["mirror_axis"].get<int>();
    if (axis >= domain.dimension()) config_error("potential.mirror_axis exceeds the domain dimension");
    for (grid::Index k = 0; k < domain.lattice_size(); ++k) {
      auto c = domain.coords(k);
      const int mirrored = domain.cells(axis) - c[static_cast<std::size_t>(axis)];
      if (mirrored < c[static_cast<std::size_t>(axis)]) {
        c[static_cast<std::size_t>(axis)] = mirrored;
        values[static_cast<std::size_t>(k)] = values[static_cast<std::size_t>(domain.lattice_index(c[0], c[1]))];
      }
    }
    const double amplitude = p["perturbation"].get<double>();
    if (amplitude > 0.0) {
      std::uniform_real_distribution<double> noise(-amplitude, amplitude);
      for (double& v : values) v += noise(rng);
    }
  }
  // Identified periodic vertices read their representative's value.
  return assemble::Potential::table(std::move(values));
}

std::optional<grid::Partition> build_partition(const Json& p, const grid::GridDomain& domain) {
  if (p["kind"].get<std::string>() == "none") return std::nullopt;
  const int axis = p["axis"].get<int>();
  if (axis >= domain.dimension()) config_error("partition.axis exceeds the domain dimension");
  const int index = p["index"].is_null() ? domain.cells(axis) / 2 : p["index"].get<int>();
  return grid::partition_by_line(domain, axis, index, p["lower_is_omega1"].get<bool>());
}

}  // namespace detail

}  // namespace morselab::harness
