#include "harness_internal.hpp"

#include "morselab/dtn.hpp"
#include "morselab/error.hpp"
#include "morselab/maslov.hpp"
#include "morselab/nodal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace morselab::harness {

using assemble::Realization;
using detail::config_error;
using linalg::Matrix;

std::string to_string(Status status) {
  switch (status) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Indeterminate: return "indeterminate";
  }
  return "?";
}

Status Report::status() const {
  for (const Check& c : checks) {
    if (!c.pass) return Status::Fail;
  }
  return indeterminate ? Status::Indeterminate : Status::Pass;
}

int Report::exit_code() const {
  switch (status()) {
    case Status::Pass: return 0;
    case Status::Fail: return 1;
    case Status::Indeterminate: return 2;
  }
  return 2;
}

Json Report::to_json() const {
  Json out;
  out["scenario"] = scenario;
  out["version"] = kVersion;
  out["status"] = to_string(status());
  out["config"] = config;
  out["indices"] = indices;
  Json list = Json::array();
  for (const Check& c : checks) {
    list.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"relation", c.relation}, {"pass", c.pass}});
  }
  out["checks"] = std::move(list);
  out["notes"] = notes;
  if (wall_time) out["wall_time_s"] = *wall_time;
  return out;
}

void Report::check_eq(const std::string& name, long long lhs, long long rhs) {
  checks.push_back({name, lhs, rhs, "==", lhs == rhs});
}

void Report::check_le(const std::string& name, const Json& lhs, const Json& rhs) {
  checks.push_back({name, lhs, rhs, "<=", lhs.get<double>() <= rhs.get<double>()});
}

namespace {

struct Context {
  const Json& config;
  double lambda = 0.0;
  double zero_tol = linalg::kDefaultZeroTol;
  bool emit_traces = false;

  const Json& numerics() const { return config["numerics"]; }
  maslov::Options maslov_options() const {
    maslov::Options o;
    o.t_grid = numerics()["t_grid"].get<int>();
    o.bisection_tol = numerics()["bisection_tol"].get<double>();
    o.max_depth = numerics()["max_depth"].get<int>();
    o.zero_tol = zero_tol;
    return o;
  }
};

linalg::Inertia inertia(const Context& ctx, const Matrix& m) { return linalg::ldlt_inertia(m, ctx.zero_tol); }
int mor(const Context& ctx, const Matrix& m) { return inertia(ctx, m).morse(); }

struct Problem {
  grid::GridDomain domain;
  assemble::Potential v;
  std::optional<grid::Partition> partition;
};

Problem problem(const Context& ctx) {
  const Json& c = ctx.config;
  auto domain = detail::build_domain(c["domain"]);
  auto v = detail::build_potential(c["potential"], domain, c["seed"].get<std::uint64_t>());
  auto partition = domain.has_periodic_map() ? std::nullopt : detail::build_partition(c["partition"], domain);
  if (domain.has_periodic_map() && c["partition"]["kind"] != "none") {
    config_error("periodic domains take partition kind none");
  }
  return {std::move(domain), std::move(v), std::move(partition)};
}

const grid::Partition& need_partition(const Problem& p, const std::string& scenario) {
  if (!p.partition) config_error(scenario + " needs a partition of kind line");
  return *p.partition;
}

Json crossings_json(const maslov::MaslovResult& r) {
  Json out = Json::array();
  for (const auto& c : r.crossings) {
    out.push_back({{"t", c.parameter},
                   {"kernel_dim", c.kernel_dim},
                   {"signature", c.signature},
                   {"at_endpoint", c.at_endpoint}});
  }
  return out;
}

// Shared body of mormas and doubled-1d.
void decomposition(const Context& ctx, const assemble::BlockOperator& b, Report& r) {
  const int g = mor(ctx, assemble::realize(b, Realization::G).values);
  const int n1 = mor(ctx, assemble::realize(b, Realization::N1).values);
  const int d2 = mor(ctx, assemble::realize(b, Realization::D2).values);
  const auto l1 = dtn::dtn_side(b, 1, ctx.zero_tol);
  const auto l2 = dtn::dtn_side(b, 2, ctx.zero_tol);
  const auto sum = dtn::dtn_sum(b, ctx.zero_tol);
  maslov::BranchTrace trace;
  const auto m = maslov::maslov_beta(l1.matrix, l2.matrix, ctx.maslov_options(), ctx.emit_traces ? &trace : nullptr);
  const auto i1 = inertia(ctx, l1.matrix);
  const auto is = inertia(ctx, sum.matrix);

  r.indices["sigma_size"] = b.sigma.size();
  r.indices["mor_G"] = g;
  r.indices["mor_N1"] = n1;
  r.indices["mor_D2"] = d2;
  r.indices["mor_lambda1"] = i1.morse();
  r.indices["mor0_lambda1"] = i1.morse0();
  r.indices["mor0_lambda2"] = inertia(ctx, l2.matrix).morse0();
  r.indices["mor_lambda_sum"] = is.morse();
  r.indices["mor0_lambda_sum"] = is.morse0();
  r.indices["maslov"] = m.index;
  r.indices["maslov_trace"] = m.trace_index;
  r.indices["maslov_method"] = m.method == maslov::Method::CrossingTrace ? "crossing-trace" : "endpoint-formula";
  r.indices["crossings"] = crossings_json(m);
  r.indices["sum_global_residual"] = sum.global_residual;

  r.check_eq("Mor(G) = Mor(N1) + Mor(D2) + Maslov", g, n1 + d2 + m.index);
  r.check_le("DtN sum vs global Schur complement (relative)", sum.global_residual, dtn::kSumAgreementTol);
  if (m.trace_reliable) {
    r.check_eq("signed crossing count = endpoint index", m.trace_index, m.index);
  } else {
    r.notes.push_back("crossing trace not used: " + m.note);
  }
  const int mor_variant = is.morse() - i1.morse();
  if (mor_variant != m.index) {
    r.notes.push_back("Mor variant of the index, Mor(L1+L2) - Mor(L1) = " + std::to_string(mor_variant) +
                      ", differs from the Mor0 form because a DtN kernel is present");
  }
  if (ctx.emit_traces) r.traces["branches.csv"] = maslov::branch_trace_csv(trace);
}

void run_mormas(const Context& ctx, Report& r) {
  const Problem p = problem(ctx);
  const auto b = assemble::assemble_blocks(p.domain, p.v, need_partition(p, "mormas"), ctx.lambda);
  decomposition(ctx, b, r);
}

void run_dnbracket(const Context& ctx, Report& r) {
  const Problem p = problem(ctx);
  const auto b = assemble::assemble_blocks(p.domain, p.v, need_partition(p, "dnbracket"), ctx.lambda);
  const int g = mor(ctx, assemble::realize(b, Realization::G).values);
  const int d1 = mor(ctx, assemble::realize(b, Realization::D1).values);
  const int d2 = mor(ctx, assemble::realize(b, Realization::D2).values);
  const int n1 = mor(ctx, assemble::realize(b, Realization::N1).values);
  const int n2 = mor(ctx, assemble::realize(b, Realization::N2).values);
  const auto sum = dtn::dtn_sum(b, ctx.zero_tol);
  const auto is = inertia(ctx, sum.matrix);

  r.indices["sigma_size"] = b.sigma.size();
  r.indices["mor_G"] = g;
  r.indices["mor_D1"] = d1;
  r.indices["mor_D2"] = d2;
  r.indices["mor_N1"] = n1;
  r.indices["mor_N2"] = n2;
  r.indices["mor_lambda_sum"] = is.morse();
  r.indices["mor0_lambda_sum"] = is.morse0();
  r.indices["mor0_variant_rhs"] = d1 + d2 + is.morse0();
  r.indices["lower_bracket_strict"] = d1 + d2 < g;
  r.indices["sum_global_residual"] = sum.global_residual;

  r.check_eq("Mor(G) = Mor(D1) + Mor(D2) + Mor(L1+L2)", g, d1 + d2 + is.morse());
  r.check_le("Mor(D1) + Mor(D2) <= Mor(G)", d1 + d2, g);
  r.check_le("Mor(G) <= Mor(N1) + Mor(N2)", g, n1 + n2);
  r.check_eq("lower bracket strict iff Mor(L1+L2) > 0", d1 + d2 < g ? 1 : 0, is.morse() > 0 ? 1 : 0);
  r.check_le("DtN sum vs global Schur complement (relative)", sum.global_residual, dtn::kSumAgreementTol);
  if (is.zero > 0) {
    r.notes.push_back("L1+L2 has a kernel of dimension " + std::to_string(is.zero) +
                      "; the Mor0 variant gives " + std::to_string(d1 + d2 + is.morse0()) + " against Mor(G) = " +
                      std::to_string(g));
  }
}

void friedlander_pair(const Context& ctx, const std::string& label, const Matrix& neumann, const Matrix& dirichlet,
                      const Matrix& dtn, Report& r) {
  const int n = mor(ctx, neumann);
  const int d = mor(ctx, dirichlet);
  const auto il = inertia(ctx, dtn);
  r.indices[label] = {{"mor_N", n}, {"mor_D", d}, {"mor_lambda", il.morse()}, {"mor0_lambda", il.morse0()},
                      {"kernel_lambda", il.zero}, {"mor_N_minus_mor_D", n - d}};
  r.check_eq(label + ": Mor(N) - Mor(D) = Mor(Lambda)", n - d, il.morse());
  if (il.zero > 0) {
    r.notes.push_back(label + ": Lambda has a kernel of dimension " + std::to_string(il.zero) +
                      "; the Mor0 variant gives Mor(N) - Mor(D) = " + std::to_string(il.morse0()) +
                      " against the computed " + std::to_string(n - d));
  }
}

void run_friedlander(const Context& ctx, Report& r) {
  const Problem p = problem(ctx);
  if (p.domain.has_periodic_map()) config_error("friedlander needs a non-periodic domain");
  const auto full = assemble::assemble_boundary_blocks(p.domain, p.v, ctx.lambda);
  friedlander_pair(ctx, "boundary", assemble::realize(full, Realization::N1).values, full.a1,
                   dtn::dtn_side(full, 1, ctx.zero_tol).matrix, r);
  if (p.partition) {
    const auto b = assemble::assemble_blocks(p.domain, p.v, *p.partition, ctx.lambda);
    friedlander_pair(ctx, "side1", assemble::realize(b, Realization::N1).values, b.a1,
                     dtn::dtn_side(b, 1, ctx.zero_tol).matrix, r);
    friedlander_pair(ctx, "side2", assemble::realize(b, Realization::N2).values, b.a2,
                     dtn::dtn_side(b, 2, ctx.zero_tol).matrix, r);
  }
}

}  // namespace

namespace detail {

// 0/1 indicator: 1 when pi/4 <= theta - n pi <= pi/2 for some n.
int doubled_indicator(double theta) {
  const double r = theta - std::floor(theta / std::numbers::pi) * std::numbers::pi;
  return r >= std::numbers::pi / 4 && r <= std::numbers::pi / 2 ? 1 : 0;
}

// Index from the closed forms Lambda_1 = sqrt(C) cot(theta) and
// Lambda_1 + Lambda_2 = 2 sqrt(C) cot(2 theta).
int doubled_signed(double theta) {
  const auto mor0 = [](double x) { return x <= 0.0 ? 1 : 0; };
  return mor0(std::cos(2.0 * theta) / std::sin(2.0 * theta)) - mor0(std::cos(theta) / std::sin(theta));
}

}  // namespace detail

namespace {

void run_doubled(const Context& ctx, Report& r) {
  const Json& d = ctx.config["doubled"];
  const double ell = d["ell"].get<double>();
  const double c = d["C"].get<double>();
  const int n = d["N"].get<int>();
  const auto domain = grid::build_interval(n, ell, grid::BoundaryCondition::Dirichlet, grid::BoundaryCondition::Neumann);
  const auto b = assemble::assemble_blocks(domain, assemble::Potential::constant(-c),
                                           grid::partition_by_line(domain, 0, n / 2), ctx.lambda);
  const double theta = std::sqrt(c) * ell / 2.0;
  r.indices["theta"] = theta;
  decomposition(ctx, b, r);

  const double l1 = dtn::dtn_side(b, 1, ctx.zero_tol).matrix(0, 0);
  const double l2 = dtn::dtn_side(b, 2, ctx.zero_tol).matrix(0, 0);
  const double l1_closed = std::sqrt(c) / std::tan(theta);
  const double l2_closed = -std::sqrt(c) * std::tan(theta);
  r.indices["lambda1"] = l1;
  r.indices["lambda2"] = l2;
  r.indices["lambda1_closed"] = l1_closed;
  r.indices["lambda2_closed"] = l2_closed;
  const int indicator = detail::doubled_indicator(theta);
  const int signed_index = detail::doubled_signed(theta);
  r.indices["indicator"] = indicator;
  r.indices["signed_closed_form"] = signed_index;

  const int index = r.indices["maslov"].get<int>();
  r.check_eq("Maslov = indicator(pi/4 <= theta mod pi <= pi/2)", index, indicator);
  r.check_eq("Maslov = Mor0(2 sqrt(C) cot 2theta) - Mor0(sqrt(C) cot theta)", index, signed_index);
  if (indicator != signed_index) {
    r.notes.push_back("theta mod pi lies in (pi/2, 3pi/4): Lambda_1 < 0 there, so the endpoint index is -1 and the "
                      "0/1 indicator does not apply");
  }
  if (ctx.lambda == 0.0) {
    r.check_le("|Lambda1 - sqrt(C) cot theta| / max(1, |sqrt(C) cot theta|)",
               std::abs(l1 - l1_closed) / std::max(1.0, std::abs(l1_closed)), 1e-3);
    r.check_le("|Lambda2 + sqrt(C) tan theta| / max(1, |sqrt(C) tan theta|)",
               std::abs(l2 - l2_closed) / std::max(1.0, std::abs(l2_closed)), 1e-3);
  }
  if (index != 0) {
    const auto& crossings = r.indices["crossings"];
    if (crossings.size() == 1) {
      const double t = crossings[0]["t"].get<double>();
      r.indices["crossing_closed"] = std::abs(1.0 / std::tan(theta));
      r.check_le("|t* - |cot theta||", std::abs(t - std::abs(1.0 / std::tan(theta))), 1e-3);
    } else {
      r.check_eq("number of crossings", static_cast<long long>(crossings.size()), 1);
    }
  }
}

void run_perturb(const Context& ctx, Report& r) {
  const Problem p = problem(ctx);
  const auto b = assemble::assemble_blocks(p.domain, p.v, need_partition(p, "perturb"), ctx.lambda);
  const auto l1 = dtn::dtn_side(b, 1, ctx.zero_tol);
  const auto l2 = dtn::dtn_side(b, 2, ctx.zero_tol);
  std::vector<double> c_grid = dtn::default_c_grid();
  if (!ctx.config["perturb"]["c_grid"].is_null()) c_grid = ctx.config["perturb"]["c_grid"].get<std::vector<double>>();
  const auto cert = dtn::perturb_certificate(l1, l2, c_grid, ctx.zero_tol);
  const auto m = maslov::maslov_beta(l1.matrix, l2.matrix, ctx.maslov_options());
  const int g = mor(ctx, assemble::realize(b, Realization::G).values);
  const int n1 = mor(ctx, assemble::realize(b, Realization::N1).values);
  const int d1 = mor(ctx, assemble::realize(b, Realization::D1).values);
  const int d2 = mor(ctx, assemble::realize(b, Realization::D2).values);
  const double asym = linalg::max_abs(l1.matrix - l2.matrix) / std::max(linalg::max_abs(l1.matrix), 1.0);

  r.indices["certificate_holds"] = cert.holds;
  r.indices["certificate_margin"] = cert.best_margin;
  r.indices["certificate_c"] = cert.best_c;
  r.indices["lambda_asymmetry"] = asym;
  r.indices["maslov"] = m.index;
  r.indices["mor_G"] = g;
  r.indices["mor_N1"] = n1;
  r.indices["mor_D1"] = d1;
  r.indices["mor_D2"] = d2;

  if (cert.holds) {
    r.check_eq("certificate => Maslov = 0", m.index, 0);
    r.check_eq("certificate => Mor(G) = Mor(N1) + Mor(D2)", g, n1 + d2);
  } else {
    r.notes.push_back("certificate does not hold on the c grid; the perturbation identity is not asserted");
  }
  if (asym <= 1e-10) {
    r.check_eq("symmetric doubling: Mor(G) = Mor(D1) + Mor(N1)", g, d1 + n1);
  }
}

void run_nodal(const Context& ctx, Report& r) {
  const Problem p = problem(ctx);
  const auto s = nodal::spectrum(p.domain, p.v);
  const int modes = ctx.config["nodal"]["modes"].get<int>();
  const int courant_k = ctx.config["nodal"]["courant_k"].get<int>();
  if (std::max(modes, courant_k) > s.values.size()) config_error("nodal.modes and nodal.courant_k exceed the spectrum size");
  nodal::Options options;
  options.zero_tol = ctx.numerics()["nodal_zero_tol"].get<double>();
  options.gap_tol = ctx.numerics()["gap_tol"].get<double>();
  options.inertia_tol = ctx.zero_tol;
  if (!ctx.numerics()["epsilon"].is_null()) options.epsilon = ctx.numerics()["epsilon"].get<double>();

  Json table = Json::array();
  for (int k = 1; k <= modes; ++k) {
    const std::string tag = "mode " + std::to_string(k);
    try {
      const auto rep = nodal::nodal_deficiency_dtn(p.domain, p.v, s, k, options);
      nodal::Options half = options;
      half.epsilon = 0.5 * rep.epsilon;
      const auto rh = nodal::nodal_deficiency_dtn(p.domain, p.v, s, k, half);
      const auto neg = nodal::nodal_deficiency_dtn(p.domain, p.v, s, k, options, true);
      table.push_back({{"k", k}, {"lambda", rep.lambda_k}, {"n_plus", rep.n_plus}, {"n_minus", rep.n_minus},
                       {"deficiency_direct", rep.deficiency_direct}, {"deficiency_dtn", *rep.deficiency_dtn},
                       {"epsilon", rep.epsilon}, {"sigma_size", rep.sigma_size}});
      r.check_eq(tag + ": Mor(L+ + L-) = k - n", *rep.deficiency_dtn, rep.deficiency_direct);
      r.check_eq(tag + ": Mor(D+) = n+", rep.mor_dirichlet_plus, rep.n_plus);
      r.check_eq(tag + ": Mor(D-) = n-", rep.mor_dirichlet_minus, rep.n_minus);
      r.check_eq(tag + ": Mor(G) at lambda_k + eps = k", rep.mor_global, k);
      r.check_eq(tag + ": deficiency at eps/2", *rh.deficiency_dtn, *rep.deficiency_dtn);
      r.check_eq(tag + ": deficiency under phi -> -phi", *neg.deficiency_dtn, *rep.deficiency_dtn);
      if (ctx.emit_traces) r.traces["nodal_mode_" + std::to_string(k) + ".csv"] = nodal::labeling_csv(p.domain, rep.labeling);
    } catch (const Error& e) {
      if (e.code() != Errc::NotSimple && e.code() != Errc::SignChangeWithoutSeparator) throw;
      table.push_back({{"k", k}, {"lambda", s.values(k - 1)}, {"skipped", std::string(to_string(e.code()))}});
      r.notes.push_back(tag + " skipped: " + e.what());
    }
  }
  r.indices["modes"] = std::move(table);

  Json counts = Json::array();
  for (int k = 1; k <= courant_k; ++k) {
    const auto labeling = nodal::nodal_domains(p.domain, s.lattice_vector(p.domain, k - 1), options.zero_tol);
    counts.push_back(labeling.total());
    r.check_le("Courant: n(phi_" + std::to_string(k) + ") <= " + std::to_string(k), labeling.total(), k);
  }
  r.indices["courant_counts"] = std::move(counts);
}

void run_periodic(const Context& ctx, Report& r) {
  const Problem p = problem(ctx);
  if (!p.domain.has_periodic_map()) config_error("periodic needs a domain with a periodic axis");
  using BC = grid::BoundaryCondition;
  const int mp = mor(ctx, assemble::assemble_periodic(p.domain, p.v, ctx.lambda).values);
  const int md = mor(ctx, assemble::assemble_global(grid::unroll(p.domain, BC::Dirichlet, BC::Dirichlet), p.v, ctx.lambda).values);
  const int mdn = mor(ctx, assemble::assemble_global(grid::unroll(p.domain, BC::Neumann, BC::Dirichlet), p.v, ctx.lambda).values);
  const auto lt = inertia(ctx, dtn::dtn_periodic(p.domain, p.v, ctx.lambda, ctx.zero_tol).matrix);
  const auto lp = inertia(ctx, dtn::dtn_partial(p.domain, p.v, ctx.lambda, ctx.zero_tol).matrix);

  r.indices["gamma1_size"] = p.domain.gamma1().size();
  r.indices["gamma2_size"] = p.domain.gamma2().size();
  r.indices["mor_P"] = mp;
  r.indices["mor_D"] = md;
  r.indices["mor_DN"] = mdn;
  r.indices["mor_lambda_tau"] = lt.morse();
  r.indices["mor0_lambda_tau"] = lt.morse0();
  r.indices["mor_lambda_partial"] = lp.morse();
  r.indices["mor0_lambda_partial"] = lp.morse0();

  r.check_eq("Mor(P) = Mor(D) + Mor(Lambda_tau)", mp, md + lt.morse());
  r.check_eq("Mor(DN) = Mor(D) + Mor(Lambda_partial)", mdn, md + lp.morse());
  if (lt.zero == 0 && lp.zero == 0) {
    r.check_eq("Mor(P) = Mor(DN) + Mor0(Lambda_tau) - Mor0(Lambda_partial)", mp, mdn + lt.morse0() - lp.morse0());
  } else {
    r.notes.push_back("a periodic DtN map has a kernel; the Mor0 splitting through DN is not asserted");
  }
  if (lt.zero > 0) {
    r.notes.push_back("Mor0 variant: Mor(D) + Mor0(Lambda_tau) = " + std::to_string(md + lt.morse0()) +
                      " against Mor(P) = " + std::to_string(mp));
  }
}

void run_robin(const Context& ctx, Report& r) {
  const Problem p = problem(ctx);
  if (p.domain.has_periodic_map()) config_error("robin needs a non-periodic domain");
  const auto thetas = maslov::default_theta_grid(ctx.numerics()["theta_min"].get<double>(),
                                                 ctx.numerics()["theta_points"].get<int>());
  const auto rep = maslov::robin_sweep(p.domain, p.v, thetas, ctx.lambda, ctx.zero_tol);
  Json points = Json::array();
  int mismatches = 0, drops = 0;
  for (std::size_t i = 0; i < rep.points.size(); ++i) {
    const auto& pt = rep.points[i];
    points.push_back({{"theta", pt.theta}, {"morse", pt.morse}, {"predicted", pt.predicted}});
    mismatches += pt.morse != pt.predicted ? 1 : 0;
    if (i > 0 && pt.morse < rep.points[i - 1].morse) ++drops;
  }
  r.indices["mor_D"] = rep.mor_dirichlet;
  r.indices["mor_N"] = rep.mor_neumann;
  r.indices["mor_lambda"] = rep.mor_dtn;
  r.indices["mor0_lambda"] = rep.mor0_dtn;
  r.indices["window_count"] = rep.window_count;
  r.indices["crossing_angles"] = rep.crossing_angles;
  r.indices["points"] = std::move(points);

  r.check_eq("Mor(Robin, theta_min) = Mor(D)", rep.plateau, rep.mor_dirichlet);
  r.check_eq("Mor(Robin, pi/2) = Mor(N)", rep.points.back().morse, rep.mor_neumann);
  r.check_eq("Mor(N) - Mor(D) = Mor(Lambda)", rep.mor_neumann - rep.mor_dirichlet, rep.mor_dtn);
  r.check_eq("Robin counts off the DtN prediction", mismatches, 0);
  r.check_eq("decreases of Mor along theta", drops, 0);
  r.check_eq("DtN eigenvalues in (-cot theta_min, 0] = Mor0(Lambda)", rep.window_count, rep.mor0_dtn);
}

void run_homotopy(const Context& ctx, Report& r) {
  const Problem p = problem(ctx);
  const auto& partition = need_partition(p, "homotopy");
  const auto b = assemble::assemble_blocks(p.domain, p.v, partition, ctx.lambda);
  const auto h = maslov::homotopy_boundary_check(b, ctx.maslov_options());
  r.indices["bottom"] = h.bottom;
  r.indices["side"] = h.side;
  r.indices["top"] = h.top;
  r.indices["endpoint_index"] = h.endpoint_index;
  r.indices["mor0_lambda1"] = h.mor0_lambda1;
  r.indices["mor0_lambda_sum"] = h.mor0_sum;
  r.indices["s_floor"] = h.s_floor;
  if (h.trace_reliable) {
    r.check_eq("bottom + side = top", h.bottom + h.side, h.top);
  } else {
    r.indeterminate = true;
    r.notes.push_back("crossing trace along s = 0 is not reliable; the rectangle identity is indeterminate");
  }
  r.check_eq("spectra stay above s_floor", h.s_floor_ok ? 1 : 0, 1);

  // Below inf V every realization is positive definite, so the pencil has no
  // kernel along the lambda floor.
  const double floor = std::min(p.v.inf(p.domain), ctx.lambda) - 1.0;
  const auto bf = assemble::assemble_blocks(p.domain, p.v, partition, floor);
  int kernel = 0;
  constexpr int kFloorSamples = 16;
  for (int j = 0; j < kFloorSamples; ++j) {
    kernel += maslov::crossing_kernel(bf, static_cast<double>(j) / (kFloorSamples - 1), ctx.zero_tol).dim;
  }
  r.indices["lambda_floor"] = floor;
  r.check_eq("kernel dimensions along the lambda floor", kernel, 0);
}

void run_lambda_sweep(const Context& ctx, Report& r) {
  const Problem p = problem(ctx);
  const std::string which = ctx.config["sweep"]["realization"].get<std::string>();
  maslov::RealizationBuilder builder;
  if (which == "G") {
    builder = [&](double lambda) {
      return p.domain.has_periodic_map() ? assemble::assemble_periodic(p.domain, p.v, lambda)
                                         : assemble::assemble_global(p.domain, p.v, lambda);
    };
  } else {
    const auto& partition = need_partition(p, "lambda-sweep");
    const Realization tag = which == "D1"   ? Realization::D1
                            : which == "N1" ? Realization::N1
                            : which == "D2" ? Realization::D2
                                            : Realization::N2;
    builder = [&, tag](double lambda) {
      return assemble::realize(assemble::assemble_blocks(p.domain, p.v, partition, lambda), tag);
    };
  }
  const double floor = std::min(p.v.inf(p.domain), ctx.lambda) - 1.0;
  const auto sweep = maslov::maslov_lambda_sweep(builder, floor, ctx.lambda, ctx.numerics()["lambda_grid"].get<int>(),
                                                 ctx.zero_tol);
  const int target = mor(ctx, builder(ctx.lambda).values);
  int non_definite = 0;
  Json crossings = Json::array();
  for (const auto& c : sweep.maslov.crossings) {
    crossings.push_back({{"lambda", c.parameter}, {"kernel_dim", c.kernel_dim}, {"signature", c.signature}});
    non_definite += c.sign_definite ? 0 : 1;
  }
  r.indices["realization"] = which;
  r.indices["lambda_floor"] = floor;
  r.indices["mor_at_floor"] = sweep.morse_at_floor;
  r.indices["mor_at_lambda"] = target;
  r.indices["crossings_counted"] = sweep.crossings_counted;
  r.indices["crossings"] = std::move(crossings);

  r.check_eq("Mor at lambda floor", sweep.morse_at_floor, 0);
  r.check_eq("crossings counted = Mor at lambda", sweep.crossings_counted, target);
  r.check_eq("crossings that are not one-signed", non_definite, 0);
}

void dispatch(const Context& ctx, Report& r) {
  const std::string& s = r.scenario;
  if (s == "mormas") return run_mormas(ctx, r);
  if (s == "dnbracket") return run_dnbracket(ctx, r);
  if (s == "friedlander") return run_friedlander(ctx, r);
  if (s == "doubled-1d") return run_doubled(ctx, r);
  if (s == "perturb") return run_perturb(ctx, r);
  if (s == "nodal") return run_nodal(ctx, r);
  if (s == "periodic") return run_periodic(ctx, r);
  if (s == "robin") return run_robin(ctx, r);
  if (s == "homotopy") return run_homotopy(ctx, r);
  if (s == "lambda-sweep") return run_lambda_sweep(ctx, r);
  config_error("unknown scenario '" + s + "'");
}

}  // namespace

Report run_scenario(const Json& config) {
  const std::string scenario = config.at("scenario").get<std::string>();
  const double lambda0 = config["lambda"].get<double>();
  const int attempts = 1 + config["numerics"]["jitter_attempts"].get<int>();
  std::mt19937_64 rng(config["seed"].get<std::uint64_t>() ^ 0x6a09e667f3bcc909ULL);
  std::uniform_real_distribution<double> unit(0.5, 1.0);

  std::vector<std::string> history;
  double lambda = lambda0;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    Report r;
    r.scenario = scenario;
    r.config = config;
    r.notes = history;
    Context ctx{config};
    ctx.lambda = lambda;
    ctx.zero_tol = config["numerics"]["zero_tol"].get<double>();
    ctx.emit_traces = config["output"]["emit_traces"].get<bool>();
    try {
      dispatch(ctx, r);
      if (lambda != lambda0) r.indices["lambda_used"] = lambda;
      return r;
    } catch (const Error& e) {
      if (e.code() == Errc::InvariantViolation) {
        r.checks.push_back({"internal invariant", e.what(), nullptr, "holds", false});
        return r;
      }
      if (e.code() != Errc::Indeterminate && e.code() != Errc::ASingular) {
        throw Error(e.code(), scenario + ": " + e.what());
      }
      std::ostringstream os;
      os.precision(17);
      if (attempt + 1 == attempts) {
        os << "gave up at lambda = " << lambda << ": " << e.what();
        r.notes.push_back(os.str());
        r.indeterminate = true;
        return r;
      }
      const double delta = (rng() & 1U ? 1.0 : -1.0) * unit(rng) * 1e-6 * std::max(1.0, std::abs(lambda0));
      os << "lambda = " << lambda << " hit " << e.what() << "; retrying at lambda0 + " << delta;
      history.push_back(os.str());
      lambda = lambda0 + delta;
    }
  }
  throw Error(Errc::Indeterminate, "unreachable");
}

}  // namespace morselab::harness
