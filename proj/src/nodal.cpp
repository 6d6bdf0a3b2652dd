#include "morselab/nodal.hpp"

#include "morselab/disjoint_sets.hpp"
#include "morselab/dtn.hpp"
#include "morselab/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace morselab::nodal {

NodalLabeling nodal_domains(const GridDomain& domain, std::span<const double> values, double zero_tol) {
  if (static_cast<Index>(values.size()) != domain.lattice_size()) {
    throw Error(Errc::InvalidArgument, "one value per lattice vertex expected");
  }
  double peak = 0.0;
  for (const Index v : domain.free_nodes()) peak = std::max(peak, std::abs(values[static_cast<std::size_t>(v)]));
  const double thr = zero_tol * peak;
  auto sign = [&](Index v) {
    if (!domain.is_free(v)) return 0;
    const double x = values[static_cast<std::size_t>(domain.representative(v))];
    return x > thr ? 1 : x < -thr ? -1 : 0;
  };
  if (peak == 0.0) throw Error(Errc::AllZero, "values vanish on every free vertex");

  DisjointSets sets(static_cast<std::size_t>(domain.lattice_size()));
  for (const auto& [a, b] : domain.edges()) {
    const int sa = sign(a);
    if (sa != 0 && sa == sign(b)) sets.unite(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
  }
  NodalLabeling out;
  out.component.assign(static_cast<std::size_t>(domain.lattice_size()), -1);
  std::map<std::size_t, int> ids;
  for (const Index v : domain.free_nodes()) {
    const int s = sign(v);
    if (s == 0) continue;
    const std::size_t root = sets.find(static_cast<std::size_t>(v));
    auto [it, inserted] = ids.emplace(root, static_cast<int>(ids.size()));
    if (inserted) {
      out.component_sign.push_back(s);
      (s > 0 ? out.n_plus : out.n_minus) += 1;
    }
    out.component[static_cast<std::size_t>(v)] = it->second;
  }
  if (ids.empty()) throw Error(Errc::AllZero, "every value lies below the zero threshold");
  for (Index v = 0; v < domain.lattice_size(); ++v) {
    if (domain.contains(v)) out.component[static_cast<std::size_t>(v)] = out.component[static_cast<std::size_t>(domain.representative(v))];
  }
  return out;
}

std::vector<double> Spectrum::lattice_vector(const GridDomain& domain, Eigen::Index k) const {
  std::vector<double> out(static_cast<std::size_t>(domain.lattice_size()), 0.0);
  for (std::size_t i = 0; i < nodes.size(); ++i) out[static_cast<std::size_t>(nodes[i])] = vectors(static_cast<Eigen::Index>(i), k);
  for (Index v = 0; v < domain.lattice_size(); ++v) {
    if (domain.contains(v)) out[static_cast<std::size_t>(v)] = out[static_cast<std::size_t>(domain.representative(v))];
  }
  return out;
}

Spectrum spectrum(const GridDomain& domain, const Potential& v) {
  const assemble::SymMatrix a = domain.has_periodic_map() ? assemble::assemble_periodic(domain, v, 0.0)
                                                          : assemble::assemble_global(domain, v, 0.0);
  const Vector mass = assemble::lumped_mass(domain);
  const Vector w = mass.cwiseSqrt().cwiseInverse();
  const Matrix scaled = w.asDiagonal() * a.values * w.asDiagonal();
  const auto e = linalg::eigs(0.5 * (scaled + scaled.transpose()), true);
  Spectrum s;
  s.values = e.values;
  s.vectors = w.asDiagonal() * e.vectors;
  s.nodes = a.nodes;
  return s;
}

namespace {

void check_k(const Spectrum& s, int k) {
  if (k < 1 || k > s.values.size()) throw Error(Errc::InvalidArgument, "mode index out of range");
}

bool is_simple(const Spectrum& s, int k, double gap_tol) {
  const Eigen::Index i = k - 1;
  const double lk = s.values(i);
  const double tol = gap_tol * std::max(std::abs(lk), 1.0);
  const bool below = i == 0 || lk - s.values(i - 1) > tol;
  const bool above = i + 1 == s.values.size() || s.values(i + 1) - lk > tol;
  return below && above;
}

NodalReport base_report(const GridDomain& domain, const Spectrum& s, int k, const Options& options,
                        bool negate) {
  check_k(s, k);
  NodalReport r;
  r.k = k;
  r.lambda_k = s.values(k - 1);
  r.simple = is_simple(s, k, options.gap_tol);
  std::vector<double> phi = s.lattice_vector(domain, k - 1);
  if (negate) {
    for (double& x : phi) x = -x;
  }
  r.labeling = nodal_domains(domain, phi, options.zero_tol);
  r.n_plus = r.labeling.n_plus;
  r.n_minus = r.labeling.n_minus;
  r.n_total = r.labeling.total();
  r.deficiency_direct = k - r.n_total;
  return r;
}

}  // namespace

std::vector<NodalReport> courant_check(const GridDomain& domain, const Spectrum& s, int k_max,
                                       const Options& options) {
  if (k_max < 1 || k_max > s.values.size()) throw Error(Errc::InvalidArgument, "k_max out of range");
  std::vector<NodalReport> out;
  for (int k = 1; k <= k_max; ++k) {
    NodalReport r = base_report(domain, s, k, options, false);
    if (r.n_total > k) {
      throw Error(Errc::InvariantViolation, "mode " + std::to_string(k) + " has " +
                                                std::to_string(r.n_total) + " nodal domains");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<NodalReport> courant_check(const GridDomain& domain, const Potential& v, int k_max,
                                       const Options& options) {
  return courant_check(domain, spectrum(domain, v), k_max, options);
}

NodalReport nodal_deficiency_dtn(const GridDomain& domain, const Potential& v, const Spectrum& s, int k,
                                 const Options& options, bool negate) {
  NodalReport r = base_report(domain, s, k, options, negate);
  if (!r.simple) throw Error(Errc::NotSimple, "eigenvalue " + std::to_string(k) + " is not simple");
  const Eigen::Index i = k - 1;
  const double gap = i + 1 < s.values.size() ? s.values(i + 1) - s.values(i) : std::max(std::abs(s.values(i)), 1.0);
  r.epsilon = options.epsilon.value_or(0.5 * gap);
  if (!(r.epsilon > 0.0) || r.epsilon >= gap) {
    throw Error(Errc::InvalidArgument, "epsilon must lie inside the spectral gap above lambda_k");
  }

  std::vector<double> phi = s.lattice_vector(domain, i);
  if (negate) {
    for (double& x : phi) x = -x;
  }
  double peak = 0.0;
  for (const double x : phi) peak = std::max(peak, std::abs(x));
  const grid::Partition partition = grid::partition_by_sign(domain, phi, options.zero_tol * peak);
  const double shift = r.lambda_k + r.epsilon;
  const assemble::BlockOperator blocks = assemble::assemble_blocks(domain, v, partition, shift);
  r.sigma_size = static_cast<int>(blocks.sigma.size());
  r.mor_dirichlet_plus = linalg::ldlt_inertia(blocks.a1, options.inertia_tol).morse();
  r.mor_dirichlet_minus = linalg::ldlt_inertia(blocks.a2, options.inertia_tol).morse();
  r.mor_global = linalg::ldlt_inertia(assemble::realize(blocks, assemble::Realization::G).values,
                                      options.inertia_tol).morse();
  const dtn::DtnMap sum = dtn::dtn_sum(blocks, options.inertia_tol);
  r.deficiency_dtn = linalg::ldlt_inertia(sum.matrix, options.inertia_tol).morse();
  r.agreement = *r.deficiency_dtn == r.deficiency_direct;
  r.localized = r.mor_dirichlet_plus == r.n_plus && r.mor_dirichlet_minus == r.n_minus && r.mor_global == k;
  return r;
}

NodalReport nodal_deficiency_dtn(const GridDomain& domain, const Potential& v, int k, const Options& options,
                                 bool negate) {
  return nodal_deficiency_dtn(domain, v, spectrum(domain, v), k, options, negate);
}

std::string labeling_csv(const GridDomain& domain, const NodalLabeling& labeling) {
  std::ostringstream os;
  const int rows = domain.dimension() == 2 ? domain.cells(1) + 1 : 1;
  const int cols = domain.cells(0) + 1;
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < cols; ++i) {
      if (i > 0) os << ',';
      os << labeling.component[static_cast<std::size_t>(domain.lattice_index(i, j))];
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace morselab::nodal
