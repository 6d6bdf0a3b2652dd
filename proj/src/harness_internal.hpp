#pragma once

#include "morselab/assemble.hpp"
#include "morselab/harness.hpp"

#include <optional>

namespace morselab::harness::detail {

grid::GridDomain build_domain(const Json& domain);
assemble::Potential build_potential(const Json& potential, const grid::GridDomain& domain,
                                    std::uint64_t default_seed);
std::optional<grid::Partition> build_partition(const Json& partition, const grid::GridDomain& domain);

// Doubled interval: the 0/1 condition and the signed index from
// the closed-form DtN maps, as functions of theta = sqrt(C) ell / 2.
int doubled_indicator(double theta);
int doubled_signed(double theta);

[[noreturn]] void config_error(const std::string& what);

}  // namespace morselab::harness::detail
