#pragma once

#include "dirac/harness.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dirac {

/// A parsed run configuration.
///
/// JSON keys: problem (preset name or inline object), epsilon or epsilons, T0,
/// scheme, h, tau, reference ({h_e, tau_e} or "exact"), and for tables levels,
/// h0, tau0; compare uses samples. Inline problems take
/// {domain: [a, b], epsilon, T0, potentials: {V, A1, V_max?, A_max?}, phi0: [c1, c2], phi0_deriv?}
/// where each component is an expression string (real) or {re, im}.
struct RunConfig {
    std::string problem_label;
    ProblemFamily family;
    std::vector<double> epsilons;
    Scheme scheme = Scheme::CNFD;
    double h = 0.0;
    double tau = 0.0;
    std::optional<ReferenceSpec> reference;
    int levels = 4;
    double h0 = 0.0;
    double tau0 = 0.0;
    int samples = 20;
    std::optional<std::filesystem::path> cache_dir;

    DiracProblem problem() const { return family(epsilons.front()); }
};

/// Throws ConfigError on malformed input (unknown keys, bad types, bad expressions).
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace dirac
