#pragma once

#include "dirac/model.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace dirac {

enum class Scheme { CNFD, SIFD1, SIFD2, LFFD, CNFP, SIFP1, SIFP2, LFFP };

inline constexpr std::array<Scheme, 8> kAllSchemes{Scheme::CNFD, Scheme::SIFD1, Scheme::SIFD2, Scheme::LFFD,
                                                   Scheme::CNFP, Scheme::SIFP1, Scheme::SIFP2, Scheme::LFFP};

std::string_view to_string(Scheme s);
/// Accepts the scheme names case-insensitively; the spectral variants also answer to
/// CNFS/SIFS1/SIFS2/LFFS. Throws ConfigError otherwise.
Scheme parse_scheme(std::string_view name);

/// True for schemes that use the pseudospectral derivative in space.
bool is_spectral(Scheme s);
/// True for the three-level schemes that need Phi^{n-1} and the Taylor first step.
bool is_multistep(Scheme s);

/// Largest admissible time step; nullopt means unconditionally stable.
class StepBound {
public:
    static StepBound unbounded() { return StepBound(); }
    static StepBound at_most(double tau) { return StepBound(tau); }

    bool is_unbounded() const { return !value_; }
    double value() const { return *value_; }
    bool admits(double tau) const { return !value_ || tau <= *value_; }

private:
    StepBound() = default;
    explicit StepBound(double v) : value_(v) {}
    std::optional<double> value_;
};

/// Closed-form CFL-type bound for each scheme given h and the potential sup bounds.
StepBound tau_max(Scheme scheme, double h, double V_max, double A_max);

struct SolverTolerances {
    double linear_residual = 1e-12;  // CNFD direct/iterative solve
    double fixed_point = 1e-14;      // CNFP iteration, relative to ||Phi^n||
    int fixed_point_max_iters = 50;
};

struct SchemeConfig {
    Scheme scheme = Scheme::CNFD;
    double h = 0.0;
    double tau = 0.0;
    double epsilon = 1.0;
    double T0 = 1.0;
    SolverTolerances tolerances;
};

struct StabilityVerdict {
    Scheme scheme = Scheme::CNFD;
    double h = 0.0;
    double tau = 0.0;
    StepBound tau_max = StepBound::unbounded();
    bool ok = true;
    /// tau / tau_max; 0 when the bound is unbounded.
    double margin = 0.0;
};

/// Uses the declared bounds of `p` (not sampled values), so verdicts are reproducible.
StabilityVerdict validate(const SchemeConfig& config, const PotentialPair& p);

/// Pointwise invertibility guard for SIFD1: requires tau (1 + eps (V_max + A_max)) < 1/2.
bool sifd1_guard_ok(double tau, double epsilon, const PotentialPair& p);

}  // namespace dirac
