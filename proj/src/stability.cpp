#include "dirac/stability.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

namespace dirac {

std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::CNFD: return "CNFD";
        case Scheme::SIFD1: return "SIFD1";
        case Scheme::SIFD2: return "SIFD2";
        case Scheme::LFFD: return "LFFD";
        case Scheme::CNFP: return "CNFP";
        case Scheme::SIFP1: return "SIFP1";
        case Scheme::SIFP2: return "SIFP2";
        case Scheme::LFFP: return "LFFP";
    }
    return "?";
}

Scheme parse_scheme(std::string_view name) {
    std::string up(name);
    std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
    for (Scheme s : kAllSchemes)
        if (up == to_string(s)) return s;
    if (up == "CNFS") return Scheme::CNFP;
    if (up == "SIFS1") return Scheme::SIFP1;
    if (up == "SIFS2") return Scheme::SIFP2;
    if (up == "LFFS") return Scheme::LFFP;
    throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

bool is_spectral(Scheme s) {
    return s == Scheme::CNFP || s == Scheme::SIFP1 || s == Scheme::SIFP2 || s == Scheme::LFFP;
}

bool is_multistep(Scheme s) { return s != Scheme::CNFD && s != Scheme::CNFP; }

StepBound tau_max(Scheme scheme, double h, double V_max, double A_max) {
    if (!(h > 0.0)) throw ConfigError("tau_max: h must be positive");
    if (V_max < 0.0 || A_max < 0.0) throw ConfigError("tau_max: potential bounds must be non-negative");
    const double pi = std::numbers::pi;
    switch (scheme) {
        case Scheme::CNFD:
        case Scheme::CNFP:
            return StepBound::unbounded();
        case Scheme::SIFD1:
            return StepBound::at_most(h);
        case Scheme::SIFP1:
            return StepBound::at_most(h / pi);
        case Scheme::SIFD2:
        case Scheme::SIFP2:
            if (V_max + A_max == 0.0) return StepBound::unbounded();
            return StepBound::at_most(1.0 / (V_max + A_max));
        case Scheme::LFFD: {
            const double s = 1.0 + h * A_max;
            return StepBound::at_most(h / (V_max * h + std::sqrt(h * h + s * s)));
        }
        case Scheme::LFFP: {
            const double s = pi + h * A_max;
            return StepBound::at_most(h / (V_max * h + std::sqrt(h * h + s * s)));
        }
    }
    throw ConfigError("tau_max: unknown scheme");
}

StabilityVerdict validate(const SchemeConfig& config, const PotentialPair& p) {
    StabilityVerdict v;
    v.scheme = config.scheme;
    v.h = config.h;
    v.tau = config.tau;
    v.tau_max = tau_max(config.scheme, config.h, p.V_max, p.A_max);
    v.ok = config.tau > 0.0 && v.tau_max.admits(config.tau);
    v.margin = v.tau_max.is_unbounded() ? 0.0 : config.tau / v.tau_max.value();
    return v;
}

bool sifd1_guard_ok(double tau, double epsilon, const PotentialPair& p) {
    return std::abs(tau) * (1.0 + epsilon * (p.V_max + p.A_max)) < 0.5;
}

}  // namespace dirac
