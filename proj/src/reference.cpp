#include "dirac/reference.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace dirac {

static_assert(std::endian::native == std::endian::little, "reference cache assumes a little-endian host");

namespace {

Mat2 free_propagator(double mu, double t) {
    const double d = std::sqrt(1.0 + mu * mu);
    const double c = std::cos(t * d);
    const double s = std::sin(t * d) / d;
    const Mat2 symbol = mu * pauli::sigma1 + pauli::sigma3;
    return Complex(c) * Mat2::identity() - Complex(0.0, s) * symbol;
}

// exp(-i s eps (V I - A1 sigma1)) = e^{-i s eps V} [cos(s eps A1) I + i sin(s eps A1) sigma1]
Mat2 potential_propagator(double s, double eps, double v, double a1) {
    const Complex phase = std::exp(Complex(0.0, -s * eps * v));
    const double arg = s * eps * a1;
    return phase * (Complex(std::cos(arg)) * Mat2::identity() + Complex(0.0, std::sin(arg)) * pauli::sigma1);
}

}  // namespace

SpinorField free_dirac_exact(const SpinorField& phi0, double t) {
    const auto& g = phi0.grid;
    std::vector<Spinor> c = phi0.values;
    fft::transform(c, -1);
    for (int k = 0; k < g.size(); ++k) {
        const auto kk = static_cast<std::size_t>(k);
        c[kk] = free_propagator(g.mu(g.index_of_slot(k)), t) * c[kk];
    }
    fft::transform(c, +1);
    SpinorField out(g, std::move(c));
    out *= Complex(1.0 / g.size());
    return out;
}

TsfpStepper::TsfpStepper(DiracProblem problem, const TorusGrid& grid)
    : problem_(std::move(problem)), grid_(grid), phi_(problem_.initial_field(grid)) {
    problem_.validate();
}

TsfpStepper::TsfpStepper(DiracProblem problem, SpinorField initial, double t0)
    : problem_(std::move(problem)), grid_(initial.grid), phi_(std::move(initial)), t_(t0) {
    problem_.validate();
}

void TsfpStepper::potential_flow(double s, double t_sample) {
    const auto& p = problem_.potentials;
    const double eps = problem_.epsilon;
    if (eps == 0.0) return;
    if (p.time_independent) {
        if (cached_potential_.empty() || cached_s_ != s) {
            cached_potential_.resize(static_cast<std::size_t>(grid_.size()));
            for (int j = 0; j < grid_.size(); ++j) {
                const double x = grid_.x(j);
                cached_potential_[static_cast<std::size_t>(j)] = potential_propagator(s, eps, p.V(0.0, x), p.A1(0.0, x));
            }
            cached_s_ = s;
        }
        for (std::size_t j = 0; j < phi_.values.size(); ++j) phi_.values[j] = cached_potential_[j] * phi_.values[j];
        return;
    }
    for (int j = 0; j < grid_.size(); ++j) {
        const double x = grid_.x(j);
        phi_[j] = potential_propagator(s, eps, p.V(t_sample, x), p.A1(t_sample, x)) * phi_[j];
    }
}

void TsfpStepper::free_flow(double tau) {
    const int n = grid_.size();
    if (cached_free_.empty() || cached_tau_ != tau) {
        cached_free_.resize(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k)
            cached_free_[static_cast<std::size_t>(k)] = (1.0 / n) * free_propagator(grid_.mu(grid_.index_of_slot(k)), tau);
        cached_tau_ = tau;
    }
    fft::transform(phi_.values, -1);
    for (std::size_t k = 0; k < phi_.values.size(); ++k) phi_.values[k] = cached_free_[k] * phi_.values[k];
    fft::transform(phi_.values, +1);
}

void TsfpStepper::step(double tau) {
    potential_flow(0.5 * tau, t_ + 0.25 * tau);
    free_flow(tau);
    potential_flow(0.5 * tau, t_ + 0.75 * tau);
    t_ += tau;
}

void TsfpStepper::advance_to(double t, double tau_e) {
    if (!(tau_e > 0.0)) throw ConfigError("reference time step must be positive");
    const double start = t_;
    const double span = t - start;
    if (span < 0.0) throw ContractError("TSFP cannot step backwards to an earlier snapshot");
    const auto full = static_cast<long>(std::floor(span / tau_e * (1.0 + 1e-12)));
    for (long k = 0; k < full; ++k) {
        step(tau_e);
        t_ = start + (k + 1) * tau_e;
    }
    const double rest = t - t_;
    if (rest > 1e-12 * std::max(1.0, std::abs(t))) step(rest);
    t_ = t;
}

SpinorField tsfp_step(const SpinorField& phi, const DiracProblem& problem, double t_n, double tau) {
    TsfpStepper runner(problem, phi, t_n);
    runner.step(tau);
    return runner.current();
}

const SpinorField& ReferenceSolution::at(double t) const {
    for (const auto& [time, field] : snapshots_)
        if (std::abs(time - t) <= 1e-9 * std::max(1.0, std::abs(t))) return field;
    throw ContractError("reference has no snapshot at t=" + std::to_string(t));
}

SpinorField ReferenceSolution::on_grid(double t, const TorusGrid& coarse, bool allow_interpolation) const {
    return restrict_to_grid(at(t), coarse, allow_interpolation);
}

SpinorField restrict_to_grid(const SpinorField& fine, const TorusGrid& coarse, bool allow_interpolation) {
    const auto& g = fine.grid;
    const double tol = 1e-12 * std::max(1.0, g.length());
    const bool same_interval = std::abs(g.a() - coarse.a()) <= tol && std::abs(g.b() - coarse.b()) <= tol;
    if (same_interval && g.size() % coarse.size() == 0) {
        const int stride = g.size() / coarse.size();
        SpinorField out(coarse);
        for (int j = 0; j < coarse.size(); ++j) out[j] = fine[j * stride];
        return out;
    }
    if (!allow_interpolation)
        throw ConfigError("test grid (N=" + std::to_string(coarse.size()) + ") does not nest into reference grid (N=" +
                          std::to_string(g.size()) + ")");
    return trig_interpolate(fine, coarse);
}

SpinorField trig_interpolate(const SpinorField& fine, const TorusGrid& coarse) {
    const SpectralCoeffs c = dft(fine);
    const auto& g = fine.grid;
    SpinorField out(coarse);
    for (int j = 0; j < coarse.size(); ++j) {
        const double x = coarse.x(j);
        Spinor acc{};
        for (int l = g.min_index(); l <= g.max_index(); ++l)
            acc += std::exp(Complex(0.0, g.mu(l) * (x - g.a()))) * c.at(l);
        out[j] = acc;
    }
    return out;
}

void check_reference_resolution(const ReferenceSpec& spec, const TorusGrid& test_grid, double tau,
                                const DiracProblem& problem) {
    if (spec.exact) return;
    if (!(spec.tau_e <= std::abs(tau) / 4.0 * (1.0 + 1e-12)))
        throw ConfigError("reference time step must be at least 4x finer than the scheme step");
    const TorusGrid ref_grid = problem.grid_for_h(spec.h_e);
    if (ref_grid.size() % test_grid.size() != 0 || ref_grid.size() < test_grid.size())
        throw ConfigError("test grid does not nest into the reference grid");
}

ReferenceSolution reference_solution(const DiracProblem& problem, const ReferenceSpec& spec,
                                     std::vector<double> t_targets) {
    if (!(spec.h_e > 0.0)) throw ConfigError("reference needs a positive mesh size h_e");
    std::sort(t_targets.begin(), t_targets.end());
    const TorusGrid grid = problem.grid_for_h(spec.h_e);
    std::map<double, SpinorField> snaps;
    if (spec.exact) {
        if (!(problem.epsilon == 0.0 || (problem.potentials.V_max == 0.0 && problem.potentials.A_max == 0.0)))
            throw ConfigError("exact reference is only available for the potential-free problem");
        const SpinorField phi0 = problem.initial_field(grid);
        for (double t : t_targets) snaps.emplace(t, free_dirac_exact(phi0, t));
        return {grid, std::move(snaps)};
    }
    TsfpStepper stepper(problem, grid);
    for (double t : t_targets) {
        stepper.advance_to(t, spec.tau_e);
        snaps.emplace(t, stepper.current());
    }
    return {grid, std::move(snaps)};
}

namespace reference_cache {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T>
void put(std::string& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

template <typename T>
T get(const std::string& in, std::size_t& pos) {
    if (pos + sizeof(T) > in.size()) throw ConfigError("reference cache file is truncated");
    T v;
    std::memcpy(&v, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_atomic(const std::filesystem::path& target, const std::string& bytes) {
    std::random_device rd;
    const auto tmp = target.string() + ".tmp" + std::to_string(rd());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw ConfigError("cannot write " + tmp);
    }
    std::filesystem::rename(tmp, target);
}

}  // namespace

std::string config_hash(const DiracProblem& problem, const ReferenceSpec& spec, const std::vector<double>& times) {
    std::string key = "problem=" + problem.name + ";a=" + fmt17(problem.a) + ";b=" + fmt17(problem.b) +
                      ";eps=" + fmt17(problem.epsilon) + ";T0=" + fmt17(problem.T0) +
                      ";exact=" + (spec.exact ? "1" : "0") + ";h_e=" + fmt17(spec.h_e) +
                      ";tau_e=" + fmt17(spec.tau_e) + ";splitting=strang-potential-first;times=";
    for (double t : times) key += fmt17(t) + ",";
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : key) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

std::string encode(const ReferenceSolution& ref) {
    std::string out = "DREF1";
    const auto& g = ref.grid();
    put<double>(out, g.a());
    put<double>(out, g.b());
    put<std::uint64_t>(out, static_cast<std::uint64_t>(g.size()));
    put<std::uint64_t>(out, ref.snapshots().size());
    for (const auto& [t, f] : ref.snapshots()) put<double>(out, t);
    for (const auto& [t, f] : ref.snapshots())
        for (const auto& s : f.values) {
            put<double>(out, s.up.real());
            put<double>(out, s.up.imag());
            put<double>(out, s.down.real());
            put<double>(out, s.down.imag());
        }
    return out;
}

ReferenceSolution decode(const std::string& bytes) {
    if (bytes.compare(0, 5, "DREF1") != 0) throw ConfigError("reference cache: bad magic");
    std::size_t pos = 5;
    const double a = get<double>(bytes, pos);
    const double b = get<double>(bytes, pos);
    const auto n = get<std::uint64_t>(bytes, pos);
    const auto count = get<std::uint64_t>(bytes, pos);
    const TorusGrid grid = make_grid(a, b, static_cast<int>(n));
    std::vector<double> times(count);
    for (auto& t : times) t = get<double>(bytes, pos);
    std::map<double, SpinorField> snaps;
    for (double t : times) {
        SpinorField f(grid);
        for (auto& s : f.values) {
            const double ur = get<double>(bytes, pos), ui = get<double>(bytes, pos);
            const double dr = get<double>(bytes, pos), di = get<double>(bytes, pos);
            s = {{ur, ui}, {dr, di}};
        }
        snaps.emplace(t, std::move(f));
    }
    if (pos != bytes.size()) throw ConfigError("reference cache: trailing bytes");
    return {grid, std::move(snaps)};
}

void store(const std::filesystem::path& dir, const std::string& hash, const ReferenceSolution& ref,
           const DiracProblem& problem, const ReferenceSpec& spec) {
    std::filesystem::create_directories(dir);
    nlohmann::json manifest;
    manifest["format"] = "DREF1";
    manifest["config_hash"] = hash;
    manifest["problem"] = problem.name;
    manifest["epsilon"] = problem.epsilon;
    manifest["domain"] = {problem.a, problem.b};
    manifest["N"] = ref.grid().size();
    manifest["h_e"] = spec.h_e;
    manifest["tau_e"] = spec.tau_e;
    manifest["exact"] = spec.exact;
    manifest["splitting"] = "strang";
    manifest["substep_order"] = "potential-first";
    std::vector<double> times;
    for (const auto& [t, f] : ref.snapshots()) times.push_back(t);
    manifest["times"] = times;
    write_atomic(dir / (hash + ".dref"), encode(ref));
    write_atomic(dir / (hash + ".json"), manifest.dump(2) + "\n");
}

std::optional<ReferenceSolution> load(const std::filesystem::path& dir, const std::string& hash) {
    const auto bin = dir / (hash + ".dref");
    const auto man = dir / (hash + ".json");
    if (!std::filesystem::exists(bin) || !std::filesystem::exists(man)) return std::nullopt;
    const auto manifest = nlohmann::json::parse(read_file(man));
    if (manifest.value("config_hash", std::string{}) != hash) return std::nullopt;
    return decode(read_file(bin));
}

}  // namespace reference_cache

ReferenceSolution cached_reference_solution(const DiracProblem& problem, const ReferenceSpec& spec,
                                            std::vector<double> t_targets,
                                            const std::optional<std::filesystem::path>& cache_dir) {
    std::sort(t_targets.begin(), t_targets.end());
    if (!cache_dir) return reference_solution(problem, spec, t_targets);
    const std::string hash = reference_cache::config_hash(problem, spec, t_targets);
    try {
        if (auto hit = reference_cache::load(*cache_dir, hash)) return *hit;
    } catch (const std::exception& e) {
        std::cerr << "warning: ignoring unreadable reference cache entry " << hash << ": " << e.what() << "\n";
    }
    ReferenceSolution ref = reference_solution(problem, spec, t_targets);
    reference_cache::store(*cache_dir, hash, ref, problem, spec);
    return ref;
}

}  // namespace dirac
