#include "dirac/config.hpp"

#include "dirac/expression.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace dirac {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

double number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError("missing '" + std::string(key) + "' in " + where);
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError("'" + std::string(key) + "' in " + where + " must be a number");
    return v.get<double>();
}

Expression expression(const json& v, const std::string& where) {
    if (v.is_number()) return Expression::parse(v.dump());
    if (!v.is_string()) throw ConfigError(where + " must be an expression string");
    return Expression::parse(v.get<std::string>());
}

struct ComplexExpr {
    Expression re;
    std::optional<Expression> im;
    Complex operator()(double x) const { return {re(0.0, x), im ? (*im)(0.0, x) : 0.0}; }
};

ComplexExpr complex_expression(const json& v, const std::string& where) {
    if (v.is_object()) {
        reject_unknown(v, {"re", "im"}, where);
        ComplexExpr c{v.contains("re") ? expression(v.at("re"), where + ".re") : Expression::parse("0"), std::nullopt};
        if (v.contains("im")) c.im = expression(v.at("im"), where + ".im");
        return c;
    }
    return {expression(v, where), std::nullopt};
}

SpinorFunction spinor_function(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2) throw ConfigError(where + " must be a two-component array");
    ComplexExpr c1 = complex_expression(v[0], where + "[0]");
    ComplexExpr c2 = complex_expression(v[1], where + "[1]");
    return [c1, c2](double x) { return Spinor{c1(x), c2(x)}; };
}

/// Largest |f| over 4096 points of [a, b] and (for time-dependent f) 100 times in [0, t_end].
double sampled_sup(const Expression& f, double a, double b, double t_end) {
    const int nx = 4096, nt = f.time_independent() ? 1 : 100;
    double m = 0.0;
    for (int k = 0; k < nt; ++k) {
        const double t = nt == 1 ? 0.0 : t_end * k / (nt - 1);
        for (int j = 0; j < nx; ++j) m = std::max(m, std::abs(f(t, a + (b - a) * j / nx)));
    }
    return m;
}

ProblemFamily inline_family(const json& spec, std::optional<double> T0_override) {
    const std::string where = "problem";
    reject_unknown(spec, {"domain", "epsilon", "T0", "potentials", "phi0", "phi0_deriv"}, where);
    if (!spec.contains("domain") || !spec["domain"].is_array() || spec["domain"].size() != 2 ||
        !spec["domain"][0].is_number() || !spec["domain"][1].is_number())
        throw ConfigError("problem.domain must be [a, b]");
    const double a = spec["domain"][0].get<double>(), b = spec["domain"][1].get<double>();
    if (!(b > a)) throw ConfigError("problem.domain needs b > a");
    const double T0 = T0_override.value_or(spec.contains("T0") ? number(spec, "T0", where) : 1.0);
    if (!spec.contains("phi0")) throw ConfigError("problem.phi0 is required");

    PotentialPair pot = PotentialPair::zero();
    if (spec.contains("potentials")) {
        const json& pj = spec["potentials"];
        if (!pj.is_object()) throw ConfigError("problem.potentials must be an object");
        reject_unknown(pj, {"V", "A1", "V_max", "A_max"}, "problem.potentials");
        const Expression V = pj.contains("V") ? expression(pj["V"], "potentials.V") : Expression::parse("0");
        const Expression A = pj.contains("A1") ? expression(pj["A1"], "potentials.A1") : Expression::parse("0");
        pot.V = [V](double t, double x) { return V(t, x); };
        pot.A1 = [A](double t, double x) { return A(t, x); };
        pot.time_independent = V.time_independent() && A.time_independent();
        const double eps_hint = spec.contains("epsilon") ? number(spec, "epsilon", where) : 1.0;
        const double t_end = eps_hint > 0.0 ? T0 / eps_hint : T0;
        pot.V_max = pj.contains("V_max") ? number(pj, "V_max", "problem.potentials") : sampled_sup(V, a, b, t_end);
        pot.A_max = pj.contains("A_max") ? number(pj, "A_max", "problem.potentials") : sampled_sup(A, a, b, t_end);
    }
    const SpinorFunction phi0 = spinor_function(spec["phi0"], "problem.phi0");
    std::optional<SpinorFunction> deriv;
    if (spec.contains("phi0_deriv")) deriv = spinor_function(spec["phi0_deriv"], "problem.phi0_deriv");
    const std::string name = "inline:" + spec.dump();

    return [=](double eps) {
        DiracProblem p;
        p.name = name;
        p.a = a;
        p.b = b;
        p.epsilon = eps;
        p.T0 = T0;
        p.potentials = pot;
        p.phi0 = phi0;
        p.phi0_deriv = deriv;
        return p;
    };
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(j, {"problem", "epsilon", "epsilons", "T0", "scheme", "h", "tau", "reference", "levels", "h0", "tau0",
                       "samples", "cache_dir"},
                   "config");

    RunConfig c;
    std::optional<double> T0;
    if (j.contains("T0")) T0 = number(j, "T0", "config");
    if (T0 && !(*T0 > 0.0)) throw ConfigError("T0 must be positive");

    if (!j.contains("problem")) throw ConfigError("config needs a 'problem'");
    const json& pj = j["problem"];
    std::optional<double> inline_eps;
    if (pj.is_string()) {
        const std::string name = pj.get<std::string>();
        const auto known = presets::names();
        if (std::find(known.begin(), known.end(), name) == known.end())
            throw ConfigError("unknown problem preset '" + name + "'");
        c.problem_label = name;
        c.family = [name, T0](double eps) { return presets::by_name(name, eps, T0); };
    } else if (pj.is_object()) {
        c.family = inline_family(pj, T0);
        c.problem_label = "inline";
        if (pj.contains("epsilon")) inline_eps = number(pj, "epsilon", "problem");
    } else {
        throw ConfigError("'problem' must be a preset name or an object");
    }

    if (j.contains("epsilons")) {
        if (!j["epsilons"].is_array() || j["epsilons"].empty()) throw ConfigError("'epsilons' must be a non-empty array");
        for (const auto& e : j["epsilons"]) {
            if (!e.is_number()) throw ConfigError("'epsilons' entries must be numbers");
            c.epsilons.push_back(e.get<double>());
        }
    } else if (j.contains("epsilon")) {
        c.epsilons.push_back(number(j, "epsilon", "config"));
    } else if (inline_eps) {
        c.epsilons.push_back(*inline_eps);
    } else if (c.problem_label == "free-bandlimited") {
        c.epsilons.push_back(0.0);
    } else {
        c.epsilons.push_back(1.0);
    }
    for (double e : c.epsilons)
        if (!(e >= 0.0 && e <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");

    if (j.contains("scheme")) {
        if (!j["scheme"].is_string()) throw ConfigError("'scheme' must be a string");
        c.scheme = parse_scheme(j["scheme"].get<std::string>());
    }
    if (j.contains("h")) c.h = number(j, "h", "config");
    if (j.contains("tau")) c.tau = number(j, "tau", "config");
    c.h0 = j.contains("h0") ? number(j, "h0", "config") : c.h;
    c.tau0 = j.contains("tau0") ? number(j, "tau0", "config") : c.tau;
    if (j.contains("levels")) {
        if (!j["levels"].is_number_integer() || j["levels"].get<int>() < 1)
            throw ConfigError("'levels' must be a positive integer");
        c.levels = j["levels"].get<int>();
    }
    if (j.contains("samples")) {
        if (!j["samples"].is_number_integer() || j["samples"].get<int>() < 1)
            throw ConfigError("'samples' must be a positive integer");
        c.samples = j["samples"].get<int>();
    }
    if (j.contains("cache_dir")) {
        if (!j["cache_dir"].is_string()) throw ConfigError("'cache_dir' must be a string");
        c.cache_dir = j["cache_dir"].get<std::string>();
    }
    if (j.contains("reference")) {
        const json& r = j["reference"];
        if (r.is_string() && r.get<std::string>() == "exact") {
            c.reference = ReferenceSpec{true, 0.0, 0.0};
        } else if (r.is_object()) {
            reject_unknown(r, {"h_e", "tau_e"}, "reference");
            ReferenceSpec spec;
            spec.h_e = number(r, "h_e", "reference");
            spec.tau_e = number(r, "tau_e", "reference");
            if (!(spec.h_e > 0.0) || !(spec.tau_e > 0.0)) throw ConfigError("reference h_e and tau_e must be positive");
            c.reference = spec;
        } else {
            throw ConfigError("'reference' must be {h_e, tau_e} or \"exact\"");
        }
    }
    // The exact reference is grid-free; give it the finest test mesh.
    if (c.reference && c.reference->exact) c.reference->h_e = c.h > 0.0 ? c.h : c.h0;
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace dirac
