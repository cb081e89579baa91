#include <cmath>
#include <set>
#include <string>

#include <json.hpp>

#include "cridx/defexpr.hpp"
#include "cridx/errors.hpp"

namespace cridx {
namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) throw ConfigError("unknown key '" + where + it.key() + "'");
    }
}

const json& require_object(const json& j, const std::string& key) {
    if (!j.is_object()) throw ConfigError("'" + key + "' must be a table/object");
    return j;
}

double get_real(const json& obj, const char* key, double fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError("'" + where + key + "' must be a number");
    return v.get<double>();
}

long long get_integer(const json& obj, const char* key, long long fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError("'" + where + key + "' must be an integer");
    return v.get<long long>();
}

int to_int(long long v, const std::string& key) {
    if (v < -1'000'000'000LL || v > 1'000'000'000LL) throw ConfigError("'" + key + "' out of range");
    return static_cast<int>(v);
}

GammaGrid read_grid(const json& obj, const GammaGrid& fallback, const std::string& where) {
    require_object(obj, where);
    reject_unknown_keys(obj, {"lo", "hi", "bisect_tol"}, where + ".");
    GammaGrid g;
    g.lo = get_real(obj, "lo", fallback.lo, where + ".");
    g.hi = get_real(obj, "hi", fallback.hi, where + ".");
    g.bisect_tol = get_real(obj, "bisect_tol", fallback.bisect_tol, where + ".");
    return g;
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError("invariant violation: " + message);
}

}  // namespace

void validate(const DomainSpec& spec) {
    require(spec.n >= 2, "n must be at least 2 (the tangential (1,0)-space is zero for n = 1)");
    require(!spec.rho.empty() && spec.rho.dimension() == spec.n, "rho must be an expression in z1..zn");
    const auto& s = spec.sampling;
    require(s.count > 0, "sampling.count must be positive");
    require(s.newton_tol > 0.0, "sampling.newton_tol must be positive");
    require(s.max_newton_iters > 0, "sampling.max_newton_iters must be positive");
    require(s.box_radius > 0.0 && std::isfinite(s.box_radius), "sampling.box_radius must be positive");
    require(s.weak_refine >= 0, "sampling.weak_refine must be non-negative");
    const auto& t = spec.tolerances;
    require(t.null_eig_rel_tol > 0.0, "tolerances.null_eig_rel_tol must be positive");
    require(t.psd_tol > 0.0, "tolerances.psd_tol must be positive");
    require(t.strict_margin > 0.0, "tolerances.strict_margin must be positive");
    const auto& o = spec.oracle;
    require(!o.distances.empty(), "oracle.distances must not be empty");
    for (std::size_t i = 0; i < o.distances.size(); ++i) {
        require(o.distances[i] > 0.0, "oracle.distances must be positive");
        if (i > 0) require(o.distances[i] < o.distances[i - 1], "oracle.distances must be strictly decreasing");
    }
    require(o.interior.lo > 0.0 && o.interior.lo < o.interior.hi && o.interior.hi < 1.0,
            "oracle.gamma_grid.interior must satisfy 0 < lo < hi < 1");
    require(o.interior.bisect_tol > 0.0, "oracle.gamma_grid.interior.bisect_tol must be positive");
    require(o.exterior.lo > 1.0 && o.exterior.lo < o.exterior.hi && std::isfinite(o.exterior.hi),
            "oracle.gamma_grid.exterior must satisfy 1 < lo < hi < inf");
    require(o.exterior.bisect_tol > 0.0, "oracle.gamma_grid.exterior.bisect_tol must be positive");
    for (const auto& u : spec.conformal_basis) {
        require(u.dimension() == spec.n, "conformal_basis entries must be expressions in z1..zn");
    }
    require(spec.optimizer.budget >= 1, "optimizer.budget must be at least 1");
    require(spec.optimizer.restarts >= 1, "optimizer.restarts must be at least 1");
}

DomainSpec load_domain_config(std::string_view contents) {
    json root;
    try {
        root = json::parse(contents.begin(), contents.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown_keys(root, {"name", "n", "rho", "sampling", "tolerances", "oracle", "conformal_basis", "optimizer"},
                        "");

    DomainSpec spec;
    if (!root.contains("n")) throw ConfigError("missing mandatory key 'n'");
    if (!root.contains("rho")) throw ConfigError("missing mandatory key 'rho'");
    spec.n = to_int(get_integer(root, "n", 0, ""), "n");
    if (spec.n < 2) throw ConfigError("invariant violation: n must be at least 2");
    if (!root["rho"].is_string()) throw ConfigError("'rho' must be a string");
    if (root.contains("name")) {
        if (!root["name"].is_string()) throw ConfigError("'name' must be a string");
        spec.name = root["name"].get<std::string>();
    }

    try {
        spec.rho = parse_defining_function(root["rho"].get<std::string>(), spec.n);
    } catch (const Error& e) {
        throw ConfigError(std::string("rho: ") + e.what());
    }

    if (root.contains("sampling")) {
        const json& s = require_object(root["sampling"], "sampling");
        reject_unknown_keys(s, {"seed", "count", "newton_tol", "max_newton_iters", "box_radius", "weak_refine"},
                            "sampling.");
        if (s.contains("seed")) {
            const json& seed = s["seed"];
            if (!seed.is_number_unsigned()) throw ConfigError("'sampling.seed' must be a non-negative integer");
            spec.sampling.seed = seed.get<std::uint64_t>();
        }
        spec.sampling.count = to_int(get_integer(s, "count", spec.sampling.count, "sampling."), "sampling.count");
        spec.sampling.newton_tol = get_real(s, "newton_tol", spec.sampling.newton_tol, "sampling.");
        spec.sampling.max_newton_iters = to_int(
            get_integer(s, "max_newton_iters", spec.sampling.max_newton_iters, "sampling."), "sampling.max_newton_iters");
        spec.sampling.box_radius = get_real(s, "box_radius", spec.sampling.box_radius, "sampling.");
        spec.sampling.weak_refine =
            to_int(get_integer(s, "weak_refine", spec.sampling.weak_refine, "sampling."), "sampling.weak_refine");
    }

    if (root.contains("tolerances")) {
        const json& t = require_object(root["tolerances"], "tolerances");
        reject_unknown_keys(t, {"null_eig_rel_tol", "psd_tol", "strict_margin"}, "tolerances.");
        spec.tolerances.null_eig_rel_tol =
            get_real(t, "null_eig_rel_tol", spec.tolerances.null_eig_rel_tol, "tolerances.");
        spec.tolerances.psd_tol = get_real(t, "psd_tol", spec.tolerances.psd_tol, "tolerances.");
        spec.tolerances.strict_margin = get_real(t, "strict_margin", spec.tolerances.strict_margin, "tolerances.");
    }

    if (root.contains("oracle")) {
        const json& o = require_object(root["oracle"], "oracle");
        reject_unknown_keys(o, {"distances", "gamma_grid"}, "oracle.");
        if (o.contains("distances")) {
            if (!o["distances"].is_array()) throw ConfigError("'oracle.distances' must be an array");
            spec.oracle.distances.clear();
            for (const auto& d : o["distances"]) {
                if (!d.is_number()) throw ConfigError("'oracle.distances' entries must be numbers");
                spec.oracle.distances.push_back(d.get<double>());
            }
        }
        if (o.contains("gamma_grid")) {
            const json& g = require_object(o["gamma_grid"], "oracle.gamma_grid");
            reject_unknown_keys(g, {"interior", "exterior"}, "oracle.gamma_grid.");
            if (g.contains("interior"))
                spec.oracle.interior = read_grid(g["interior"], spec.oracle.interior, "oracle.gamma_grid.interior");
            if (g.contains("exterior"))
                spec.oracle.exterior = read_grid(g["exterior"], spec.oracle.exterior, "oracle.gamma_grid.exterior");
        }
    }

    if (root.contains("conformal_basis")) {
        const json& b = root["conformal_basis"];
        if (!b.is_array()) throw ConfigError("'conformal_basis' must be an array of strings");
        for (const auto& item : b) {
            if (!item.is_string()) throw ConfigError("'conformal_basis' entries must be strings");
            try {
                spec.conformal_basis.push_back(parse_defining_function(item.get<std::string>(), spec.n));
            } catch (const Error& e) {
                throw ConfigError(std::string("conformal_basis: ") + e.what());
            }
        }
    }

    if (root.contains("optimizer")) {
        const json& o = require_object(root["optimizer"], "optimizer");
        reject_unknown_keys(o, {"budget", "restarts"}, "optimizer.");
        spec.optimizer.budget = to_int(get_integer(o, "budget", spec.optimizer.budget, "optimizer."), "optimizer.budget");
        spec.optimizer.restarts =
            to_int(get_integer(o, "restarts", spec.optimizer.restarts, "optimizer."), "optimizer.restarts");
    }

    validate(spec);
    return spec;
}

std::string dump_domain_config(const DomainSpec& spec) {
    json root;
    if (!spec.name.empty()) root["name"] = spec.name;
    root["n"] = spec.n;
    root["rho"] = to_string(spec.rho);
    root["sampling"] = {{"seed", spec.sampling.seed},
                        {"count", spec.sampling.count},
                        {"newton_tol", spec.sampling.newton_tol},
                        {"max_newton_iters", spec.sampling.max_newton_iters},
                        {"box_radius", spec.sampling.box_radius},
                        {"weak_refine", spec.sampling.weak_refine}};
    root["tolerances"] = {{"null_eig_rel_tol", spec.tolerances.null_eig_rel_tol},
                          {"psd_tol", spec.tolerances.psd_tol},
                          {"strict_margin", spec.tolerances.strict_margin}};
    const auto grid = [](const GammaGrid& g) { return json{{"lo", g.lo}, {"hi", g.hi}, {"bisect_tol", g.bisect_tol}}; };
    root["oracle"] = {{"distances", spec.oracle.distances},
                      {"gamma_grid", {{"interior", grid(spec.oracle.interior)}, {"exterior", grid(spec.oracle.exterior)}}}};
    json basis = json::array();
    for (const auto& u : spec.conformal_basis) basis.push_back(to_string(u));
    root["conformal_basis"] = basis;
    root["optimizer"] = {{"budget", spec.optimizer.budget}, {"restarts", spec.optimizer.restarts}};
    return root.dump(2);
}

}  // namespace cridx
