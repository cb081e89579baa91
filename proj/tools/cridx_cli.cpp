// cridx: boundary CR invariants and Diederich-Fornaess / Steinness index
// estimates from a defining-function config.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cridx/crgeom.hpp"
#include "cridx/errors.hpp"
#include "cridx/indices.hpp"
#include "cridx/report.hpp"
#include "cridx/validation.hpp"

namespace {

using namespace cridx;
using nlohmann::json;

enum Exit : int {
    kOk = 0,
    kFailure = 1,
    kConfig = 2,
    kNotPseudoconvex = 3,
    kStarved = 4,
    kInconsistent = 5,
};

struct Common {
    std::string config;
    std::string out;
    std::string csv;
    std::optional<std::uint64_t> seed;
    std::optional<int> samples;
};

DomainSpec load(const Common& c) {
    std::ifstream in(c.config);
    if (!in) throw ConfigError("cannot read config file '" + c.config + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    DomainSpec spec = load_domain_config(ss.str());
    if (c.seed) spec.sampling.seed = *c.seed;
    if (c.samples) spec.sampling.count = *c.samples;
    validate(spec);
    return spec;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
}

void emit(const Common& c, const json& j) { write_text(c.out, j.dump(2) + "\n"); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<BoundaryPoint> samples_for(const DomainSpec& spec) {
    auto samples = sample_boundary(spec);
    for (auto& p : refine_weak_points(spec, samples)) samples.push_back(std::move(p));
    return samples;
}

int cmd_analyze(const Common& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const DomainSpec spec = load(c);
    const Analysis a = analyze_domain(spec);
    const json report = analysis_json(a, c.config, seconds_since(t0));
    emit(c, report);
    if (!c.csv.empty()) write_text(c.csv, emit_pointwise_csv(report));
    return consistency_ok(a) ? kOk : kInconsistent;
}

int cmd_certify(const Common& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const DomainSpec spec = load(c);
    AnalysisOptions opt;
    opt.optimize = false;
    const Analysis a = analyze_domain(spec, opt);
    emit(c, certify_json(a, c.config, seconds_since(t0)));
    return consistency_ok(a) ? kOk : kInconsistent;
}

int cmd_oracle(const Common& c, const std::string& side, double gamma) {
    const DomainSpec spec = load(c);
    const auto samples = samples_for(spec);
    const OracleVerdict v = side == "interior" ? interior_psh_oracle(spec, samples, gamma)
                                               : exterior_psh_oracle(spec, samples, gamma);
    emit(c, oracle_json(v));
    return kOk;
}

int cmd_optimize(const Common& c, const std::string& objective, int budget) {
    const DomainSpec spec = load(c);
    const auto geoms = analyze_boundary(spec, samples_for(spec));
    const Objective obj = objective == "df" ? Objective::DF : Objective::Steinness;
    const OptimizationResult r = optimize_trivialization(spec, geoms, obj, budget > 0 ? budget : spec.optimizer.budget);
    emit(c, optimization_json(r, obj));
    return kOk;
}

int cmd_selftest(std::uint64_t seed) {
    const validation::SuiteResult suites[] = {validation::jet_fd_suite(seed), validation::rank_one_suite(seed)};
    bool ok = true;
    for (const auto& s : suites) {
        std::cout << (s.ok() ? "PASS " : "FAIL ") << s.name << ": " << s.cases << " cases, " << s.failures
                  << " failures, worst " << s.worst;
        if (s.name == "jet finite differences") std::cout << ", reality defect " << s.worst_aux;
        std::cout << '\n';
        if (!s.ok()) std::cout << "  worst case: " << s.worst_case << '\n';
        ok = ok && s.ok();
    }
    return ok ? kOk : kInconsistent;
}

void add_common(CLI::App* sub, Common& c, bool csv) {
    sub->add_option("config", c.config, "domain config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", c.out, "write JSON here instead of stdout");
    if (csv) sub->add_option("--csv", c.csv, "write per-point CSV here");
    sub->add_option("--seed", c.seed, "override sampling.seed");
    sub->add_option("--samples", c.samples, "override sampling.count");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Boundary CR invariants and Diederich-Fornaess / Steinness index estimates"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    Common common;
    auto* analyze = app.add_subcommand("analyze", "full pipeline: sampling, indices, optimizer, oracles");
    add_common(analyze, common, true);

    auto* certify = app.add_subcommand("certify", "consistency checks only (exit 5 on failure)");
    add_common(certify, common, false);

    std::string side;
    double gamma = 0.0;
    auto* oracle = app.add_subcommand("oracle", "single plurisubharmonicity verdict");
    add_common(oracle, common, false);
    oracle->add_option("--side", side, "interior or exterior")->required()->check(CLI::IsMember({"interior", "exterior"}));
    oracle->add_option("--gamma", gamma, "exponent")->required();

    std::string objective = "df";
    int budget = -1;
    auto* optimize = app.add_subcommand("optimize", "search the conformal trivialization family");
    add_common(optimize, common, false);
    optimize->add_option("--objective", objective, "df or s")->check(CLI::IsMember({"df", "s"}));
    optimize->add_option("--budget", budget, "objective evaluations")->check(CLI::PositiveNumber);

    std::uint64_t selftest_seed = 1;
    auto* selftest = app.add_subcommand("selftest", "jet finite-difference and rank-one oracle suites");
    selftest->add_option("--seed", selftest_seed, "suite seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*analyze) return cmd_analyze(common);
        if (*certify) return cmd_certify(common);
        if (*oracle) return cmd_oracle(common, side, gamma);
        if (*optimize) return cmd_optimize(common, objective, budget);
        if (*selftest) return cmd_selftest(selftest_seed);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const PseudoconvexityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNotPseudoconvex;
    } catch (const SamplingError& e) {
        std::cerr << "sampling error: " << e.what() << '\n';
        return kStarved;
    } catch (const ProjectionError& e) {
        std::cerr << "projection error: " << e.what() << '\n';
        return kStarved;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kConfig;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}
