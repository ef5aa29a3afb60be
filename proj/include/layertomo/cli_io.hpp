#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <future>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "abel_diving.hpp"
#include "fredholm_spectral.hpp"
#include "io.hpp"
#include "moment_ambiguity.hpp"
#include "ray_kinematics.hpp"
#include "velocity_model.hpp"

namespace layertomo {

inline const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"forward",      "invert-diving", "abel-svd", "conditioning",
                                                "delta-opt",    "equivalent",    "sdf"};
    return names;
}

struct RunConfig {
    std::string subcommand;
    std::string input;   // profile JSON, or a (p, tau) CSV for invert-diving
    std::string output;  // empty: <subcommand>.csv or .json in the working directory
    std::optional<double> rho_star, rho_lower;
    std::string p_bounds;  // "p_lo,p_hi,p_star_lo,p_star_hi"
    std::size_t n_min = 1, n_max = 30;
    unsigned bits = 512;
    std::string p_grid;  // "start,stop,count"; empty: subcommand default
    std::string q_grid;
    std::string kind = "reflected";
    double p_ref = 0;  // reference slowness of the sdf dump
    std::optional<double> surface_slowness;
    std::size_t degree = 3;
    double separation = 0.02;
    double rel_tol = 1e-10;
    std::uint64_t seed = 1;
    unsigned threads = 0;  // 0: hardware concurrency; never changes the output
};

inline std::string default_output(const std::string& sub) {
    const bool js = sub == "invert-diving" || sub == "delta-opt" || sub == "equivalent";
    return sub + (js ? ".json" : ".csv");
}

inline void validate(const RunConfig& c) {
    const auto& names = subcommands();
    if (std::find(names.begin(), names.end(), c.subcommand) == names.end())
        throw ConfigError("unknown subcommand '" + c.subcommand + "'");
    if (!(c.rel_tol > 0 && c.rel_tol < 1)) throw ConfigError("tolerance must lie in (0,1)");
    if (c.n_min < 1 || c.n_min > c.n_max) throw ConfigError("N range is empty");
    if (c.bits < 53) throw ConfigError("mantissa bits must be at least 53");
    resolve_bits(c.bits);
    if (c.kind != "reflected" && c.kind != "diving") throw ConfigError("kind must be reflected or diving");
    const bool needs_input = c.subcommand == "forward" || c.subcommand == "invert-diving" ||
                             c.subcommand == "equivalent" || c.subcommand == "sdf";
    if (needs_input && c.input.empty()) throw ConfigError(c.subcommand + " needs an input file");
    if (c.subcommand == "forward" && c.p_grid.empty()) throw ConfigError("forward needs a slowness grid");
    if (c.subcommand == "conditioning") {
        if (c.p_bounds.empty() == !c.rho_star.has_value())
            throw ConfigError("conditioning needs either slowness bounds or rho-star");
        if (!c.p_bounds.empty() && c.rho_lower) throw ConfigError("rho-lower only applies with rho-star");
    }
    if (c.subcommand == "equivalent") {
        if (c.degree < 1) throw ConfigError("degree must be at least 1");
        if (!(c.separation > 0)) throw ConfigError("separation must be positive");
    }
    if (c.subcommand == "sdf" && !(c.p_ref >= 0)) throw ConfigError("reference slowness must be non-negative");
}

inline json config_to_json(const RunConfig& c) {
    json j{{"subcommand", c.subcommand}, {"input", c.input}, {"output", c.output}};
    j["rho_star"] = c.rho_star ? json(*c.rho_star) : json(nullptr);
    j["rho_lower"] = c.rho_lower ? json(*c.rho_lower) : json(nullptr);
    j["p_bounds"] = c.p_bounds;
    j["n_min"] = c.n_min;
    j["n_max"] = c.n_max;
    j["bits"] = c.bits;
    j["p_grid"] = c.p_grid;
    j["q_grid"] = c.q_grid;
    j["kind"] = c.kind;
    j["p_ref"] = c.p_ref;
    j["surface_slowness"] = c.surface_slowness ? json(*c.surface_slowness) : json(nullptr);
    j["degree"] = c.degree;
    j["separation"] = c.separation;
    j["rel_tol"] = c.rel_tol;
    j["seed"] = c.seed;
    return j;
}

namespace detail {

inline unsigned worker_count(unsigned requested) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    return requested == 0 ? hw : requested;
}

// f(i) for i < n on a strided split; results land by index, so thread count cannot change them.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, unsigned threads, F&& f) {
    std::vector<T> out(n);
    const std::size_t w = std::min<std::size_t>(worker_count(threads), std::max<std::size_t>(n, 1));
    std::vector<std::future<void>> jobs;
    for (std::size_t t = 0; t < w; ++t)
        jobs.push_back(std::async(std::launch::async, [&, t] {
            for (std::size_t i = t; i < n; i += w) out[i] = f(i);
        }));
    for (auto& j : jobs) j.get();
    return out;
}

inline SlownessGeometry config_geometry(const RunConfig& c) {
    if (!c.p_bounds.empty()) {
        const auto v = parse_list(c.p_bounds, 4);
        return geometry_from_slownesses(v[0], v[1], v[2], v[3]);
    }
    return geometry_from_rho(c.rho_lower.value_or(0.0), *c.rho_star);
}

struct Outcome {
    std::vector<std::string> outputs;
    json results = json::object();
};

inline Outcome run_forward(const RunConfig& c, const std::string& out) {
    const auto prof = load_profile(c.input);
    const auto grid = parse_grid(c.p_grid);
    const RayKind kind = c.kind == "diving" ? RayKind::diving : RayKind::reflected;
    const auto rays = parallel_map<RaySolution>(grid.size(), c.threads, [&](std::size_t i) {
        return kind == RayKind::diving ? trace_diving(prof, grid[i], c.rel_tol) : trace_reflected(prof, grid[i], c.rel_tol);
    });
    CsvTable t({"p", "tau", "x", "kind", "Z"});
    for (const auto& r : rays)
        t.row().add(r.p).add(r.traveltime).add(r.offset).add(to_string(r.kind)).add(r.turning_depth.value_or(prof.depth()));
    t.save(out);
    return {{out}, {{"rows", t.size()}}};
}

inline Outcome run_invert_diving(const RunConfig& c, const std::string& out) {
    const auto data = read_numeric_csv(c.input, {"p", "tau"});
    std::vector<double> p, tau;
    for (const auto& r : data.rows) {
        p.push_back(r[0]);
        tau.push_back(r[1]);
    }
    HerglotzOptions opt;
    opt.surface_slowness = c.surface_slowness;
    opt.rel_tol = c.rel_tol;
    const auto res = herglotz_invert(std::move(p), std::move(tau), opt);
    save_profile(out, res.profile);
    return {{out}, {{"knots", res.profile.knots().size()}, {"depth", res.profile.depth()}}};
}

inline Outcome run_abel_svd(const RunConfig& c, const std::string& out) {
    const std::size_t n = c.n_max;
    const auto computed = abel_discretized_singular_values(n + 1);
    const auto exact = js_singular_system(n);
    CsvTable t({"n", "sigma_n", "sigma_computed"});
    double worst = 0;
    for (std::size_t k = 0; k <= n; ++k) {
        t.row().add(k).add(exact[k].sigma).add(computed[k]);
        worst = std::max(worst, std::abs(computed[k] / exact[k].sigma - 1));
    }
    t.save(out);
    // The squared operator has constant kernel pi; sample it at seeded points.
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> u(-1, 1);
    double kernel_dev = 0;
    for (int i = 0; i < 10; ++i) {
        double a = u(rng), b = u(rng);
        if (a > b) std::swap(a, b);
        if (a == b) continue;
        kernel_dev = std::max(kernel_dev, std::abs(abel_square_kernel_check(a, b) - std::numbers::pi));
    }
    return {{out}, {{"max_relative_sigma_error", worst}, {"kernel_max_deviation", kernel_dev}}};
}

inline Outcome run_conditioning(const RunConfig& c, const std::string& out) {
    const auto g = config_geometry(c);
    EigenDecayOptions opt;
    opt.threads = c.threads;
    const auto rep = eigen_decay(g, c.n_max, c.bits, opt);
    const auto bounds = bound_curves(g, c.n_max, rep.kappa.front(), optimize_delta().exponent);
    CsvTable t({"N", "lambda_min", "lambda_max", "kappa", "lower1", "lower2", "upper", "szego", "lambda_min_decimal"});
    for (std::size_t N = c.n_min; N <= c.n_max; ++N)
        t.row()
            .add(N)
            .add(rep.lambda_min(N))
            .add(rep.lambda_max(N))
            .add(rep.kappa[N - 1])
            .add(bounds.lower1[N - 1])
            .add(bounds.lower2[N - 1])
            .add(bounds.upper[N - 1])
            .add(bounds.szego[N - 1])
            .add(rep.lambda_min_decimal[N - 1]);
    t.save(out);
    json geom{{"rho_lower", g.rho_lower}, {"rho_upper", g.rho_upper}, {"alpha", g.alpha}, {"beta", g.beta}};
    return {{out}, {{"rows", t.size()}, {"geometry", geom}, {"bits", rep.bits}}};
}

inline Outcome run_delta_opt(const RunConfig&, const std::string& out, std::ostream& os) {
    const auto o = optimize_delta();
    char buf[96];
    std::snprintf(buf, sizeof buf, "delta_star %.4f\nrate %.4f\nexponent %.4f\n", o.delta, o.rate, o.exponent);
    os << buf;
    const json j{{"delta", o.delta}, {"rate", o.rate}, {"exponent", o.exponent}, {"objective", o.objective}};
    write_text(out, j.dump(2) + "\n");
    return {{out}, j};
}

inline Outcome run_equivalent(const RunConfig& c, const std::string& out, std::ostream& os) {
    const auto base = load_profile(c.input);
    EquivalentOptions opt;
    opt.separation = c.separation;
    const auto res = construct_equivalent_profile(base, c.degree, opt);
    save_profile(out, res.profile);
    const std::string spec = c.p_grid.empty() ? "0," + format_double(0.3 / base.max_speed()) + ",16" : c.p_grid;
    const auto grid = parse_grid(spec);
    const auto gaps = parallel_map<double>(grid.size(), c.threads,
                                           [&](std::size_t i) { return std::abs(reflected_traveltime_gap(base, res.profile, grid[i])); });
    const double max_gap = *std::max_element(gaps.begin(), gaps.end());
    for (std::size_t n = 0; n < res.relative_residuals.size(); ++n)
        os << "moment_residual " << (2 * n + 1) << " " << format_double(res.relative_residuals[n]) << "\n";
    os << "separation " << format_double(res.separation) << "\n";
    os << "max_traveltime_gap " << format_double(max_gap) << "\n";
    return {{out},
            {{"relative_residuals", res.relative_residuals},
             {"separation", res.separation},
             {"p_grid", spec},
             {"max_traveltime_gap", max_gap}}};
}

inline Outcome run_sdf(const RunConfig& c, const std::string& out) {
    const auto prof = load_profile(c.input);
    const auto ext = slowness_extrema(prof);
    const std::string spec =
        c.q_grid.empty() ? format_double(ext.lower) + "," + format_double(ext.upper) + ",201" : c.q_grid;
    const auto d = sdf(prof, c.p_ref, parse_grid(spec));
    CsvTable t({"q", "density", "cumulative", "singular"});
    for (std::size_t i = 0; i < d.q.size(); ++i)
        t.row().add(d.q[i]).add(d.density[i]).add(d.cumulative[i]).add(std::size_t(d.singular[i] ? 1 : 0));
    t.save(out);
    return {{out}, {{"depth_limit", d.depth_limit}, {"q_grid", spec}}};
}

}  // namespace detail

// Runs one validated subcommand and writes its outputs plus <output>.manifest.json.
// Returns the process exit status; failures print one JSON line on err.
inline int run(RunConfig c, std::ostream& os = std::cout, std::ostream& err = std::cerr) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        validate(c);
        if (c.output.empty()) c.output = default_output(c.subcommand);
        detail::Outcome o;
        const std::string& s = c.subcommand;
        if (s == "forward") o = detail::run_forward(c, c.output);
        else if (s == "invert-diving") o = detail::run_invert_diving(c, c.output);
        else if (s == "abel-svd") o = detail::run_abel_svd(c, c.output);
        else if (s == "conditioning") o = detail::run_conditioning(c, c.output);
        else if (s == "delta-opt") o = detail::run_delta_opt(c, c.output, os);
        else if (s == "equivalent") o = detail::run_equivalent(c, c.output, os);
        else o = detail::run_sdf(c, c.output);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const json manifest{{"subcommand", c.subcommand}, {"config", config_to_json(c)},
                            {"outputs", o.outputs},       {"results", o.results},
                            {"versions", library_versions()}, {"wall_time_seconds", wall}};
        write_text(manifest_path(c.output), manifest.dump(2) + "\n");
        return 0;
    } catch (const Error& e) {
        err << error_line(e.kind(), e.what()) << std::endl;
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << json{{"error", "internal_error"}, {"exit_code", 1}, {"message", e.what()}}.dump() << std::endl;
        return 1;
    }
}

}  // namespace layertomo
