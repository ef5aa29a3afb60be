#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <layertomo/cli_io.hpp>

using namespace layertomo;

namespace {

unsigned default_bits() {
    const char* env = std::getenv("LAYERTOMO_BITS");
    if (!env || !*env) return 512;
    try {
        std::size_t used = 0;
        const unsigned long v = std::stoul(env, &used);
        if (used != std::string(env).size()) throw std::invalid_argument(env);
        return static_cast<unsigned>(v);
    } catch (const std::logic_error&) {
        throw ConfigError(std::string("LAYERTOMO_BITS is not an integer: '") + env + "'");
    }
}

void common(CLI::App* s, RunConfig& c) {
    s->add_option("-o,--output", c.output, "output file (a manifest is written next to it)");
    s->add_option("--threads", c.threads, "worker threads, 0 for all cores");
    s->add_option("--tol", c.rel_tol, "relative quadrature tolerance");
    s->add_option("--seed", c.seed, "seed for randomized checks");
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig c;
    try {
        c.bits = default_bits();
    } catch (const Error& e) {
        std::cerr << error_line(e.kind(), e.what()) << std::endl;
        return exit_code(e.kind());
    }

    CLI::App app{"Traveltime tomography in layered media"};
    app.require_subcommand(1);
    std::optional<double> surface_slowness, rho_star, rho_lower;

    auto* fwd = app.add_subcommand("forward", "ray traveltime and offset sweep");
    fwd->add_option("--profile", c.input, "profile JSON")->required();
    fwd->add_option("--kind", c.kind, "reflected or diving");
    fwd->add_option("--p", c.p_grid, "slowness grid start,stop,count")->required();
    common(fwd, c);

    auto* inv = app.add_subcommand("invert-diving", "speed profile from diving-ray (p, tau) data");
    inv->add_option("--input", c.input, "CSV with columns p and tau")->required();
    inv->add_option("--surface-slowness", surface_slowness, "1/c0 when the data omit it");
    common(inv, c);

    auto* svd = app.add_subcommand("abel-svd", "discretized Abel operator singular values");
    svd->add_option("--n-max", c.n_max, "largest index n");
    common(svd, c);

    auto* cond = app.add_subcommand("conditioning", "Hankel section eigenvalues, condition numbers and bound curves");
    cond->add_option("--rho-star", rho_star, "upper elliptical radius");
    cond->add_option("--rho-lower", rho_lower, "lower elliptical radius (default 0)");
    cond->add_option("--p-bounds", c.p_bounds, "p_lo,p_hi,p_star_lo,p_star_hi");
    cond->add_option("--n-min", c.n_min, "first section order written");
    cond->add_option("--n-max", c.n_max, "largest section order");
    cond->add_option("--bits", c.bits, "mantissa bits (LAYERTOMO_BITS sets the default)");
    common(cond, c);

    auto* dopt = app.add_subcommand("delta-opt", "optimal subinterval ratio and rate");
    common(dopt, c);

    auto* eq = app.add_subcommand("equivalent", "profile with matched low odd moments");
    eq->add_option("--profile", c.input, "base profile JSON")->required();
    eq->add_option("--degree", c.degree, "number of matched odd moments");
    eq->add_option("--separation", c.separation, "minimum sup-norm speed difference");
    eq->add_option("--p", c.p_grid, "slowness grid for the traveltime gap");
    common(eq, c);

    auto* sd = app.add_subcommand("sdf", "slowness distribution dump");
    sd->add_option("--profile", c.input, "profile JSON")->required();
    sd->add_option("--p", c.p_ref, "reference slowness");
    sd->add_option("--q", c.q_grid, "slowness grid start,stop,count");
    common(sd, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << error_line(ErrorKind::config, e.what()) << std::endl;
        return exit_code(ErrorKind::config);
    }
    c.subcommand = app.get_subcommands().front()->get_name();
    c.surface_slowness = surface_slowness;
    c.rho_star = rho_star;
    c.rho_lower = rho_lower;
    return run(c);
}
