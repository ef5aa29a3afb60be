// Writes conditioning curves for the two reference geometries and prints the decay fits.
//   panels [outdir]
#include <cstdio>
#include <cmath>
#include <string>
#include <vector>

#include <layertomo/layertomo.hpp>

using namespace layertomo;

namespace {

int panel(const std::string& out, double rho_lower, double rho_upper, std::size_t n_max) {
    RunConfig c;
    c.subcommand = "conditioning";
    c.rho_lower = rho_lower;
    c.rho_star = rho_upper;
    c.n_max = n_max;
    c.bits = 1024;
    c.output = out;
    if (const int rc = run(c); rc != 0) return rc;

    const auto g = geometry_from_rho(rho_lower, rho_upper);
    const auto t = read_numeric_csv(out, {"N", "lambda_min"});
    std::vector<double> n, sq, ll, ls;
    for (const auto& r : t.rows) {
        if (r[0] >= 10) n.push_back(r[0]), ll.push_back(std::log(r[1]));
        if (r[0] >= 9) sq.push_back(std::sqrt(r[0])), ls.push_back(0.5 * std::log(r[1]));
    }
    const auto geo = linear_fit(n, ll), root = linear_fit(sq, ls);
    std::printf("%s: rho in [%.2f, %.2f], beta %.4f, szego c %.4f\n", out.c_str(), rho_lower, rho_upper, g.beta,
                g.transfinite_diameter());
    std::printf("  log lambda_N vs N:       slope %.4f (R2 %.5f), -2 log beta %.4f\n", geo.slope, geo.r2,
                -2 * std::log(g.beta));
    std::printf("  log sigma_N vs sqrt(N):  slope %.4f (R2 %.5f)\n", root.slope, root.r2);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string dir = argc > 1 ? std::string(argv[1]) + "/" : "";
    if (const int rc = panel(dir + "panel_steep.csv", 0.0, 0.5, 30)) return rc;
    return panel(dir + "panel_grazing.csv", 0.5, 1.0, 49);
}
