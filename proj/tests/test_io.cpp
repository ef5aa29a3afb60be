#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include <layertomo/cli_io.hpp>

using namespace layertomo;
namespace fs = std::filesystem;

namespace {

class RunDir : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("layertomo_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write_const2() const {
        const std::string p = path("const2.json");
        write_text(p, R"({"h": 1, "knots": [{"z": 0, "c": 2}, {"z": 1, "c": 2}]})");
        return p;
    }

    int run_quiet(const RunConfig& c, std::string* out = nullptr, std::string* err = nullptr) const {
        std::ostringstream o, e;
        const int rc = run(c, o, e);
        if (out) *out = o.str();
        if (err) *err = e.str();
        return rc;
    }

    fs::path dir_;
};

}  // namespace

TEST(Grid, InclusiveEnds) {
    const auto g = parse_grid("0,0.4,9");
    ASSERT_EQ(g.size(), 9u);
    EXPECT_EQ(g.front(), 0.0);
    EXPECT_EQ(g.back(), 0.4);
    EXPECT_DOUBLE_EQ(g[4], 0.2);
    EXPECT_EQ(parse_grid("1.5,1.5,1"), std::vector<double>{1.5});
    EXPECT_EQ(parse_grid("1,0,3")[1], 0.5);
}

TEST(Grid, Rejects) {
    for (const char* bad : {"", "0,1", "0,1,2,3", "a,1,2", "0,1,0", "0,1,-3", "0,1,1", "0,inf,3", "0,1,2.5"})
        EXPECT_THROW(parse_grid(bad), ConfigError) << bad;
    EXPECT_EQ(parse_list("1,2,3", 3), (std::vector<double>{1, 2, 3}));
    EXPECT_THROW(parse_list("1,2", 3), ConfigError);
    EXPECT_THROW(parse_list("1,x,3", 3), ConfigError);
}

TEST(Format, SeventeenDigitsRoundTrip) {
    for (double v : {0.1, 1.0 / 3, 2.0 / 3e-300, -1e300, 2.2250738585072014e-308}) EXPECT_EQ(std::stod(format_double(v)), v);
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(INFINITY), "inf");
}

TEST_F(RunDir, ProfileJsonRoundTrip) {
    const auto prof = VelocityProfile::from_function(
        1.0, [](double z) { return 1 + z * z; }, [](double z) { return 2 * z; }, 17);
    save_profile(path("p.json"), prof);
    const auto back = load_profile(path("p.json"));
    ASSERT_EQ(back.knots().size(), prof.knots().size());
    for (std::size_t i = 0; i < prof.knots().size(); ++i) {
        EXPECT_EQ(back.knots()[i], prof.knots()[i]);
        EXPECT_EQ(back.speeds()[i], prof.speeds()[i]);
        EXPECT_EQ(back.slopes()[i], prof.slopes()[i]);
    }
    for (double z : {0.13, 0.5, 0.91}) EXPECT_EQ(back.speed(z), prof.speed(z));
}

TEST_F(RunDir, ProfileJsonWithoutSlopes) {
    const auto p = load_profile(write_const2());
    EXPECT_EQ(p.speed(0.5), 2.0);
    EXPECT_EQ(p.depth(), 1.0);
}

TEST_F(RunDir, ProfileJsonViolations) {
    auto expect_violation = [&](const std::string& text, const std::string& fragment) {
        write_text(path("bad.json"), text);
        try {
            load_profile(path("bad.json"));
            ADD_FAILURE() << text;
        } catch (const InvariantViolation& e) {
            EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
        }
    };
    expect_violation(R"({"knots": []})", "'h'");
    expect_violation(R"({"h": 1, "knots": [{"z": 0, "c": 1}, {"z": 0.5, "c": 1}]})", "equal h");
    expect_violation(R"({"h": 1, "knots": [{"z": 0, "c": 1}, {"z": 0.6, "c": 1}, {"z": 0.5, "c": 1}, {"z": 1, "c": 1}]})",
                     "knot 2");
    expect_violation(R"({"h": 1, "knots": [{"z": 0, "c": 1}, {"z": 1, "c": -1}]})", "positive");
    expect_violation(R"({"h": 1, "knots": [{"z": 0.1, "c": 1}, {"z": 1, "c": 1}]})", "depth must be 0");
    expect_violation(R"({"h": 1, "knots": [{"z": 0}, {"z": 1, "c": 1}]})", "knot 0");
    write_text(path("broken.json"), "{\"h\": 1,");
    EXPECT_THROW(load_profile(path("broken.json")), IoError);
    EXPECT_THROW(load_profile(path("missing.json")), IoError);
}

TEST_F(RunDir, CsvReadSelectsColumns) {
    write_text(path("d.csv"), "# comment\np,tau,kind\n0.5,2,diving\n\n0.6,1.5,diving\n");
    const auto t = read_numeric_csv(path("d.csv"), {"tau", "p"});
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[1][0], 1.5);
    EXPECT_EQ(t.rows[1][1], 0.6);
    EXPECT_THROW(read_numeric_csv(path("d.csv")), InvariantViolation);
    EXPECT_THROW(read_numeric_csv(path("d.csv"), {"x"}), InvariantViolation);
    write_text(path("w.csv"), "a,b\n1,2,3\n");
    EXPECT_THROW(read_numeric_csv(path("w.csv")), InvariantViolation);
}

TEST(Config, Validation) {
    RunConfig c;
    c.subcommand = "delta-opt";
    EXPECT_NO_THROW(validate(c));
    auto expect_config_error = [](RunConfig bad) { EXPECT_THROW(validate(bad), ConfigError); };
    {
        RunConfig b = c;
        b.subcommand = "nope";
        expect_config_error(b);
    }
    for (double tol : {0.0, 1.0, -1e-3, std::nan("")}) {
        RunConfig b = c;
        b.rel_tol = tol;
        expect_config_error(b);
    }
    {
        RunConfig b = c;
        b.n_min = 5;
        b.n_max = 4;
        expect_config_error(b);
    }
    {
        RunConfig b = c;
        b.bits = 52;
        expect_config_error(b);
        b.bits = 8192;
        expect_config_error(b);
    }
    {
        RunConfig b;
        b.subcommand = "conditioning";
        expect_config_error(b);
        b.rho_star = 0.5;
        EXPECT_NO_THROW(validate(b));
        b.p_bounds = "1,2,0.1,0.5";
        expect_config_error(b);
    }
    {
        RunConfig b;
        b.subcommand = "forward";
        b.input = "x.json";
        expect_config_error(b);
    }
}

TEST_F(RunDir, ForwardConstantProfileClosedForm) {
    RunConfig c;
    c.subcommand = "forward";
    c.input = write_const2();
    c.p_grid = "0,0.4,9";
    c.output = path("fwd.csv");
    ASSERT_EQ(run_quiet(c), 0);
    ASSERT_TRUE(fs::exists(manifest_path(c.output)));
    const auto t = read_numeric_csv(c.output, {"p", "tau", "x", "Z"});
    ASSERT_EQ(t.rows.size(), 9u);
    for (const auto& r : t.rows) {
        const double p = r[0];
        EXPECT_NEAR(r[1], 1 / std::sqrt(1 - 4 * p * p), 1e-12) << p;
        EXPECT_NEAR(r[2], 4 * p / std::sqrt(1 - 4 * p * p), 1e-12) << p;
        EXPECT_EQ(r[3], 1.0);
    }
    EXPECT_EQ(read_text(c.output).substr(0, 16), "p,tau,x,kind,Z\n0");
}

TEST_F(RunDir, ForwardThenInvertDiving) {
    const auto prof = VelocityProfile::from_function(1.0, [](double z) { return 1 + z; }, [](double) { return 1.0; }, 11);
    save_profile(path("lin.json"), prof);
    RunConfig f;
    f.subcommand = "forward";
    f.input = path("lin.json");
    f.kind = "diving";
    f.p_grid = "0.505,0.995,60";
    f.output = path("div.csv");
    ASSERT_EQ(run_quiet(f), 0);
    RunConfig i;
    i.subcommand = "invert-diving";
    i.input = f.output;
    i.surface_slowness = 1.0;
    i.output = path("inv.json");
    ASSERT_EQ(run_quiet(i), 0);
    const auto back = load_profile(i.output);
    for (double z : {0.1, 0.4, 0.8}) EXPECT_NEAR(back.speed(z) / (1 + z), 1.0, 1e-4) << z;
}

TEST_F(RunDir, ConditioningExample) {
    RunConfig c;
    c.subcommand = "conditioning";
    c.p_bounds = "0.5,1.0,0.1,0.5";
    c.n_max = 30;
    c.bits = 512;
    c.output = path("cond.csv");
    ASSERT_EQ(run_quiet(c), 0);
    const auto t = read_numeric_csv(c.output, {"N", "lambda_min", "lambda_max", "kappa", "lower1", "lower2", "upper",
                                               "szego"});
    ASSERT_EQ(t.rows.size(), 30u);
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
        EXPECT_GE(t.rows[i][3], t.rows[i - 1][3]) << i;
        EXPECT_LE(t.rows[i][1], t.rows[i - 1][1]) << i;
    }
    EXPECT_EQ(t.rows[0][3], 1.0);
    for (std::size_t k = 4; k < 8; ++k) EXPECT_DOUBLE_EQ(t.rows[0][k], 1.0);
}

TEST_F(RunDir, DeterministicAcrossThreads) {
    std::string first;
    for (unsigned threads : {1u, 3u}) {
        RunConfig c;
        c.subcommand = "conditioning";
        c.rho_star = 0.6;
        c.rho_lower = 0.1;
        c.n_max = 16;
        c.bits = 256;
        c.threads = threads;
        c.output = path("c" + std::to_string(threads) + ".csv");
        ASSERT_EQ(run_quiet(c), 0);
        if (first.empty()) first = read_text(c.output);
        else EXPECT_EQ(read_text(c.output), first);
    }
}

TEST_F(RunDir, DeltaOptPrintsFourDigits) {
    RunConfig c;
    c.subcommand = "delta-opt";
    c.output = path("d.json");
    std::string out;
    ASSERT_EQ(run_quiet(c, &out), 0);
    EXPECT_NE(out.find("0.1716"), std::string::npos) << out;
    EXPECT_NE(out.find("0.2875"), std::string::npos) << out;
    const auto j = json::parse(read_text(c.output));
    EXPECT_NEAR(j["delta"].get<double>(), 3 - 2 * std::sqrt(2.0), 1e-6);
}

TEST_F(RunDir, AbelSvdAndSdfAndEquivalent) {
    RunConfig a;
    a.subcommand = "abel-svd";
    a.n_max = 10;
    a.output = path("svd.csv");
    ASSERT_EQ(run_quiet(a), 0);
    const auto t = read_numeric_csv(a.output, {"n", "sigma_n", "sigma_computed"});
    ASSERT_EQ(t.rows.size(), 11u);
    for (const auto& r : t.rows) EXPECT_NEAR(r[2] / r[1], 1.0, 1e-6);

    const auto prof = VelocityProfile::from_function(1.0, [](double z) { return 1 + z; }, [](double) { return 1.0; }, 11);
    save_profile(path("lin.json"), prof);
    RunConfig s;
    s.subcommand = "sdf";
    s.input = path("lin.json");
    s.output = path("sdf.csv");
    ASSERT_EQ(run_quiet(s), 0);
    const auto d = read_numeric_csv(s.output, {"q", "density", "cumulative"});
    ASSERT_EQ(d.rows.size(), 201u);
    // c = 1 + z: F = c^2 / c' = 1 / q^2, and the cumulative reaches h at the slow end.
    for (const auto& r : d.rows) EXPECT_NEAR(r[1], 1 / (r[0] * r[0]), 1e-9);
    EXPECT_NEAR(d.rows.back()[2], 1.0, 1e-12);

    RunConfig e;
    e.subcommand = "equivalent";
    e.input = path("lin.json");
    e.degree = 2;
    e.separation = 0.03;
    e.output = path("eq.json");
    std::string out;
    ASSERT_EQ(run_quiet(e, &out), 0);
    EXPECT_NE(out.find("max_traveltime_gap"), std::string::npos);
    const auto m = json::parse(read_text(manifest_path(e.output)));
    EXPECT_GE(m["results"]["separation"].get<double>(), 0.03);
    EXPECT_EQ(m["results"]["relative_residuals"].size(), 2u);
    const auto other = load_profile(e.output);
    EXPECT_NEAR(odd_moments(other, 2).values[1] / odd_moments(prof, 2).values[1], 1.0, 1e-10);
}

TEST_F(RunDir, ManifestContents) {
    RunConfig c;
    c.subcommand = "delta-opt";
    c.output = path("d.json");
    c.seed = 42;
    ASSERT_EQ(run_quiet(c), 0);
    const auto m = json::parse(read_text(manifest_path(c.output)));
    EXPECT_EQ(m["subcommand"], "delta-opt");
    EXPECT_EQ(m["config"]["seed"], 42);
    EXPECT_EQ(m["outputs"][0], c.output);
    EXPECT_TRUE(m["versions"].contains("mpfr"));
    EXPECT_GE(m["wall_time_seconds"].get<double>(), 0.0);
}

TEST_F(RunDir, ExitCodesAndErrorLine) {
    auto single_json_line = [](const std::string& err, const std::string& kind) {
        ASSERT_EQ(std::count(err.begin(), err.end(), '\n'), 1) << err;
        const auto j = json::parse(err);
        EXPECT_EQ(j["error"], kind);
        EXPECT_TRUE(j.contains("message"));
    };
    std::string err;
    RunConfig c;
    c.subcommand = "nope";
    EXPECT_EQ(run_quiet(c, nullptr, &err), 2);
    single_json_line(err, "config_error");

    RunConfig f;
    f.subcommand = "forward";
    f.input = path("missing.json");
    f.p_grid = "0,0.1,2";
    f.output = path("f.csv");
    EXPECT_EQ(run_quiet(f, nullptr, &err), 3);
    single_json_line(err, "io_error");
    EXPECT_FALSE(fs::exists(manifest_path(f.output)));

    write_text(path("bad.json"), R"({"h": 1, "knots": [{"z": 0, "c": 1}, {"z": 1, "c": 0}]})");
    f.input = path("bad.json");
    EXPECT_EQ(run_quiet(f, nullptr, &err), 5);
    single_json_line(err, "invariant_violation");

    // Non-monotone diving data.
    write_text(path("d.csv"), "p,tau\n0.6,1\n0.7,2\n0.8,1.5\n0.9,0.5\n");
    RunConfig i;
    i.subcommand = "invert-diving";
    i.input = path("d.csv");
    i.surface_slowness = 1.0;
    i.output = path("i.json");
    EXPECT_EQ(run_quiet(i, nullptr, &err), 5);

    // Precision exhausted: a deep section at double precision.
    RunConfig k;
    k.subcommand = "conditioning";
    k.rho_star = 0.5;
    k.n_max = 40;
    k.bits = 53;
    k.output = path("k.csv");
    EXPECT_EQ(run_quiet(k, nullptr, &err), 4);
    single_json_line(err, "numerical_failure");
}
