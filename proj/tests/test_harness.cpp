#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <sstream>

#include "ivd/harness.hpp"

using namespace ivd;

namespace {

// Wilson bounds as the roots of (phat - p)^2 = z^2 p (1 - p) / n.
std::pair<double, double> wilson_roots(double s, double n) {
    const double z = 1.959963984540054, ph = s / n, z2n = z * z / n;
    const double a = 1 + z2n, b = -(2 * ph + z2n), c = ph * ph;
    const double disc = std::sqrt(b * b - 4 * a * c);
    return {(-b - disc) / (2 * a), (-b + disc) / (2 * a)};
}

std::string run_capture(const std::string& cmd, int& status) {
    std::string out;
    FILE* f = popen(cmd.c_str(), "r");
    REQUIRE(f);
    char buf[256];
    while (fgets(buf, sizeof buf, f)) out += buf;
    status = pclose(f);
    return out;
}

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.setting = Setting::sublevel_cech;
    cfg.n_list = {10, 30};
    cfg.trials = 6;
    cfg.master_seed = 99;
    return cfg;
}

} // namespace

TEST_CASE("wilson interval frozen values") {
    const auto a = wilson_interval(0, 10);
    CHECK(a.low == 0);
    CHECK(a.high == doctest::Approx(0.2775327998628892).epsilon(1e-14));
    const auto b = wilson_interval(10, 10);
    CHECK(b.low == doctest::Approx(0.7224672001371107).epsilon(1e-14));
    CHECK(b.high <= 1);
    CHECK(b.high == doctest::Approx(1).epsilon(1e-14));
    const auto c = wilson_interval(5, 10);
    CHECK(c.low == doctest::Approx(0.236593090512564).epsilon(1e-14));
    CHECK(c.high == doctest::Approx(0.7634069094874361).epsilon(1e-14));
    CHECK_THROWS(wilson_interval(1, 0));
    CHECK_THROWS(wilson_interval(3, 2));
}

TEST_CASE("wilson interval matches the quadratic roots") {
    for (std::size_t n : {1u, 7u, 20u, 100u, 1000u})
        for (std::size_t s = 0; s <= n; s += std::max<std::size_t>(1, n / 7)) {
            const auto w = wilson_interval(s, n);
            const auto [lo, hi] = wilson_roots(static_cast<double>(s), static_cast<double>(n));
            CHECK(std::fabs(w.low - std::max(0.0, lo)) < 1e-12);
            CHECK(std::fabs(w.high - std::min(1.0, hi)) < 1e-12);
        }
}

TEST_CASE("alpha fit") {
    const std::vector<double> n{100, 300, 1000, 3000};
    std::vector<double> frac;
    for (double x : n) frac.push_back(1 - std::exp(-0.002 * x));
    CHECK(fit_alpha(n, frac) == doctest::Approx(0.002).epsilon(1e-4));
    CHECK(fit_alpha(n, {0, 0, 0, 0}) == 0);
    CHECK(fit_alpha(n, {1, 1, 1, 1}) > 1e-3);
    CHECK_THROWS(fit_alpha(n, {0, 0}));
}

TEST_CASE("settings parse") {
    CHECK(parse_setting("sublevel-cech") == Setting::sublevel_cech);
    CHECK(parse_setting("copy-probability") == Setting::copy_probability);
    CHECK(std::string(to_string(Setting::fixed_fn)) == "fixed-fn");
    CHECK_THROWS(parse_setting("sublevel"));
}

TEST_CASE("seeds are pure functions of their inputs") {
    CHECK(row_seed(1, 0) == row_seed(1, 0));
    CHECK(row_seed(1, 0) != row_seed(1, 1));
    CHECK(trial_seed(row_seed(1, 0), 3) != trial_seed(row_seed(1, 1), 3));
}

TEST_CASE("experiment output does not depend on the worker count") {
    ExperimentConfig cfg = small_config();
    std::string csv[2];
    for (std::size_t w : {1u, 3u}) {
        cfg.workers = w;
        std::ostringstream out;
        write_report_csv(out, run_decomposability_experiment(cfg));
        csv[w == 1 ? 0 : 1] = out.str();
    }
    CHECK(csv[0] == csv[1]);
    CHECK(csv[0].rfind("setting,n,trials,successes,inconclusive,fraction,ci_low,ci_high,seed\n", 0) == 0);
    CHECK(csv[0].find("sublevel-cech,10,6,") != std::string::npos);
}

TEST_CASE("trials at tiny intensities are interval") {
    ExperimentConfig cfg = small_config();
    for (RngSeed s = 0; s < 10; ++s) CHECK(run_decomposability_trial(cfg, 1, s).outcome == TrialOutcome::interval);
    cfg.setting = Setting::degree;
    CHECK(run_decomposability_trial(cfg, 0.5, 4).outcome == TrialOutcome::interval);
}

TEST_CASE("experiment validation") {
    ExperimentConfig cfg = small_config();
    cfg.setting = Setting::fixed_fn;
    CHECK_THROWS(run_decomposability_experiment(cfg));
    cfg = small_config();
    cfg.n_list = {30, 10};
    CHECK_THROWS(run_decomposability_experiment(cfg));
    cfg = small_config();
    cfg.field_char = 4;
    CHECK_THROWS(run_decomposability_experiment(cfg));
    cfg = small_config();
    cfg.setting = Setting::copy_probability;
    CHECK_THROWS(run_decomposability_experiment(cfg));
}

TEST_CASE("fixed function cube") {
    const ScalarField phi = default_fixed_function(2);
    const Subcube q = find_regular_cube(phi, 2);
    CHECK(q.side == doctest::Approx(0.25));
    for (double a : {0.0, 1.0})
        for (double b : {0.0, 1.0}) {
            const Point c = q.corner + q.side * Point(Eigen::Vector2d(a, b));
            CHECK(phi.gradient(c).norm() >= 0.1);
        }
    CHECK(phi.value(Point::Constant(2, 0.5)) == 0);
}

TEST_CASE("settle radius") {
    auto pt = [](double x, double y) { return Point(Eigen::Vector2d(x, y)); };
    const PointCloud two(2, {pt(0, 0), pt(0.4, 0)});
    const double r = settle_radius(two, ComplexKind::cech, 0, 2);
    CHECK(r >= 0.2);
    CHECK(r < 0.2 * (1 + 1.0 / 32));
    // A square needs the diagonal to kill its loop.
    const PointCloud sq(2, {pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)});
    const double rs = settle_radius(sq, ComplexKind::rips, 1, 2);
    CHECK(rs >= std::sqrt(2.0) / 2);
}

TEST_CASE("canonical configurations verify") {
    for (const LemmaCheck& c : verify_canonical_configs(5)) {
        CAPTURE(c.detail);
        CHECK(c.pass);
    }
}

TEST_CASE("command line") {
    int status = 0;
    const std::string out = run_capture(std::string(IVD_CLI) + " verify-lemmas 2>&1", status);
    CHECK(status == 0);
    CHECK(out.find("lemma4.12: PASS") != std::string::npos);
    run_capture(std::string(IVD_CLI) + " experiment --setting nonsense --hom-k 1 --dim 2 --n 10 --trials 1 --seed 1 "
                                       "--out /dev/null 2>&1",
                status);
    CHECK(status != 0);
}
