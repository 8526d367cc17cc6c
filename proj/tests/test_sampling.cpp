#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ivd/sampling.hpp"

using namespace ivd;

namespace {

Point p2(double x, double y) { return Eigen::Vector2d(x, y); }

} // namespace

TEST_CASE("poisson counts have matching mean and variance") {
    Rng rng(3);
    for (double rate : {0.5, 7.0, 250.0}) {
        const int reps = 4000;
        double sum = 0, sq = 0;
        for (int i = 0; i < reps; ++i) {
            const double k = static_cast<double>(poisson_count(rate, rng));
            sum += k;
            sq += k * k;
        }
        const double mean = sum / reps, var = sq / reps - mean * mean;
        // Five standard errors of the sample mean.
        CHECK(std::fabs(mean - rate) < 5 * std::sqrt(rate / reps));
        CHECK(std::fabs(var / rate - 1) < 0.15);
    }
    CHECK(poisson_count(0.0, RngSeed{1}) == 0);
    CHECK(poisson_count(40.0, RngSeed{8}) == poisson_count(40.0, RngSeed{8}));
}

TEST_CASE("uniform sampling") {
    const PointCloud c = sample_poisson_uniform(500, 2, 17);
    CHECK(std::fabs(static_cast<double>(c.size()) - 500) < 5 * std::sqrt(500.0));
    std::size_t left = 0;
    for (const auto& p : c.points()) {
        CHECK(p.size() == 2);
        CHECK(p.minCoeff() >= 0);
        CHECK(p.maxCoeff() < 1);
        if (p[0] < 0.5) ++left;
    }
    CHECK(std::fabs(static_cast<double>(left) / c.size() - 0.5) < 0.1);
    const PointCloud again = sample_poisson_uniform(500, 2, 17);
    REQUIRE(again.size() == c.size());
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(again[i] == c[i]);
}

TEST_CASE("intensity sampling by thinning") {
    const Density f = [](const Point& x) { return 2 * x[0]; };
    const PointCloud c = sample_poisson_intensity(2000, f, 2.0, 1, 4);
    // Expected count n * integral(f) = n; expected mean coordinate 2/3.
    CHECK(std::fabs(static_cast<double>(c.size()) - 2000) < 5 * std::sqrt(2000.0));
    double mean = 0;
    for (const auto& p : c.points()) mean += p[0];
    mean /= static_cast<double>(c.size());
    CHECK(std::fabs(mean - 2.0 / 3.0) < 0.03);
    CHECK_THROWS(sample_poisson_intensity(100, f, 1.0, 1, 4));
    const Density neg = [](const Point&) { return -1.0; };
    CHECK_THROWS(sample_poisson_intensity(100, neg, 1.0, 1, 4));
}

TEST_CASE("uniform marks are distinct and in range") {
    const PointCloud c = assign_uniform_marks(sample_poisson_uniform(300, 2, 9), 10);
    REQUIRE(c.has_gamma());
    std::vector<double> g = c.gamma();
    std::sort(g.begin(), g.end());
    for (std::size_t i = 0; i + 1 < g.size(); ++i) CHECK(g[i + 1] - g[i] > kGeomTol);
    CHECK(g.front() >= 0);
    CHECK(g.back() < 1);
}

TEST_CASE("ball kde against brute force") {
    const PointCloud c = sample_poisson_uniform(150, 2, 21);
    const double h = 0.13;
    const auto k = ball_kde(c, h);
    REQUIRE(k.size() == c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        std::size_t near = 0;
        for (std::size_t j = 0; j < c.size(); ++j) {
            const double dx = c[i][0] - c[j][0], dy = c[i][1] - c[j][1];
            if (dx * dx + dy * dy <= h * h) ++near;
        }
        CHECK(k[i] == doctest::Approx(static_cast<double>(near) / c.size()));
    }
    CHECK(default_bandwidth(100, 2) == doctest::Approx(std::sqrt(std::log(100.0) / 100.0)));
    CHECK(default_bandwidth(100, 1) == doctest::Approx(std::log(100.0) / 100.0));
}

TEST_CASE("subcube packing") {
    const auto touching = pack_subcubes(100, 2, 0);
    CHECK(touching.size() == 100);
    CHECK(touching[1].corner[1] == doctest::Approx(0.1));  // last axis varies fastest
    CHECK(touching[10].corner[0] == doctest::Approx(0.1));
    const auto spaced = pack_subcubes(100, 2, 0.05);
    // pitch 0.15, floor(0.9 / 0.15) + 1 = 7 per axis
    CHECK(spaced.size() == 49);
    for (const auto& q : spaced) CHECK(q.corner.maxCoeff() + q.side <= 1 + 1e-12);
    CHECK(pack_subcubes(1000, 3, 0).size() == 1000);
    CHECK_THROWS(pack_subcubes(0.5, 2, 0));
}

TEST_CASE("planted scaled copies are found") {
    const PointCloud pattern(2, {p2(0.2, 0.3), p2(0.7, 0.2), p2(0.5, 0.5)});
    const double eps = 0.05;
    const Subcube q{p2(0.5, 0.3), 0.1};
    const double inner = q.side / (4 * std::sqrt(2.0));
    const Point inner_corner = q.center().array() - inner / 2;
    std::vector<Point> pts{p2(0.02, 0.02), p2(0.9, 0.9)};
    for (std::size_t i = 0; i < pattern.size(); ++i) pts.push_back(inner_corner + inner * pattern[i] + p2(0.5 * eps * inner, 0));
    const PointCloud cloud(2, pts);
    const auto match = contains_scaled_copy_in(cloud, pattern, eps, q);
    REQUIRE(match);
    CHECK(*match == std::vector<std::size_t>{2, 3, 4});

    // A stray point inside the cube spoils the copy.
    pts.push_back(p2(0.51, 0.31));
    CHECK_FALSE(contains_scaled_copy_in(PointCloud(2, pts), pattern, eps, q));

    // Displacement beyond eps * inner side.
    std::vector<Point> off{inner_corner + inner * pattern[0] + p2(2 * eps * inner, 0),
                           inner_corner + inner * pattern[1], inner_corner + inner * pattern[2]};
    CHECK_FALSE(contains_scaled_copy_in(PointCloud(2, off), pattern, eps, q));

    CHECK_THROWS_AS(contains_scaled_copy_in(cloud, pattern, 0.3, q), std::invalid_argument);
    const PointCloud edge(2, {p2(0.02, 0.5)});
    CHECK_THROWS_AS(contains_scaled_copy_in(cloud, edge, 0.05, q), std::invalid_argument);
}

TEST_CASE("find_scaled_copy reports the packed cube") {
    const PointCloud pattern(2, {p2(0.3, 0.3), p2(0.7, 0.6)});
    const double n = 25, eps = 0.1;
    const auto cubes = pack_subcubes(n, 2, 0);
    const Subcube& q = cubes[7];
    const double inner = q.side / (4 * std::sqrt(2.0));
    const Point inner_corner = q.center().array() - inner / 2;
    std::vector<Point> pts{inner_corner + inner * pattern[0], inner_corner + inner * pattern[1]};
    for (std::size_t c = 0; c < cubes.size(); ++c)
        if (c != 7) pts.push_back(cubes[c].center());  // one point per other cube keeps them empty of copies
    const auto hit = find_scaled_copy(PointCloud(2, pts), pattern, eps, n);
    REQUIRE(hit);
    CHECK(hit->cube_index == 7);
    CHECK(hit->points == std::vector<std::size_t>{0, 1});
}

TEST_CASE("intensity grids") {
    std::stringstream in("1 2\n3 4\n");
    const IntensityGrid g = read_intensity_grid(in, 2);
    CHECK(g(p2(0.1, 0.1)) == 1);
    CHECK(g(p2(0.9, 0.1)) == 2);
    CHECK(g(p2(0.1, 0.9)) == 3);
    CHECK(g(p2(0.9, 0.9)) == 4);
    CHECK(g.max_value() == 4);
    std::stringstream line("0.5 1.5 1\n");
    const IntensityGrid h = read_intensity_grid(line, 1);
    CHECK(h(Point::Constant(1, 0.5)) == 1.5);
    std::stringstream ragged("1 2\n3\n");
    CHECK_THROWS(read_intensity_grid(ragged, 2));
    CHECK_THROWS(IntensityGrid(2, 2, 1, {1.0, -1.0}));
}
