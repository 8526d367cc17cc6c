#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "ivd/filtration.hpp"
#include "ivd/sampling.hpp"

using namespace ivd;

namespace {

// Every vertex subset encoded as a bitmask, kept when its diameter is at most 2r.
std::set<Simplex> rips_by_bitmask(const PointCloud& c, double r, std::size_t max_dim) {
    std::set<Simplex> out;
    const std::size_t n = c.size();
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        Simplex s;
        for (std::uint32_t i = 0; i < n; ++i)
            if (mask >> i & 1) s.push_back(i);
        if (s.size() > max_dim + 1) continue;
        bool ok = true;
        for (std::size_t a = 0; a < s.size() && ok; ++a)
            for (std::size_t b = a + 1; b < s.size() && ok; ++b) ok = distance(c[s[a]], c[s[b]]) <= 2 * r;
        if (ok) out.insert(s);
    }
    return out;
}

std::set<Simplex> all_simplices(const SimplicialComplex& k) {
    std::set<Simplex> out;
    for (int d = 0; d <= k.dimension(); ++d)
        for (const auto& s : k.simplices(static_cast<std::size_t>(d))) out.insert(s);
    return out;
}

Point p2(double x, double y) { return Eigen::Vector2d(x, y); }

} // namespace

TEST_CASE("rips complex matches bitmask enumeration") {
    for (RngSeed seed = 1; seed <= 10; ++seed) {
        PointCloud c = sample_poisson_uniform(9, 2, seed);
        if (c.size() > 11) c = c.subset(std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
        for (double r : {0.1, 0.25, 0.5}) {
            const SimplicialComplex k = rips_complex(c, r, 3);
            CHECK(k.is_closed());
            CHECK(all_simplices(k) == rips_by_bitmask(c, r, 3));
        }
    }
}

TEST_CASE("cech complex sits inside rips with the same graph") {
    for (RngSeed seed = 1; seed <= 10; ++seed) {
        const PointCloud c = sample_poisson_uniform(12, 2, seed);
        for (double r : {0.15, 0.3}) {
            const SimplicialComplex cech = cech_complex(c, r, 2);
            const SimplicialComplex rips = rips_complex(c, r, 2);
            CHECK(cech.is_closed());
            CHECK(cech.is_subcomplex_of(rips));
            CHECK(cech.simplices(1) == rips.simplices(1));
            const SimplicialComplex big = rips_complex(c, r * 2 / std::sqrt(3.0), 2);
            CHECK(cech.is_subcomplex_of(big));  // Jung's bound in the plane
        }
    }
}

TEST_CASE("equilateral triangle filtration values") {
    const PointCloud t(2, {p2(0, 0), p2(1, 0), p2(0.5, std::sqrt(3.0) / 2)});
    const Simplex tri{0, 1, 2};
    CHECK(simplex_radius(t, ComplexKind::rips, tri) == doctest::Approx(0.5));
    CHECK(simplex_radius(t, ComplexKind::cech, tri) == doctest::Approx(1 / std::sqrt(3.0)));
    // Closed thresholds: a simplex is present exactly at its own radius.
    CHECK(rips_complex(t, 0.5, 2).count(2) == 1);
    CHECK(cech_complex(t, 0.5, 2).count(2) == 0);
    CHECK(cech_complex(t, 1 / std::sqrt(3.0), 2).count(2) == 1);
    CHECK(rips_complex(t, 0.49, 2).count(1) == 0);
}

TEST_CASE("grid poset") {
    const GridPoset g({0.2, 0.1, 0.1 + 1e-12}, {1, 2});
    CHECK(g.axis1().size() == 2);
    CHECK(g.size() == 4);
    CHECK(g.coords(g.node(1, 0)) == std::pair<std::size_t, std::size_t>{1, 0});
    CHECK(g.find1(0.2).value() == 1);
    CHECK_FALSE(g.find2(1.5));
    CHECK(g.label(g.node(0, 1)) == "0.1,2");
    const GridPoset d({0.1}, {-3, -2}, "k");
    CHECK(d.label(0) == "0.1,3");
}

TEST_CASE("sublevel bifiltration agrees with direct construction") {
    const PointCloud c = assign_uniform_marks(sample_poisson_uniform(15, 2, 31), 32);
    const std::vector<double> rs{0.05, 0.15, 0.3}, ss{0.2, 0.5, 1.0};
    for (ComplexKind kind : {ComplexKind::rips, ComplexKind::cech}) {
        const BigradedComplex b = sublevel_bifiltration(c, kind, rs, ss, 2);
        CHECK(b.is_monotone());
        for (std::size_t i = 0; i < rs.size(); ++i)
            for (std::size_t j = 0; j < ss.size(); ++j) {
                std::vector<std::size_t> keep;
                for (std::size_t v = 0; v < c.size(); ++v)
                    if (c.mark(v) <= ss[j]) keep.push_back(v);
                const SimplicialComplex direct = build_complex(c.subset(keep), kind, rs[i], 2);
                std::set<Simplex> relabelled;
                for (Simplex s : all_simplices(direct)) {
                    for (auto& v : s) v = static_cast<std::uint32_t>(keep[v]);
                    relabelled.insert(s);
                }
                CHECK(all_simplices(b.complex_at(b.grid().node(i, j))) == relabelled);
            }
    }
}

TEST_CASE("degree bifiltration agrees with direct construction") {
    const PointCloud c = sample_poisson_uniform(18, 2, 41);
    const std::vector<double> rs{0.08, 0.16};
    const std::vector<int> ks{0, 1, 3};
    const BigradedComplex b = degree_bifiltration(c, ComplexKind::rips, rs, ks, 2);
    CHECK(b.is_monotone());
    for (std::size_t i = 0; i < rs.size(); ++i)
        for (int k : ks) {
            std::vector<std::size_t> keep;
            for (std::size_t v = 0; v < c.size(); ++v) {
                std::size_t deg = 0;
                for (std::size_t w = 0; w < c.size(); ++w)
                    if (w != v && distance(c[v], c[w]) <= 2 * rs[i]) ++deg;
                if (deg >= static_cast<std::size_t>(k)) keep.push_back(v);
                CHECK(degree(c, v, rs[i]) == deg);
            }
            std::set<Simplex> expected;
            for (Simplex s : all_simplices(rips_complex(c.subset(keep), rs[i], 2))) {
                for (auto& v : s) v = static_cast<std::uint32_t>(keep[v]);
                expected.insert(s);
            }
            const auto j = b.grid().find2(-static_cast<double>(k));
            REQUIRE(j);
            CHECK(all_simplices(b.complex_at(b.grid().node(i, *j))) == expected);
        }
}

TEST_CASE("bigraded complex validation") {
    const GridPoset g({0, 1}, {0});
    std::vector<std::vector<Simplex>> table{{{0}, {1}}, {{0, 1}}};
    // Edge present without its vertex 1.
    std::vector<std::vector<std::vector<std::uint32_t>>> bad{{{0}, {0}}, {{0, 1}, {0}}};
    CHECK_THROWS(BigradedComplex(g, 1, table, bad));
    // Shrinks along the grid.
    std::vector<std::vector<std::vector<std::uint32_t>>> shrink{{{0, 1}, {0}}, {{0}, {}}};
    CHECK_THROWS(BigradedComplex(g, 1, table, shrink));
}

TEST_CASE("quantile subsampling") {
    std::vector<double> v;
    for (int i = 0; i < 100; ++i) v.push_back(i);
    const auto s = quantile_subsample(v, 5);
    CHECK(s.size() == 5);
    CHECK(s.front() == 0);
    CHECK(s.back() == 99);
    CHECK(std::is_sorted(s.begin(), s.end()));
    CHECK(quantile_subsample(v, 200).size() == 100);
}

TEST_CASE("critical grids") {
    const PointCloud c = assign_uniform_marks(sample_poisson_uniform(30, 2, 51), 52);
    const CriticalGrid g = critical_grid(c, ComplexKind::cech, GridMode::sublevel, {6, 7}, 2, 0.2);
    CHECK(g.r_values.size() <= 6);
    CHECK(g.second.size() <= 7);
    CHECK(g.r_values.back() <= 0.2 + 1e-12);
    CHECK(std::is_sorted(g.r_values.begin(), g.r_values.end()));
    for (double s : g.second) {
        bool is_mark = false;
        for (double m : c.gamma()) is_mark = is_mark || m == s;
        CHECK(is_mark);
    }
    const CriticalGrid d = critical_grid(c.without_gamma(), ComplexKind::rips, GridMode::degree, {6, 50}, 2, 0.2);
    CHECK(d.second.front() == 0);
    std::size_t top = 0;
    for (std::size_t v = 0; v < c.size(); ++v) top = std::max(top, degree(c, v, d.r_values.back()));
    CHECK(d.second.back() == static_cast<double>(top));
}
