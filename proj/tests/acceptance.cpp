// Acceptance suite. `acceptance N` runs criterion N; with no argument every
// criterion runs. Each prints one "criterion N: PASS|FAIL <detail>" line and
// the exit status is nonzero if any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>

#include "ivd/canonical.hpp"
#include "ivd/harness.hpp"
#include "test_support.hpp"

using namespace ivd;
using namespace ivd::testing;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

std::string num(double x) {
    std::ostringstream s;
    s << x;
    return s.str();
}

// ---------------------------------------------------------------------------

Verdict fig2_reproduction() {
    for (std::uint32_t p : {2u, 3u})
        for (Fig2Side side : {Fig2Side::left, Fig2Side::right}) {
            const PersistenceModule f = fig2_module(side, p);
            const Decomposition d = decompose(f);
            if (d.summands.size() != 1 || !d.exact || is_thin(f))
                return {false, std::string(side == Fig2Side::left ? "left" : "right") + " over GF(" +
                                   std::to_string(p) + ") gave " + std::to_string(d.summands.size()) + " summands"};
        }
    return {true, "one exact summand on both sides over GF(2) and GF(3)"};
}

// Perturbations at half the certified radius, seeded independently of certification.
std::size_t stable_count(const CanonicalConfig& cfg, std::size_t count) {
    std::size_t ok = 0;
    for (std::size_t i = 0; i < count; ++i)
        ok += revalidate(cfg, perturb(cfg.cloud, cfg.eps_stable / 2, derive_seed(0xacce, i)));
    return ok;
}

Verdict sublevel_lemma() {
    std::string detail;
    for (std::size_t d : {2u, 3u}) {
        const CanonicalConfig cfg = config_sublevel(d);
        const WitnessModule w = witness_module(cfg, cfg.cloud);
        if (!are_isomorphic(w.restricted, fig2_module(Fig2Side::left)))
            return {false, "d=" + std::to_string(d) + ": restriction not isomorphic to the left module"};
        if (is_interval_decomposable(w.module)) return {false, "d=" + std::to_string(d) + ": interval decomposable"};
        const std::size_t ok = stable_count(cfg, 20);
        if (ok != 20) return {false, "d=" + std::to_string(d) + ": " + std::to_string(ok) + "/20 perturbations"};
        detail += "d=" + std::to_string(d) + " eps_stable=" + num(cfg.eps_stable) + " ";
    }
    return {true, detail + "20/20 perturbations each"};
}

Verdict degree_lemma() {
    const CanonicalConfig cfg = config_degree(2);
    const WitnessModule w = witness_module(cfg, cfg.cloud);
    const double r = w.bigrades[1][0];
    const std::size_t deg = degree(cfg.cloud, *cfg.apex_index, r);
    if (deg != 2) return {false, "apex degree " + std::to_string(deg) + " at scale r"};
    // Second coordinate stores -k: three nodes at k = d, one at k = d + 1.
    const bool poset_ok = w.bigrades[0][1] == -2 && w.bigrades[1][1] == -2 && w.bigrades[2][1] == -2 &&
                          w.bigrades[3][1] == -3 && w.bigrades[3][0] == r && w.bigrades[0][0] < r && r < w.bigrades[2][0];
    if (!poset_ok) return {false, "witness poset has the wrong bigrades"};
    if (!are_isomorphic(w.restricted, fig2_module(Fig2Side::left))) return {false, "not isomorphic to the left module"};
    return {true, "apex degree 2 at r=" + num(r) + ", restriction isomorphic to the left module"};
}

Verdict rips_lemma() {
    const CanonicalConfig cfg = config_rips();
    const WitnessModule w = witness_module(cfg, cfg.cloud);
    const std::array<std::array<std::size_t, 3>, 4> expected{{{8, 8, 0}, {8, 9, 0}, {8, 15, 8}, {7, 7, 0}}};
    for (std::size_t i = 0; i < 4; ++i) {
        const SimplicialComplex k = w.complex.complex_at(w.nodes[i]);
        const std::array<std::size_t, 3> got{k.count(0), k.count(1), k.count(2)};
        if (got != expected[i])
            return {false, "complex " + std::to_string(i) + " has (" + std::to_string(got[0]) + "," +
                               std::to_string(got[1]) + "," + std::to_string(got[2]) + ")"};
    }
    const auto witness = detect_noninterval_witness(w.module);
    if (!witness) return {false, "no witness found"};
    if (is_interval_decomposable(w.module)) return {false, "module is interval decomposable"};
    return {true, "counts (8,8,0) (8,9,0) (8,15,8) (7,7,0); witness at candidate " +
                      std::to_string(witness->candidate_index)};
}

Verdict h0_lemma() {
    const CanonicalConfig cfg = config_h0();
    const WitnessModule w = witness_module(cfg, cfg.cloud);
    if (w.restricted.dims() != std::vector<std::size_t>{2, 3, 2, 2}) return {false, "wrong dimension vector"};
    const Decomposition d = decompose(w.restricted);
    if (!d.exact || d.summands.size() != 2) return {false, std::to_string(d.summands.size()) + " summands"};
    if (sorted_dims(d.dim_vectors()) != sorted_dims({{1, 1, 1, 1}, {1, 2, 1, 1}})) return {false, "wrong summands"};
    for (const auto& s : d.summands)
        if (!is_thin(s) && !are_isomorphic(s, fig2_module(Fig2Side::right)))
            return {false, "non-thin summand not isomorphic to the right module"};
    return {true, "dims (2,3,2,2) = (1,1,1,1) + (1,2,1,1)"};
}

Verdict circumradii() {
    double worst = 0;
    for (std::size_t d = 1; d <= 6; ++d) {
        const PointCloud s = regular_simplex(d);
        const double full = std::sqrt(static_cast<double>(d) / (2.0 * (d + 1)));
        const double facet = std::sqrt(static_cast<double>(d - 1) / (2.0 * d));
        worst = std::max(worst, std::fabs(min_enclosing_ball(s.points()).radius - full));
        for (std::uint32_t drop = 0; drop <= d; ++drop) {
            std::vector<std::uint32_t> idx;
            for (std::uint32_t i = 0; i <= d; ++i)
                if (i != drop) idx.push_back(i);
            worst = std::max(worst, std::fabs(min_enclosing_ball(s, idx).radius - facet));
        }
    }
    return {worst < 1e-9, "max deviation " + num(worst)};
}

PointCloud cross_polytope(std::size_t d) {
    std::vector<Point> pts;
    for (std::size_t i = 0; i < d; ++i)
        for (double sgn : {1.0, -1.0}) {
            Point x = Point::Zero(static_cast<Eigen::Index>(d));
            x(static_cast<Eigen::Index>(i)) = sgn;
            pts.push_back(x);
        }
    return {d, pts};
}

Verdict cross_polytope_homology() {
    for (std::size_t d : {2u, 3u}) {
        const PointCloud o = cross_polytope(d);
        const double lo = std::sqrt(2.0) / 2;
        for (int i = 0; i < 10; ++i) {
            const double r = lo + (1 - lo) * i / 10.0;
            const std::size_t b = betti_number(rips_complex(o, r, d), d - 1);
            if (b != 1) return {false, "d=" + std::to_string(d) + " r=" + num(r) + ": dimension " + std::to_string(b)};
        }
        const std::size_t top = betti_number(rips_complex(o, 1.0, d), d - 1);
        if (top != 0) return {false, "d=" + std::to_string(d) + " r=1: dimension " + std::to_string(top)};
    }
    return {true, "dimension 1 on [sqrt(2)/2, 1), 0 at r = 1, d = 2 and 3"};
}

// Interval module on a convex support: identity wherever both ends are in the support.
PersistenceModule support_module(const GridPoset& g, const std::vector<bool>& in) {
    FinitePoset poset = FinitePoset::grid(g);
    std::vector<std::size_t> dims(poset.size());
    for (std::size_t v = 0; v < dims.size(); ++v) dims[v] = in[v] ? 1 : 0;
    std::vector<FieldMatrix> maps;
    for (auto [a, b] : poset.hasse_edges()) {
        FieldMatrix m(dims[b], dims[a]);
        if (in[a] && in[b]) m.at(0, 0) = 1;
        maps.push_back(m);
    }
    return {std::move(poset), std::move(dims), std::move(maps)};
}

// Staircase interval: columns i0..i1 with row ranges [lo_i, hi_i], both non-increasing
// in i and overlapping between neighbours, which makes the support convex and connected.
std::vector<bool> random_staircase(const GridPoset& g, Rng& rng) {
    const std::size_t a = g.axis1().size(), b = g.axis2().size();
    std::size_t i0 = rng.below(a), i1 = rng.below(a);
    if (i0 > i1) std::swap(i0, i1);
    std::vector<bool> in(g.size(), false);
    std::size_t lo = rng.below(b), hi = lo + rng.below(b - lo);
    for (std::size_t i = i0; i <= i1; ++i) {
        for (std::size_t j = lo; j <= hi; ++j) in[g.node(i, j)] = true;
        const std::size_t new_hi = lo + rng.below(hi - lo + 1);  // in [lo, hi]
        const std::size_t new_lo = rng.below(std::min(lo, new_hi) + 1);
        lo = new_lo;
        hi = new_hi;
    }
    return in;
}

Verdict decomposition_round_trip() {
    Rng rng(0x8008);
    for (int t = 0; t < 100; ++t) {
        const GridPoset g = integer_grid(1 + rng.below(4), 1 + rng.below(4));
        const std::size_t count = 2 + rng.below(4);
        std::optional<PersistenceModule> sum;
        std::vector<std::vector<std::size_t>> expected;
        for (std::size_t k = 0; k < count; ++k) {
            const PersistenceModule iv = support_module(g, random_staircase(g, rng));
            expected.push_back(iv.dims());
            sum = sum ? direct_sum(*sum, iv) : iv;
        }
        const PersistenceModule m = scramble(*sum, rng);
        const Decomposition d = decompose(m);
        if (!verify_decomposition(m, d)) return {false, "trial " + std::to_string(t) + ": invalid decomposition"};
        if (sorted_dims(d.dim_vectors()) != sorted_dims(expected))
            return {false, "trial " + std::to_string(t) + ": dimension vectors differ"};
        for (const auto& s : d.summands) {
            const IndecomposabilityCheck c = check_indecomposable(s);
            if (!c.exact || !c.indecomposable) return {false, "trial " + std::to_string(t) + ": summand splits"};
        }
    }
    return {true, "100/100 scrambled sums recovered"};
}

Verdict poisson_statistics() {
    const int seeds = 1000;
    double sum = 0, sl = 0, sr = 0, sll = 0, srr = 0, slr = 0;
    for (int s = 0; s < seeds; ++s) {
        const PointCloud c = sample_poisson_uniform(100, 2, derive_seed(0x9015, static_cast<std::uint64_t>(s)));
        double left = 0, right = 0;
        for (const Point& x : c.points()) (x(0) < 0.5 ? left : right) += 1;
        sum += static_cast<double>(c.size());
        sl += left;
        sr += right;
        sll += left * left;
        srr += right * right;
        slr += left * right;
    }
    const double mean = sum / seeds;
    const double cov = slr / seeds - (sl / seeds) * (sr / seeds);
    const double vl = sll / seeds - std::pow(sl / seeds, 2), vr = srr / seeds - std::pow(sr / seeds, 2);
    const double corr = cov / std::sqrt(vl * vr);
    const bool pass = std::fabs(mean - 100) <= 1.27 && std::fabs(corr) < 0.05;
    return {pass, "mean " + num(mean) + ", half-cube correlation " + num(corr)};
}

// Nondecreasing within CIs, and top above bottom with disjoint CIs.
Verdict trend(const ExperimentReport& r, const std::string& name) {
    std::string detail = name + " fractions";
    bool pass = true;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        detail += " " + num(r.rows[i].fraction);
        if (i > 0 && r.rows[i].ci_high < r.rows[i - 1].ci_low) pass = false;
    }
    const auto& bottom = r.rows.front();
    const auto& top = r.rows.back();
    if (!(top.fraction > bottom.fraction && top.ci_low > bottom.ci_high)) pass = false;
    return {pass, detail};
}

Verdict copy_trend() {
    ExperimentConfig cfg;
    cfg.setting = Setting::copy_probability;
    cfg.dim = 2;
    cfg.n_list = {1e3, 1e4, 1e5};
    cfg.trials = 200;
    cfg.master_seed = 2024;
    const ExperimentReport r = run_copy_experiment(default_copy_pattern(), 0.1, cfg);
    Verdict v = trend(r, "copy-probability");
    const double alpha = r.fitted_alpha.value_or(0);
    v.detail += ", fitted_alpha " + num(alpha);
    v.pass = v.pass && alpha > 0;
    return v;
}

Verdict decomposability_trends() {
    struct Run {
        Setting setting;
        std::size_t k;
        std::pair<std::size_t, std::size_t> caps;
    };
    const Run runs[] = {{Setting::sublevel_cech, 1, {8, 8}}, {Setting::degree, 1, {12, 12}}, {Setting::h0, 0, {8, 8}}};
    Verdict all{true, ""};
    for (const Run& run : runs) {
        ExperimentConfig cfg;
        cfg.setting = run.setting;
        cfg.hom_k = run.k;
        cfg.dim = 2;
        cfg.n_list = {25, 50, 100, 200};
        cfg.trials = 100;
        cfg.master_seed = 7;
        cfg.grid_caps = run.caps;
        const Verdict v = trend(run_decomposability_experiment(cfg), to_string(run.setting));
        all.pass = all.pass && v.pass;
        all.detail += (all.detail.empty() ? "" : "; ") + v.detail + (v.pass ? "" : " (failed)");
    }
    return all;
}

Verdict order_realization() {
    const CanonicalConfig cfg = config_sublevel(2);
    std::vector<std::size_t> order(cfg.cloud.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return cfg.cloud.mark(a) < cfg.cloud.mark(b); });
    const ScalarField g{[](const Point& x) { return x.squaredNorm(); }, [](const Point& x) { return Point(2 * x); }};
    Rng rng(0x4e8);
    for (int t = 0; t < 10; ++t) {
        Point a(2);
        do a = Point(Eigen::Vector2d(rng.uniform(-2, 2), rng.uniform(-2, 2)));
        while (a.norm() < 0.1);
        const Similarity s = realize_order(cfg.cloud, order, g, a);
        const PointCloud moved = s.apply(cfg.cloud);
        if ((moved[order.front()] - a).norm() > 1e-9) return {false, "minimal point not placed at a"};
        for (std::size_t i = 0; i + 1 < order.size(); ++i)
            if (!(g.value(moved[order[i]]) < g.value(moved[order[i + 1]])))
                return {false, "order not realized at trial " + std::to_string(t)};
    }
    try {
        realize_order(cfg.cloud, order, g, Point::Zero(2));
        return {false, "no error at the critical point"};
    } catch (const std::invalid_argument&) {
    }
    return {true, "10/10 regular points realized; critical point rejected"};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Verdict determinism() {
    const std::string base = std::string(IVD_CLI) +
                             " experiment --setting sublevel-cech --hom-k 1 --dim 2 --n 25,50 --trials 12 --seed 5";
    const std::string a = "acceptance13_a.csv", b = "acceptance13_b.csv";
    if (std::system((base + " --workers 1 --out " + a).c_str()) != 0 ||
        std::system((base + " --workers 4 --out " + b).c_str()) != 0)
        return {false, "experiment command failed"};
    const std::string x = read_file(a), y = read_file(b);
    std::remove(a.c_str());
    std::remove(b.c_str());
    return {!x.empty() && x == y, std::to_string(x.size()) + " bytes, " + (x == y ? "identical" : "different")};
}

struct Criterion {
    Verdict (*run)();
    double budget_s;
};

} // namespace

int main(int argc, char** argv) {
    const Criterion criteria[] = {
        {fig2_reproduction, 1},       {sublevel_lemma, 10},      {degree_lemma, 10},    {rips_lemma, 10},
        {h0_lemma, 5},                {circumradii, 5},          {cross_polytope_homology, 5},
        {decomposition_round_trip, 60}, {poisson_statistics, 30}, {copy_trend, 600},
        {decomposability_trends, 1800}, {order_realization, 5},   {determinism, 60},
    };
    const std::size_t total = std::size(criteria);
    std::vector<std::size_t> selected;
    if (argc > 1) {
        const long n = std::strtol(argv[1], nullptr, 10);
        if (n < 1 || static_cast<std::size_t>(n) > total) {
            std::cerr << "usage: acceptance [1.." << total << "]\n";
            return 2;
        }
        selected.push_back(static_cast<std::size_t>(n));
    } else {
        for (std::size_t i = 1; i <= total; ++i) selected.push_back(i);
    }
    bool ok = true;
    for (std::size_t n : selected) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[n - 1].run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > criteria[n - 1].budget_s) {
            v.pass = false;
            v.detail += " (over the " + num(criteria[n - 1].budget_s) + " s budget)";
        }
        std::cout << "criterion " << n << ": " << (v.pass ? "PASS" : "FAIL") << ' ' << v.detail << " [" << num(secs)
                  << " s]" << std::endl;
        ok = ok && v.pass;
    }
    return ok ? 0 : 1;
}
