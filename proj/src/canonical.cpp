#include "ivd/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ivd {

const char* to_string(ConfigKind kind) {
    switch (kind) {
    case ConfigKind::sublevel: return "sublevel";
    case ConfigKind::degree: return "degree";
    case ConfigKind::rips: return "rips";
    case ConfigKind::h0: return "h0";
    }
    return "?";
}

namespace {

constexpr double kTol = kGeomTol;

[[noreturn]] void violated(const std::string& inequality, double lhs, double rhs) {
    throw ConfigError("canonical configuration violates " + inequality + " (" + std::to_string(lhs) + " vs " +
                      std::to_string(rhs) + ")");
}

void require_less(const std::string& inequality, double lhs, double rhs) {
    if (!(lhs + kTol < rhs)) violated(inequality, lhs, rhs);
}

double meb(const PointCloud& cloud, std::vector<std::uint32_t> idx) {
    return min_enclosing_ball(cloud, idx).radius;
}

std::vector<std::uint32_t> iota_indices(std::size_t n) {
    std::vector<std::uint32_t> v(n);
    std::iota(v.begin(), v.end(), 0u);
    return v;
}

// Non-sigma facets of the simplex sigma + apex: drop one sigma vertex, add the apex.
double max_side_facet_radius(const PointCloud& cloud, std::size_t d, std::uint32_t apex) {
    double out = 0;
    for (std::uint32_t drop = 0; drop < d; ++drop) {
        std::vector<std::uint32_t> facet;
        for (std::uint32_t i = 0; i < d; ++i)
            if (i != drop) facet.push_back(i);
        facet.push_back(apex);
        out = std::max(out, meb(cloud, facet));
    }
    return out;
}

double max_gamma_except(const PointCloud& cloud, std::size_t skip) {
    double out = -INFINITY;
    for (std::size_t i = 0; i < cloud.size(); ++i)
        if (i != skip) out = std::max(out, cloud.mark(i));
    return out;
}

bool circumcenter_inside(const PointCloud& simplex) {
    const std::size_t d = simplex.dim();
    const Point& p0 = simplex[0];
    Eigen::MatrixXd a(d, d);
    Eigen::VectorXd b(d);
    for (std::size_t i = 1; i <= d; ++i) {
        a.row(i - 1) = (simplex[i] - p0).transpose();
        b(i - 1) = 0.5 * (simplex[i] - p0).squaredNorm();
    }
    const Point c = p0 + a.colPivHouseholderQr().solve(b);
    // Barycentric coordinates of c.
    Eigen::MatrixXd bary(d + 1, d + 1);
    Eigen::VectorXd rhs(d + 1);
    for (std::size_t i = 0; i <= d; ++i) {
        bary.block(0, i, d, 1) = simplex[i];
        bary(d, i) = 1;
    }
    rhs.head(d) = c;
    rhs(d) = 1;
    const Eigen::VectorXd lambda = bary.colPivHouseholderQr().solve(rhs);
    return (lambda.array() > kTol).all();
}

// Regular (d-1)-simplex sigma in x_d = 0 with its two apexes pulled in by delta and delta_p.
PointCloud double_simplex(std::size_t d, double delta, double delta_p) {
    if (d < 2) throw ConfigError("canonical simplex configurations need d >= 2");
    if (!(delta_p > 0)) violated("delta' > 0", delta_p, 0);
    require_less("delta' < delta", delta_p, delta);
    const double r = regular_simplex_circumradius(d - 1);
    const double h = std::sqrt(1 - r * r);
    require_less("delta < h", delta, h);
    const PointCloud facet = regular_simplex(d - 1);
    std::vector<Point> pts;
    for (const Point& q : facet.points()) {
        Point x = Point::Zero(d);
        x.head(d - 1) = q;
        pts.push_back(x);
    }
    Point v = Point::Zero(d), vp = Point::Zero(d);
    v(d - 1) = h - delta;
    vp(d - 1) = -(h - delta_p);
    pts.push_back(v);
    pts.push_back(vp);
    return {d, std::move(pts)};
}

// Heights plus a small in-plane tilt: a linear functional maximised at the apex v.
std::vector<double> tilted_height(const PointCloud& cloud) {
    const std::size_t d = cloud.dim();
    Point f = Point::Zero(d);
    double t = 0.1;
    for (std::size_t i = 0; i + 1 < d; ++i, t *= 0.5) f(i) = t;
    f(d - 1) = 1;
    std::vector<double> g;
    for (const Point& x : cloud.points()) g.push_back(f.dot(x));
    return g;
}

// Checks on the unperturbed simplex pair that the witness scales do not need.
void check_nominal_simplices(const PointCloud& cloud, std::size_t d) {
    const auto v = static_cast<std::uint32_t>(d), vp = static_cast<std::uint32_t>(d + 1);
    const double r_delta = max_side_facet_radius(cloud, d, v);
    const double r_delta_p = max_side_facet_radius(cloud, d, vp);
    require_less("r_delta < r_delta'", r_delta, r_delta_p);
    std::vector<Point> upper;
    for (std::uint32_t i = 0; i <= d; ++i) upper.push_back(cloud[i]);
    if (!circumcenter_inside(PointCloud(d, upper)))
        throw ConfigError("canonical configuration violates: circumcenter of Sigma_delta lies inside it");
    std::vector<std::uint32_t> lower = iota_indices(d);
    lower.push_back(vp);
    require_less("R_delta' < R", meb(cloud, lower), regular_simplex_circumradius(d));
}

struct SimplexScales {
    double w, x, y;
};

SimplexScales simplex_scales(const PointCloud& cloud, std::size_t d) {
    const auto v = static_cast<std::uint32_t>(d), vp = static_cast<std::uint32_t>(d + 1);
    const double side = std::max(max_side_facet_radius(cloud, d, v), max_side_facet_radius(cloud, d, vp));
    const double sigma = meb(cloud, iota_indices(d));
    require_less("r_delta' < r", side, sigma);
    std::vector<std::uint32_t> upper = iota_indices(d), lower = iota_indices(d);
    upper.push_back(v);
    lower.push_back(vp);
    const double big = meb(cloud, upper), big_p = meb(cloud, lower);
    require_less("r < R_delta", sigma, big);
    require_less("R_delta < R_delta'", big, big_p);
    return {side, sigma, big};
}

WitnessModule finish(BigradedComplex complex, std::size_t k, std::array<std::size_t, 4> nodes) {
    PersistenceModule m = homology_module(complex, k);
    std::array<Bigrade, 4> grades;
    const GridPoset& g = complex.grid();
    for (std::size_t i = 0; i < 4; ++i) {
        const auto [a, b] = g.coords(nodes[i]);
        grades[i] = {g.axis1()[a], g.axis2()[b]};
    }
    PersistenceModule restricted = restrict(m, nodes);
    return {std::move(complex), std::move(m), nodes, grades, std::move(restricted)};
}

WitnessModule sublevel_witness(const CanonicalConfig& cfg, const PointCloud& cloud) {
    const std::size_t d = cfg.dim;
    const SimplexScales sc = simplex_scales(cloud, d);
    const double s_lo = max_gamma_except(cloud, d), s_hi = cloud.mark(d);
    require_less("gamma(p) < gamma(v) for p != v", s_lo, s_hi);
    const std::vector<double> r_grid{sc.w, sc.x, sc.y}, s_grid{s_lo, s_hi};
    BigradedComplex bc = sublevel_bifiltration(cloud, ComplexKind::cech, r_grid, s_grid, d);
    const GridPoset& g = bc.grid();
    const std::array<std::size_t, 4> nodes{g.node(0, 1), g.node(1, 1), g.node(2, 1), g.node(1, 0)};
    return finish(std::move(bc), d - 1, nodes);
}

WitnessModule degree_witness(const CanonicalConfig& cfg, const PointCloud& cloud) {
    const std::size_t d = cfg.dim;
    const SimplexScales sc = simplex_scales(cloud, d);
    if (degree(cloud, d, sc.x) != d)
        throw ConfigError("canonical configuration violates deg(v) = d at scale r (deg = " +
                          std::to_string(degree(cloud, d, sc.x)) + ")");
    const std::vector<double> r_grid{sc.w, sc.x, sc.y};
    const std::vector<int> k_grid{static_cast<int>(d), static_cast<int>(d + 1)};
    BigradedComplex bc = degree_bifiltration(cloud, ComplexKind::cech, r_grid, k_grid, d);
    const GridPoset& g = bc.grid();
    // axis2 = (-(d+1), -d)
    const std::array<std::size_t, 4> nodes{g.node(0, 1), g.node(1, 1), g.node(2, 1), g.node(1, 0)};
    return finish(std::move(bc), d - 1, nodes);
}

// Point roles in config_rips.
enum RipsRole : std::size_t { L0, L1, L2, Pp, Pm, R1, R2, R0 };

double half_max(const PointCloud& c, std::initializer_list<std::pair<std::size_t, std::size_t>> pairs) {
    double out = 0;
    for (const auto& [a, b] : pairs) out = std::max(out, distance(c[a], c[b]) / 2);
    return out;
}

WitnessModule rips_witness(const PointCloud& cloud) {
    const double rw = half_max(cloud, {{L0, L1}, {L0, L2}, {L1, Pp}, {L2, Pm}, {Pp, R1}, {Pm, R2}, {R1, R0}, {R2, R0}});
    const double rx = std::max(rw, distance(cloud[Pp], cloud[Pm]) / 2);
    const double ry = half_max(cloud, {{Pp, R2}, {Pm, R1}, {L1, L2}, {R1, R2}, {L1, R1}, {L2, R2}});
    require_less("r_w < r_x", rw, distance(cloud[Pp], cloud[Pm]) / 2);
    require_less("r_x < r_y", rx, ry);
    const double s_lo = max_gamma_except(cloud, R0), s_hi = cloud.mark(R0);
    require_less("gamma(p) < gamma(apex) for p != apex", s_lo, s_hi);
    const std::vector<double> r_grid{rw, rx, ry}, s_grid{s_lo, s_hi};
    BigradedComplex bc = sublevel_bifiltration(cloud, ComplexKind::rips, r_grid, s_grid, 2);
    const GridPoset& g = bc.grid();
    const std::array<std::size_t, 4> nodes{g.node(0, 1), g.node(1, 1), g.node(2, 1), g.node(1, 0)};
    return finish(std::move(bc), 1, nodes);
}

constexpr double kH0Low = 2.7, kH0High = 3.2;

WitnessModule h0_witness(const PointCloud& cloud) {
    enum : std::size_t { A, B, C, D };
    struct Gap {
        std::size_t a, b;
        double r;
        bool joined;
        const char* name;
    };
    const Gap gaps[] = {
        {A, D, kH0Low, true, "|AD| <= 2 r_1"},   {C, D, kH0Low, true, "|CD| <= 2 r_1"},
        {B, C, kH0Low, false, "|BC| > 2 r_1"},   {B, D, kH0Low, false, "|BD| > 2 r_1"},
        {B, C, kH0High, true, "|BC| <= 2 r_2"},  {A, B, kH0High, false, "|AB| > 2 r_2"},
        {A, C, kH0High, false, "|AC| > 2 r_2"},
    };
    for (const Gap& g : gaps) {
        const double len = distance(cloud[g.a], cloud[g.b]);
        if ((len <= 2 * g.r + kTol) != g.joined) violated(g.name, len, 2 * g.r);
    }
    for (std::size_t i = 1; i < 4; ++i) require_less("gamma(A) < gamma(B) < gamma(C) < gamma(D)", cloud.mark(i - 1), cloud.mark(i));
    const std::vector<double> r_grid{0, kH0Low, kH0High}, s_grid{cloud.mark(B), cloud.mark(C), cloud.mark(D)};
    BigradedComplex bc = sublevel_bifiltration(cloud, ComplexKind::cech, r_grid, s_grid, 1);
    const GridPoset& g = bc.grid();
    const std::array<std::size_t, 4> nodes{g.node(0, 0), g.node(0, 1), g.node(2, 1), g.node(1, 2)};
    return finish(std::move(bc), 0, nodes);
}

CanonicalConfig certify(CanonicalConfig cfg) {
    const WitnessModule wm = witness_module(cfg, cfg.cloud);
    cfg.witness_poset = wm.bigrades;
    if (!revalidate(cfg, cfg.cloud))
        throw ConfigError(std::string("canonical configuration '") + to_string(cfg.kind) +
                          "' has no summand isomorphic to the Fig 2 module on its witness poset");
    cfg.eps_stable = certify_eps_stable(cfg);
    return cfg;
}

} // namespace

WitnessModule witness_module(const CanonicalConfig& cfg, const PointCloud& cloud) {
    if (cloud.size() != cfg.cloud.size() || cloud.dim() != cfg.cloud.dim())
        throw std::invalid_argument("witness_module: cloud does not match the configuration's point roles");
    switch (cfg.kind) {
    case ConfigKind::sublevel: return sublevel_witness(cfg, cloud);
    case ConfigKind::degree: return degree_witness(cfg, cloud);
    case ConfigKind::rips: return rips_witness(cloud);
    case ConfigKind::h0: return h0_witness(cloud);
    }
    throw std::logic_error("unknown configuration kind");
}

bool revalidate(const CanonicalConfig& cfg, const PointCloud& cloud) {
    std::optional<WitnessModule> wm;
    try {
        wm = witness_module(cfg, cloud);
    } catch (const ConfigError&) {
        return false;
    }
    const PersistenceModule target = fig2_module(cfg.side, wm->restricted.characteristic());
    const Decomposition d = decompose(wm->restricted);
    return std::any_of(d.summands.begin(), d.summands.end(), [&](const PersistenceModule& s) {
        return s.dims() == target.dims() && are_isomorphic(s, target);
    });
}

double certify_eps_stable(const CanonicalConfig& cfg, std::size_t seeds) {
    double eps = 0.1;
    for (int halving = 0; halving < 40; ++halving, eps /= 2) {
        bool all = true;
        for (std::size_t i = 0; i < seeds && all; ++i)
            all = revalidate(cfg, perturb(cfg.cloud, eps, derive_seed(0xe95, i)));
        if (all) return eps;
    }
    throw ConfigError("canonical configuration is not stable under any tested perturbation size");
}

CanonicalConfig config_sublevel(std::size_t d, double delta, double delta_p) {
    PointCloud pts = double_simplex(d, delta, delta_p);
    check_nominal_simplices(pts, d);
    PointCloud cloud = pts.with_gamma(tilted_height(pts));
    CanonicalConfig cfg{ConfigKind::sublevel, d, std::move(cloud), d, 0, {}, Fig2Side::left, d - 1, ComplexKind::cech};
    return certify(std::move(cfg));
}

CanonicalConfig config_degree(std::size_t d, double delta, double delta_p, double eta) {
    PointCloud pts = double_simplex(d, delta, delta_p);
    check_nominal_simplices(pts, d);
    if (!(eta > 0)) violated("eta > 0", eta, 0);
    require_less("eta < delta - delta'", eta, delta - delta_p);
    std::vector<Point> all = pts.points();
    Point w = pts[d + 1];
    w(d - 1) += eta;  // toward sigma
    all.push_back(w);
    CanonicalConfig cfg{ConfigKind::degree, d, PointCloud(d, std::move(all)), d, 0, {}, Fig2Side::left, d - 1,
                        ComplexKind::cech};
    return certify(std::move(cfg));
}

CanonicalConfig config_rips(double delta, double delta_p) {
    if (!(delta > 0)) violated("delta > 0", delta, 0);
    require_less("delta < delta'", delta, delta_p);
    require_less("delta' < 1/4", delta_p, 0.25);
    const double a = 1 - delta, b = 1 - delta_p;
    auto pt = [](double x, double y) { return Point(Eigen::Vector2d(x, y)); };
    std::vector<Point> p(8);
    p[L0] = pt(-2, 0);
    p[L1] = pt(-1, 1);
    p[L2] = pt(-1, -1);
    p[Pp] = pt(0, b);
    p[Pm] = pt(0, -b);
    p[R1] = pt(a, a);
    p[R2] = pt(a, -a);
    p[R0] = pt(2 * a, 0);
    std::vector<double> gamma;
    for (const Point& x : p) gamma.push_back(x(0) + 0.1 * x(1));
    CanonicalConfig cfg{ConfigKind::rips, 2, PointCloud(2, std::move(p), std::move(gamma)), std::size_t{R0}, 0, {},
                        Fig2Side::left, 1, ComplexKind::rips};
    return certify(std::move(cfg));
}

CanonicalConfig config_h0() {
    auto pt = [](double x, double y) { return Point(Eigen::Vector2d(x, y)); };
    PointCloud cloud(2, {pt(0, 0), pt(10, 6), pt(10, 0), pt(5, 0)}, std::vector<double>{1, 2, 3, 4});
    CanonicalConfig cfg{ConfigKind::h0, 2, std::move(cloud), std::nullopt, 0, {}, Fig2Side::right, 0,
                        ComplexKind::cech};
    return certify(std::move(cfg));
}

std::size_t connected_components(const PointCloud& cloud, double r) {
    std::vector<std::size_t> parent(cloud.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::size_t comps = cloud.size();
    for (std::size_t i = 0; i < cloud.size(); ++i)
        for (std::size_t j = i + 1; j < cloud.size(); ++j)
            if (distance(cloud[i], cloud[j]) <= 2 * r + kTol) {
                const std::size_t a = find(i), b = find(j);
                if (a != b) {
                    parent[a] = b;
                    --comps;
                }
            }
    return comps;
}

} // namespace ivd
