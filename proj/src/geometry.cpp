#include "ivd/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "linear_program.hpp"

namespace ivd {

PointCloud::PointCloud(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw std::invalid_argument("point cloud dimension must be at least 1");
}

PointCloud::PointCloud(std::size_t dim, std::vector<Point> points, std::optional<std::vector<double>> gamma)
    : dim_(dim), points_(std::move(points)), gamma_(std::move(gamma)) {
    if (dim == 0) throw std::invalid_argument("point cloud dimension must be at least 1");
    validate();
}

void PointCloud::validate() const {
    for (const auto& p : points_) {
        if (static_cast<std::size_t>(p.size()) != dim_)
            throw std::invalid_argument("point has dimension " + std::to_string(p.size()) + ", expected " +
                                        std::to_string(dim_));
        if (!p.allFinite()) throw std::invalid_argument("point coordinates must be finite");
    }
    if (gamma_) {
        if (gamma_->size() != points_.size())
            throw std::invalid_argument("gamma must have one mark per point");
        for (double g : *gamma_)
            if (!std::isfinite(g)) throw std::invalid_argument("gamma marks must be finite");
    }
    // Sweep along the first coordinate for near-coincident points.
    std::vector<std::size_t> order(points_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points_[a][0] < points_[b][0]; });
    for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            const Point& a = points_[order[i]];
            const Point& b = points_[order[j]];
            if (b[0] - a[0] > kGeomTol) break;
            if ((a - b).norm() <= kGeomTol)
                throw std::invalid_argument("points " + std::to_string(order[i]) + " and " +
                                            std::to_string(order[j]) + " coincide");
        }
}

const std::vector<double>& PointCloud::gamma() const {
    if (!gamma_) throw std::logic_error("point cloud has no gamma marks");
    return *gamma_;
}

PointCloud PointCloud::with_gamma(std::vector<double> gamma) const { return {dim_, points_, std::move(gamma)}; }

PointCloud PointCloud::without_gamma() const {
    PointCloud c(dim_);
    c.points_ = points_;
    return c;
}

PointCloud PointCloud::subset(std::span<const std::size_t> idx) const {
    std::vector<Point> pts;
    std::optional<std::vector<double>> g;
    if (gamma_) g.emplace();
    for (std::size_t i : idx) {
        pts.push_back(points_.at(i));
        if (g) g->push_back((*gamma_)[i]);
    }
    return {dim_, std::move(pts), std::move(g)};
}

double distance(const Point& a, const Point& b) { return (a - b).norm(); }

double diameter(const PointCloud& cloud) {
    double d = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i)
        for (std::size_t j = i + 1; j < cloud.size(); ++j) d = std::max(d, distance(cloud[i], cloud[j]));
    return d;
}

namespace {

// Smallest ball with all support points on its boundary, centered in their affine hull.
Ball circumball(const std::vector<const Point*>& support, Eigen::Index dim) {
    if (support.empty()) return {Point::Zero(dim), -1.0};
    const Point& q0 = *support[0];
    if (support.size() == 1) return {q0, 0.0};
    const auto k = static_cast<Eigen::Index>(support.size() - 1);
    Eigen::MatrixXd a(dim, k);
    for (Eigen::Index i = 0; i < k; ++i) a.col(i) = *support[static_cast<std::size_t>(i + 1)] - q0;
    const Eigen::MatrixXd gram = a.transpose() * a;
    const Eigen::VectorXd rhs = 0.5 * gram.diagonal();
    const Eigen::VectorXd lambda = gram.completeOrthogonalDecomposition().solve(rhs);
    Point c = q0 + a * lambda;
    double r = 0;
    for (const Point* q : support) r = std::max(r, (c - *q).norm());
    return {std::move(c), r};
}

bool ball_contains(const Ball& b, const Point& p) {
    return b.radius >= 0 && (p - b.center).norm() <= b.radius * (1 + 1e-12) + 1e-14;
}

Ball mtf_ball(std::vector<const Point*>& pts, std::size_t end, std::vector<const Point*>& support,
              Eigen::Index dim) {
    Ball b = circumball(support, dim);
    if (support.size() == static_cast<std::size_t>(dim) + 1) return b;
    for (std::size_t i = 0; i < end; ++i) {
        if (ball_contains(b, *pts[i])) continue;
        support.push_back(pts[i]);
        b = mtf_ball(pts, i, support, dim);
        support.pop_back();
        std::rotate(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(i),
                    pts.begin() + static_cast<std::ptrdiff_t>(i + 1));
    }
    return b;
}

Ball welzl(std::vector<const Point*> pts) {
    if (pts.empty()) throw std::invalid_argument("min_enclosing_ball of an empty point set");
    const Eigen::Index dim = pts.front()->size();
    std::vector<const Point*> support;
    support.reserve(static_cast<std::size_t>(dim) + 1);
    return mtf_ball(pts, pts.size(), support, dim);
}

} // namespace

Ball min_enclosing_ball(std::span<const Point> points) {
    std::vector<const Point*> pts;
    pts.reserve(points.size());
    for (const auto& p : points) pts.push_back(&p);
    return welzl(std::move(pts));
}

Ball min_enclosing_ball(const PointCloud& cloud, std::span<const std::uint32_t> idx) {
    std::vector<const Point*> pts;
    pts.reserve(idx.size());
    for (auto i : idx) pts.push_back(&cloud.point(i));
    return welzl(std::move(pts));
}

double regular_simplex_circumradius(std::size_t d) {
    return std::sqrt(static_cast<double>(d) / (2.0 * static_cast<double>(d + 1)));
}

PointCloud regular_simplex(std::size_t d) {
    if (d == 0) throw std::invalid_argument("regular_simplex requires d >= 1");
    if (d == 1) return {1, {Point::Constant(1, -0.5), Point::Constant(1, 0.5)}};
    const PointCloud facet = regular_simplex(d - 1);
    const double rho = regular_simplex_circumradius(d - 1);
    const double h = std::sqrt(1.0 - rho * rho);
    const double t = (h * h - rho * rho) / (2 * h);
    std::vector<Point> pts;
    for (const auto& q : facet.points()) {
        Point p(static_cast<Eigen::Index>(d));
        p.head(static_cast<Eigen::Index>(d - 1)) = q;
        p[static_cast<Eigen::Index>(d - 1)] = -t;
        pts.push_back(std::move(p));
    }
    Point apex = Point::Zero(static_cast<Eigen::Index>(d));
    apex[static_cast<Eigen::Index>(d - 1)] = h - t;
    pts.push_back(std::move(apex));
    return {d, std::move(pts)};
}

PointCloud perturb(const PointCloud& cloud, double eps, RngSeed seed) {
    if (!(eps >= 0)) throw std::invalid_argument("perturbation radius must be non-negative");
    if (eps == 0) return cloud;
    Rng rng(seed);
    const auto dim = static_cast<Eigen::Index>(cloud.dim());
    std::vector<Point> pts;
    pts.reserve(cloud.size());
    for (const auto& p : cloud.points()) {
        Point offset(dim);
        do {
            for (Eigen::Index k = 0; k < dim; ++k) offset[k] = rng.uniform(-1.0, 1.0);
        } while (offset.squaredNorm() > 1.0);
        pts.push_back(p + eps * offset);
    }
    return {cloud.dim(), std::move(pts),
            cloud.has_gamma() ? std::optional<std::vector<double>>(cloud.gamma()) : std::nullopt};
}

namespace {

void check_permutation(std::span<const std::size_t> order, std::size_t n) {
    if (order.size() != n) throw std::invalid_argument("order must list every point exactly once");
    std::vector<bool> seen(n, false);
    for (std::size_t i : order) {
        if (i >= n || seen[i]) throw std::invalid_argument("order must be a permutation of the point indices");
        seen[i] = true;
    }
}

} // namespace

std::optional<Point> is_f_linear(const PointCloud& cloud, std::span<const std::size_t> order) {
    check_permutation(order, cloud.size());
    const auto d = static_cast<Eigen::Index>(cloud.dim());
    if (order.size() < 2) return Point::Unit(d, 0);

    // Variables (u, v, t) >= 0 with f = u - v; maximize the common gap t.
    const auto pairs = static_cast<Eigen::Index>(order.size() - 1);
    const Eigen::Index nvar = 2 * d + 1;
    const Eigen::Index ncon = pairs + nvar;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(ncon, nvar);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(ncon);
    for (Eigen::Index i = 0; i < pairs; ++i) {
        const Point delta = cloud[order[static_cast<std::size_t>(i + 1)]] - cloud[order[static_cast<std::size_t>(i)]];
        a.block(i, 0, 1, d) = -delta.transpose();
        a.block(i, d, 1, d) = delta.transpose();
        a(i, 2 * d) = 1.0;
    }
    for (Eigen::Index j = 0; j < nvar; ++j) {
        a(pairs + j, j) = 1.0;
        b(pairs + j) = 1.0;
    }
    Eigen::VectorXd c = Eigen::VectorXd::Zero(nvar);
    c(2 * d) = 1.0;
    const auto sol = detail::maximize(a, b, c);
    if (!sol || sol->objective <= 1e-7) return std::nullopt;
    Point f = sol->x.head(d) - sol->x.segment(d, d);
    return f;
}

PointCloud Similarity::apply(const PointCloud& cloud) const {
    std::vector<Point> pts;
    pts.reserve(cloud.size());
    for (const auto& p : cloud.points()) pts.push_back(apply(p));
    return {cloud.dim(), std::move(pts),
            cloud.has_gamma() ? std::optional<std::vector<double>>(cloud.gamma()) : std::nullopt};
}

namespace {

// Rotation (determinant +1 for d >= 2) taking unit vector u to unit vector w.
Eigen::MatrixXd rotation_between(const Point& u, const Point& w) {
    const Eigen::Index d = u.size();
    Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
    const double c = u.dot(w);
    if (d == 1) return c >= 0 ? eye : Eigen::MatrixXd(-eye);
    if (c > 1.0 - 1e-15) return eye;
    if (c < -1.0 + 1e-12) {
        Eigen::Index k = 0;
        u.cwiseAbs().minCoeff(&k);
        Point perp = Point::Unit(d, k) - u[k] * u;
        perp.normalize();
        return eye - 2.0 * (u * u.transpose() + perp * perp.transpose());
    }
    Point wp = w - c * u;
    const double s = wp.norm();
    wp /= s;
    return eye + (c - 1.0) * (u * u.transpose() + wp * wp.transpose()) + s * (wp * u.transpose() - u * wp.transpose());
}

} // namespace

Similarity realize_order(const PointCloud& cloud, std::span<const std::size_t> order, const ScalarField& g,
                         const Point& a, std::size_t max_halvings) {
    if (static_cast<std::size_t>(a.size()) != cloud.dim())
        throw std::invalid_argument("realize_order: base point has the wrong dimension");
    const auto f = is_f_linear(cloud, order);
    if (!f) throw std::invalid_argument("realize_order: the order is not f-linear");
    const Point grad = g.gradient(a);
    if (grad.norm() <= kGeomTol) throw std::invalid_argument("realize_order: a is a critical point of g");

    Similarity t;
    t.rotation = rotation_between(f->normalized(), grad.normalized());
    const Point& x0 = cloud[order.front()];
    double scale = 1.0;
    for (std::size_t attempt = 0; attempt <= max_halvings; ++attempt, scale *= 0.5) {
        t.scale = scale;
        t.translation = a - scale * (t.rotation * x0);
        bool increasing = true;
        double prev = g.value(t.apply(cloud[order[0]]));
        for (std::size_t i = 1; i < order.size() && increasing; ++i) {
            const double cur = g.value(t.apply(cloud[order[i]]));
            increasing = prev < cur;
            prev = cur;
        }
        if (increasing) return t;
    }
    throw std::runtime_error("realize_order: order not realized after " + std::to_string(max_halvings) + " halvings");
}

namespace {

double parse_double(std::string_view tok, std::size_t line_no) {
    double v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw std::runtime_error("line " + std::to_string(line_no) + ": cannot parse number '" + std::string(tok) + "'");
    return v;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

} // namespace

PointCloud read_point_cloud(std::istream& in, std::optional<std::size_t> dim) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            const std::string_view rest = std::string_view(line).substr(first + 1);
            const auto pos = rest.find("dim=");
            if (pos != std::string_view::npos && rest.substr(0, pos).find_first_not_of(" \t") == std::string_view::npos) {
                auto tok = rest.substr(pos + 4);
                tok = tok.substr(0, tok.find_first_of(" \t\r"));
                dim = static_cast<std::size_t>(parse_double(tok, line_no));
            }
            continue;
        }
        std::istringstream ls(line);
        std::vector<double> row;
        std::string tok;
        while (ls >> tok) row.push_back(parse_double(tok, line_no));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) return PointCloud(dim.value_or(1));
    const std::size_t cols = rows.front().size();
    const std::size_t d = dim.value_or(cols);
    if (cols != d && cols != d + 1)
        throw std::runtime_error("point file has " + std::to_string(cols) + " columns for dimension " + std::to_string(d));
    const bool marked = cols == d + 1;
    std::vector<Point> pts;
    std::vector<double> gamma;
    for (const auto& row : rows) {
        if (row.size() != cols) throw std::runtime_error("point file rows have inconsistent column counts");
        pts.push_back(Eigen::Map<const Eigen::VectorXd>(row.data(), static_cast<Eigen::Index>(d)));
        if (marked) gamma.push_back(row.back());
    }
    return {d, std::move(pts), marked ? std::optional<std::vector<double>>(std::move(gamma)) : std::nullopt};
}

PointCloud load_point_cloud(const std::string& path, std::optional<std::size_t> dim) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open point file " + path);
    return read_point_cloud(in, dim);
}

void write_point_cloud(std::ostream& out, const PointCloud& cloud) {
    out << "# dim=" << cloud.dim() << '\n';
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        for (Eigen::Index k = 0; k < cloud[i].size(); ++k) out << (k ? " " : "") << format_double(cloud[i][k]);
        if (cloud.has_gamma()) out << ' ' << format_double(cloud.mark(i));
        out << '\n';
    }
}

void save_point_cloud(const std::string& path, const PointCloud& cloud) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write point file " + path);
    write_point_cloud(out, cloud);
}

} // namespace ivd
