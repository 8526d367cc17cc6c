#include "ivd/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ivd {

bool Subcube::contains(const Point& x) const {
    for (Eigen::Index k = 0; k < x.size(); ++k)
        if (x[k] < corner[k] - kGeomTol || x[k] > corner[k] + side + kGeomTol) return false;
    return true;
}

std::uint64_t poisson_count(double rate, Rng& rng) {
    if (!(rate >= 0) || !std::isfinite(rate)) throw std::invalid_argument("Poisson rate must be finite and non-negative");
    if (rate == 0) return 0;
    if (rate < 30) {
        // Sequential inversion of the cumulative distribution.
        const double u = rng.uniform();
        double p = std::exp(-rate), cdf = p;
        std::uint64_t k = 0;
        while (u > cdf) {
            ++k;
            p *= rate / static_cast<double>(k);
            cdf += p;
            if (p < 1e-300 && k > rate) break;
        }
        return k;
    }
    // Transformed rejection with squeeze (PTRS).
    const double slam = std::sqrt(rate), loglam = std::log(rate);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2);
    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform();
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2 * a / us + b) * u + rate + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
        if (k < 0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <= -rate + k * loglam - std::lgamma(k + 1))
            return static_cast<std::uint64_t>(k);
    }
}

std::uint64_t poisson_count(double rate, RngSeed seed) {
    Rng rng(seed);
    return poisson_count(rate, rng);
}

namespace {

Point uniform_point(std::size_t d, Rng& rng) {
    Point p(static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k) p[static_cast<Eigen::Index>(k)] = rng.uniform();
    return p;
}

void check_dim(std::size_t d) {
    if (d == 0) throw std::invalid_argument("dimension must be at least 1");
}

} // namespace

PointCloud sample_poisson_uniform(double n, std::size_t d, RngSeed seed) {
    check_dim(d);
    if (!(n > 0)) throw std::invalid_argument("sampling intensity must be positive");
    Rng rng(seed);
    const auto count = poisson_count(n, rng);
    std::vector<Point> pts;
    pts.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) pts.push_back(uniform_point(d, rng));
    return {d, std::move(pts)};
}

PointCloud sample_poisson_intensity(double n, const Density& f, double f_upper, std::size_t d, RngSeed seed) {
    check_dim(d);
    if (!(n > 0)) throw std::invalid_argument("sampling intensity must be positive");
    if (!(f_upper >= 0)) throw std::invalid_argument("intensity bound must be non-negative");
    if (f_upper == 0) return PointCloud(d);
    Rng rng(seed);
    const auto count = poisson_count(n * f_upper, rng);
    std::vector<Point> pts;
    for (std::uint64_t i = 0; i < count; ++i) {
        Point x = uniform_point(d, rng);
        const double fx = f(x);
        if (fx < 0 || fx > f_upper * (1 + 1e-12))
            throw std::invalid_argument("intensity value " + std::to_string(fx) + " outside [0, f_upper]");
        if (rng.uniform() * f_upper < fx) pts.push_back(std::move(x));
    }
    return {d, std::move(pts)};
}

PointCloud assign_uniform_marks(const PointCloud& cloud, RngSeed seed) {
    Rng rng(seed);
    std::set<double> used;
    std::vector<double> marks;
    marks.reserve(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        double m = 0;
        for (;;) {
            m = rng.uniform();
            auto it = used.lower_bound(m - kGeomTol);
            if (it == used.end() || *it > m + kGeomTol) break;
        }
        used.insert(m);
        marks.push_back(m);
    }
    return cloud.with_gamma(std::move(marks));
}

std::vector<double> ball_kde(const PointCloud& cloud, double h) {
    if (cloud.empty()) throw std::invalid_argument("ball_kde of an empty cloud");
    if (!(h > 0)) throw std::invalid_argument("bandwidth must be positive");
    const std::size_t n = cloud.size();
    std::vector<std::size_t> counts(n, 1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (distance(cloud[i], cloud[j]) <= h + kGeomTol) {
                ++counts[i];
                ++counts[j];
            }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
    return out;
}

double default_bandwidth(double n, std::size_t d) {
    check_dim(d);
    if (!(n > 1)) throw std::invalid_argument("default_bandwidth requires n > 1");
    return std::pow(std::log(n) / n, 1.0 / static_cast<double>(d));
}

namespace {

// Largest k with k^d <= n, robust to rounding in pow.
std::size_t integer_root(double n, std::size_t d) {
    auto k = static_cast<std::size_t>(std::llround(std::pow(n, 1.0 / static_cast<double>(d))));
    auto power = [d](std::size_t b) { return std::pow(static_cast<double>(b), static_cast<double>(d)); };
    while (k > 0 && power(k) > n * (1 + 1e-12)) --k;
    while (power(k + 1) <= n * (1 + 1e-12)) ++k;
    return k;
}

} // namespace

std::vector<Subcube> pack_subcubes(double n, std::size_t d, double separation) {
    check_dim(d);
    if (!(n >= 1)) throw std::invalid_argument("pack_subcubes requires n >= 1");
    if (!(separation >= 0)) throw std::invalid_argument("separation must be non-negative");
    const double side = std::pow(n, -1.0 / static_cast<double>(d));
    std::size_t k;
    double pitch;
    if (separation == 0) {
        k = std::max<std::size_t>(1, integer_root(n, d));
        pitch = side;
    } else {
        pitch = side + separation;
        k = static_cast<std::size_t>(std::floor((1.0 - side) / pitch + 1e-12)) + 1;
    }
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= k;
    std::vector<Subcube> cubes;
    cubes.reserve(total);
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t c = 0; c < total; ++c) {
        Point corner(static_cast<Eigen::Index>(d));
        for (std::size_t a = 0; a < d; ++a) corner[static_cast<Eigen::Index>(a)] = static_cast<double>(idx[a]) * pitch;
        cubes.push_back({std::move(corner), side});
        for (std::size_t a = d; a-- > 0;) {
            if (++idx[a] < k) break;
            idx[a] = 0;
        }
    }
    return cubes;
}

namespace {

void validate_pattern(const PointCloud& pattern, double eps) {
    if (pattern.empty()) throw std::invalid_argument("pattern must be nonempty");
    if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        for (Eigen::Index k = 0; k < pattern[i].size(); ++k)
            if (pattern[i][k] - eps <= 0 || pattern[i][k] + eps >= 1)
                throw std::invalid_argument("eps-ball around pattern point " + std::to_string(i) +
                                            " leaves the unit cube");
        for (std::size_t j = i + 1; j < pattern.size(); ++j)
            if (distance(pattern[i], pattern[j]) <= 2 * eps)
                throw std::invalid_argument("eps-balls around pattern points " + std::to_string(i) + " and " +
                                            std::to_string(j) + " intersect");
    }
}

// Match against the candidate points of the cloud known to cover q.
std::optional<std::vector<std::size_t>> match_candidates(const PointCloud& cloud, std::span<const std::size_t> cand,
                                                         const PointCloud& pattern, double eps, const Subcube& q) {
    const std::size_t m = pattern.size();
    std::size_t inside = 0;
    for (std::size_t i : cand)
        if (q.contains(cloud[i])) ++inside;
    if (inside != m) return std::nullopt;

    const double inner_side = q.side / (4.0 * std::sqrt(static_cast<double>(cloud.dim())));
    const Point inner_corner = q.center().array() - 0.5 * inner_side;
    const double radius = eps * inner_side;
    std::vector<std::size_t> match(m);
    for (std::size_t b = 0; b < m; ++b) {
        const Point c = inner_corner + inner_side * pattern[b];
        std::size_t hits = 0;
        for (std::size_t i : cand)
            if (distance(cloud[i], c) <= radius + kGeomTol) {
                match[b] = i;
                ++hits;
            }
        if (hits != 1) return std::nullopt;
    }
    return match;
}

} // namespace

std::optional<std::vector<std::size_t>> contains_scaled_copy_in(const PointCloud& cloud, const PointCloud& pattern,
                                                                double eps, const Subcube& q) {
    if (pattern.dim() != cloud.dim() || static_cast<std::size_t>(q.corner.size()) != cloud.dim())
        throw std::invalid_argument("cloud, pattern and subcube dimensions differ");
    validate_pattern(pattern, eps);
    std::vector<std::size_t> all(cloud.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return match_candidates(cloud, all, pattern, eps, q);
}

std::optional<CopyMatch> find_scaled_copy(const PointCloud& cloud, const PointCloud& pattern, double eps, double n) {
    if (pattern.dim() != cloud.dim()) throw std::invalid_argument("cloud and pattern dimensions differ");
    validate_pattern(pattern, eps);
    const std::size_t d = cloud.dim();
    const auto cubes = pack_subcubes(n, d, 0);
    const double side = cubes.front().side;
    std::size_t k = 1;
    while (k < cubes.size() && cubes[k].corner[static_cast<Eigen::Index>(d - 1)] > 0) ++k;

    // Bucket every point into each packed cube containing it (closed cubes can share faces).
    std::vector<std::vector<std::size_t>> buckets(cubes.size());
    std::vector<std::vector<std::size_t>> axis_hits(d);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        bool any = true;
        for (std::size_t a = 0; a < d && any; ++a) {
            axis_hits[a].clear();
            const double x = cloud[i][static_cast<Eigen::Index>(a)];
            const auto base = static_cast<long long>(std::floor(x / side));
            for (long long c = base - 1; c <= base + 1; ++c) {
                if (c < 0 || c >= static_cast<long long>(k)) continue;
                const double lo = static_cast<double>(c) * side;
                if (x >= lo - kGeomTol && x <= lo + side + kGeomTol) axis_hits[a].push_back(static_cast<std::size_t>(c));
            }
            any = !axis_hits[a].empty();
        }
        if (!any) continue;
        std::vector<std::size_t> pos(d, 0);
        for (;;) {
            std::size_t index = 0;
            for (std::size_t a = 0; a < d; ++a) index = index * k + axis_hits[a][pos[a]];
            buckets[index].push_back(i);
            std::size_t a = d;
            while (a-- > 0) {
                if (++pos[a] < axis_hits[a].size()) break;
                pos[a] = 0;
            }
            if (a == static_cast<std::size_t>(-1)) break;
        }
    }
    for (std::size_t c = 0; c < cubes.size(); ++c) {
        if (buckets[c].size() < pattern.size()) continue;
        if (auto match = match_candidates(cloud, buckets[c], pattern, eps, cubes[c]))
            return CopyMatch{c, cubes[c], std::move(*match)};
    }
    return std::nullopt;
}

IntensityGrid::IntensityGrid(std::size_t dim, std::size_t nx, std::size_t ny, std::vector<double> values)
    : dim_(dim), nx_(nx), ny_(ny), values_(std::move(values)) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("intensity grids support dimension 1 or 2");
    if (nx == 0 || ny == 0 || values_.size() != nx * ny || (dim == 1 && ny != 1))
        throw std::invalid_argument("intensity grid shape does not match its values");
    for (double v : values_)
        if (!(v >= 0) || !std::isfinite(v)) throw std::invalid_argument("intensity values must be finite and >= 0");
}

double IntensityGrid::operator()(const Point& x) const {
    auto cell = [](double t, std::size_t n) {
        return std::min(n - 1, static_cast<std::size_t>(std::max(0.0, t) * static_cast<double>(n)));
    };
    const std::size_t i = cell(x[0], nx_);
    const std::size_t j = dim_ == 2 ? cell(x[1], ny_) : 0;
    return values_[j * nx_ + i];
}

double IntensityGrid::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

IntensityGrid read_intensity_grid(std::istream& in, std::size_t dim) {
    std::vector<double> values;
    std::size_t nx = 0, ny = 0;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        std::size_t count = 0;
        double v;
        while (ls >> v) {
            values.push_back(v);
            ++count;
        }
        if (!ls.eof()) throw std::runtime_error("intensity grid: cannot parse line '" + line + "'");
        if (ny == 0) nx = count;
        if (count != nx) throw std::runtime_error("intensity grid rows have inconsistent lengths");
        ++ny;
    }
    if (ny == 0) throw std::runtime_error("intensity grid is empty");
    return {dim, nx, ny, std::move(values)};
}

IntensityGrid load_intensity_grid(const std::string& path, std::size_t dim) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open intensity grid " + path);
    return read_intensity_grid(in, dim);
}

} // namespace ivd
