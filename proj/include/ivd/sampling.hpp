#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ivd/geometry.hpp"
#include "ivd/random.hpp"

namespace ivd {

/// Axis-aligned cube given by its minimum corner and side length.
struct Subcube {
    Point corner;
    double side = 0;

    Point center() const { return corner.array() + 0.5 * side; }
    /// Closed containment with a kGeomTol margin.
    bool contains(const Point& x) const;
};

using Density = std::function<double(const Point&)>;

std::uint64_t poisson_count(double rate, Rng& rng);
std::uint64_t poisson_count(double rate, RngSeed seed);

/// Homogeneous Poisson process of intensity n on [0,1]^d.
PointCloud sample_poisson_uniform(double n, std::size_t d, RngSeed seed);

/// Poisson process of intensity n f(x) on [0,1]^d by thinning a homogeneous
/// process of intensity n f_upper. Throws if f exceeds f_upper or is negative.
PointCloud sample_poisson_intensity(double n, const Density& f, double f_upper, std::size_t d, RngSeed seed);

/// I.i.d. Uniform[0,1] marks, redrawn until pairwise separated by kGeomTol.
PointCloud assign_uniform_marks(const PointCloud& cloud, RngSeed seed);

/// Fraction of points (the query included) within closed distance h of each point.
std::vector<double> ball_kde(const PointCloud& cloud, double h);

/// (ln n / n)^(1/d)
double default_bandwidth(double n, std::size_t d);

/// Cubes of side n^(-1/d) in [0,1]^d on a regular grid with gaps of at least
/// `separation`, listed with the first axis most significant.
std::vector<Subcube> pack_subcubes(double n, std::size_t d, double separation);

/// Indices (in pattern order) of the cloud points forming a scaled eps-copy of
/// `pattern` in q; nullopt if there is none. Throws std::invalid_argument if the
/// eps-balls around the pattern overlap or leave the open unit cube.
std::optional<std::vector<std::size_t>> contains_scaled_copy_in(const PointCloud& cloud, const PointCloud& pattern,
                                                                double eps, const Subcube& q);

struct CopyMatch {
    std::size_t cube_index;
    Subcube cube;
    std::vector<std::size_t> points;
};

/// First packed subcube (pack_subcubes(n, d, 0) order) holding a scaled eps-copy.
/// A result is always a genuine copy; nullopt does not rule out copies elsewhere.
std::optional<CopyMatch> find_scaled_copy(const PointCloud& cloud, const PointCloud& pattern, double eps, double n);

/// Piecewise-constant intensity on a regular grid over [0,1]^d (d = 1 or 2).
/// Text format: one row of cell values per line; for d = 2 line j covers the
/// j-th band of the second coordinate and column i the i-th band of the first.
class IntensityGrid {
  public:
    IntensityGrid(std::size_t dim, std::size_t nx, std::size_t ny, std::vector<double> values);

    std::size_t dim() const { return dim_; }
    double operator()(const Point& x) const;
    double max_value() const;

  private:
    std::size_t dim_, nx_, ny_;
    std::vector<double> values_;
};

IntensityGrid read_intensity_grid(std::istream& in, std::size_t dim);
IntensityGrid load_intensity_grid(const std::string& path, std::size_t dim);

} // namespace ivd
