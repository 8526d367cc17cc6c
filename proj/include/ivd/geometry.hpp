#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ivd/random.hpp"

namespace ivd {

/// Tolerance for all geometric comparisons (unit-scale configurations).
inline constexpr double kGeomTol = 1e-9;

using Point = Eigen::VectorXd;

/// Finite point set in R^d with optional real marks (gamma), one per point.
class PointCloud {
  public:
    explicit PointCloud(std::size_t dim = 1);
    PointCloud(std::size_t dim, std::vector<Point> points,
               std::optional<std::vector<double>> gamma = std::nullopt);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    const std::vector<Point>& points() const { return points_; }
    const Point& point(std::size_t i) const { return points_.at(i); }
    const Point& operator[](std::size_t i) const { return points_[i]; }

    bool has_gamma() const { return gamma_.has_value(); }
    const std::vector<double>& gamma() const;
    double mark(std::size_t i) const { return gamma().at(i); }

    PointCloud with_gamma(std::vector<double> gamma) const;
    PointCloud without_gamma() const;
    /// Points at the given indices (marks carried along), in that order.
    PointCloud subset(std::span<const std::size_t> idx) const;

  private:
    void validate() const;

    std::size_t dim_;
    std::vector<Point> points_;
    std::optional<std::vector<double>> gamma_;
};

double distance(const Point& a, const Point& b);
double diameter(const PointCloud& cloud);

struct Ball {
    Point center;
    double radius;
};

/// Smallest closed ball containing all points (move-to-front Welzl).
/// Throws std::invalid_argument on empty input.
Ball min_enclosing_ball(std::span<const Point> points);
Ball min_enclosing_ball(const PointCloud& cloud, std::span<const std::uint32_t> idx);

/// d+1 points in R^d with unit pairwise distances, circumcentered at the origin.
/// The last vertex lies on the positive x_d axis and the others span x_d = const.
PointCloud regular_simplex(std::size_t d);

/// Circumradius of the regular unit-edge d-simplex, sqrt(d / (2(d+1))).
double regular_simplex_circumradius(std::size_t d);

/// Every point moved independently and uniformly inside its closed eps-ball.
PointCloud perturb(const PointCloud& cloud, double eps, RngSeed seed);

/// Coefficients of a linear functional strictly increasing along `order`, or
/// nullopt if none exists (strict LP feasibility, slack threshold 1e-7).
std::optional<Point> is_f_linear(const PointCloud& cloud, std::span<const std::size_t> order);

struct ScalarField {
    std::function<double(const Point&)> value;
    std::function<Point(const Point&)> gradient;
};

/// x -> scale * rotation * x + translation
struct Similarity {
    Eigen::MatrixXd rotation;
    Point translation;
    double scale = 1.0;

    Point apply(const Point& x) const { return scale * (rotation * x) + translation; }
    PointCloud apply(const PointCloud& cloud) const;
};

/// Finds a similarity T placing the order-minimal point at `a`, aligning the
/// order's linear functional with grad g(a), and shrinking until g is strictly
/// increasing along `order` on T(cloud). Throws std::invalid_argument if `a` is
/// critical or the order is not f-linear, std::runtime_error if halvings run out.
Similarity realize_order(const PointCloud& cloud, std::span<const std::size_t> order, const ScalarField& g,
                         const Point& a, std::size_t max_halvings = 60);

/// Point-file reader. Lines starting with '#' are comments, except that a
/// "# dim=<d>" line fixes the ambient dimension; with a known dimension a line
/// of d+1 numbers carries a trailing gamma mark.
PointCloud read_point_cloud(std::istream& in, std::optional<std::size_t> dim = std::nullopt);
PointCloud load_point_cloud(const std::string& path, std::optional<std::size_t> dim = std::nullopt);
void write_point_cloud(std::ostream& out, const PointCloud& cloud);
void save_point_cloud(const std::string& path, const PointCloud& cloud);

} // namespace ivd
