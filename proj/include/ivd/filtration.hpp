#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ivd/geometry.hpp"

namespace ivd {

enum class ComplexKind { cech, rips };
enum class GridMode { sublevel, degree };

const char* to_string(ComplexKind kind);
ComplexKind parse_complex_kind(const std::string& s);
GridMode parse_grid_mode(const std::string& s);

/// Sorted vertex indices.
using Simplex = std::vector<std::uint32_t>;

/// Finite simplicial complex stored per dimension, each list in lexicographic order.
class SimplicialComplex {
  public:
    SimplicialComplex() = default;
    explicit SimplicialComplex(std::vector<std::vector<Simplex>> by_dim);

    /// -1 for the empty complex.
    int dimension() const { return static_cast<int>(by_dim_.size()) - 1; }
    std::size_t count(std::size_t dim) const { return dim < by_dim_.size() ? by_dim_[dim].size() : 0; }
    std::size_t size() const;
    const std::vector<Simplex>& simplices(std::size_t dim) const;
    bool contains(const Simplex& s) const;
    bool is_closed() const;
    bool is_subcomplex_of(const SimplicialComplex& other) const;
    bool operator==(const SimplicialComplex&) const = default;

  private:
    std::vector<std::vector<Simplex>> by_dim_;
};

/// Product of two finite chains; node (i, j) <= (i', j') iff i <= i' and j <= j'.
class GridPoset {
  public:
    GridPoset() = default;
    /// Axes are sorted and values within kGeomTol merged.
    GridPoset(std::vector<double> axis1, std::vector<double> axis2, std::string axis2_name = "s");

    const std::vector<double>& axis1() const { return axis1_; }
    const std::vector<double>& axis2() const { return axis2_; }
    std::size_t size() const { return axis1_.size() * axis2_.size(); }
    std::size_t node(std::size_t i, std::size_t j) const { return i * axis2_.size() + j; }
    std::pair<std::size_t, std::size_t> coords(std::size_t node) const {
        return {node / axis2_.size(), node % axis2_.size()};
    }
    /// Index of the axis value within kGeomTol of v, if any.
    std::optional<std::size_t> find1(double v) const;
    std::optional<std::size_t> find2(double v) const;
    /// "r,s"; degree grids print the threshold k = -axis2.
    std::string label(std::size_t node) const;
    const std::string& axis2_name() const { return axis2_name_; }

  private:
    std::vector<double> axis1_, axis2_;
    std::string axis2_name_ = "s";
};

/// Complexes at every node of a grid, sharing one global simplex table per dimension.
class BigradedComplex {
  public:
    BigradedComplex() = default;
    /// `members[node][dim]` lists indices into `table[dim]`. Validates face closure and monotonicity.
    BigradedComplex(GridPoset grid, std::size_t max_dim, std::vector<std::vector<Simplex>> table,
                    std::vector<std::vector<std::vector<std::uint32_t>>> members);
    /// Same as the constructor without the checks; for builders whose output is closed by construction.
    static BigradedComplex unchecked(GridPoset grid, std::size_t max_dim, std::vector<std::vector<Simplex>> table,
                                     std::vector<std::vector<std::vector<std::uint32_t>>> members);
    static BigradedComplex from_complexes(GridPoset grid, std::size_t max_dim,
                                          const std::vector<SimplicialComplex>& complexes);

    const GridPoset& grid() const { return grid_; }
    std::size_t max_dim() const { return max_dim_; }
    std::size_t table_size(std::size_t dim) const { return dim < table_.size() ? table_[dim].size() : 0; }
    const Simplex& simplex(std::size_t dim, std::uint32_t id) const { return table_[dim][id]; }
    std::span<const std::uint32_t> members(std::size_t node, std::size_t dim) const;
    std::optional<std::uint32_t> find(const Simplex& s) const;
    SimplicialComplex complex_at(std::size_t node) const;
    /// Containment along every covering relation of the grid.
    bool is_monotone() const;

  private:
    GridPoset grid_;
    std::size_t max_dim_ = 0;
    std::vector<std::vector<Simplex>> table_;
    std::vector<std::vector<std::vector<std::uint32_t>>> members_;
};

/// Subsets of at most max_dim+1 points with diameter <= 2r.
SimplicialComplex rips_complex(const PointCloud& cloud, double r, std::size_t max_dim);
/// Subsets of at most max_dim+1 points whose minimum enclosing ball has radius <= r.
SimplicialComplex cech_complex(const PointCloud& cloud, double r, std::size_t max_dim);
SimplicialComplex build_complex(const PointCloud& cloud, ComplexKind kind, double r, std::size_t max_dim);

/// Filtration value of a simplex: enclosing radius (cech) or half-diameter (rips).
double simplex_radius(const PointCloud& cloud, ComplexKind kind, std::span<const std::uint32_t> simplex);

/// At (r, s): the complex at scale r on the points with gamma <= s.
BigradedComplex sublevel_bifiltration(const PointCloud& cloud, ComplexKind kind, std::span<const double> r_grid,
                                      std::span<const double> s_grid, std::size_t max_dim);

/// Number of other points within closed distance 2r.
std::size_t degree(const PointCloud& cloud, std::size_t index, double r);

/// At (r, k): the complex at scale r on the points of degree >= k at scale r.
/// The grid's second axis stores -k so that the order is the product order.
BigradedComplex degree_bifiltration(const PointCloud& cloud, ComplexKind kind, std::span<const double> r_grid,
                                    std::span<const int> k_grid, std::size_t max_dim);

struct CriticalGrid {
    std::vector<double> r_values;
    /// gamma values (sublevel) or degree thresholds k (degree), ascending.
    std::vector<double> second;
};

/// `values` thinned to at most `cap` entries at evenly spaced quantiles; min and max kept.
std::vector<double> quantile_subsample(const std::vector<double>& values, std::size_t cap);

/// Critical parameter values of the bifiltration, capped by quantile subsampling.
/// Radii above `r_max` are discarded; degree thresholds run from 0 to the largest
/// degree attained at the top retained radius.
CriticalGrid critical_grid(const PointCloud& cloud, ComplexKind kind, GridMode mode,
                           std::pair<std::size_t, std::size_t> caps, std::size_t max_dim,
                           std::optional<double> r_max = std::nullopt);

} // namespace ivd
