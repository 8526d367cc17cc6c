#include "ivd/filtration.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ivd {

const char* to_string(ComplexKind kind) { return kind == ComplexKind::cech ? "cech" : "rips"; }

ComplexKind parse_complex_kind(const std::string& s) {
    if (s == "cech") return ComplexKind::cech;
    if (s == "rips") return ComplexKind::rips;
    throw std::invalid_argument("unknown complex kind '" + s + "' (expected cech or rips)");
}

GridMode parse_grid_mode(const std::string& s) {
    if (s == "sublevel") return GridMode::sublevel;
    if (s == "degree") return GridMode::degree;
    throw std::invalid_argument("unknown grid mode '" + s + "' (expected sublevel or degree)");
}

// ---------------------------------------------------------------- complexes

SimplicialComplex::SimplicialComplex(std::vector<std::vector<Simplex>> by_dim) : by_dim_(std::move(by_dim)) {
    for (auto& list : by_dim_) {
        for (auto& s : list) std::sort(s.begin(), s.end());
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    while (!by_dim_.empty() && by_dim_.back().empty()) by_dim_.pop_back();
    for (std::size_t k = 0; k < by_dim_.size(); ++k)
        for (const auto& s : by_dim_[k])
            if (s.size() != k + 1) throw std::invalid_argument("simplex stored under the wrong dimension");
}

std::size_t SimplicialComplex::size() const {
    std::size_t n = 0;
    for (const auto& l : by_dim_) n += l.size();
    return n;
}

const std::vector<Simplex>& SimplicialComplex::simplices(std::size_t dim) const {
    static const std::vector<Simplex> empty;
    return dim < by_dim_.size() ? by_dim_[dim] : empty;
}

bool SimplicialComplex::contains(const Simplex& s) const {
    if (s.empty()) return true;
    const auto& list = simplices(s.size() - 1);
    return std::binary_search(list.begin(), list.end(), s);
}

bool SimplicialComplex::is_closed() const {
    for (std::size_t k = 1; k < by_dim_.size(); ++k)
        for (const auto& s : by_dim_[k])
            for (std::size_t drop = 0; drop < s.size(); ++drop) {
                Simplex face;
                for (std::size_t i = 0; i < s.size(); ++i)
                    if (i != drop) face.push_back(s[i]);
                if (!contains(face)) return false;
            }
    return true;
}

bool SimplicialComplex::is_subcomplex_of(const SimplicialComplex& other) const {
    for (std::size_t k = 0; k < by_dim_.size(); ++k)
        if (!std::includes(other.simplices(k).begin(), other.simplices(k).end(), by_dim_[k].begin(),
                           by_dim_[k].end()))
            return false;
    return true;
}

// ---------------------------------------------------------------- grid

namespace {

std::vector<double> normalize_axis(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("grid axes must be nonempty");
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument("grid values must be finite");
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v)
        if (out.empty() || x - out.back() > kGeomTol) out.push_back(x);
    return out;
}

std::optional<std::size_t> find_value(const std::vector<double>& axis, double v) {
    auto it = std::lower_bound(axis.begin(), axis.end(), v - kGeomTol);
    if (it != axis.end() && std::fabs(*it - v) <= kGeomTol) return static_cast<std::size_t>(it - axis.begin());
    return std::nullopt;
}

std::string short_double(double v) {
    if (v == 0) v = 0; // drop the sign of -0
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

bool within(double value, double r) { return value <= r + kGeomTol; }

} // namespace

GridPoset::GridPoset(std::vector<double> axis1, std::vector<double> axis2, std::string axis2_name)
    : axis1_(normalize_axis(std::move(axis1))), axis2_(normalize_axis(std::move(axis2))),
      axis2_name_(std::move(axis2_name)) {}

std::optional<std::size_t> GridPoset::find1(double v) const { return find_value(axis1_, v); }
std::optional<std::size_t> GridPoset::find2(double v) const { return find_value(axis2_, v); }

std::string GridPoset::label(std::size_t node) const {
    const auto [i, j] = coords(node);
    const double second = axis2_name_ == "k" ? -axis2_[j] : axis2_[j];
    return short_double(axis1_[i]) + "," + short_double(second);
}

// ---------------------------------------------------------------- bigraded complex

BigradedComplex::BigradedComplex(GridPoset grid, std::size_t max_dim, std::vector<std::vector<Simplex>> table,
                                 std::vector<std::vector<std::vector<std::uint32_t>>> members)
    : grid_(std::move(grid)), max_dim_(max_dim), table_(std::move(table)), members_(std::move(members)) {
    if (members_.size() != grid_.size()) throw std::invalid_argument("one member list per grid node is required");
    table_.resize(max_dim_ + 1);
    for (auto& node : members_) {
        if (node.size() > max_dim_ + 1) throw std::invalid_argument("member lists exceed max_dim");
        node.resize(max_dim_ + 1);
    }
    for (std::size_t k = 0; k <= max_dim_; ++k) {
        if (!std::is_sorted(table_[k].begin(), table_[k].end()))
            throw std::invalid_argument("simplex tables must be in lexicographic order");
        for (const auto& s : table_[k])
            if (s.size() != k + 1 || !std::is_sorted(s.begin(), s.end()))
                throw std::invalid_argument("malformed simplex in table");
    }
    for (std::size_t n = 0; n < members_.size(); ++n) {
        for (std::size_t k = 0; k <= max_dim_; ++k) {
            const auto& m = members_[n][k];
            for (std::size_t i = 0; i < m.size(); ++i)
                if (m[i] >= table_[k].size() || (i > 0 && m[i] <= m[i - 1]))
                    throw std::invalid_argument("member ids must be sorted and in range");
        }
        if (!complex_at(n).is_closed())
            throw std::invalid_argument("complex at node " + grid_.label(n) + " is not closed under faces");
    }
    if (!is_monotone()) throw std::invalid_argument("complexes are not monotone along the grid");
}

BigradedComplex BigradedComplex::unchecked(GridPoset grid, std::size_t max_dim,
                                           std::vector<std::vector<Simplex>> table,
                                           std::vector<std::vector<std::vector<std::uint32_t>>> members) {
    BigradedComplex out;
    out.grid_ = std::move(grid);
    out.max_dim_ = max_dim;
    out.table_ = std::move(table);
    out.members_ = std::move(members);
    out.table_.resize(max_dim + 1);
    for (auto& node : out.members_) node.resize(max_dim + 1);
    return out;
}

BigradedComplex BigradedComplex::from_complexes(GridPoset grid, std::size_t max_dim,
                                                const std::vector<SimplicialComplex>& complexes) {
    std::vector<std::vector<Simplex>> table(max_dim + 1);
    for (const auto& c : complexes)
        for (std::size_t k = 0; k <= max_dim; ++k)
            table[k].insert(table[k].end(), c.simplices(k).begin(), c.simplices(k).end());
    for (auto& t : table) {
        std::sort(t.begin(), t.end());
        t.erase(std::unique(t.begin(), t.end()), t.end());
    }
    std::vector<std::vector<std::vector<std::uint32_t>>> members(complexes.size(),
                                                                 std::vector<std::vector<std::uint32_t>>(max_dim + 1));
    for (std::size_t n = 0; n < complexes.size(); ++n) {
        if (complexes[n].dimension() > static_cast<int>(max_dim))
            throw std::invalid_argument("complex exceeds max_dim");
        for (std::size_t k = 0; k <= max_dim; ++k)
            for (const auto& s : complexes[n].simplices(k))
                members[n][k].push_back(static_cast<std::uint32_t>(
                    std::lower_bound(table[k].begin(), table[k].end(), s) - table[k].begin()));
    }
    return {std::move(grid), max_dim, std::move(table), std::move(members)};
}

std::span<const std::uint32_t> BigradedComplex::members(std::size_t node, std::size_t dim) const {
    if (dim > max_dim_) return {};
    return members_.at(node)[dim];
}

std::optional<std::uint32_t> BigradedComplex::find(const Simplex& s) const {
    if (s.empty() || s.size() > max_dim_ + 1) return std::nullopt;
    const auto& t = table_[s.size() - 1];
    auto it = std::lower_bound(t.begin(), t.end(), s);
    if (it == t.end() || *it != s) return std::nullopt;
    return static_cast<std::uint32_t>(it - t.begin());
}

SimplicialComplex BigradedComplex::complex_at(std::size_t node) const {
    std::vector<std::vector<Simplex>> by_dim(max_dim_ + 1);
    for (std::size_t k = 0; k <= max_dim_; ++k)
        for (auto id : members(node, k)) by_dim[k].push_back(table_[k][id]);
    return SimplicialComplex(std::move(by_dim));
}

bool BigradedComplex::is_monotone() const {
    const std::size_t n1 = grid_.axis1().size(), n2 = grid_.axis2().size();
    auto contained = [&](std::size_t a, std::size_t b) {
        for (std::size_t k = 0; k <= max_dim_; ++k) {
            auto x = members(a, k), y = members(b, k);
            if (!std::includes(y.begin(), y.end(), x.begin(), x.end())) return false;
        }
        return true;
    };
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j) {
            if (i + 1 < n1 && !contained(grid_.node(i, j), grid_.node(i + 1, j))) return false;
            if (j + 1 < n2 && !contained(grid_.node(i, j), grid_.node(i, j + 1))) return false;
        }
    return true;
}

// ---------------------------------------------------------------- enumeration

namespace {

struct PoolEntry {
    Simplex simplex;
    double value;
    double max_mark;
};

double pair_value(const PointCloud& cloud, std::uint32_t a, std::uint32_t b) {
    return 0.5 * distance(cloud[a], cloud[b]);
}

// All simplices up to max_dim with filtration value <= r_bound, in lexicographic
// order within each dimension. Cliques of the 2 r_bound neighbor graph are
// extended depth-first; both filtration values are monotone under faces.
std::vector<PoolEntry> enumerate_simplices(const PointCloud& cloud, ComplexKind kind, double r_bound,
                                           std::size_t max_dim) {
    const auto n = static_cast<std::uint32_t>(cloud.size());
    std::vector<std::vector<std::uint32_t>> adj(n);
    if (max_dim >= 1)
        for (std::uint32_t a = 0; a < n; ++a)
            for (std::uint32_t b = a + 1; b < n; ++b)
                if (within(pair_value(cloud, a, b), r_bound)) adj[a].push_back(b);

    std::vector<PoolEntry> pool;
    const bool marked = cloud.has_gamma();
    Simplex cur;
    auto mark = [&](std::uint32_t v) { return marked ? cloud.mark(v) : 0.0; };

    auto recurse = [&](auto&& self, const std::vector<std::uint32_t>& cand, double value, double max_mark) -> void {
        if (cur.size() > max_dim) return;
        for (std::size_t ci = 0; ci < cand.size(); ++ci) {
            const std::uint32_t c = cand[ci];
            double v;
            if (kind == ComplexKind::rips || cur.size() == 1) {
                v = value;
                for (auto u : cur) v = std::max(v, pair_value(cloud, u, c));
            } else {
                cur.push_back(c);
                v = std::max(value, min_enclosing_ball(cloud, cur).radius);
                cur.pop_back();
            }
            if (!within(v, r_bound)) continue;
            cur.push_back(c);
            const double mm = marked ? std::max(max_mark, mark(c)) : 0.0;
            pool.push_back({cur, v, mm});
            if (cur.size() <= max_dim) {
                std::vector<std::uint32_t> next;
                const auto& ac = adj[c];
                std::set_intersection(cand.begin() + static_cast<std::ptrdiff_t>(ci + 1), cand.end(), ac.begin(),
                                      ac.end(), std::back_inserter(next));
                if (!next.empty()) self(self, next, v, mm);
            }
            cur.pop_back();
        }
    };
    for (std::uint32_t v = 0; v < n; ++v) {
        cur = {v};
        pool.push_back({cur, 0.0, mark(v)});
        recurse(recurse, adj[v], 0.0, mark(v));
    }
    // Depth-first order interleaves dimensions; within one dimension it is lexicographic.
    return pool;
}

struct Tables {
    std::vector<std::vector<Simplex>> table;
    std::vector<std::vector<double>> value;
    std::vector<std::vector<double>> max_mark;
};

Tables split_pool(std::vector<PoolEntry> pool, std::size_t max_dim) {
    Tables t;
    t.table.resize(max_dim + 1);
    t.value.resize(max_dim + 1);
    t.max_mark.resize(max_dim + 1);
    for (auto& e : pool) {
        const std::size_t k = e.simplex.size() - 1;
        t.table[k].push_back(std::move(e.simplex));
        t.value[k].push_back(e.value);
        t.max_mark[k].push_back(e.max_mark);
    }
    return t;
}

std::vector<std::vector<Simplex>> tables_by_dim(const std::vector<PoolEntry>& pool, std::size_t max_dim) {
    std::vector<std::vector<Simplex>> by_dim(max_dim + 1);
    for (const auto& e : pool) by_dim[e.simplex.size() - 1].push_back(e.simplex);
    return by_dim;
}

double grid_max(std::span<const double> g) {
    if (g.empty()) throw std::invalid_argument("grids must be nonempty");
    return *std::max_element(g.begin(), g.end());
}

} // namespace

double simplex_radius(const PointCloud& cloud, ComplexKind kind, std::span<const std::uint32_t> simplex) {
    if (simplex.empty()) throw std::invalid_argument("empty simplex");
    if (simplex.size() == 1) return 0.0;
    if (kind == ComplexKind::cech && simplex.size() > 2) return min_enclosing_ball(cloud, simplex).radius;
    double v = 0;
    for (std::size_t i = 0; i < simplex.size(); ++i)
        for (std::size_t j = i + 1; j < simplex.size(); ++j) v = std::max(v, pair_value(cloud, simplex[i], simplex[j]));
    return v;
}

SimplicialComplex rips_complex(const PointCloud& cloud, double r, std::size_t max_dim) {
    return build_complex(cloud, ComplexKind::rips, r, max_dim);
}

SimplicialComplex cech_complex(const PointCloud& cloud, double r, std::size_t max_dim) {
    return build_complex(cloud, ComplexKind::cech, r, max_dim);
}

SimplicialComplex build_complex(const PointCloud& cloud, ComplexKind kind, double r, std::size_t max_dim) {
    if (!(r >= 0)) throw std::invalid_argument("scale must be non-negative");
    return SimplicialComplex(tables_by_dim(enumerate_simplices(cloud, kind, r, max_dim), max_dim));
}

BigradedComplex sublevel_bifiltration(const PointCloud& cloud, ComplexKind kind, std::span<const double> r_grid,
                                      std::span<const double> s_grid, std::size_t max_dim) {
    if (!cloud.has_gamma()) throw std::invalid_argument("sublevel bifiltration requires gamma marks");
    GridPoset grid({r_grid.begin(), r_grid.end()}, {s_grid.begin(), s_grid.end()}, "s");
    if (grid.axis1().front() < 0) throw std::invalid_argument("scales must be non-negative");
    Tables t = split_pool(enumerate_simplices(cloud, kind, grid_max(r_grid), max_dim), max_dim);
    std::vector<std::vector<std::vector<std::uint32_t>>> members(grid.size(),
                                                                 std::vector<std::vector<std::uint32_t>>(max_dim + 1));
    for (std::size_t i = 0; i < grid.axis1().size(); ++i)
        for (std::size_t j = 0; j < grid.axis2().size(); ++j) {
            auto& m = members[grid.node(i, j)];
            for (std::size_t k = 0; k <= max_dim; ++k)
                for (std::uint32_t id = 0; id < t.table[k].size(); ++id)
                    if (within(t.value[k][id], grid.axis1()[i]) && t.max_mark[k][id] <= grid.axis2()[j] + kGeomTol)
                        m[k].push_back(id);
        }
    return BigradedComplex::unchecked(std::move(grid), max_dim, std::move(t.table), std::move(members));
}

std::size_t degree(const PointCloud& cloud, std::size_t index, double r) {
    if (index >= cloud.size()) throw std::out_of_range("degree: point index out of range");
    std::size_t deg = 0;
    for (std::size_t j = 0; j < cloud.size(); ++j)
        if (j != index && within(0.5 * distance(cloud[index], cloud[j]), r)) ++deg;
    return deg;
}

BigradedComplex degree_bifiltration(const PointCloud& cloud, ComplexKind kind, std::span<const double> r_grid,
                                    std::span<const int> k_grid, std::size_t max_dim) {
    if (k_grid.empty()) throw std::invalid_argument("degree grid must be nonempty");
    std::vector<double> neg_k;
    for (int k : k_grid) {
        if (k < 0) throw std::invalid_argument("degree thresholds must be non-negative");
        neg_k.push_back(-static_cast<double>(k));
    }
    GridPoset grid({r_grid.begin(), r_grid.end()}, std::move(neg_k), "k");
    if (grid.axis1().front() < 0) throw std::invalid_argument("scales must be non-negative");
    Tables t = split_pool(enumerate_simplices(cloud, kind, grid_max(r_grid), max_dim), max_dim);

    std::vector<std::vector<std::vector<std::uint32_t>>> members(grid.size(),
                                                                 std::vector<std::vector<std::uint32_t>>(max_dim + 1));
    for (std::size_t i = 0; i < grid.axis1().size(); ++i) {
        const double r = grid.axis1()[i];
        std::vector<std::size_t> deg(cloud.size());
        for (std::size_t v = 0; v < cloud.size(); ++v) deg[v] = degree(cloud, v, r);
        for (std::size_t j = 0; j < grid.axis2().size(); ++j) {
            const auto k = static_cast<std::size_t>(std::llround(-grid.axis2()[j]));
            auto& m = members[grid.node(i, j)];
            for (std::size_t dim = 0; dim <= max_dim; ++dim)
                for (std::uint32_t id = 0; id < t.table[dim].size(); ++id) {
                    if (!within(t.value[dim][id], r)) continue;
                    const auto& s = t.table[dim][id];
                    if (std::all_of(s.begin(), s.end(), [&](std::uint32_t v) { return deg[v] >= k; }))
                        m[dim].push_back(id);
                }
        }
    }
    return BigradedComplex::unchecked(std::move(grid), max_dim, std::move(t.table), std::move(members));
}

std::vector<double> quantile_subsample(const std::vector<double>& values, std::size_t cap) {
    if (values.size() <= cap || values.empty()) return values;
    if (cap <= 1) return {values.front()};
    std::vector<double> out;
    const std::size_t n = values.size();
    for (std::size_t i = 0; i < cap; ++i) {
        const auto idx = static_cast<std::size_t>(
            std::llround(static_cast<double>(i) * static_cast<double>(n - 1) / static_cast<double>(cap - 1)));
        if (out.empty() || values[idx] != out.back()) out.push_back(values[idx]);
    }
    return out;
}

CriticalGrid critical_grid(const PointCloud& cloud, ComplexKind kind, GridMode mode,
                           std::pair<std::size_t, std::size_t> caps, std::size_t max_dim,
                           std::optional<double> r_max) {
    CriticalGrid g;
    const double bound = r_max.value_or(std::numeric_limits<double>::infinity());
    std::vector<double> radii;
    for (const auto& e : enumerate_simplices(cloud, kind, bound, max_dim)) radii.push_back(e.value);
    if (radii.empty()) radii.push_back(0.0);
    std::sort(radii.begin(), radii.end());
    std::vector<double> uniq;
    for (double r : radii)
        if (uniq.empty() || r - uniq.back() > kGeomTol) uniq.push_back(r);
    g.r_values = quantile_subsample(uniq, caps.first);

    std::vector<double> second;
    if (mode == GridMode::sublevel) {
        second = cloud.gamma();
        std::sort(second.begin(), second.end());
        std::vector<double> u;
        for (double s : second)
            if (u.empty() || s - u.back() > kGeomTol) u.push_back(s);
        second = std::move(u);
        if (second.empty()) second.push_back(0.0);
    } else {
        std::size_t max_deg = 0;
        for (std::size_t v = 0; v < cloud.size(); ++v) max_deg = std::max(max_deg, degree(cloud, v, g.r_values.back()));
        for (std::size_t k = 0; k <= max_deg; ++k) second.push_back(static_cast<double>(k));
    }
    g.second = quantile_subsample(second, caps.second);
    return g;
}

} // namespace ivd
