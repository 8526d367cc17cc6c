#include "ivd/pmodule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ivd {

PersistenceModule::PersistenceModule(FinitePoset poset, std::vector<std::size_t> dims, std::vector<FieldMatrix> maps,
                                     std::uint32_t p)
    : poset_(std::move(poset)), dims_(std::move(dims)), maps_(std::move(maps)), p_(p) {
    if (!is_prime(p_)) throw std::invalid_argument("module characteristic must be prime");
    if (dims_.size() != poset_.size()) throw std::invalid_argument("one dimension per poset element is required");
    const auto& edges = poset_.hasse_edges();
    if (maps_.size() != edges.size()) throw std::invalid_argument("one matrix per covering edge is required");
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [a, b] = edges[e];
        if (maps_[e].rows() != dims_[b] || maps_[e].cols() != dims_[a])
            throw std::invalid_argument("map " + poset_.label(a) + " -> " + poset_.label(b) + " has shape " +
                                        std::to_string(maps_[e].rows()) + "x" + std::to_string(maps_[e].cols()) +
                                        ", expected " + std::to_string(dims_[b]) + "x" + std::to_string(dims_[a]));
        if (maps_[e].characteristic() != p_) throw std::invalid_argument("map characteristic differs from module");
    }
    build_structure();
}

PersistenceModule PersistenceModule::zero(FinitePoset poset, std::uint32_t p) {
    std::vector<std::size_t> dims(poset.size(), 0);
    std::vector<FieldMatrix> maps(poset.hasse_edges().size(), FieldMatrix(0, 0, p));
    return {std::move(poset), std::move(dims), std::move(maps), p};
}

std::size_t PersistenceModule::total_dim() const {
    std::size_t t = 0;
    for (auto d : dims_) t += d;
    return t;
}

// Composites along paths, built in a linear extension; every covering edge into b
// must give the same composite from a (functoriality).
void PersistenceModule::build_structure() {
    const std::size_t n = poset_.size();
    structure_.assign(n * n, std::nullopt);
    const auto& topo = poset_.topological_order();
    const auto& edges = poset_.hasse_edges();
    for (std::size_t a = 0; a < n; ++a) structure_[a * n + a] = FieldMatrix::identity(dims_[a], p_);
    for (std::size_t bi = 0; bi < n; ++bi) {
        const std::size_t b = topo[bi];
        for (std::size_t a = 0; a < n; ++a) {
            if (!poset_.less(a, b)) continue;
            std::optional<FieldMatrix> comp;
            for (std::size_t e : poset_.incoming(b)) {
                const std::size_t c = edges[e].first;
                if (!poset_.leq(a, c)) continue;
                FieldMatrix via = maps_[e] * *structure_[a * n + c];
                if (!comp)
                    comp = std::move(via);
                else if (!(via == *comp))
                    throw std::invalid_argument("module is not functorial: paths " + poset_.label(a) + " -> " +
                                                poset_.label(b) + " disagree");
            }
            structure_[a * n + b] = std::move(comp);
        }
    }
}

const FieldMatrix& PersistenceModule::structure_map(std::size_t a, std::size_t b) const {
    const std::size_t n = poset_.size();
    if (a >= n || b >= n || !structure_[a * n + b]) throw std::invalid_argument("structure_map requires a <= b");
    return *structure_[a * n + b];
}

PersistenceModule PersistenceModule::conjugated(const std::vector<FieldMatrix>& t) const {
    if (t.size() != poset_.size()) throw std::invalid_argument("one basis change per element is required");
    std::vector<FieldMatrix> inv;
    for (std::size_t v = 0; v < t.size(); ++v) {
        if (t[v].rows() != dims_[v] || t[v].cols() != dims_[v])
            throw std::invalid_argument("basis change has the wrong shape");
        auto i = inverse(t[v]);
        if (!i) throw std::invalid_argument("basis change is singular");
        inv.push_back(std::move(*i));
    }
    std::vector<FieldMatrix> maps;
    const auto& edges = poset_.hasse_edges();
    for (std::size_t e = 0; e < edges.size(); ++e) maps.push_back(inv[edges[e].second] * maps_[e] * t[edges[e].first]);
    return {poset_, dims_, std::move(maps), p_};
}

bool operator==(const PersistenceModule& a, const PersistenceModule& b) {
    return a.p_ == b.p_ && a.poset_.same_order(b.poset_) && a.dims_ == b.dims_ && a.maps_ == b.maps_;
}

PersistenceModule restrict(const PersistenceModule& m, std::span<const std::size_t> nodes) {
    if (nodes.empty()) throw std::invalid_argument("restrict requires at least one element");
    FinitePoset sub = m.poset().induced(nodes);
    std::vector<std::size_t> dims;
    for (auto v : nodes) dims.push_back(m.dim(v));
    std::vector<FieldMatrix> maps;
    for (auto [a, b] : sub.hasse_edges()) maps.push_back(m.structure_map(nodes[a], nodes[b]));
    return {std::move(sub), std::move(dims), std::move(maps), m.characteristic()};
}

namespace {

void check_compatible(const PersistenceModule& m, const PersistenceModule& n) {
    if (m.characteristic() != n.characteristic()) throw std::invalid_argument("modules have different characteristics");
    if (!m.poset().same_order(n.poset())) throw std::invalid_argument("modules live on different posets");
}

FieldMatrix block_diag(const FieldMatrix& a, const FieldMatrix& b) {
    FieldMatrix out(a.rows() + b.rows(), a.cols() + b.cols(), a.characteristic());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out.at(i, j) = a(i, j);
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) out.at(a.rows() + i, a.cols() + j) = b(i, j);
    return out;
}

} // namespace

PersistenceModule direct_sum(const PersistenceModule& m, const PersistenceModule& n) {
    check_compatible(m, n);
    std::vector<std::size_t> dims;
    for (std::size_t v = 0; v < m.poset().size(); ++v) dims.push_back(m.dim(v) + n.dim(v));
    std::vector<FieldMatrix> maps;
    for (std::size_t e = 0; e < m.maps().size(); ++e) maps.push_back(block_diag(m.edge_map(e), n.edge_map(e)));
    return {m.poset(), std::move(dims), std::move(maps), m.characteristic()};
}

std::vector<ModuleMorphism> hom_basis(const PersistenceModule& m, const PersistenceModule& n) {
    check_compatible(m, n);
    const std::uint32_t p = m.characteristic();
    const PrimeField f(p);
    const std::size_t elems = m.poset().size();
    std::vector<std::size_t> offset(elems + 1, 0);
    for (std::size_t v = 0; v < elems; ++v) offset[v + 1] = offset[v] + n.dim(v) * m.dim(v);
    const std::size_t unknowns = offset[elems];
    auto var = [&](std::size_t v, std::size_t i, std::size_t j) { return offset[v] + i * m.dim(v) + j; };

    // N_e X_u - X_v M_e = 0 on every covering edge u -> v.
    const auto& edges = m.poset().hasse_edges();
    std::size_t eqs = 0;
    for (auto [u, v] : edges) eqs += n.dim(v) * m.dim(u);
    FieldMatrix sys(eqs, unknowns, p);
    std::size_t row = 0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [u, v] = edges[e];
        const FieldMatrix& ne = n.edge_map(e);
        const FieldMatrix& me = m.edge_map(e);
        for (std::size_t i = 0; i < n.dim(v); ++i)
            for (std::size_t j = 0; j < m.dim(u); ++j, ++row) {
                for (std::size_t k = 0; k < n.dim(u); ++k)
                    if (ne(i, k)) sys.at(row, var(u, k, j)) = f.add(sys(row, var(u, k, j)), ne(i, k));
                for (std::size_t l = 0; l < m.dim(v); ++l)
                    if (me(l, j)) sys.at(row, var(v, i, l)) = f.sub(sys(row, var(v, i, l)), me(l, j));
            }
    }
    std::vector<ModuleMorphism> basis;
    for (const auto& x : kernel_basis(sys)) {
        ModuleMorphism phi;
        for (std::size_t v = 0; v < elems; ++v) {
            FieldMatrix xv(n.dim(v), m.dim(v), p);
            for (std::size_t i = 0; i < n.dim(v); ++i)
                for (std::size_t j = 0; j < m.dim(v); ++j) xv.at(i, j) = x[var(v, i, j)];
            phi.push_back(std::move(xv));
        }
        basis.push_back(std::move(phi));
    }
    return basis;
}

bool is_natural(const PersistenceModule& m, const PersistenceModule& n, const ModuleMorphism& f) {
    check_compatible(m, n);
    if (f.size() != m.poset().size()) return false;
    for (std::size_t v = 0; v < f.size(); ++v)
        if (f[v].rows() != n.dim(v) || f[v].cols() != m.dim(v)) return false;
    const auto& edges = m.poset().hasse_edges();
    for (std::size_t e = 0; e < edges.size(); ++e)
        if (!(n.edge_map(e) * f[edges[e].first] == f[edges[e].second] * m.edge_map(e))) return false;
    return true;
}

namespace {

bool pointwise_invertible(const ModuleMorphism& f) {
    for (const auto& x : f)
        if (x.rows() != x.cols() || rank(x) != x.rows()) return false;
    return true;
}

void add_scaled(ModuleMorphism& acc, const ModuleMorphism& x, Residue c) {
    for (std::size_t v = 0; v < acc.size(); ++v) acc[v] += c == 1 ? x[v] : x[v].scaled(c);
}

ModuleMorphism zero_like(const ModuleMorphism& x) {
    ModuleMorphism z;
    for (const auto& m : x) z.emplace_back(m.rows(), m.cols(), m.characteristic());
    return z;
}

} // namespace

IsoResult find_isomorphism(const PersistenceModule& m, const PersistenceModule& n, RngSeed seed) {
    check_compatible(m, n);
    if (m.dims() != n.dims()) return {false, true, std::nullopt};
    const auto basis = hom_basis(m, n);
    if (m.total_dim() == 0) {
        ModuleMorphism empty;
        for (std::size_t v = 0; v < m.poset().size(); ++v) empty.emplace_back(0, 0, m.characteristic());
        return {true, true, std::move(empty)};
    }
    if (basis.empty()) return {false, true, std::nullopt};
    const std::uint32_t p = m.characteristic();
    const std::size_t dim = basis.size();

    Rng rng(seed);
    auto random_draw = [&]() {
        ModuleMorphism f = zero_like(basis[0]);
        for (std::size_t i = 0; i < dim; ++i) {
            const auto c = static_cast<Residue>(rng.below(p));
            if (c) add_scaled(f, basis[i], c);
        }
        return f;
    };
    for (int t = 0; t < 32; ++t) {
        ModuleMorphism f = random_draw();
        if (pointwise_invertible(f)) return {true, true, std::move(f)};
    }
    const double space = std::pow(static_cast<double>(p), static_cast<double>(dim));
    if (space <= static_cast<double>(1u << 20)) {
        // Odometer over all coefficient vectors; each digit step adds one basis element.
        std::vector<Residue> digits(dim, 0);
        ModuleMorphism f = zero_like(basis[0]);
        for (;;) {
            std::size_t t = 0;
            for (; t < dim; ++t) {
                add_scaled(f, basis[t], 1);
                if (++digits[t] < p) break;
                digits[t] = 0;
            }
            if (t == dim) break;
            if (pointwise_invertible(f)) return {true, true, std::move(f)};
        }
        return {false, true, std::nullopt};
    }
    for (int t = 0; t < 10000; ++t) {
        ModuleMorphism f = random_draw();
        if (pointwise_invertible(f)) return {true, true, std::move(f)};
    }
    return {false, false, std::nullopt};
}

bool are_isomorphic(const PersistenceModule& m, const PersistenceModule& n) { return find_isomorphism(m, n).isomorphic; }

} // namespace ivd
