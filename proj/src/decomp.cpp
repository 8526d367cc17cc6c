#include "ivd/decomp.hpp"

#include <algorithm>
#include <cmath>

namespace ivd {

PersistenceModule fig2_module(Fig2Side side, std::uint32_t p) {
    if (side == Fig2Side::left) {
        FinitePoset poset({"w", "x", "y", "z"}, {{0, 1}, {3, 1}, {1, 2}});
        // Covering edges sorted: w->x, x->y, z->x.
        return {std::move(poset),
                {1, 2, 1, 1},
                {FieldMatrix::from_rows({{1}, {1}}, p), FieldMatrix::from_rows({{0, 1}}, p),
                 FieldMatrix::from_rows({{0}, {1}}, p)},
                p};
    }
    FinitePoset poset({"s", "c", "t", "r"}, {{0, 1}, {1, 2}, {1, 3}});
    // Covering edges sorted: s->c, c->t, c->r.
    return {std::move(poset),
            {1, 2, 1, 1},
            {FieldMatrix::from_rows({{1}, {1}}, p), FieldMatrix::from_rows({{0, 1}}, p),
             FieldMatrix::from_rows({{1, 0}}, p)},
            p};
}

std::vector<std::vector<std::size_t>> Decomposition::dim_vectors() const {
    std::vector<std::vector<std::size_t>> out;
    for (const auto& s : summands) out.push_back(s.dims());
    return out;
}

namespace {

using Morphism = ModuleMorphism;

void check_cap(const PersistenceModule& m, const DecomposeOptions& opt) {
    if (m.total_dim() > opt.dimension_cap)
        throw DimensionCapExceeded("module has total dimension " + std::to_string(m.total_dim()) +
                                   ", above the cap of " + std::to_string(opt.dimension_cap) +
                                   "; restrict it to a subposet or use a coarser grid");
}

Morphism power_stable(const Morphism& phi, std::size_t max_dim) {
    Morphism psi = phi;
    for (std::size_t n = 1; n < max_dim; n *= 2)
        for (auto& x : psi) x = x * x;
    return psi;
}

// True if psi is neither pointwise zero nor pointwise invertible.
bool splits(const Morphism& psi) {
    bool nonzero = false, singular = false;
    for (const auto& x : psi) {
        if (x.rows() == 0) continue;
        const std::size_t r = rank(x);
        nonzero = nonzero || r > 0;
        singular = singular || r < x.rows();
    }
    return nonzero && singular;
}

bool is_nontrivial_idempotent(const Morphism& e) {
    bool zero = true, identity = true;
    for (const auto& x : e) {
        if (!(x * x == x)) return false;
        zero = zero && x.is_zero();
        identity = identity && x.is_identity();
    }
    return !zero && !identity;
}

void add_multiple(Morphism& acc, const Morphism& x, Residue c) {
    for (std::size_t v = 0; v < acc.size(); ++v) acc[v] += c == 1 ? x[v] : x[v].scaled(c);
}

Morphism zero_morphism(const PersistenceModule& m) {
    Morphism z;
    for (std::size_t v = 0; v < m.poset().size(); ++v) z.emplace_back(m.dim(v), m.dim(v), m.characteristic());
    return z;
}

struct SplitSearch {
    /// Endomorphism whose stable image and kernel give a nontrivial splitting.
    std::optional<Morphism> splitter;
    bool exact = true;
};

SplitSearch find_split(const PersistenceModule& m, const DecomposeOptions& opt, Rng& rng) {
    const auto basis = hom_basis(m, m);
    if (basis.size() <= 1) return {};  // End(M) = K
    const std::uint32_t p = m.characteristic();
    std::size_t max_dim = 0;
    for (auto d : m.dims()) max_dim = std::max(max_dim, d);
    const double space = std::pow(static_cast<double>(p), static_cast<double>(basis.size()));

    if (space > 256) {
        for (std::size_t t = 0; t < opt.random_tries; ++t) {
            Morphism phi = zero_morphism(m);
            for (const auto& b : basis)
                if (const auto c = static_cast<Residue>(rng.below(p))) add_multiple(phi, b, c);
            Morphism psi = power_stable(phi, max_dim);
            if (splits(psi)) return {std::move(psi), true};
        }
    }
    if (space > static_cast<double>(opt.exhaustive_limit)) return {std::nullopt, false};

    // Every coefficient vector; an odometer step adds one basis element per changed digit.
    std::vector<Residue> digits(basis.size(), 0);
    Morphism e = zero_morphism(m);
    for (;;) {
        std::size_t t = 0;
        for (; t < basis.size(); ++t) {
            add_multiple(e, basis[t], 1);
            if (++digits[t] < p) break;
            digits[t] = 0;
        }
        if (t == basis.size()) break;
        if (is_nontrivial_idempotent(e)) return {e, true};
    }
    return {};
}

struct Piece {
    PersistenceModule module;
    std::vector<FieldMatrix> basis; // original dim x piece dim, per element
};

// Sub-blocks [offset, offset + width) of a conjugated module.
PersistenceModule extract_block(const PersistenceModule& conj, const std::vector<std::size_t>& offset,
                                const std::vector<std::size_t>& width) {
    const auto& edges = conj.poset().hasse_edges();
    std::vector<FieldMatrix> maps;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [a, b] = edges[e];
        maps.push_back(conj.edge_map(e).block(offset[b], offset[a], width[b], width[a]));
    }
    return {conj.poset(), width, std::move(maps), conj.characteristic()};
}

void split_recursive(Piece piece, const DecomposeOptions& opt, Rng& rng, std::vector<Piece>& out, bool& exact) {
    const PersistenceModule& m = piece.module;
    if (m.total_dim() == 0) return;
    SplitSearch s = find_split(m, opt, rng);
    if (!s.splitter) {
        exact = exact && s.exact;
        out.push_back(std::move(piece));
        return;
    }
    const std::size_t n = m.poset().size();
    std::vector<FieldMatrix> change;
    std::vector<std::size_t> im_dim(n), ker_dim(n), zero(n, 0);
    std::vector<FieldMatrix> ua, ub;
    for (std::size_t v = 0; v < n; ++v) {
        const FieldMatrix& psi = (*s.splitter)[v];
        FieldMatrix im = column_space(psi);
        FieldMatrix ker = kernel_matrix(psi);
        im_dim[v] = im.cols();
        ker_dim[v] = ker.cols();
        change.push_back(FieldMatrix::hconcat(im, ker));
        ua.push_back(std::move(im));
        ub.push_back(std::move(ker));
    }
    const PersistenceModule conj = m.conjugated(change);
    // The stable image and kernel are submodules, so the off-diagonal blocks vanish.
    const auto& edges = conj.poset().hasse_edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [a, b] = edges[e];
        if (!conj.edge_map(e).block(0, im_dim[a], im_dim[b], ker_dim[a]).is_zero() ||
            !conj.edge_map(e).block(im_dim[b], 0, ker_dim[b], im_dim[a]).is_zero())
            throw std::logic_error("Fitting splitting is not block-diagonal");
    }
    Piece first{extract_block(conj, zero, im_dim), {}};
    Piece second{extract_block(conj, im_dim, ker_dim), {}};
    for (std::size_t v = 0; v < n; ++v) {
        first.basis.push_back(piece.basis[v] * ua[v]);
        second.basis.push_back(piece.basis[v] * ub[v]);
    }
    split_recursive(std::move(first), opt, rng, out, exact);
    split_recursive(std::move(second), opt, rng, out, exact);
}

} // namespace

Decomposition decompose(const PersistenceModule& m, const DecomposeOptions& opt) {
    check_cap(m, opt);
    Rng rng(opt.seed);
    const std::size_t n = m.poset().size();
    Piece root{m, {}};
    for (std::size_t v = 0; v < n; ++v) root.basis.push_back(FieldMatrix::identity(m.dim(v), m.characteristic()));
    std::vector<Piece> pieces;
    Decomposition d;
    split_recursive(std::move(root), opt, rng, pieces, d.exact);
    for (std::size_t v = 0; v < n; ++v) {
        FieldMatrix b(m.dim(v), 0, m.characteristic());
        for (const auto& piece : pieces) b = FieldMatrix::hconcat(b, piece.basis[v]);
        d.basis.push_back(std::move(b));
    }
    for (auto& piece : pieces) d.summands.push_back(std::move(piece.module));
    return d;
}

bool verify_decomposition(const PersistenceModule& m, const Decomposition& d) {
    const std::size_t n = m.poset().size();
    if (d.basis.size() != n) return false;
    std::vector<std::size_t> total(n, 0);
    for (const auto& s : d.summands) {
        if (!s.poset().same_order(m.poset()) || s.characteristic() != m.characteristic()) return false;
        for (std::size_t v = 0; v < n; ++v) total[v] += s.dim(v);
    }
    if (total != m.dims()) return false;
    for (std::size_t v = 0; v < n; ++v)
        if (!is_invertible(d.basis[v])) return false;
    const PersistenceModule conj = m.conjugated(d.basis);
    const auto& edges = m.poset().hasse_edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [a, b] = edges[e];
        FieldMatrix expected(m.dim(b), m.dim(a), m.characteristic());
        std::size_t ra = 0, rb = 0;
        for (const auto& s : d.summands) {
            const FieldMatrix& blk = s.edge_map(e);
            for (std::size_t i = 0; i < blk.rows(); ++i)
                for (std::size_t j = 0; j < blk.cols(); ++j) expected.at(rb + i, ra + j) = blk(i, j);
            ra += s.dim(a);
            rb += s.dim(b);
        }
        if (!(expected == conj.edge_map(e))) return false;
    }
    return true;
}

IndecomposabilityCheck check_indecomposable(const PersistenceModule& m, const DecomposeOptions& opt) {
    check_cap(m, opt);
    if (m.total_dim() == 0) return {false, true};
    Rng rng(opt.seed);
    const SplitSearch s = find_split(m, opt, rng);
    return {!s.splitter.has_value(), s.exact};
}

bool is_indecomposable(const PersistenceModule& m, const DecomposeOptions& opt) {
    return check_indecomposable(m, opt).indecomposable;
}

bool is_thin(const PersistenceModule& m) {
    return std::all_of(m.dims().begin(), m.dims().end(), [](std::size_t d) { return d <= 1; });
}

bool is_interval_decomposable(const PersistenceModule& m, const DecomposeOptions& opt) {
    const Decomposition d = decompose(m, opt);
    return std::all_of(d.summands.begin(), d.summands.end(), [](const PersistenceModule& s) { return is_thin(s); });
}

} // namespace ivd
