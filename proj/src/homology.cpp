#include <algorithm>
#include <stdexcept>

#include "ivd/pmodule.hpp"

namespace ivd {

namespace {

// Sparse chain over GF(p): (simplex id, nonzero coefficient), ids ascending.
using Chain = std::vector<std::pair<std::uint32_t, Residue>>;

// a <- a - c b
void axpy(Chain& a, Residue c, const Chain& b, const PrimeField& f) {
    Chain out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            out.emplace_back(b[j].first, f.neg(f.mul(c, b[j].second)));
            ++j;
        } else {
            const Residue v = f.sub(a[i].second, f.mul(c, b[j].second));
            if (v) out.emplace_back(a[i].first, v);
            ++i;
            ++j;
        }
    }
    a.swap(out);
}

Chain boundary(const BigradedComplex& cx, std::size_t dim, std::uint32_t id, const PrimeField& f) {
    Chain c;
    if (dim == 0) return c;
    const Simplex& s = cx.simplex(dim, id);
    Simplex face(s.size() - 1);
    for (std::size_t drop = 0; drop < s.size(); ++drop) {
        for (std::size_t i = 0, k = 0; i < s.size(); ++i)
            if (i != drop) face[k++] = s[i];
        const auto fid = cx.find(face);
        if (!fid) throw std::logic_error("face missing from simplex table");
        c.emplace_back(*fid, drop % 2 == 0 ? Residue{1} : f.neg(1));
    }
    std::sort(c.begin(), c.end());
    return c;
}

struct NodeHomology {
    std::vector<Chain> boundary_cols;  // reduced images of (k+1)-simplices, indexed via low_col
    std::vector<std::int32_t> low_col; // k-simplex id -> boundary column with that lowest entry
    std::vector<Chain> reps;           // essential cycle representatives, one per basis class
    std::vector<std::int32_t> rep_of;  // k-simplex id -> representative whose lowest entry it is
};

NodeHomology reduce_node(const BigradedComplex& cx, std::size_t node, std::size_t k, const PrimeField& f) {
    NodeHomology h;
    h.low_col.assign(cx.table_size(k), -1);
    h.rep_of.assign(cx.table_size(k), -1);

    // Boundaries of (k+1)-simplices, reduced to distinct lowest entries.
    for (std::uint32_t id : cx.members(node, k + 1)) {
        Chain col = boundary(cx, k + 1, id, f);
        while (!col.empty()) {
            const auto [low, val] = col.back();
            const std::int32_t other = h.low_col[low];
            if (other < 0) break;
            const Chain& b = h.boundary_cols[static_cast<std::size_t>(other)];
            axpy(col, f.mul(val, f.inv(b.back().second)), b, f);
        }
        if (col.empty()) continue;
        h.low_col[col.back().first] = static_cast<std::int32_t>(h.boundary_cols.size());
        h.boundary_cols.push_back(std::move(col));
    }

    // Cycles of the k-simplices, skipping those already paired with a boundary.
    std::vector<std::int32_t> pivot(cx.table_size(k >= 1 ? k - 1 : 0), -1);
    std::vector<Chain> r_cols, v_cols;
    for (std::uint32_t id : cx.members(node, k)) {
        if (h.low_col[id] >= 0) continue;
        Chain r = boundary(cx, k, id, f);
        Chain v{{id, 1}};
        while (!r.empty()) {
            const auto [low, val] = r.back();
            const std::int32_t other = pivot[low];
            if (other < 0) break;
            const auto o = static_cast<std::size_t>(other);
            const Residue c = f.mul(val, f.inv(r_cols[o].back().second));
            axpy(r, c, r_cols[o], f);
            axpy(v, c, v_cols[o], f);
        }
        if (r.empty()) {
            h.rep_of[id] = static_cast<std::int32_t>(h.reps.size());
            h.reps.push_back(std::move(v));
        } else {
            pivot[r.back().first] = static_cast<std::int32_t>(r_cols.size());
            r_cols.push_back(std::move(r));
            v_cols.push_back(std::move(v));
        }
    }
    return h;
}

// Coordinates of the class of cycle z in the basis at node h.
FieldVector coordinates(Chain z, const NodeHomology& h, const PrimeField& f) {
    FieldVector c(h.reps.size(), 0);
    while (!z.empty()) {
        const auto [low, val] = z.back();
        if (const std::int32_t b = h.low_col[low]; b >= 0) {
            const Chain& col = h.boundary_cols[static_cast<std::size_t>(b)];
            axpy(z, f.mul(val, f.inv(col.back().second)), col, f);
        } else if (const std::int32_t q = h.rep_of[low]; q >= 0) {
            const auto qi = static_cast<std::size_t>(q);
            const Residue coef = f.mul(val, f.inv(h.reps[qi].back().second));
            c[qi] = f.add(c[qi], coef);
            axpy(z, coef, h.reps[qi], f);
        } else {
            throw std::logic_error("pushed chain is not a cycle in the target complex");
        }
    }
    return c;
}

} // namespace

PersistenceModule homology_module(const BigradedComplex& complex, std::size_t k, std::uint32_t p) {
    if (complex.max_dim() < k + 1)
        throw std::invalid_argument("homology in degree " + std::to_string(k) + " needs simplices up to dimension " +
                                    std::to_string(k + 1));
    const PrimeField f(p);
    FinitePoset poset = FinitePoset::grid(complex.grid());
    std::vector<NodeHomology> nodes;
    nodes.reserve(poset.size());
    std::vector<std::size_t> dims;
    for (std::size_t v = 0; v < poset.size(); ++v) {
        nodes.push_back(reduce_node(complex, v, k, f));
        dims.push_back(nodes.back().reps.size());
    }
    std::vector<FieldMatrix> maps;
    for (auto [a, b] : poset.hasse_edges()) {
        FieldMatrix m(dims[b], dims[a], p);
        for (std::size_t j = 0; j < dims[a]; ++j) {
            const FieldVector c = coordinates(nodes[a].reps[j], nodes[b], f);
            for (std::size_t i = 0; i < dims[b]; ++i) m.at(i, j) = c[i];
        }
        maps.push_back(std::move(m));
    }
    return {std::move(poset), std::move(dims), std::move(maps), p};
}

namespace {

// Rank of the boundary map from dim-simplices to (dim-1)-simplices by sparse column reduction.
std::size_t boundary_rank(const SimplicialComplex& complex, std::size_t dim, const PrimeField& f) {
    const auto& rows = complex.simplices(dim - 1);
    std::vector<Chain> pivot_col(rows.size());
    std::size_t r = 0;
    Simplex face;
    for (const Simplex& s : complex.simplices(dim)) {
        Chain c;
        for (std::size_t drop = 0; drop < s.size(); ++drop) {
            face.clear();
            for (std::size_t i = 0; i < s.size(); ++i)
                if (i != drop) face.push_back(s[i]);
            const auto i = static_cast<std::uint32_t>(std::lower_bound(rows.begin(), rows.end(), face) - rows.begin());
            c.emplace_back(i, drop % 2 == 0 ? Residue{1} : f.neg(1));
        }
        std::sort(c.begin(), c.end());
        while (!c.empty()) {
            const Chain& piv = pivot_col[c.back().first];
            if (piv.empty()) break;
            axpy(c, f.mul(c.back().second, f.inv(piv.back().second)), piv, f);
        }
        if (!c.empty()) {
            pivot_col[c.back().first] = std::move(c);
            ++r;
        }
    }
    return r;
}

} // namespace

std::size_t betti_number(const SimplicialComplex& complex, std::size_t k, std::uint32_t p) {
    const PrimeField f(p);
    const std::size_t ck = complex.count(k);
    const std::size_t rk = k == 0 || ck == 0 ? 0 : boundary_rank(complex, k, f);
    const std::size_t rk1 = complex.count(k + 1) == 0 ? 0 : boundary_rank(complex, k + 1, f);
    return ck - rk - rk1;
}

} // namespace ivd
