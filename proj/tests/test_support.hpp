#pragma once

// Shared builders for the unit and acceptance tests.

#include <algorithm>
#include <vector>

#include "ivd/decomp.hpp"
#include "ivd/pmodule.hpp"
#include "ivd/random.hpp"

namespace ivd::testing {

inline GridPoset integer_grid(std::size_t a, std::size_t b) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < a; ++i) x.push_back(static_cast<double>(i));
    for (std::size_t j = 0; j < b; ++j) y.push_back(static_cast<double>(j));
    return {x, y};
}

struct Rect {
    std::size_t i0, i1, j0, j1;
};

/// Rectangle interval module: K on [i0, i1] x [j0, j1], identities inside.
inline PersistenceModule rectangle_module(const GridPoset& g, Rect r, std::uint32_t p = 2) {
    FinitePoset poset = FinitePoset::grid(g);
    std::vector<std::size_t> dims(poset.size(), 0);
    auto inside = [&](std::size_t node) {
        const auto [i, j] = g.coords(node);
        return i >= r.i0 && i <= r.i1 && j >= r.j0 && j <= r.j1;
    };
    for (std::size_t v = 0; v < poset.size(); ++v) dims[v] = inside(v) ? 1 : 0;
    std::vector<FieldMatrix> maps;
    for (auto [a, b] : poset.hasse_edges()) {
        FieldMatrix m(dims[b], dims[a], p);
        if (dims[a] && dims[b]) m.at(0, 0) = 1;
        maps.push_back(m);
    }
    return {std::move(poset), std::move(dims), std::move(maps), p};
}

inline Rect random_rect(const GridPoset& g, Rng& rng) {
    const std::size_t a = g.axis1().size(), b = g.axis2().size();
    std::size_t i0 = rng.below(a), i1 = rng.below(a), j0 = rng.below(b), j1 = rng.below(b);
    if (i0 > i1) std::swap(i0, i1);
    if (j0 > j1) std::swap(j0, j1);
    return {i0, i1, j0, j1};
}

inline FieldMatrix random_invertible(std::size_t n, std::uint32_t p, Rng& rng) {
    for (;;) {
        FieldMatrix m(n, n, p);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m.at(i, j) = static_cast<Residue>(rng.below(p));
        if (is_invertible(m)) return m;
    }
}

/// Random change of basis at every element.
inline PersistenceModule scramble(const PersistenceModule& m, Rng& rng) {
    std::vector<FieldMatrix> t;
    for (std::size_t v = 0; v < m.poset().size(); ++v) t.push_back(random_invertible(m.dim(v), m.characteristic(), rng));
    return m.conjugated(t);
}

inline std::vector<std::vector<std::size_t>> sorted_dims(std::vector<std::vector<std::size_t>> v) {
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace ivd::testing
