#include <algorithm>
#include <stdexcept>
#include <tuple>

#include "ivd/decomp.hpp"

namespace ivd {

namespace {

struct Candidate {
    std::size_t total;
    Fig2Side side;
    std::array<std::size_t, 4> nodes;

    bool operator<(const Candidate& o) const {
        return std::tie(total, side, nodes) < std::tie(o.total, o.side, o.nodes);
    }
};

// Swapping the two sources (or sinks) maps each Fig 2 module to an isomorphic
// one, so each unordered shape is listed once.
// Necessary conditions for a Fig 2 summand: dimensions at least (1, 2, 1, 1),
// nonzero maps along the shape, and rank 2 where the two branches meet.
std::vector<Candidate> enumerate_candidates(const PersistenceModule& m) {
    const FinitePoset& P = m.poset();
    const std::size_t n = P.size();
    std::vector<char> nz(n * n, 0);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            nz[a * n + b] = a != b && P.less(a, b) && !m.structure_map(a, b).is_zero();
    auto nonzero = [&](std::size_t a, std::size_t b) { return nz[a * n + b] != 0; };
    std::vector<Candidate> out;
    for (std::size_t x = 0; x < n; ++x) {
        if (m.dim(x) < 2) continue;
        std::vector<std::size_t> below, above;
        for (std::size_t v = 0; v < n; ++v) {
            if (nonzero(v, x)) below.push_back(v);
            if (nonzero(x, v)) above.push_back(v);
        }
        // Left: two incomparable sources into x, x into a sink.
        for (std::size_t i = 0; i < below.size(); ++i)
            for (std::size_t j = i + 1; j < below.size(); ++j) {
                const std::size_t w = below[i], z = below[j];
                if (P.comparable(w, z)) continue;
                if (rank(FieldMatrix::hconcat(m.structure_map(w, x), m.structure_map(z, x))) < 2) continue;
                for (std::size_t y : above)
                    if (nonzero(w, y) && nonzero(z, y))
                        out.push_back({m.dim(w) + m.dim(x) + m.dim(y) + m.dim(z), Fig2Side::left, {w, x, y, z}});
            }
        // Right: a source into x, x into two incomparable sinks.
        for (std::size_t i = 0; i < above.size(); ++i)
            for (std::size_t j = i + 1; j < above.size(); ++j) {
                const std::size_t t = above[i], r = above[j];
                if (P.comparable(t, r)) continue;
                if (rank(FieldMatrix::vconcat(m.structure_map(x, t), m.structure_map(x, r))) < 2) continue;
                for (std::size_t s : below)
                    if (nonzero(s, t) && nonzero(s, r))
                        out.push_back({m.dim(s) + m.dim(x) + m.dim(t) + m.dim(r), Fig2Side::right, {s, x, t, r}});
            }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

namespace {

// Basis of the intersection of two column spans.
FieldMatrix intersect(const FieldMatrix& u, const FieldMatrix& w) {
    if (u.cols() == 0 || w.cols() == 0) return FieldMatrix(u.rows(), 0, u.characteristic());
    const FieldMatrix k = kernel_matrix(FieldMatrix::hconcat(u, w));
    return column_space(u * k.block(0, 0, u.cols(), k.cols()));
}

// With the arms of the shape split off, the centre carries three subspaces a, b, c
// and the non-thin indecomposable occurs dim((a + b) & c) - dim(a & c + b & c) times.
std::size_t three_subspace_multiplicity(const FieldMatrix& a, const FieldMatrix& b, const FieldMatrix& c) {
    const FieldMatrix ab = column_space(FieldMatrix::hconcat(a, b));
    const std::size_t lhs = intersect(ab, c).cols();
    const std::size_t rhs = rank(FieldMatrix::hconcat(intersect(a, c), intersect(b, c)));
    return lhs - rhs;
}

std::size_t multiplicity_at(const PersistenceModule& m, Fig2Side side, const std::array<std::size_t, 4>& n) {
    if (side == Fig2Side::left)
        return three_subspace_multiplicity(column_space(m.structure_map(n[0], n[1])),
                                           column_space(m.structure_map(n[3], n[1])),
                                           kernel_matrix(m.structure_map(n[1], n[2])));
    return three_subspace_multiplicity(column_space(m.structure_map(n[0], n[1])),
                                       kernel_matrix(m.structure_map(n[1], n[2])),
                                       kernel_matrix(m.structure_map(n[1], n[3])));
}

} // namespace

std::size_t fig2_multiplicity(const PersistenceModule& m, Fig2Side side, const std::array<std::size_t, 4>& nodes) {
    return multiplicity_at(m, side, nodes);
}

std::size_t count_witness_candidates(const PersistenceModule& m) { return enumerate_candidates(m).size(); }

std::optional<Witness> detect_noninterval_witness(const PersistenceModule& m, std::size_t max_candidates,
                                                  const DecomposeOptions& opt) {
    const auto candidates = enumerate_candidates(m);
    const PersistenceModule fig2[2] = {fig2_module(Fig2Side::left, m.characteristic()),
                                       fig2_module(Fig2Side::right, m.characteristic())};
    const std::vector<std::size_t> target_dims{1, 2, 1, 1};
    for (std::size_t c = 0; c < candidates.size() && c < max_candidates; ++c) {
        const Candidate& cand = candidates[c];
        const PersistenceModule& target = fig2[cand.side == Fig2Side::left ? 0 : 1];
        // Exact filter: no copy of the Fig 2 module among the summands of the restriction.
        if (multiplicity_at(m, cand.side, cand.nodes) == 0) continue;
        PersistenceModule restricted = restrict(m, cand.nodes);
        const Decomposition d = decompose(restricted, opt);
        for (const auto& s : d.summands)
            if (s.dims() == target_dims && are_isomorphic(s, target))
                return Witness{cand.side, cand.nodes, c, std::move(restricted), s};
    }
    return std::nullopt;
}

} // namespace ivd
