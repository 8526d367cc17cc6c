#include <algorithm>
#include <stdexcept>

#include "ivd/pmodule.hpp"

namespace ivd {

FinitePoset::FinitePoset(std::vector<std::string> labels,
                         const std::vector<std::pair<std::size_t, std::size_t>>& relations)
    : labels_(std::move(labels)) {
    const std::size_t n = labels_.size();
    order_.assign(n * n, false);
    for (std::size_t i = 0; i < n; ++i) order_[i * n + i] = true;
    for (auto [a, b] : relations) {
        if (a >= n || b >= n) throw std::invalid_argument("poset relation refers to a missing element");
        if (a == b) throw std::invalid_argument("poset relation a < a is not allowed");
        order_[a * n + b] = true;
    }
    // Warshall closure.
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (order_[i * n + k])
                for (std::size_t j = 0; j < n; ++j)
                    if (order_[k * n + j]) order_[i * n + j] = true;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (order_[i * n + j] && order_[j * n + i]) throw std::invalid_argument("poset relations contain a cycle");
    finish();
}

void FinitePoset::finish() {
    const std::size_t n = size();
    hasse_.clear();
    incoming_.assign(n, {});
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (!less(a, b)) continue;
            bool covering = true;
            for (std::size_t c = 0; c < n && covering; ++c)
                if (less(a, c) && less(c, b)) covering = false;
            if (covering) hasse_.emplace_back(a, b);
        }
    for (std::size_t e = 0; e < hasse_.size(); ++e) incoming_[hasse_[e].second].push_back(e);
    // Elements with fewer predecessors come first.
    topo_.resize(n);
    std::vector<std::size_t> below(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (less(j, i)) ++below[i];
    for (std::size_t i = 0; i < n; ++i) topo_[i] = i;
    std::stable_sort(topo_.begin(), topo_.end(), [&](std::size_t a, std::size_t b) { return below[a] < below[b]; });
}

FinitePoset FinitePoset::grid(const GridPoset& g) {
    const std::size_t n1 = g.axis1().size(), n2 = g.axis2().size();
    std::vector<std::string> labels;
    std::vector<std::pair<std::size_t, std::size_t>> rel;
    std::vector<std::pair<std::size_t, std::size_t>> coords;
    for (std::size_t node = 0; node < g.size(); ++node) {
        labels.push_back(g.label(node));
        const auto [i, j] = g.coords(node);
        coords.emplace_back(i, j);
        if (i + 1 < n1) rel.emplace_back(node, g.node(i + 1, j));
        if (j + 1 < n2) rel.emplace_back(node, g.node(i, j + 1));
    }
    FinitePoset p;
    p.labels_ = std::move(labels);
    const std::size_t n = g.size();
    p.order_.assign(n * n, false);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            p.order_[a * n + b] = coords[a].first <= coords[b].first && coords[a].second <= coords[b].second;
    p.hasse_ = rel;
    std::sort(p.hasse_.begin(), p.hasse_.end());
    p.incoming_.assign(n, {});
    for (std::size_t e = 0; e < p.hasse_.size(); ++e) p.incoming_[p.hasse_[e].second].push_back(e);
    p.topo_.resize(n);
    for (std::size_t i = 0; i < n; ++i) p.topo_[i] = i; // node index order is a linear extension
    p.coords_ = std::move(coords);
    return p;
}

std::optional<std::size_t> FinitePoset::hasse_index(std::size_t a, std::size_t b) const {
    auto it = std::lower_bound(hasse_.begin(), hasse_.end(), std::make_pair(a, b));
    if (it == hasse_.end() || *it != std::make_pair(a, b)) return std::nullopt;
    return static_cast<std::size_t>(it - hasse_.begin());
}

FinitePoset FinitePoset::induced(std::span<const std::size_t> nodes) const {
    std::vector<std::string> labels;
    std::vector<std::pair<std::size_t, std::size_t>> rel;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i] >= size()) throw std::invalid_argument("induced subposet refers to a missing element");
        labels.push_back(labels_[nodes[i]]);
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            if (i != j && nodes[i] == nodes[j]) throw std::invalid_argument("induced subposet repeats an element");
            if (i != j && less(nodes[i], nodes[j])) rel.emplace_back(i, j);
        }
    }
    FinitePoset p(std::move(labels), rel);
    if (coords_) {
        std::vector<std::pair<std::size_t, std::size_t>> c;
        for (auto v : nodes) c.push_back((*coords_)[v]);
        p.coords_ = std::move(c);
    }
    return p;
}

} // namespace ivd
