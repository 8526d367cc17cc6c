#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ivd/exactfield.hpp"
#include "ivd/filtration.hpp"
#include "ivd/random.hpp"

namespace ivd {

/// Finite poset on elements 0..n-1 with cached order relation and covering edges.
class FinitePoset {
  public:
    FinitePoset() = default;
    /// `relations` are pairs (a, b) meaning a < b; the order is their transitive
    /// closure. Throws std::invalid_argument on cycles or bad indices.
    FinitePoset(std::vector<std::string> labels, const std::vector<std::pair<std::size_t, std::size_t>>& relations);

    /// The product order of a grid; element index equals the grid node index.
    static FinitePoset grid(const GridPoset& g);

    std::size_t size() const { return labels_.size(); }
    const std::string& label(std::size_t i) const { return labels_.at(i); }
    const std::vector<std::string>& labels() const { return labels_; }
    bool leq(std::size_t a, std::size_t b) const { return order_[a * size() + b]; }
    bool less(std::size_t a, std::size_t b) const { return a != b && leq(a, b); }
    bool comparable(std::size_t a, std::size_t b) const { return leq(a, b) || leq(b, a); }

    /// Covering pairs (a, b), sorted.
    const std::vector<std::pair<std::size_t, std::size_t>>& hasse_edges() const { return hasse_; }
    /// Index of the covering edge a -> b, if it is one.
    std::optional<std::size_t> hasse_index(std::size_t a, std::size_t b) const;
    /// Covering edges ending at b.
    const std::vector<std::size_t>& incoming(std::size_t b) const { return incoming_.at(b); }
    /// A linear extension.
    const std::vector<std::size_t>& topological_order() const { return topo_; }

    /// Grid coordinates when built from a grid.
    const std::optional<std::vector<std::pair<std::size_t, std::size_t>>>& grid_coords() const { return coords_; }

    /// Subposet on `nodes` (new element i is old element nodes[i]).
    FinitePoset induced(std::span<const std::size_t> nodes) const;

    /// Same element count and the same order relation (labels ignored).
    bool same_order(const FinitePoset& other) const { return order_ == other.order_; }

  private:
    void finish();

    std::vector<std::string> labels_;
    std::vector<bool> order_;
    std::vector<std::pair<std::size_t, std::size_t>> hasse_;
    std::vector<std::vector<std::size_t>> incoming_;
    std::vector<std::size_t> topo_;
    std::optional<std::vector<std::pair<std::size_t, std::size_t>>> coords_;
};

/// Per-element matrices of a natural transformation (target dim x source dim).
using ModuleMorphism = std::vector<FieldMatrix>;

class PersistenceModule {
  public:
    PersistenceModule() = default;
    /// `maps[e]` belongs to poset.hasse_edges()[e] and has shape dims[target] x dims[source].
    /// Throws std::invalid_argument on shape, characteristic or functoriality violations.
    PersistenceModule(FinitePoset poset, std::vector<std::size_t> dims, std::vector<FieldMatrix> maps,
                      std::uint32_t p = kDefaultCharacteristic);

    static PersistenceModule zero(FinitePoset poset, std::uint32_t p = kDefaultCharacteristic);

    const FinitePoset& poset() const { return poset_; }
    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t dim(std::size_t i) const { return dims_.at(i); }
    std::size_t total_dim() const;
    std::uint32_t characteristic() const { return p_; }
    const std::vector<FieldMatrix>& maps() const { return maps_; }
    const FieldMatrix& edge_map(std::size_t e) const { return maps_.at(e); }

    /// Structure map a -> b for a <= b; throws std::invalid_argument otherwise.
    const FieldMatrix& structure_map(std::size_t a, std::size_t b) const;

    /// Change of basis: maps become T_b^{-1} M_e T_a. Throws if some T is singular.
    PersistenceModule conjugated(const std::vector<FieldMatrix>& t) const;

    friend bool operator==(const PersistenceModule& a, const PersistenceModule& b);

  private:
    void build_structure();

    FinitePoset poset_;
    std::vector<std::size_t> dims_;
    std::vector<FieldMatrix> maps_;
    std::uint32_t p_ = kDefaultCharacteristic;
    std::vector<std::optional<FieldMatrix>> structure_;
};

/// Module over the subposet on `nodes`; maps are composites in M.
PersistenceModule restrict(const PersistenceModule& m, std::span<const std::size_t> nodes);

PersistenceModule direct_sum(const PersistenceModule& m, const PersistenceModule& n);

/// Basis of the space of natural transformations M -> N.
std::vector<ModuleMorphism> hom_basis(const PersistenceModule& m, const PersistenceModule& n);

bool is_natural(const PersistenceModule& m, const PersistenceModule& n, const ModuleMorphism& f);

struct IsoResult {
    bool isomorphic = false;
    /// False when the search was randomized and found nothing.
    bool exact = true;
    std::optional<ModuleMorphism> witness;
};

/// Searches the natural transformations for one invertible at every element.
/// Exhaustive when the space has at most 2^20 elements, otherwise 10^4 seeded draws.
IsoResult find_isomorphism(const PersistenceModule& m, const PersistenceModule& n, RngSeed seed = 0x15c0);
bool are_isomorphic(const PersistenceModule& m, const PersistenceModule& n);

/// H_k over GF(p) at every grid node with induced maps along covering edges.
PersistenceModule homology_module(const BigradedComplex& complex, std::size_t k,
                                  std::uint32_t p = kDefaultCharacteristic);

/// Betti number of one complex (rank-nullity on boundary matrices), used as a cross-check.
std::size_t betti_number(const SimplicialComplex& complex, std::size_t k, std::uint32_t p = kDefaultCharacteristic);

/// Text format: "field p", "node <id> <label> dim=<d>" lines, then per covering edge
/// "edge <src> <dst>" followed by dims[dst] rows of residues.
void write_module(std::ostream& out, const PersistenceModule& m);
/// Reads the text format; with `field_override`, entries are reduced mod that prime.
PersistenceModule read_module(std::istream& in, std::optional<std::uint32_t> field_override = std::nullopt);
PersistenceModule load_module(const std::string& path, std::optional<std::uint32_t> field_override = std::nullopt);
void save_module(const std::string& path, const PersistenceModule& m);

} // namespace ivd
