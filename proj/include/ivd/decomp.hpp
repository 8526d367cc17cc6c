#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ivd/pmodule.hpp"

namespace ivd {

enum class Fig2Side { left, right };

/// The two non-thin indecomposables on four-element posets. Left has elements
/// (w, x, y, z) with w < x, z < x, x < y; right has (s, c, t, r) with s < c, c < t, c < r.
/// Both have dimension vector (1, 2, 1, 1).
PersistenceModule fig2_module(Fig2Side side, std::uint32_t p = kDefaultCharacteristic);

inline constexpr std::size_t kDefaultDimensionCap = 400;

/// Thrown when a module is too large to decompose.
class DimensionCapExceeded : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct DecomposeOptions {
    std::size_t dimension_cap = kDefaultDimensionCap;
    RngSeed seed = 0x5eedULL;
    /// Random Fitting splits tried before the exhaustive idempotent search.
    std::size_t random_tries = 64;
    /// Exhaustive search is used when the endomorphism space has at most this many elements.
    std::size_t exhaustive_limit = std::size_t{1} << 20;
};

struct Decomposition {
    std::vector<PersistenceModule> summands;
    /// Per element, an invertible change of basis whose columns are grouped by summand.
    std::vector<FieldMatrix> basis;
    /// False if some summand was declared indecomposable after a randomized search only.
    bool exact = true;

    std::vector<std::vector<std::size_t>> dim_vectors() const;
};

Decomposition decompose(const PersistenceModule& m, const DecomposeOptions& opt = {});

/// Checks the invariants of `d` against `m`: invertible bases, block-diagonal
/// conjugated maps equal to the summands' maps, matching dimensions.
bool verify_decomposition(const PersistenceModule& m, const Decomposition& d);

struct IndecomposabilityCheck {
    bool indecomposable = false;
    bool exact = true;
};

IndecomposabilityCheck check_indecomposable(const PersistenceModule& m, const DecomposeOptions& opt = {});
bool is_indecomposable(const PersistenceModule& m, const DecomposeOptions& opt = {});
bool is_thin(const PersistenceModule& m);
bool is_interval_decomposable(const PersistenceModule& m, const DecomposeOptions& opt = {});

inline constexpr std::size_t kDefaultMaxCandidates = 100000;

struct Witness {
    Fig2Side side;
    /// Elements of the ambient poset in the Fig 2 order: (w, x, y, z) or (s, c, t, r).
    std::array<std::size_t, 4> nodes;
    std::size_t candidate_index;
    PersistenceModule restricted;
    PersistenceModule summand;
};

/// Searches four-element subposets of the two Fig 2 shapes, smallest restricted
/// dimension first, for a summand isomorphic to a Fig 2 module. A result proves
/// that `m` is not interval decomposable; nullopt proves nothing.
std::optional<Witness> detect_noninterval_witness(const PersistenceModule& m,
                                                  std::size_t max_candidates = kDefaultMaxCandidates,
                                                  const DecomposeOptions& opt = {});

/// Number of summands isomorphic to fig2_module(side) in the restriction of `m` to
/// `nodes`, given in the Fig 2 order. Exact; computed from three subspaces of the centre.
std::size_t fig2_multiplicity(const PersistenceModule& m, Fig2Side side, const std::array<std::size_t, 4>& nodes);

/// Number of candidate subposets that survive the dimension and rank filters.
std::size_t count_witness_candidates(const PersistenceModule& m);

} // namespace ivd
