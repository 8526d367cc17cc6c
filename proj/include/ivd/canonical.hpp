#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "ivd/decomp.hpp"
#include "ivd/filtration.hpp"
#include "ivd/geometry.hpp"
#include "ivd/pmodule.hpp"

namespace ivd {

/// Raised when a canonical configuration fails its own geometric or algebraic checks.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

enum class ConfigKind { sublevel, degree, rips, h0 };

const char* to_string(ConfigKind kind);

/// A bigrade (r, second) where second is a gamma level, or -k for degree grids.
using Bigrade = std::array<double, 2>;

/// Hand-built point set whose module restricted to `witness_poset` has a Fig 2 summand.
struct CanonicalConfig {
    ConfigKind kind;
    std::size_t dim;
    PointCloud cloud;
    std::optional<std::size_t> apex_index;
    double eps_stable = 0;
    /// In the Fig 2 element order: (w, x, y, z) for the left shape, (s, c, t, r) for the right.
    std::array<Bigrade, 4> witness_poset;
    Fig2Side side;
    std::size_t hom_k;
    ComplexKind complex_kind;
};

/// The witness grid of a (possibly perturbed) copy of a configuration, its
/// homology module, and the restriction to the four witness bigrades.
struct WitnessModule {
    BigradedComplex complex;
    PersistenceModule module;
    std::array<std::size_t, 4> nodes;
    std::array<Bigrade, 4> bigrades;
    PersistenceModule restricted;
};

/// Sublevel Cech pair of regular d-simplices glued along a facet sigma, the apex of
/// one pushed toward sigma by delta and of the other by delta_p < delta.
CanonicalConfig config_sublevel(std::size_t d = 2, double delta = 0.05, double delta_p = 0.02);
/// The sublevel configuration plus a point at distance eta from the second apex, toward sigma.
CanonicalConfig config_degree(std::size_t d = 2, double delta = 0.05, double delta_p = 0.02, double eta = 0.01);
/// Two planar cross-polytopes (the right one scaled by 1 - delta) side by side, the
/// shared central vertices replaced by a vertical pair scaled by 1 - delta_p.
CanonicalConfig config_rips(double delta = 0.05, double delta_p = 0.08);
/// Four planar points A, B, C, D with gamma(A) < gamma(B) < gamma(C) < gamma(D).
CanonicalConfig config_h0();

/// Recomputes the witness bigrades from `cloud` (same point roles as cfg.cloud) and
/// builds the module. Throws ConfigError if a defining inequality fails.
WitnessModule witness_module(const CanonicalConfig& cfg, const PointCloud& cloud);

/// True if `cloud` still yields a restricted module with a summand isomorphic to the Fig 2 module.
bool revalidate(const CanonicalConfig& cfg, const PointCloud& cloud);

/// Largest eps = 0.1 / 2^j for which 100 seeded eps-perturbations all revalidate.
double certify_eps_stable(const CanonicalConfig& cfg, std::size_t seeds = 100);

/// Pairwise Euclidean connectivity check used by config_h0: components of the
/// graph joining points at distance <= 2r.
std::size_t connected_components(const PointCloud& cloud, double r);

} // namespace ivd
