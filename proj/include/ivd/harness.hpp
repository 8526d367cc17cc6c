#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ivd/decomp.hpp"
#include "ivd/filtration.hpp"
#include "ivd/geometry.hpp"
#include "ivd/sampling.hpp"

namespace ivd {

enum class Setting { copy_probability, sublevel_cech, sublevel_rips, kde, fixed_fn, degree, h0 };

const char* to_string(Setting s);
Setting parse_setting(const std::string& s);

struct ExperimentConfig {
    Setting setting = Setting::sublevel_cech;
    std::size_t hom_k = 1;
    std::size_t dim = 2;
    std::vector<double> n_list;
    std::size_t trials = 200;
    RngSeed master_seed = 1;
    std::pair<std::size_t, std::size_t> grid_caps{8, 8};
    std::uint32_t field_char = 2;
    /// 0 means one worker per hardware thread. Results never depend on it.
    std::size_t workers = 0;
    std::size_t max_candidates = kDefaultMaxCandidates;
    std::size_t dimension_cap = kDefaultDimensionCap;
    /// fixed-fn only: sampling cube of regular points; found on a coarse grid if absent.
    std::optional<Subcube> regular_cube;
};

struct ExperimentRow {
    Setting setting;
    double n;
    std::size_t trials;
    std::size_t successes;
    std::size_t inconclusive;
    double fraction;
    double ci_low;
    double ci_high;
    RngSeed seed;
};

struct ExperimentReport {
    std::vector<ExperimentRow> rows;
    /// copy-probability only: least-squares alpha in fraction ~ 1 - exp(-alpha n).
    std::optional<double> fitted_alpha;
};

struct WilsonInterval {
    double low, high;
};

/// 95% Wilson score interval (z = 1.959963984540054).
WilsonInterval wilson_interval(std::size_t successes, std::size_t trials);

/// Least-squares alpha >= 0 for fractions ~ 1 - exp(-alpha n); 0 if every fraction is 0.
double fit_alpha(const std::vector<double>& n, const std::vector<double>& fraction);

/// Seed of row `row` and of trial `trial` within it.
RngSeed row_seed(RngSeed master, std::size_t row);
RngSeed trial_seed(RngSeed row, std::size_t trial);

/// Five points in (0,1)^2 used when no pattern file is given.
PointCloud default_copy_pattern();

ExperimentReport run_copy_experiment(const PointCloud& pattern, double eps, const ExperimentConfig& cfg);

enum class TrialOutcome { interval, non_interval, inconclusive };

struct TrialResult {
    TrialOutcome outcome;
    std::size_t points;
    std::size_t module_dim;
    bool by_witness;
};

/// phi(x) = |x - (1/2, ..., 1/2)|^2, the fixed-fn default.
ScalarField default_fixed_function(std::size_t d);

/// First cell of the 4^d grid whose corners and center all have |grad phi| >= 0.1.
Subcube find_regular_cube(const ScalarField& phi, std::size_t d);

/// Smallest radius (doubling, then bisection) at which the complex on all points is
/// connected and, for k >= 1, has trivial H_k. Bounds the critical grid's radii.
double settle_radius(const PointCloud& cloud, ComplexKind kind, std::size_t k, std::uint32_t p);

/// One trial of a decomposability experiment at intensity n.
TrialResult run_decomposability_trial(const ExperimentConfig& cfg, double n, RngSeed seed,
                                      const std::optional<ScalarField>& fixed_fn = std::nullopt);

ExperimentReport run_decomposability_experiment(ExperimentConfig cfg,
                                                const std::optional<ScalarField>& fixed_fn = std::nullopt);

void write_report_csv(std::ostream& out, const ExperimentReport& report);
void save_report_csv(const std::string& path, const ExperimentReport& report);

struct LemmaCheck {
    std::string name;  // "lemma4.2", "lemma4.9", "lemma4.11", "lemma4.12"
    bool pass;
    std::string detail;
};

/// Builds the four canonical configurations in the plane and checks each witness
/// module, unperturbed and under `perturbations` seeded eps_stable/2 perturbations.
std::vector<LemmaCheck> verify_canonical_configs(std::size_t perturbations = 20);

} // namespace ivd
