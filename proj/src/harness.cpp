#include "ivd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "ivd/canonical.hpp"

namespace ivd {

namespace {

struct SettingName {
    Setting setting;
    const char* name;
};

constexpr SettingName kSettings[] = {
    {Setting::copy_probability, "copy-probability"}, {Setting::sublevel_cech, "sublevel-cech"},
    {Setting::sublevel_rips, "sublevel-rips"},       {Setting::kde, "kde"},
    {Setting::fixed_fn, "fixed-fn"},                 {Setting::degree, "degree"},
    {Setting::h0, "h0"},
};

constexpr double kWilsonZ = 1.959963984540054;

// Runs f(i) for i in [0, count) on a pool of threads; rethrows the lowest-index failure.
template <class F>
void parallel_for(std::size_t count, std::size_t workers, F&& f) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, std::max<std::size_t>(count, 1));
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t failed_at = count;
    std::exception_ptr failure;
    auto body = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) {
            try {
                f(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (i < failed_at) {
                    failed_at = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    if (workers == 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("experiment needs at least one trial");
    if (cfg.n_list.empty()) throw std::invalid_argument("experiment needs at least one intensity n");
    for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
        if (!(cfg.n_list[i] > 0)) throw std::invalid_argument("intensities must be positive");
        if (i > 0 && !(cfg.n_list[i - 1] < cfg.n_list[i]))
            throw std::invalid_argument("intensities must be strictly ascending");
    }
    if (cfg.dim < 1) throw std::invalid_argument("dimension must be at least 1");
    if (!is_prime(cfg.field_char)) throw std::invalid_argument("field characteristic must be prime");
}

ExperimentRow make_row(const ExperimentConfig& cfg, std::size_t row, std::size_t successes, std::size_t inconclusive) {
    const WilsonInterval ci = wilson_interval(successes, cfg.trials);
    return {cfg.setting,
            cfg.n_list[row],
            cfg.trials,
            successes,
            inconclusive,
            static_cast<double>(successes) / static_cast<double>(cfg.trials),
            ci.low,
            ci.high,
            row_seed(cfg.master_seed, row)};
}

std::string fmt(double x) {
    if (x == 0) x = 0;  // drop the sign of -0
    char buf[64];
    const bool integral = std::fabs(x) < 1e15 && x == std::floor(x);
    const auto res = integral ? std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed)
                              : std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double nearest_neighbor_spread(const PointCloud& cloud) {
    double worst = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        double best = INFINITY;
        for (std::size_t j = 0; j < cloud.size(); ++j)
            if (j != i) best = std::min(best, distance(cloud[i], cloud[j]));
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace

const char* to_string(Setting s) {
    for (const auto& e : kSettings)
        if (e.setting == s) return e.name;
    return "?";
}

Setting parse_setting(const std::string& s) {
    for (const auto& e : kSettings)
        if (s == e.name) return e.setting;
    throw std::invalid_argument("unknown setting '" + s +
                                "' (expected copy-probability, sublevel-cech, sublevel-rips, kde, fixed-fn, degree, h0)");
}

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials) {
    if (trials == 0 || successes > trials) throw std::invalid_argument("wilson_interval needs 0 <= successes <= trials > 0");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = kWilsonZ * kWilsonZ;
    const double denom = 1 + z2 / n;
    const double center = (p + z2 / (2 * n)) / denom;
    const double half = kWilsonZ / denom * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double fit_alpha(const std::vector<double>& n, const std::vector<double>& fraction) {
    if (n.size() != fraction.size() || n.empty()) throw std::invalid_argument("fit_alpha needs matching nonempty inputs");
    if (std::all_of(fraction.begin(), fraction.end(), [](double f) { return f == 0; })) return 0;
    auto loss = [&](double log_alpha) {
        const double a = std::exp(log_alpha);
        double s = 0;
        for (std::size_t i = 0; i < n.size(); ++i) {
            const double e = fraction[i] - (1 - std::exp(-a * n[i]));
            s += e * e;
        }
        return s;
    };
    const auto [lo_n, hi_n] = std::minmax_element(n.begin(), n.end());
    const double lo = std::log(1e-4 / *hi_n), hi = std::log(1e4 / *lo_n);
    // Coarse scan, then golden-section refinement around the best scan point.
    constexpr int kScan = 400;
    int best = 0;
    double best_loss = INFINITY;
    for (int i = 0; i <= kScan; ++i) {
        const double v = loss(lo + (hi - lo) * i / kScan);
        if (v < best_loss) best_loss = v, best = i;
    }
    double a = lo + (hi - lo) * std::max(best - 1, 0) / kScan;
    double b = lo + (hi - lo) * std::min(best + 1, kScan) / kScan;
    const double g = (std::sqrt(5.0) - 1) / 2;
    double c = b - g * (b - a), d = a + g * (b - a);
    for (int it = 0; it < 100; ++it) {
        if (loss(c) < loss(d)) b = d;
        else a = c;
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    return std::exp((a + b) / 2);
}

RngSeed row_seed(RngSeed master, std::size_t row) { return derive_seed(master, row); }
RngSeed trial_seed(RngSeed row, std::size_t trial) { return derive_seed(row, trial); }

PointCloud default_copy_pattern() {
    auto pt = [](double x, double y) { return Point(Eigen::Vector2d(x, y)); };
    return PointCloud(2, {pt(0.2, 0.3), pt(0.7, 0.2), pt(0.5, 0.5), pt(0.3, 0.8), pt(0.8, 0.7)});
}

ExperimentReport run_copy_experiment(const PointCloud& pattern, double eps, const ExperimentConfig& cfg) {
    validate(cfg);
    if (pattern.dim() != cfg.dim) throw std::invalid_argument("pattern dimension differs from the experiment dimension");
    ExperimentReport report;
    std::vector<double> fractions;
    for (std::size_t row = 0; row < cfg.n_list.size(); ++row) {
        const double n = cfg.n_list[row];
        const RngSeed rs = row_seed(cfg.master_seed, row);
        std::vector<char> found(cfg.trials, 0);
        parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
            const PointCloud cloud = sample_poisson_uniform(n, cfg.dim, trial_seed(rs, t));
            found[t] = find_scaled_copy(cloud, pattern, eps, n).has_value();
        });
        const auto successes = static_cast<std::size_t>(std::count(found.begin(), found.end(), 1));
        report.rows.push_back(make_row(cfg, row, successes, 0));
        fractions.push_back(report.rows.back().fraction);
    }
    report.fitted_alpha = fit_alpha(cfg.n_list, fractions);
    return report;
}

ScalarField default_fixed_function(std::size_t d) {
    const Point c = Point::Constant(d, 0.5);
    return {[c](const Point& x) { return (x - c).squaredNorm(); }, [c](const Point& x) { return Point(2 * (x - c)); }};
}

Subcube find_regular_cube(const ScalarField& phi, std::size_t d) {
    constexpr std::size_t kCells = 4;
    constexpr double kMinGrad = 0.1;
    const double side = 1.0 / kCells;
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= kCells;
    for (std::size_t cell = 0; cell < total; ++cell) {
        Point corner(d);
        for (std::size_t i = 0, rest = cell; i < d; ++i, rest /= kCells)
            corner(d - 1 - i) = static_cast<double>(rest % kCells) * side;
        Subcube q{corner, side};
        bool regular = phi.gradient(q.center()).norm() >= kMinGrad;
        for (std::size_t mask = 0; regular && mask < (std::size_t{1} << d); ++mask) {
            Point x = corner;
            for (std::size_t i = 0; i < d; ++i)
                if (mask >> i & 1) x(i) += side;
            regular = phi.gradient(x).norm() >= kMinGrad;
        }
        if (regular) return q;
    }
    throw std::invalid_argument("no cell of the coarse grid consists of regular points of the function");
}

double settle_radius(const PointCloud& cloud, ComplexKind kind, std::size_t k, std::uint32_t p) {
    if (cloud.size() <= 1) return 0;
    auto settled = [&](double r) {
        const SimplicialComplex c = build_complex(cloud, kind, r, k + 1);
        if (betti_number(c, 0, p) != 1) return false;
        return k == 0 || betti_number(c, k, p) == 0;
    };
    double hi = std::max(nearest_neighbor_spread(cloud) / 2, kGeomTol);
    double lo = 0;
    const double top = diameter(cloud);
    while (!settled(hi)) {
        lo = hi;
        hi *= 2;
        if (hi > 2 * top) return hi;  // the full simplex on k + 2 points is acyclic
    }
    for (int i = 0; i < 6; ++i) {
        const double mid = (lo + hi) / 2;
        (settled(mid) ? hi : lo) = mid;
    }
    return hi;
}

TrialResult run_decomposability_trial(const ExperimentConfig& cfg, double n, RngSeed seed,
                                      const std::optional<ScalarField>& fixed_fn) {
    const std::size_t d = cfg.dim;
    const RngSeed sample_seed = derive_seed(seed, 1), mark_seed = derive_seed(seed, 2);
    PointCloud cloud(d);
    switch (cfg.setting) {
    case Setting::sublevel_cech:
    case Setting::sublevel_rips:
    case Setting::h0:
        cloud = assign_uniform_marks(sample_poisson_uniform(n, d, sample_seed), mark_seed);
        break;
    case Setting::kde: {
        // A nonconstant intensity without critical points.
        const Density f = [](const Point& x) { return 0.5 + x(0); };
        cloud = sample_poisson_intensity(n, f, 1.5, d, sample_seed);
        if (!cloud.empty()) cloud = cloud.with_gamma(ball_kde(cloud, default_bandwidth(std::max(n, 2.0), d)));
        break;
    }
    case Setting::fixed_fn: {
        if (!fixed_fn) throw std::invalid_argument("the fixed-fn setting needs a scalar function");
        const Subcube q = cfg.regular_cube.value_or(find_regular_cube(*fixed_fn, d));
        const PointCloud all = sample_poisson_uniform(n, d, sample_seed);
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < all.size(); ++i)
            if (q.contains(all[i])) keep.push_back(i);
        cloud = all.subset(keep);
        std::vector<double> g;
        for (const Point& x : cloud.points()) g.push_back(fixed_fn->value(x));
        cloud = cloud.with_gamma(std::move(g));
        break;
    }
    case Setting::degree: cloud = sample_poisson_uniform(n, d, sample_seed); break;
    case Setting::copy_probability: throw std::invalid_argument("copy-probability is not a decomposability setting");
    }
    TrialResult res{TrialOutcome::interval, cloud.size(), 0, false};
    if (cloud.empty()) return res;

    const std::size_t k = cfg.setting == Setting::h0 ? 0 : cfg.hom_k;
    const ComplexKind kind = cfg.setting == Setting::sublevel_rips ? ComplexKind::rips : ComplexKind::cech;
    const GridMode mode = cfg.setting == Setting::degree ? GridMode::degree : GridMode::sublevel;
    const double r_max = settle_radius(cloud, kind, k, cfg.field_char);
    const CriticalGrid grid = critical_grid(cloud, kind, mode, cfg.grid_caps, k + 1, r_max);
    BigradedComplex bc;
    if (mode == GridMode::degree) {
        std::vector<int> ks;
        for (double v : grid.second) ks.push_back(static_cast<int>(std::lround(v)));
        bc = degree_bifiltration(cloud, kind, grid.r_values, ks, k + 1);
    } else {
        bc = sublevel_bifiltration(cloud, kind, grid.r_values, grid.second, k + 1);
    }
    const PersistenceModule m = homology_module(bc, k, cfg.field_char);
    res.module_dim = m.total_dim();
    if (m.total_dim() == 0) return res;

    DecomposeOptions opt;
    opt.dimension_cap = cfg.dimension_cap;
    opt.seed = derive_seed(seed, 3);
    try {
        if (detect_noninterval_witness(m, cfg.max_candidates, opt)) {
            res.outcome = TrialOutcome::non_interval;
            res.by_witness = true;
            return res;
        }
    } catch (const DimensionCapExceeded&) {
    }
    if (m.total_dim() > cfg.dimension_cap) {
        res.outcome = TrialOutcome::inconclusive;
        return res;
    }
    const Decomposition dec = decompose(m, opt);
    bool open = false;
    for (const auto& s : dec.summands) {
        if (is_thin(s)) continue;
        const IndecomposabilityCheck c = check_indecomposable(s, opt);
        if (c.exact && c.indecomposable) {
            res.outcome = TrialOutcome::non_interval;
            return res;
        }
        open = true;
    }
    res.outcome = open ? TrialOutcome::inconclusive : TrialOutcome::interval;
    return res;
}

ExperimentReport run_decomposability_experiment(ExperimentConfig cfg, const std::optional<ScalarField>& fixed_fn) {
    validate(cfg);
    if (cfg.setting == Setting::h0) cfg.hom_k = 0;
    if (cfg.setting == Setting::copy_probability)
        throw std::invalid_argument("use run_copy_experiment for the copy-probability setting");
    if (cfg.setting == Setting::fixed_fn && !fixed_fn)
        throw std::invalid_argument("the fixed-fn setting needs a scalar function");
    if (cfg.setting == Setting::fixed_fn && !cfg.regular_cube) cfg.regular_cube = find_regular_cube(*fixed_fn, cfg.dim);
    ExperimentReport report;
    for (std::size_t row = 0; row < cfg.n_list.size(); ++row) {
        const RngSeed rs = row_seed(cfg.master_seed, row);
        std::vector<TrialOutcome> out(cfg.trials);
        parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
            out[t] = run_decomposability_trial(cfg, cfg.n_list[row], trial_seed(rs, t), fixed_fn).outcome;
        });
        const auto successes = static_cast<std::size_t>(std::count(out.begin(), out.end(), TrialOutcome::non_interval));
        const auto inconclusive = static_cast<std::size_t>(std::count(out.begin(), out.end(), TrialOutcome::inconclusive));
        report.rows.push_back(make_row(cfg, row, successes, inconclusive));
    }
    return report;
}

void write_report_csv(std::ostream& out, const ExperimentReport& report) {
    out << "setting,n,trials,successes,inconclusive,fraction,ci_low,ci_high,seed\n";
    for (const auto& r : report.rows)
        out << to_string(r.setting) << ',' << fmt(r.n) << ',' << r.trials << ',' << r.successes << ',' << r.inconclusive
            << ',' << fmt(r.fraction) << ',' << fmt(r.ci_low) << ',' << fmt(r.ci_high) << ',' << r.seed << '\n';
}

void save_report_csv(const std::string& path, const ExperimentReport& report) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report file " + path);
    write_report_csv(out, report);
}

namespace {

std::string check_witness(const CanonicalConfig& cfg, const PointCloud& cloud) {
    const WitnessModule wm = witness_module(cfg, cloud);
    const PersistenceModule target = fig2_module(cfg.side, wm.restricted.characteristic());
    if (cfg.kind != ConfigKind::h0) {
        if (!are_isomorphic(wm.restricted, target)) return "restricted module is not isomorphic to the Fig 2 module";
        return {};
    }
    if (wm.restricted.dims() != std::vector<std::size_t>{2, 3, 2, 2}) return "restricted dims differ from (2,3,2,2)";
    const Decomposition d = decompose(wm.restricted);
    auto dv = d.dim_vectors();
    std::sort(dv.begin(), dv.end());
    if (!d.exact || dv != std::vector<std::vector<std::size_t>>{{1, 1, 1, 1}, {1, 2, 1, 1}})
        return "decomposition differs from (1,1,1,1) + (1,2,1,1)";
    for (const auto& s : d.summands)
        if (s.dims() == target.dims() && !are_isomorphic(s, target)) return "non-thin summand is not the Fig 2 module";
    return {};
}

template <class Build>
LemmaCheck check_lemma(const std::string& name, Build build, std::size_t perturbations) {
    std::optional<CanonicalConfig> cfg;
    try {
        cfg = build();
    } catch (const ConfigError& e) {
        return {name, false, std::string("configuration failure: ") + e.what()};
    }
    try {
        if (std::string why = check_witness(*cfg, cfg->cloud); !why.empty()) return {name, false, why};
        for (std::size_t i = 0; i < perturbations; ++i) {
            const PointCloud moved = perturb(cfg->cloud, cfg->eps_stable / 2, derive_seed(0x1e77a, i));
            if (std::string why = check_witness(*cfg, moved); !why.empty())
                return {name, false, "perturbation " + std::to_string(i) + ": " + why};
        }
    } catch (const ConfigError& e) {
        return {name, false, std::string("perturbed configuration failure: ") + e.what()};
    }
    return {name, true, "eps_stable = " + fmt(cfg->eps_stable)};
}

} // namespace

std::vector<LemmaCheck> verify_canonical_configs(std::size_t perturbations) {
    return {
        check_lemma("lemma4.2", [] { return config_sublevel(2); }, perturbations),
        check_lemma("lemma4.9", [] { return config_degree(2); }, perturbations),
        check_lemma("lemma4.11", [] { return config_rips(); }, perturbations),
        check_lemma("lemma4.12", [] { return config_h0(); }, perturbations),
    };
}

} // namespace ivd
