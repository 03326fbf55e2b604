#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "noncollide/integrators.hpp"

namespace noncollide {

// Ordinary least squares of log2(mean) on log2(dt).
struct LoglogFit {
    double slope = 0.0;
    double intercept = 0.0;
    int points = 0;
};
LoglogFit fit_loglog(std::span<const double> dts, std::span<const double> means);

struct ConvergenceRow {
    int factor = 0;
    double dt = 0.0;
    double err_sq_mean = 0.0;   // E sup_n |Y - Y_ref|_2^2 over the coarse grid times
    double err_sq_se = 0.0;
    double err_gap_sq_mean = 0.0;  // E sup_{n,i} (gap_i - gap_i_ref)^2 (auxiliary gaps for SD)
    double err_gap_sq_se = 0.0;
    int n_paths = 0;   // usable paths
    int aborted = 0;
    bool usable = false;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;  // sorted by decreasing dt
    double fitted_rate = 0.0;          // slope for err_sq
    double fitted_intercept = 0.0;
    double fitted_rate_gap = 0.0;      // slope for the gap-error column
    double fitted_intercept_gap = 0.0;
    std::uint64_t seed = 0;
    int m_paths = 0;
    int n_fine = 0;
    int ref_factor = 0;
    SchemeKind kind = SchemeKind::SdComposed;
};

struct ExperimentOptions {
    std::uint64_t seed = 0;
    int m_paths = 0;
    int n_fine = 0;
    SdOptions sd;      // eps_alpha and guard policy, applied per run step size
    int workers = 1;   // parallelism cap; results are independent of it
};

// Coupled strong-error study: per path one Brownian grid, the reference at
// ref_factor and every coarse factor consume coarsened views of it. Paths
// whose reference or coarse run aborts are excluded from that row and
// counted. Rows with no usable paths or zero mean are skipped by the fit.
ConvergenceTable strong_error(const SystemSpec& spec, SchemeKind kind,
                              const ExperimentOptions& opt, std::vector<int> factors,
                              int ref_factor);

struct LocalScalingRow {
    int factor = 0;
    double dt = 0.0;
    double mean = 0.0;  // E max_{n,i} |within-step auxiliary increment|^2
    double se = 0.0;
    int n_paths = 0;
    int aborted = 0;
};

struct LocalScalingTable {
    std::vector<LocalScalingRow> rows;
    double fitted_rate = 0.0;
    double fitted_intercept = 0.0;
    std::uint64_t seed = 0;
    int m_paths = 0;
    int n_fine = 0;
};

LocalScalingTable local_error_scaling(const SystemSpec& spec, const ExperimentOptions& opt,
                                      std::vector<int> factors);

struct CollisionStats {
    double min_gap = 0.0;        // over paths and grid times n >= 1 (valid states only)
    long violation_steps = 0;    // grid indices with non-ordered positions
    long aborted_paths = 0;
    int n_paths = 0;
};

CollisionStats collision_stats(const SystemSpec& spec, SchemeKind kind,
                               const ExperimentOptions& opt, int factor);

struct MomentReport {
    double t_check = 0.0;
    // E |X_t|^2 against the Ito identity |x0|^2 + (gamma d(d-1) + sum sigma_i^2) t
    double empirical_mean_sq_norm = 0.0;
    double mean_sq_norm_se = 0.0;
    double theoretical_mean_sq_norm = 0.0;
    double z_mean_sq_norm = 0.0;
    // sum_i X_t^i against Normal(sum x0, t * sum_j (sum_i sigma_ij)^2)
    double sum_mean = 0.0;
    double sum_mean_se = 0.0;
    double sum_var = 0.0;
    double sum_var_se = 0.0;
    double sum_theoretical_mean = 0.0;
    double sum_theoretical_var = 0.0;
    double z_sum_mean = 0.0;
    double z_sum_var = 0.0;
    long aborted_paths = 0;
};

// Requires a Dyson-form spec (scalar gamma, diagonal sigma, zero drift);
// throws std::invalid_argument otherwise. Simulates the composed scheme at
// factor 1 up to t_check (a grid time).
MomentReport dyson_moment_check(const SystemSpec& spec, const ExperimentOptions& opt,
                                double t_check);

// CSV / JSON artifact writers. All numbers use fmt17; identical inputs
// produce byte-identical text.
struct Provenance;
std::string convergence_csv(const ConvergenceTable& t, const Provenance& p);
std::string convergence_summary_json(const ConvergenceTable& t, const Provenance& p,
                                     std::span<const double> band);
std::string local_scaling_csv(const LocalScalingTable& t, const Provenance& p);
std::string compare_csv(std::span<const std::pair<SchemeKind, CollisionStats>> rows,
                        const Provenance& p);
std::string moment_report_json(const MomentReport& r, const Provenance& p);
std::string trajectory_csv(const Trajectory& tr, const Provenance& p);

}  // namespace noncollide
