// Experiment orchestration: configuration, deterministic parallel trial
// execution, universality gap tables, bound checks, and report emission.

#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kaclab/coeffs.hpp"
#include "kaclab/kacsim.hpp"
#include "kaclab/kpoint.hpp"

namespace kaclab::harness {

struct ExperimentConfig {
    std::vector<std::string> laws;
    std::vector<int> degrees;
    double theta = 1.5707963267948966;  // pi/2
    double window_R = 4.0;
    std::vector<int> ks;
    int trials_per_cell = 1000;
    int gaf_trials = 2000;
    double tol = 1e-10;
    std::uint64_t master_seed = 744073709;
    int workers = 0;  // 0 = auto; env KACLAB_WORKERS overrides

    bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig default_config();

// Strict JSON: unknown keys are rejected, constraint violations are reported
// with the offending key.
ExperimentConfig parse_config(const std::string& json_text);

// Canonical JSON (sorted keys); parse_config(emit_config(c)) == c.
std::string emit_config(const ExperimentConfig& config);

struct ResultRow {
    std::string law_id;  // "GAF" for the baseline cell
    int n = 0;           // 0 for the GAF baseline
    int k = 0;
    std::string phi_id;
    double mean = 0.0;
    double stderr_ = 0.0;
    long long trials = 0;
    double gaf_mean = 0.0;
    double gaf_stderr = 0.0;
    double gap = 0.0;        // |mean - gaf_mean|; NaN on GAF rows
    double gap_sigma = 0.0;  // gap / sqrt(se^2 + gaf_se^2); NaN on GAF rows
    std::string status;      // "ok" or "voided"

    bool is_gaf() const { return law_id == "GAF"; }
};

struct CellDiagnostics {
    std::string law_id;  // "GAF" for the baseline cell
    int n = 0;
    long long trials = 0;
    long long failures = 0;
    long long resamples = 0;
    bool voided = false;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;
    std::vector<CellDiagnostics> cells;
    long long expected_coeff_draws = 0;
    long long actual_coeff_draws = 0;
    long long leading_resamples = 0;
    bool budget_ok = false;
    double wall_seconds = 0.0;
};

// Runs every (law, degree) cell plus the GAF baseline and writes the raw
// artifacts (scaled-root CSVs, gaf_zeros.csv, correlations.csv), the gap
// table, plot data, the battery descriptor and manifest.json under out_dir.
// Byte-identical CSV bodies for a fixed (config, master_seed), any worker
// count.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::string& out_dir);

struct MaxModulusStat {
    double mean = 0.0;
    double stderr_ = 0.0;
    long long trials = 0;
};

// Empirical mean of max_{|z| <= R} |F_n| over `trials` draws; the maximum is
// taken over 512 equispaced boundary points (maximum-modulus principle).
MaxModulusStat max_modulus_stat(const coeffs::CoefficientLaw& law, int n, double R,
                                int trials, std::uint64_t seed,
                                double theta = 1.5707963267948966, int workers = 0);

// Per-trial boundary/grid maxima, exposed for the maximum-modulus oracle.
double max_abs_fn_boundary(const polyroots::Polynomial& p,
                           const kacsim::LocalFrame& frame, double R,
                           int angular = 512);
double max_abs_fn_grid(const polyroots::Polynomial& p,
                       const kacsim::LocalFrame& frame, double R,
                       int radial = 64, int angular = 512);

struct MomentRow {
    int n = 0;  // 0 for the GAF reference row
    double mean = 0.0;
    double stderr_ = 0.0;
    long long trials = 0;
    long long failures = 0;
};

// Empirical k-th moments of the disk count Z(D_R) per degree, plus the GAF
// reference estimated from gaf_trials samples (n = 0 row). k <= 4.
std::vector<MomentRow> moment_tail_scan(const coeffs::CoefficientLaw& law, int k,
                                        double R, const std::vector<int>& degrees,
                                        int trials, int gaf_trials,
                                        std::uint64_t seed,
                                        double theta = 1.5707963267948966,
                                        int workers = 0);

struct SmallBallRow {
    int n = 0;
    long long trials = 0;
    long long hits_half = 0;  // |sqrt(n) F_n(i phi)| <= 1/2
    long long hits_one = 0;   // |sqrt(n) F_n(i phi)| <= 1
    double p_half = 0.0;
    double p_one = 0.0;
    double se_one = 0.0;       // binomial standard error of p_one
    double ratio_to_prev = 0.0;  // p_one(previous n) / p_one(this n); NaN on first
    bool flagged = false;        // zero hits: trial budget insufficient
};

// Empirical small-ball probabilities P(sqrt(n) |F_n(i phi)| <= threshold) at
// thresholds 1/2 and 1. Requires trials >= 10^6.
std::vector<SmallBallRow> small_ball_probe(const coeffs::CoefficientLaw& law,
                                           const std::vector<int>& degrees,
                                           double phi, long long trials,
                                           std::uint64_t seed,
                                           double theta = 1.5707963267948966,
                                           int workers = 0);

// Gap table plus per-figure plot files (series,x,y,yerr) under out_dir.
void emit_report(const std::vector<ResultRow>& rows, const std::string& out_dir);

// Rebuilds gap rows from bare correlation estimates (the GAF rows inside the
// input provide the baseline).
std::vector<ResultRow> rows_from_correlations(
    const std::vector<kpoint::CorrelationEstimate>& estimates);

std::vector<kpoint::CorrelationEstimate> read_correlations_csv(const std::string& path);

// Locale-independent shortest-17-significant-digit formatting; all CSV
// numbers go through this so reruns are byte-identical.
std::string fmt17(double v);

// workers hint resolution: positive env KACLAB_WORKERS wins, then a positive
// hint, then hardware concurrency.
int resolve_workers(int hint);

// Runs fn(0..count-1) across `workers` threads; any exception is rethrown on
// the caller thread. Results must be written to trial-indexed slots.
void parallel_for(long long count, int workers,
                  const std::function<void(long long)>& fn);

}  // namespace kaclab::harness
