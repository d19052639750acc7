#pragma once

#include <optional>
#include <vector>

#include "ccv/cmaes.hpp"
#include "ccv/encoding.hpp"
#include "ccv/fock.hpp"
#include "ccv/gaussian.hpp"
#include "ccv/polynomial.hpp"

namespace ccv {

enum class Backend { Gaussian, Fock };
enum class Measurement { Heterodyne, TwoPhaseHomodyne };

/// Full experiment description for one variational run.
struct QaoaConfig {
    int depth = 1;                      // q: number of cost/mixer layer pairs
    int shots = 50;                     // N: samples per cost estimate
    double squeeze_r = 0.0;             // initial per-mode squeezing
    Backend backend = Backend::Gaussian;
    int cutoff = 10;                    // Fock cutoff D
    double tolerance = 1e-6;            // stopping epsilon on |L_t - L_{t-1}|
    int max_iters = 100;                // T_max (CMA-ES generations)
    std::uint64_t seed = 0;
    HbarConvention conv;
    std::optional<QuadraturePolynomial> mixer;  // default: sum of p_j^2
    std::optional<Measurement> measurement;     // default by backend
    double success_tol = 0.05;
    bool heterodyne_bias_correction = false;
    int final_samples = 0;              // 0: reuse shots
    double init_param_range = 0.1;      // initial (gamma, beta) ~ U[-range, range]
    double cma_sigma0 = 0.2;
    int population = 0;                 // 0: CMA-ES default
    int eval_shot_multiplier = 1;       // re-evaluation averaging for noisy fitness
    double oracle_box = 16.0;           // classical-reference search box
};

Measurement resolve_measurement(const QaoaConfig& config);

struct IterationRecord {
    int t = 0;
    RVector gamma, beta;        // generation-best candidate
    double cost_estimate = 0.0; // generation-best sampled cost
    RVector best_sample;        // interleaved (x1,p1,...)
    double best_sample_cost = 0.0;
};

/// Final-state snapshot, serializable for Wigner post-processing.
struct StateSnapshot {
    Backend backend = Backend::Gaussian;
    int n_modes = 1;
    HbarConvention conv;
    // Fock
    int cutoff = 0;
    CVector amplitudes;
    // Gaussian
    RVector mean;
    RMatrix cov;
};

struct RunResult {
    RVector gamma_opt, beta_opt;
    std::vector<IterationRecord> trace;
    RMatrix final_samples;       // one row per shot, interleaved quadratures
    RVector best_sample;
    double best_sample_cost = 0.0;
    double success_probability = 0.0;
    RVector reference_argmin;
    double reference_value = 0.0;
    StateSnapshot snapshot;
    // diagnostics (excluded from determinism guarantees where noted)
    double wall_ms = 0.0;        // not deterministic
    double truncation_loss = 0.0;
    bool cutoff_warning = false;
    int iterations_used = 0;
};

namespace qaoa {

struct LayerPlan {
    QuadraturePolynomial cost;
    QuadraturePolynomial mixer;
    int depth = 1;
};

/// Validates the config against the encoded problem (backend/measurement
/// pairing, Gaussian degree limit) and checks [H_M, H_C] != 0; throws
/// ConfigError with a degenerate-mixer message when they commute.
LayerPlan build_layers(const EncodedProblem& encoded, const QaoaConfig& config);

enum class PreparePhase { Single, RealPart, ImagPart };

GaussianState prepare_initial_gaussian(const QaoaConfig& config, PreparePhase phase, int n_modes);
FockState prepare_initial_fock(const QaoaConfig& config, PreparePhase phase, int n_modes);

struct CostEstimate {
    double value = 0.0;
    RMatrix samples;  // rows: shots, cols: interleaved quadratures
};

/// Samples the circuit at the given parameters and returns the empirical
/// cost estimator (mean of the classical cost over shots).
CostEstimate estimate_cost(const EncodedProblem& encoded, const QaoaConfig& config,
                           const RVector& params, Rng& rng);

/// Fraction of samples whose classical cost is within
/// tol * max(1, |reference|) of the reference optimum.
double success_probability(const RMatrix& samples, const EncodedProblem& encoded,
                           double reference_value, double tol);

/// Full variational loop: CMA-ES over the 2q parameters, stopping on the
/// cost-change tolerance or the iteration budget, then final sampling and
/// best-sample selection. Deterministic per (config, problem, seed).
RunResult run(const EncodedProblem& encoded, const QaoaConfig& config);

struct ComparisonResult {
    RunResult ccv;
    RunResult baseline;
    int ccv_modes = 0, baseline_modes = 0;
    Eigen::Index ccv_hilbert_dim = 0, baseline_hilbert_dim = 0;
    double ccv_wall_ms = 0.0, baseline_wall_ms = 0.0;
};

/// Runs the CCV and CV-baseline encodings of a quadratic problem with
/// identical budgets.
ComparisonResult compare_baseline(const ComplexQuadraticProblem& problem,
                                  const QaoaConfig& config);

}  // namespace qaoa
}  // namespace ccv
