#pragma once

#include <vector>

#include "ccv/rng.hpp"
#include "ccv/types.hpp"

namespace ccv {

/// Standard (mu/mu_w, lambda) CMA-ES with the canonical default
/// hyperparameters; ask/tell interface, rank-based, no restarts.
struct CmaState {
    int dim = 1;
    RVector mean;
    double sigma = 1.0;
    RMatrix cov;
    RVector path_sigma;
    RVector path_cov;
    int generation = 0;
    int lambda_pop = 0;
    int mu = 0;
    RVector weights;  // mu recombination weights, sum 1
    double mu_eff = 0.0;
    double c_sigma = 0.0, d_sigma = 0.0, c_cov_path = 0.0, c1 = 0.0, c_mu = 0.0, chi_n = 0.0;

    // spectral factors of cov, refreshed by tell()
    RMatrix cov_basis;       // B
    RVector cov_scale;       // sqrt eigenvalues (D)
};

namespace cmaes {

/// Default population size 4 + floor(3 ln dim).
int default_population(int dim);

CmaState init(int dim, const RVector& x0, double sigma0, int lambda_pop = 0);

/// lambda_pop candidates drawn mean + sigma * B D N(0, I); covariance repair
/// by eigenvalue clamping happens in tell().
std::vector<RVector> ask(const CmaState& state, Rng& rng);

/// Rank-based update; non-finite fitnesses get the worst ranks (stable by
/// candidate index). Returns the advanced state.
CmaState tell(const CmaState& state, const std::vector<RVector>& candidates,
              const std::vector<double>& fitnesses);

/// Convenience driver minimizing f, returning (best_x, best_f).
std::pair<RVector, double> minimize(const std::function<double(const RVector&)>& f,
                                    const RVector& x0, double sigma0, int generations,
                                    std::uint64_t seed);

}  // namespace cmaes
}  // namespace ccv
