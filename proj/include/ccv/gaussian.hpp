#pragma once

#include <utility>
#include <vector>

#include "ccv/polynomial.hpp"
#include "ccv/rng.hpp"
#include "ccv/types.hpp"

namespace ccv {

/// Gaussian state of N modes: first moments and covariance over the 2N
/// quadratures in interleaved (x1,p1,...,xN,pN) ordering.
struct GaussianState {
    int n_modes = 1;
    RVector mean;   // length 2N
    RMatrix cov;    // 2N x 2N, symmetric
    HbarConvention conv;

    Eigen::Index dim() const { return 2 * static_cast<Eigen::Index>(n_modes); }
    /// (mean_x, mean_p) of one mode.
    std::pair<double, double> mode_mean(int mode) const {
        return {mean(2 * mode), mean(2 * mode + 1)};
    }
    Eigen::Matrix2d mode_cov(int mode) const {
        return cov.block<2, 2>(2 * mode, 2 * mode);
    }
};

namespace gaussian {

/// Symplectic form for N modes in interleaved ordering.
RMatrix symplectic_form(int n_modes);

/// mean = 0, cov = (hbar/2) I.
GaussianState vacuum(int n_modes, const HbarConvention& conv = {});

/// Checks symmetry of cov and the uncertainty relation
/// cov + i(hbar/2) Omega >= 0; throws SimulationError on violation.
void validate_state(const GaussianState& state, double tol = 1e-9);

/// Evolution under a quadratic Hamiltonian for time t: mean -> S mean + d,
/// cov -> S cov S^T with S = exp(hbar Omega M t) from the Heisenberg flow of
/// the polynomial's quadratic part M and linear part c. Throws EncodingError
/// for degree > 2.
GaussianState quadratic_evolution(const GaussianState& state, const QuadraturePolynomial& poly,
                                  double t);

/// Symplectic + displacement pair realized by a quadratic polynomial flow.
std::pair<RMatrix, RVector> symplectic_of(const QuadraturePolynomial& poly, double t,
                                          const HbarConvention& conv);

// Named Gaussian gates, provided as precompiled special cases of
// quadratic_evolution. Displacement follows the convention that alpha shifts
// the means by sqrt(hbar) * (Re alpha, Im alpha).
GaussianState displace(const GaussianState& state, int mode, Complex alpha);
GaussianState rotate(const GaussianState& state, int mode, double theta);
/// r > 0 squeezes x (Var x -> e^{-2r} hbar/2 on vacuum).
GaussianState squeeze(const GaussianState& state, int mode, double r);
GaussianState beamsplitter(const GaussianState& state, int mode_a, int mode_b, double theta,
                           double phi = 0.0);
GaussianState controlled_phase(const GaussianState& state, int mode_a, int mode_b, double s);
GaussianState controlled_x(const GaussianState& state, int mode_a, int mode_b, double s);
/// Mixer shear exp(-i beta p^2) on one mode: x -> x + 2 hbar beta p.
GaussianState shear(const GaussianState& state, int mode, double beta);

/// i.i.d. draws from the vacuum-noise-added Q-function: the 2N-dimensional
/// normal with covariance cov + (hbar/2) I. One row per shot, interleaved
/// quadrature order.
RMatrix heterodyne_sample(const GaussianState& state, int n_shots, Rng& rng);

enum class Quadrature { X, P };

/// Exact 1-D marginal samples of one mode's chosen quadrature (no added noise).
RVector homodyne_sample(const GaussianState& state, Quadrature quad, int mode, int n_shots,
                        Rng& rng);

/// Joint draws of the chosen quadrature across all modes (exact marginal of
/// the x- or p-block). One row per shot, one column per mode.
RMatrix homodyne_sample_joint(const GaussianState& state, Quadrature quad, int n_shots, Rng& rng);

/// Expectation of a polynomial of degree <= 4 via Gaussian (Isserlis) moment
/// formulas on mean/cov. Mixed same-mode monomials follow the Weyl-symmetric
/// moment semantics of the covariance description.
double expectation(const GaussianState& state, const QuadraturePolynomial& poly);

/// Symplectic eigenvalues of the covariance matrix (all hbar/2 for pure states).
RVector symplectic_eigenvalues(const GaussianState& state);

}  // namespace gaussian
}  // namespace ccv
