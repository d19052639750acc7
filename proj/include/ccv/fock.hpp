#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ccv/operators.hpp"
#include "ccv/polynomial.hpp"
#include "ccv/rng.hpp"
#include "ccv/types.hpp"

namespace ccv {

/// Multi-mode state vector in the truncated Fock basis. Mode 0 is the most
/// significant index: flat index = ((n_0 D + n_1) D + ...) + n_{k-1}.
/// States are immutable values; operations return new states.
struct FockState {
    int n_modes = 1;
    int cutoff = 2;
    CVector amplitudes;
    HbarConvention conv;

    // run diagnostics, carried along with the value
    double cumulative_trunc_loss = 0.0;
    bool cutoff_warning = false;

    Eigen::Index dim() const { return amplitudes.size(); }
    double norm() const { return amplitudes.norm(); }
};

enum class GateKind {
    Displacement,
    Squeezing,
    Rotation,
    Beamsplitter,
    Kerr,
    CubicPhase,
    ControlledPhase,
    ControlledX
};

/// Gate description; `params` arity is fixed per kind and `modes` must hold
/// distinct in-range indices.
struct GateSpec {
    GateKind kind;
    std::vector<Complex> params;
    std::vector<int> modes;
};

namespace gate {
GateSpec displacement(int mode, Complex alpha);
GateSpec squeezing(int mode, double r);
GateSpec rotation(int mode, double theta);
GateSpec beamsplitter(int mode_a, int mode_b, double theta, double phi = 0.0);
GateSpec kerr(int mode, double kappa);
GateSpec cubic_phase(int mode, double gamma);
GateSpec controlled_phase(int mode_a, int mode_b, double s);
GateSpec controlled_x(int mode_a, int mode_b, double s);
}  // namespace gate

namespace fock {

FockState vacuum_state(int n_modes, int cutoff, const HbarConvention& conv = {});

/// Quadrature-polynomial generator G of a Gaussian-or-cubic gate with
/// U = exp(-i G). Displacement(alpha) shifts the quadrature means by
/// sqrt(hbar)(Re alpha, Im alpha); Squeezing(r > 0) squeezes x. Kerr has no
/// polynomial form here (it is kappa * n^2, applied diagonally).
QuadraturePolynomial gate_generator(const GateSpec& spec, int n_modes,
                                    const HbarConvention& conv);

/// |psi> -> U|psi> with U = exp(-i G) from the gate's generator; the state is
/// renormalized and the (tiny) norm defect is added to the truncation-loss
/// diagnostic.
FockState apply_gate(const FockState& state, const GateSpec& spec);

/// |psi> -> exp(-i H t)|psi> via the spectral decomposition of Hermitian H.
FockState evolve(const FockState& state, const CMatrix& h, double t);

/// <psi|H|psi>; the imaginary residue must stay below 1e-10 * scale.
double expectation(const FockState& state, const CMatrix& h);

/// Reduced density matrix of one mode.
CMatrix reduced_density(const FockState& state, int mode);

/// Photon-number distribution of the reduced single-mode state.
RVector fock_probabilities(const FockState& state, int mode);

/// Population of the top Fock level of the given mode (cutoff-adequacy guard).
double top_level_population(const FockState& state, int mode);

enum class Quadrature { X, P };

/// Sampling grid used by the homodyne sampler and the Wigner marginal check:
/// +-max(6 sqrt(hbar/2), 4 sqrt(hbar(2D+1)/2)) with 4096 points.
RVector homodyne_grid(int cutoff, const HbarConvention& conv);

/// Hermite functions scaled by sqrt(hbar): phi_n(x) row per grid point,
/// column per Fock level; the position wavefunctions of the Fock basis.
RMatrix hermite_functions(int cutoff, const RVector& grid, const HbarConvention& conv);

/// Marginal density of one mode's quadrature tabulated on `grid`.
RVector marginal_density(const FockState& state, Quadrature quad, int mode, const RVector& grid);

/// i.i.d. samples of the chosen quadrature of one mode, drawn from the
/// tabulated marginal by inverse-CDF lookup. Throws when the grid holds less
/// than 1 - 1e-4 of the probability mass.
RVector homodyne_sample(const FockState& state, Quadrature quad, int mode, int n_shots, Rng& rng);
RVector homodyne_sample(const FockState& state, Quadrature quad, int mode, int n_shots,
                        std::uint64_t rng_seed);

/// Joint samples of one quadrature across all modes (chain-rule conditional
/// sampling; preserves cross-mode correlations). One row per shot.
RMatrix homodyne_sample_joint(const FockState& state, Quadrature quad, int n_shots, Rng& rng);

/// First moments (interleaved x1,p1,...) and symmetrized covariance matrix,
/// for cross-validation against the Gaussian backend.
std::pair<RVector, RMatrix> quadrature_moments(const FockState& state);

/// Precompiled evolution under a fixed polynomial Hamiltonian; picks a
/// mode-separable, per-mode-quadrature-basis, or dense spectral strategy at
/// construction so repeated apply() calls stay cheap. The quadrature-basis
/// strategy covers any polynomial in which no mode mixes x and p (each mode
/// is diagonalized in its own x or p eigenbasis).
class FockEvolver {
public:
    FockEvolver(const QuadraturePolynomial& poly, int cutoff, const HbarConvention& conv = {});

    FockState apply(const FockState& state, double t) const;

    /// Dense Hamiltonian matrix (built on demand; used by precondition checks).
    CMatrix hamiltonian() const;

    const QuadraturePolynomial& polynomial() const { return poly_; }

private:
    enum class Strategy { Separable, QuadBasis, Dense };

    QuadraturePolynomial poly_;
    int cutoff_;
    HbarConvention conv_;
    Strategy strategy_;

    struct ModeSpectral {
        CMatrix vectors;
        RVector values;
        bool active = false;
    };
    std::vector<ModeSpectral> per_mode_;   // Separable
    std::vector<int> mode_basis_;          // QuadBasis: 0 = x, 1 = p, -1 = unused
    CMatrix x_vectors_, p_vectors_;        // QuadBasis: shared per-mode bases
    RVector diag_values_;                  // QuadBasis: poly on the eigen-grid
    CMatrix dense_vectors_;                // Dense
    RVector dense_values_;
};

/// Beamsplitter application through the photon-number-conserving sectors;
/// exactly the truncated unitary at cost O(D^4) instead of O(D^6).
CVector apply_passive_beamsplitter(const CVector& amps, int mode_a, int mode_b, double theta,
                                   double phi, int n_modes, int cutoff);

/// Applies a single-mode operator to one mode of the state vector.
CVector apply_single_mode(const CVector& amps, const CMatrix& op, int mode, int n_modes,
                          int cutoff);

/// Applies a two-mode operator (dim cutoff^2) to an ordered mode pair.
CVector apply_two_mode(const CVector& amps, const CMatrix& op, int mode_a, int mode_b, int n_modes,
                       int cutoff);

}  // namespace fock
}  // namespace ccv
