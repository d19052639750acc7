#pragma once

#include <string>
#include <utility>

#include "ccv/fock.hpp"
#include "ccv/gaussian.hpp"
#include "ccv/types.hpp"

namespace ccv {

struct GridSpec {
    int points = 201;
    double half_width = 0.0;  // 0: default +-(4 + sqrt(hbar(2D+1)))
};

/// Phase-space grid of W values; values(i, j) = W(x = xs(j), p = ps(i)).
struct WignerGrid {
    RVector xs, ps;
    RMatrix values;
    HbarConvention conv;
    int mode = 0;
    double negativity_volume = 0.0;

    double dx() const { return xs(1) - xs(0); }
    double dp() const { return ps(1) - ps(0); }
    /// Riemann-sum normalization (should be 1 within 5e-3).
    double mass() const { return values.sum() * dx() * dp(); }
    double max_abs() const { return values.cwiseAbs().maxCoeff(); }
};

namespace wigner {

double default_half_width(int cutoff, const HbarConvention& conv);

/// Wigner function of one mode of a Fock state, via the displaced-parity /
/// Laguerre-type series over the reduced density matrix. Throws when the
/// grid captures less than 99.9% of the state's mass.
WignerGrid wigner_fock(const FockState& state, int mode, const GridSpec& spec = {});

/// Closed-form Gaussian Wigner function (normal density of the mode's 2x2
/// marginal mean and covariance).
WignerGrid wigner_gaussian(const GaussianState& state, int mode, const GridSpec& spec = {});

/// Sup-norm differences between the grid's marginals and the homodyne
/// densities of the same state: (x error, p error).
std::pair<double, double> marginal_check(const WignerGrid& grid, const FockState& state, int mode);

/// CSV: first row x-axis, first column p-axis, body W values.
void write_csv(const WignerGrid& grid, const std::string& path);
/// JSON sidecar with {hbar, cutoff, mode, negativity_volume}.
void write_json_sidecar(const WignerGrid& grid, int cutoff, const std::string& path);

}  // namespace wigner
}  // namespace ccv
