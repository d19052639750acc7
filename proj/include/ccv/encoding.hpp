#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ccv/polynomial.hpp"
#include "ccv/rng.hpp"
#include "ccv/types.hpp"

namespace ccv {

/// min over z in C^n of z^H A z + Re(c^H z), A Hermitian.
struct ComplexQuadraticProblem {
    CMatrix a;
    CVector c;

    int n() const { return static_cast<int>(a.rows()); }
};

/// Affine equality constraints C z - d = 0 over the complex variables.
struct AffineEqualities {
    CMatrix c_mat;
    CVector d;
};

struct ConstraintSet {
    std::optional<AffineEqualities> equalities;
    /// Real-valued polynomial inequality constraints h_j(z) <= 0, written in
    /// the (x, p) variables of the encoded modes.
    std::vector<QuadraturePolynomial> inequalities;
};

enum class EncodingKind { Ccv, CvBaseline };

/// Swish rectifier penalty R(lambda h) added to the classical cost only.
struct SwishTerm {
    QuadraturePolynomial h;
    double lambda = 1.0;
};

/// A problem lowered onto modes: circuit Hamiltonian polynomial plus the
/// classically evaluable sampled cost. The Hamiltonian carries no constant
/// term (global phase); the classical cost retains it.
struct EncodedProblem {
    int n_modes = 1;
    QuadraturePolynomial hamiltonian;
    double constant = 0.0;
    std::vector<SwishTerm> swish;
    EncodingKind kind = EncodingKind::Ccv;
    double penalty_lambda = 0.0;
    int slack_modes = 0;
    int problem_vars = 0;

    double classical_cost(std::span<const double> x, std::span<const double> p) const;
    double classical_cost_interleaved(const RVector& xp) const;
    /// Decision-variable readout z_j from an interleaved sample.
    CVector sample_to_z(const RVector& xp) const;
};

namespace encoding {

double swish(double u);

/// z_j = x_j + i p_j substitution; n modes for n complex variables. Throws
/// EncodingError when A is not Hermitian or residual imaginary coefficients
/// exceed 1e-10.
EncodedProblem encode_complex_quadratic(const ComplexQuadraticProblem& problem);

/// Re z_j and Im z_j on the x quadratures of separate modes; 2n modes, cost
/// polynomial in x only.
EncodedProblem encode_cv_baseline(const ComplexQuadraticProblem& problem);

/// Adds lambda * sum_i |g_i(z)|^2 for g = Cz - d to both the Hamiltonian and
/// the classical cost, following the problem's variable encoding.
EncodedProblem apply_equality_penalty(const EncodedProblem& encoded,
                                      const AffineEqualities& equalities, double lambda);

/// Converts h(z) <= 0 into h(z) + s^2 = 0 with a fresh slack mode (s on its
/// x quadrature) and penalizes lambda (h + s^2)^2.
EncodedProblem apply_slack_reformulation(const EncodedProblem& encoded,
                                         const QuadraturePolynomial& h, double lambda);

/// Adds R(lambda h) to the classical cost; optionally a Taylor polynomial of
/// R around 0 of the given degree to the circuit Hamiltonian (0 = classical
/// only, the default).
EncodedProblem apply_swish_penalty(const EncodedProblem& encoded, const QuadraturePolynomial& h,
                                   double lambda, int hamiltonian_taylor_degree = 0);

/// Real polynomial over n real variables.
struct RealPolynomial {
    int n_vars = 0;
    struct Term {
        double coeff;
        std::vector<int> powers;  // length n_vars
    };
    std::vector<Term> terms;
};

/// Pairs (v_0,v_1) -> (x_0,p_0) etc.; n must be even unless pad_odd, which
/// appends a zero-cost dummy variable.
EncodedProblem encode_real_multivariate(const RealPolynomial& f, bool pad_odd = false);

RealPolynomial styblinski_tang(int n_vars);

/// Single-mode quartic ||z - h||^4 - |b z|^2 + Re(c z).
EncodedProblem encode_quartic_complex(Complex hconst, Complex b, Complex c);

struct OracleBudget {
    std::uint64_t seed = 0;
    double box = 16.0;          // search box half-width per coordinate
    Eigen::Index max_grid = 600000;
    int polish_starts = 12;
    int polish_iters = 600;
};

struct OracleResult {
    RVector argmin;  // interleaved (x1,p1,...)
    double value = 0.0;
    bool improved = true;
};

/// Multi-start local refinement over a coarse grid: deterministic per seed.
OracleResult classical_oracle(const EncodedProblem& encoded, const OracleBudget& budget = {});

/// Deterministic Nelder-Mead minimizer used by the oracle's polish stage.
std::pair<RVector, double> nelder_mead(const std::function<double(const RVector&)>& f,
                                       const RVector& x0, double step, int max_iters,
                                       double ftol = 1e-12);

}  // namespace encoding
}  // namespace ccv
