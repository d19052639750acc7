#pragma once

#include <utility>

#include "ccv/polynomial.hpp"
#include "ccv/types.hpp"

namespace ccv {

/// Truncated-Fock-space operator constructions: ladder and quadrature
/// matrices, polynomial Hamiltonians on tensor-product spaces, and the
/// commutator-based synthesis identities for higher quadrature powers.
namespace ops {

/// (lower, raise) with lower|n> = sqrt(n)|n-1>, raise = lower^dagger.
std::pair<CMatrix, CMatrix> ladder_operators(int cutoff, const HbarConvention& conv = {});

/// x = sqrt(hbar/2)(a + a^dag), p = i sqrt(hbar/2)(a^dag - a); both Hermitian.
std::pair<CMatrix, CMatrix> quadrature_operators(int cutoff, const HbarConvention& conv = {});

CMatrix number_operator(int cutoff);

/// Hermitian matrix of a quadrature polynomial on the D^n_modes product
/// space. Same-mode mixed monomials x^m p^n are realized as the symmetrized
/// product (x^m p^n + p^n x^m)/2; cross-mode factors combine by Kronecker
/// product with mode 0 leftmost. Throws EncodingError if the assembled matrix
/// fails the Hermiticity guard.
CMatrix hamiltonian_matrix(const QuadraturePolynomial& poly, int cutoff,
                           const HbarConvention& conv = {});

/// exp(iA dt) exp(iB dt) exp(-iA dt) exp(-iB dt); for Hermitian A, B this
/// approaches exp(-[A,B] dt^2) with an O(dt^3) defect.
CMatrix group_commutator_product(const CMatrix& a, const CMatrix& b, double dt);

CMatrix commutator(const CMatrix& a, const CMatrix& b);

/// x^{m+1} built from x^m via the nested commutator with [x^3, p^2], scaled
/// by c(m, hbar) = -1/(6 m hbar^2). Agrees with the direct matrix power on
/// the interior block (indices < D - 3(m+1)); the truncation edge leaks.
CMatrix synthesize_x_power(int m, int cutoff, const HbarConvention& conv = {});

/// x^m p^n + p^n x^m from the commutator recursion
///   n = 1:  [x^{m+1}, p^2] / (i hbar (m+1))
///   n >= 2: ([x^{m+1}, p^{n+1}] - p [x^{m+1}, p^{n-1}] p) / (i hbar (m+1)),
/// exact at any hbar; validated against the direct symmetrized product on
/// the interior block.
CMatrix symmetric_mixed_power(int m, int n, int cutoff, const HbarConvention& conv = {});

/// Leading square sub-block with `margin` rows/cols trimmed from the top end.
inline CMatrix interior_block(const CMatrix& m, int margin) {
    const Eigen::Index k = std::max<Eigen::Index>(m.rows() - margin, 0);
    return m.topLeftCorner(k, k);
}

/// exp(-i H t) for Hermitian H via its spectral decomposition.
CMatrix hermitian_evolution_operator(const CMatrix& h, double t);

/// Matrix exponential (scaling-and-squaring Pade).
CMatrix matrix_exp(const CMatrix& m);

}  // namespace ops
}  // namespace ccv
