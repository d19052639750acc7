#include "ccv/operators.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace ccv::ops {

namespace {

void require_cutoff(int cutoff) {
    if (cutoff < 2) throw DimensionError("invalid-cutoff: Fock cutoff must be >= 2");
}

CMatrix matrix_power(const CMatrix& m, int k) {
    CMatrix out = CMatrix::Identity(m.rows(), m.cols());
    for (int i = 0; i < k; ++i) out = out * m;
    return out;
}

}  // namespace

std::pair<CMatrix, CMatrix> ladder_operators(int cutoff, const HbarConvention&) {
    require_cutoff(cutoff);
    CMatrix lower = CMatrix::Zero(cutoff, cutoff);
    for (int n = 1; n < cutoff; ++n) lower(n - 1, n) = std::sqrt(static_cast<double>(n));
    return {lower, lower.adjoint()};
}

std::pair<CMatrix, CMatrix> quadrature_operators(int cutoff, const HbarConvention& conv) {
    auto [a, ad] = ladder_operators(cutoff, conv);
    const double s = std::sqrt(conv.hbar / 2.0);
    CMatrix x = s * (a + ad);
    CMatrix p = Complex(0.0, 1.0) * s * (ad - a);
    return {x, p};
}

CMatrix number_operator(int cutoff) {
    require_cutoff(cutoff);
    CMatrix n = CMatrix::Zero(cutoff, cutoff);
    for (int k = 0; k < cutoff; ++k) n(k, k) = static_cast<double>(k);
    return n;
}

CMatrix hamiltonian_matrix(const QuadraturePolynomial& poly, int cutoff,
                           const HbarConvention& conv) {
    require_cutoff(cutoff);
    const int n_modes = poly.n_modes();
    const Eigen::Index dim = ipow(cutoff, n_modes);
    auto [x, p] = quadrature_operators(cutoff, conv);
    const CMatrix eye = CMatrix::Identity(cutoff, cutoff);

    CMatrix h = CMatrix::Zero(dim, dim);
    for (const auto& term : poly.terms()) {
        CMatrix acc = CMatrix::Identity(1, 1);
        auto factor_it = term.factors.begin();
        for (int mode = 0; mode < n_modes; ++mode) {
            CMatrix block;
            if (factor_it != term.factors.end() && factor_it->mode == mode) {
                const CMatrix xm = matrix_power(x, factor_it->x_pow);
                const CMatrix pn = matrix_power(p, factor_it->p_pow);
                if (factor_it->x_pow > 0 && factor_it->p_pow > 0)
                    block = 0.5 * (xm * pn + pn * xm);
                else
                    block = xm * pn;
                ++factor_it;
            } else {
                block = eye;
            }
            acc = (mode == 0 && acc.rows() == 1) ? block : kron(acc, block).eval();
        }
        h += term.coeff * acc;
    }

    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - CMatrix(h.adjoint())).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw EncodingError("encoding-error: polynomial produced a non-Hermitian Hamiltonian");
    return h;
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("commutator: dimension mismatch");
    return a * b - b * a;
}

CMatrix matrix_exp(const CMatrix& m) { return m.exp(); }

CMatrix group_commutator_product(const CMatrix& a, const CMatrix& b, double dt) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("group_commutator_product: dimension mismatch");
    const Complex i(0.0, 1.0);
    CMatrix ea = (i * dt * a).exp();
    CMatrix eb = (i * dt * b).exp();
    CMatrix ean = (-i * dt * a).exp();
    CMatrix ebn = (-i * dt * b).exp();
    return ea * eb * ean * ebn;
}

CMatrix hermitian_evolution_operator(const CMatrix& h, double t) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    if (es.info() != Eigen::Success) throw SimulationError("eigendecomposition failed");
    const RVector lam = es.eigenvalues();
    CVector phases(lam.size());
    for (Eigen::Index k = 0; k < lam.size(); ++k)
        phases(k) = std::exp(Complex(0.0, -lam(k) * t));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix synthesize_x_power(int m, int cutoff, const HbarConvention& conv) {
    if (m < 1) throw DimensionError("synthesize_x_power: m must be >= 1");
    require_cutoff(cutoff);
    auto [x, p] = quadrature_operators(cutoff, conv);
    const CMatrix xm = matrix_power(x, m);
    const CMatrix inner = commutator(matrix_power(x, 3), p * p);
    const double c = -1.0 / (6.0 * m * conv.hbar * conv.hbar);
    return c * commutator(xm, inner);
}

CMatrix symmetric_mixed_power(int m, int n, int cutoff, const HbarConvention& conv) {
    if (m < 1 || n < 1) throw DimensionError("symmetric_mixed_power: m, n must be >= 1");
    require_cutoff(cutoff);
    auto [x, p] = quadrature_operators(cutoff, conv);
    const CMatrix xm1 = matrix_power(x, m + 1);
    const CMatrix pn1 = matrix_power(p, n + 1);
    CMatrix rhs = commutator(xm1, pn1);
    if (n >= 2) rhs -= p * commutator(xm1, matrix_power(p, n - 1)) * p;
    return rhs / (Complex(0.0, 1.0) * conv.hbar * static_cast<double>(m + 1));
}

}  // namespace ccv::ops
