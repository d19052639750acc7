#include "ccv/gaussian.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace ccv::gaussian {

RMatrix symplectic_form(int n_modes) {
    RMatrix omega = RMatrix::Zero(2 * n_modes, 2 * n_modes);
    for (int m = 0; m < n_modes; ++m) {
        omega(2 * m, 2 * m + 1) = 1.0;
        omega(2 * m + 1, 2 * m) = -1.0;
    }
    return omega;
}

GaussianState vacuum(int n_modes, const HbarConvention& conv) {
    if (n_modes < 1) throw DimensionError("n_modes must be >= 1");
    GaussianState s;
    s.n_modes = n_modes;
    s.mean = RVector::Zero(2 * n_modes);
    s.cov = (conv.hbar / 2.0) * RMatrix::Identity(2 * n_modes, 2 * n_modes);
    s.conv = conv;
    return s;
}

void validate_state(const GaussianState& state, double tol) {
    const Eigen::Index d = state.dim();
    if (state.mean.size() != d || state.cov.rows() != d || state.cov.cols() != d)
        throw DimensionError("GaussianState dimensions inconsistent");
    const double scale = std::max(1.0, state.cov.cwiseAbs().maxCoeff());
    if ((state.cov - RMatrix(state.cov.transpose())).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw SimulationError("covariance not symmetric");
    CMatrix u = state.cov.cast<Complex>() +
                Complex(0.0, state.conv.hbar / 2.0) * symplectic_form(state.n_modes).cast<Complex>();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(u);
    if (es.eigenvalues().minCoeff() < -tol * scale)
        throw SimulationError("uncertainty relation violated");
}

namespace {

/// Quadratic part M (with H = xi^T M xi / 2) and linear part c of a
/// polynomial of degree <= 2; the constant is a global phase and is dropped.
void quadratic_parts(const QuadraturePolynomial& poly, RMatrix& m, RVector& c) {
    const int n = poly.n_modes();
    m = RMatrix::Zero(2 * n, 2 * n);
    c = RVector::Zero(2 * n);
    for (const auto& term : poly.terms()) {
        const int deg = term.total_degree();
        if (deg > 2) throw EncodingError("not-gaussian: polynomial degree exceeds 2");
        if (deg == 0) continue;
        std::vector<int> idx;
        for (const auto& f : term.factors) {
            for (int k = 0; k < f.x_pow; ++k) idx.push_back(2 * f.mode);
            for (int k = 0; k < f.p_pow; ++k) idx.push_back(2 * f.mode + 1);
        }
        if (idx.size() == 1) {
            c(idx[0]) += term.coeff;
        } else {
            if (idx[0] == idx[1]) {
                m(idx[0], idx[0]) += 2.0 * term.coeff;
            } else {
                m(idx[0], idx[1]) += term.coeff;
                m(idx[1], idx[0]) += term.coeff;
            }
        }
    }
}

}  // namespace

std::pair<RMatrix, RVector> symplectic_of(const QuadraturePolynomial& poly, double t,
                                          const HbarConvention& conv) {
    RMatrix m;
    RVector c;
    quadratic_parts(poly, m, c);
    const Eigen::Index d = 2 * poly.n_modes();
    const RMatrix omega = symplectic_form(poly.n_modes());
    RMatrix aug = RMatrix::Zero(d + 1, d + 1);
    aug.topLeftCorner(d, d) = conv.hbar * t * omega * m;
    aug.topRightCorner(d, 1) = conv.hbar * t * omega * c;
    RMatrix e = aug.exp();
    return {e.topLeftCorner(d, d), e.topRightCorner(d, 1)};
}

GaussianState quadratic_evolution(const GaussianState& state, const QuadraturePolynomial& poly,
                                  double t) {
    if (poly.n_modes() != state.n_modes)
        throw DimensionError("polynomial mode count does not match state");
    auto [s, d] = symplectic_of(poly, t, state.conv);
    GaussianState out = state;
    out.mean = s * state.mean + d;
    out.cov = s * state.cov * s.transpose();
    out.cov = 0.5 * (out.cov + RMatrix(out.cov.transpose())).eval();
    return out;
}

namespace {

QuadraturePolynomial mode_poly(int n_modes) { return QuadraturePolynomial(n_modes); }

}  // namespace

GaussianState displace(const GaussianState& state, int mode, Complex alpha) {
    auto g = mode_poly(state.n_modes);
    const double rt = std::sqrt(state.conv.hbar);
    g.add_term(-alpha.imag() / rt, {ModePower{mode, 1, 0}});
    g.add_term(alpha.real() / rt, {ModePower{mode, 0, 1}});
    return quadratic_evolution(state, g, 1.0);
}

GaussianState rotate(const GaussianState& state, int mode, double theta) {
    auto g = mode_poly(state.n_modes);
    const double c = 1.0 / (2.0 * state.conv.hbar);
    g.add_term(c, {ModePower{mode, 2, 0}});
    g.add_term(c, {ModePower{mode, 0, 2}});
    return quadratic_evolution(state, g, theta);
}

GaussianState squeeze(const GaussianState& state, int mode, double r) {
    auto g = mode_poly(state.n_modes);
    g.add_term(-r / state.conv.hbar, {ModePower{mode, 1, 1}});  // -(r/2h)(xp+px)
    return quadratic_evolution(state, g, 1.0);
}

GaussianState beamsplitter(const GaussianState& state, int mode_a, int mode_b, double theta,
                           double phi) {
    auto g = mode_poly(state.n_modes);
    const double c = theta / state.conv.hbar;
    g.add_term(c * std::cos(phi), {ModePower{mode_a, 1, 0}, ModePower{mode_b, 0, 1}});
    g.add_term(-c * std::cos(phi), {ModePower{mode_a, 0, 1}, ModePower{mode_b, 1, 0}});
    g.add_term(c * std::sin(phi), {ModePower{mode_a, 1, 0}, ModePower{mode_b, 1, 0}});
    g.add_term(c * std::sin(phi), {ModePower{mode_a, 0, 1}, ModePower{mode_b, 0, 1}});
    return quadratic_evolution(state, g, 1.0);
}

GaussianState controlled_phase(const GaussianState& state, int mode_a, int mode_b, double s) {
    auto g = mode_poly(state.n_modes);
    g.add_term(s, {ModePower{mode_a, 1, 0}, ModePower{mode_b, 1, 0}});
    return quadratic_evolution(state, g, 1.0);
}

GaussianState controlled_x(const GaussianState& state, int mode_a, int mode_b, double s) {
    auto g = mode_poly(state.n_modes);
    g.add_term(s, {ModePower{mode_a, 1, 0}, ModePower{mode_b, 0, 1}});
    return quadratic_evolution(state, g, 1.0);
}

GaussianState shear(const GaussianState& state, int mode, double beta) {
    auto g = mode_poly(state.n_modes);
    g.add_term(1.0, {ModePower{mode, 0, 2}});
    return quadratic_evolution(state, g, beta);
}

namespace {

/// Factor L with L L^T = cov, eigenvalues clamped from below.
RMatrix sampling_factor(const RMatrix& cov, double clamp, bool reject_negative) {
    Eigen::SelfAdjointEigenSolver<RMatrix> es(cov);
    RVector lam = es.eigenvalues();
    const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
    if (reject_negative && lam.minCoeff() < -1e-9 * scale)
        throw SimulationError("numerical-state-corruption: sampling covariance not PSD");
    for (Eigen::Index i = 0; i < lam.size(); ++i) lam(i) = std::sqrt(std::max(lam(i), clamp));
    return es.eigenvectors() * lam.asDiagonal();
}

}  // namespace

RMatrix heterodyne_sample(const GaussianState& state, int n_shots, Rng& rng) {
    validate_state(state);
    const Eigen::Index d = state.dim();
    RMatrix noisy = state.cov + (state.conv.hbar / 2.0) * RMatrix::Identity(d, d);
    const RMatrix l = sampling_factor(noisy, 1e-12, true);
    RMatrix out(n_shots, d);
    for (int k = 0; k < n_shots; ++k)
        out.row(k) = (state.mean + l * rng.normal_vector(d)).transpose();
    return out;
}

RVector homodyne_sample(const GaussianState& state, Quadrature quad, int mode, int n_shots,
                        Rng& rng) {
    if (mode < 0 || mode >= state.n_modes) throw DimensionError("mode out of range");
    const Eigen::Index i = 2 * mode + (quad == Quadrature::P ? 1 : 0);
    const double sd = std::sqrt(std::max(state.cov(i, i), 1e-12));
    RVector out(n_shots);
    for (int k = 0; k < n_shots; ++k) out(k) = state.mean(i) + sd * rng.normal();
    return out;
}

RMatrix homodyne_sample_joint(const GaussianState& state, Quadrature quad, int n_shots, Rng& rng) {
    const int n = state.n_modes;
    const int off = quad == Quadrature::P ? 1 : 0;
    RMatrix block(n, n);
    RVector mu(n);
    for (int i = 0; i < n; ++i) {
        mu(i) = state.mean(2 * i + off);
        for (int j = 0; j < n; ++j) block(i, j) = state.cov(2 * i + off, 2 * j + off);
    }
    const RMatrix l = sampling_factor(block, 1e-12, false);
    RMatrix out(n_shots, n);
    for (int k = 0; k < n_shots; ++k) out.row(k) = (mu + l * rng.normal_vector(n)).transpose();
    return out;
}

namespace {

double central_moment(const std::vector<int>& idx, const RMatrix& cov) {
    switch (idx.size()) {
        case 0:
            return 1.0;
        case 2:
            return cov(idx[0], idx[1]);
        case 4:
            return cov(idx[0], idx[1]) * cov(idx[2], idx[3]) +
                   cov(idx[0], idx[2]) * cov(idx[1], idx[3]) +
                   cov(idx[0], idx[3]) * cov(idx[1], idx[2]);
        default:
            return 0.0;  // odd central moments vanish
    }
}

}  // namespace

double expectation(const GaussianState& state, const QuadraturePolynomial& poly) {
    if (poly.total_degree() > 4)
        throw EncodingError("unsupported: moment formulas limited to degree 4; use sampling");
    double acc = 0.0;
    for (const auto& term : poly.terms()) {
        std::vector<int> idx;
        for (const auto& f : term.factors) {
            for (int k = 0; k < f.x_pow; ++k) idx.push_back(2 * f.mode);
            for (int k = 0; k < f.p_pow; ++k) idx.push_back(2 * f.mode + 1);
        }
        const int k = static_cast<int>(idx.size());
        double e = 0.0;
        for (unsigned mask = 0; mask < (1u << k); ++mask) {
            double mu_prod = 1.0;
            std::vector<int> delta;
            for (int b = 0; b < k; ++b) {
                if (mask & (1u << b))
                    delta.push_back(idx[b]);
                else
                    mu_prod *= state.mean(idx[b]);
            }
            e += mu_prod * central_moment(delta, state.cov);
        }
        acc += term.coeff * e;
    }
    return acc;
}

RVector symplectic_eigenvalues(const GaussianState& state) {
    const RMatrix omega = symplectic_form(state.n_modes);
    CMatrix m = Complex(0.0, 1.0) * (omega * state.cov).cast<Complex>();
    Eigen::ComplexEigenSolver<CMatrix> es(m);
    std::vector<double> vals;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double re = es.eigenvalues()(i).real();
        if (re > 0.0) vals.push_back(re);
    }
    std::sort(vals.begin(), vals.end());
    RVector out(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) out(static_cast<Eigen::Index>(i)) = vals[i];
    return out;
}

}  // namespace ccv::gaussian
