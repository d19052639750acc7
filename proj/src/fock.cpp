#include "ccv/fock.hpp"

#include <algorithm>
#include <cmath>

namespace ccv {

namespace gate {

GateSpec displacement(int mode, Complex alpha) { return {GateKind::Displacement, {alpha}, {mode}}; }
GateSpec squeezing(int mode, double r) { return {GateKind::Squeezing, {Complex(r, 0)}, {mode}}; }
GateSpec rotation(int mode, double theta) { return {GateKind::Rotation, {Complex(theta, 0)}, {mode}}; }
GateSpec beamsplitter(int mode_a, int mode_b, double theta, double phi) {
    return {GateKind::Beamsplitter, {Complex(theta, 0), Complex(phi, 0)}, {mode_a, mode_b}};
}
GateSpec kerr(int mode, double kappa) { return {GateKind::Kerr, {Complex(kappa, 0)}, {mode}}; }
GateSpec cubic_phase(int mode, double gamma) {
    return {GateKind::CubicPhase, {Complex(gamma, 0)}, {mode}};
}
GateSpec controlled_phase(int mode_a, int mode_b, double s) {
    return {GateKind::ControlledPhase, {Complex(s, 0)}, {mode_a, mode_b}};
}
GateSpec controlled_x(int mode_a, int mode_b, double s) {
    return {GateKind::ControlledX, {Complex(s, 0)}, {mode_a, mode_b}};
}

}  // namespace gate

namespace fock {

namespace {

constexpr Eigen::Index kMaxDim = Eigen::Index(1) << 22;

void validate_dims(int n_modes, int cutoff) {
    if (n_modes < 1) throw DimensionError("n_modes must be >= 1");
    if (cutoff < 2) throw DimensionError("invalid-cutoff: Fock cutoff must be >= 2");
    Eigen::Index dim = 1;
    for (int i = 0; i < n_modes; ++i) {
        dim *= cutoff;
        if (dim > kMaxDim) throw DimensionError("Hilbert space exceeds the memory budget");
    }
}

int arity(GateKind kind) {
    switch (kind) {
        case GateKind::Beamsplitter:
        case GateKind::ControlledPhase:
        case GateKind::ControlledX:
            return 2;
        default:
            return 1;
    }
}

void validate_gate(const GateSpec& spec, int n_modes) {
    const int want = arity(spec.kind);
    if (static_cast<int>(spec.modes.size()) != want)
        throw DimensionError("gate mode arity mismatch");
    const std::size_t want_params = spec.kind == GateKind::Beamsplitter ? 2 : 1;
    if (spec.params.size() != want_params) throw DimensionError("gate parameter arity mismatch");
    for (int m : spec.modes)
        if (m < 0 || m >= n_modes) throw DimensionError("gate mode index out of range");
    if (want == 2 && spec.modes[0] == spec.modes[1])
        throw DimensionError("gate modes must be distinct");
}

/// Generator polynomial with gate modes remapped through `mode_of`.
QuadraturePolynomial generator_impl(const GateSpec& spec, int n_modes,
                                    const std::vector<int>& mode_of,
                                    const HbarConvention& conv) {
    QuadraturePolynomial g(n_modes);
    const double hbar = conv.hbar;
    switch (spec.kind) {
        case GateKind::Displacement: {
            const Complex alpha = spec.params[0];
            const double rt = std::sqrt(hbar);
            g.add_term(-alpha.imag() / rt, {ModePower{mode_of[0], 1, 0}});
            g.add_term(alpha.real() / rt, {ModePower{mode_of[0], 0, 1}});
            break;
        }
        case GateKind::Squeezing:
            g.add_term(-spec.params[0].real() / hbar, {ModePower{mode_of[0], 1, 1}});
            break;
        case GateKind::Rotation: {
            const double theta = spec.params[0].real();
            g.add_term(theta / (2.0 * hbar), {ModePower{mode_of[0], 2, 0}});
            g.add_term(theta / (2.0 * hbar), {ModePower{mode_of[0], 0, 2}});
            g.add_constant(-theta / 2.0);
            break;
        }
        case GateKind::Beamsplitter: {
            const double theta = spec.params[0].real();
            const double phi = spec.params[1].real();
            const double c = theta / hbar;
            const int a = mode_of[0], b = mode_of[1];
            g.add_term(c * std::cos(phi), {ModePower{a, 1, 0}, ModePower{b, 0, 1}});
            g.add_term(-c * std::cos(phi), {ModePower{a, 0, 1}, ModePower{b, 1, 0}});
            g.add_term(c * std::sin(phi), {ModePower{a, 1, 0}, ModePower{b, 1, 0}});
            g.add_term(c * std::sin(phi), {ModePower{a, 0, 1}, ModePower{b, 0, 1}});
            break;
        }
        case GateKind::CubicPhase:
            g.add_term(spec.params[0].real(), {ModePower{mode_of[0], 3, 0}});
            break;
        case GateKind::ControlledPhase:
            g.add_term(spec.params[0].real(), {ModePower{mode_of[0], 1, 0}, ModePower{mode_of[1], 1, 0}});
            break;
        case GateKind::ControlledX:
            g.add_term(spec.params[0].real(), {ModePower{mode_of[0], 1, 0}, ModePower{mode_of[1], 0, 1}});
            break;
        case GateKind::Kerr:
            throw EncodingError("Kerr generator is kappa*(a^dag a)^2, applied diagonally");
    }
    return g;
}

FockState finish_operation(FockState out) {
    const double n = out.norm();
    out.cumulative_trunc_loss += std::abs(1.0 - n);
    if (n <= 0.0) throw SimulationError("state collapsed to zero norm");
    out.amplitudes /= n;
    for (int m = 0; m < out.n_modes; ++m)
        if (top_level_population(out, m) > 1e-6) out.cutoff_warning = true;
    return out;
}

}  // namespace

FockState vacuum_state(int n_modes, int cutoff, const HbarConvention& conv) {
    validate_dims(n_modes, cutoff);
    FockState s;
    s.n_modes = n_modes;
    s.cutoff = cutoff;
    s.conv = conv;
    s.amplitudes = CVector::Zero(ipow(cutoff, n_modes));
    s.amplitudes(0) = 1.0;
    return s;
}

QuadraturePolynomial gate_generator(const GateSpec& spec, int n_modes,
                                    const HbarConvention& conv) {
    validate_gate(spec, n_modes);
    return generator_impl(spec, n_modes, spec.modes, conv);
}

CVector apply_single_mode(const CVector& amps, const CMatrix& op, int mode, int n_modes,
                          int cutoff) {
    const Eigen::Index pre = ipow(cutoff, mode);
    const Eigen::Index post = ipow(cutoff, n_modes - 1 - mode);
    const Eigen::Index d = cutoff;
    CVector out(amps.size());
    for (Eigen::Index i = 0; i < pre; ++i) {
        // block of shape (d, post) starting at i*d*post, row-major in (m, post)
        Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
            block(amps.data() + i * d * post, d, post);
        Eigen::Map<Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
            oblock(out.data() + i * d * post, d, post);
        oblock = op * block;
    }
    return out;
}

CVector apply_two_mode(const CVector& amps, const CMatrix& op, int mode_a, int mode_b, int n_modes,
                       int cutoff) {
    const int a = std::min(mode_a, mode_b);
    const int b = std::max(mode_a, mode_b);
    const Eigen::Index d = cutoff;
    const Eigen::Index pre = ipow(cutoff, a);
    const Eigen::Index mid = ipow(cutoff, b - a - 1);
    const Eigen::Index post = ipow(cutoff, n_modes - 1 - b);
    // op is indexed by (na*d + nb) in the caller's (mode_a, mode_b) order
    const bool swapped = mode_a > mode_b;
    CVector out(amps.size());
    CVector vec(d * d), res(d * d);
    for (Eigen::Index ip = 0; ip < pre; ++ip)
        for (Eigen::Index im = 0; im < mid; ++im)
            for (Eigen::Index io = 0; io < post; ++io) {
                for (Eigen::Index na = 0; na < d; ++na)
                    for (Eigen::Index nb = 0; nb < d; ++nb) {
                        const Eigen::Index flat =
                            (((ip * d + na) * mid + im) * d + nb) * post + io;
                        const Eigen::Index local = swapped ? nb * d + na : na * d + nb;
                        vec(local) = amps(flat);
                    }
                res = op * vec;
                for (Eigen::Index na = 0; na < d; ++na)
                    for (Eigen::Index nb = 0; nb < d; ++nb) {
                        const Eigen::Index flat =
                            (((ip * d + na) * mid + im) * d + nb) * post + io;
                        const Eigen::Index local = swapped ? nb * d + na : na * d + nb;
                        out(flat) = res(local);
                    }
            }
    return out;
}

CVector apply_passive_beamsplitter(const CVector& amps, int mode_a, int mode_b, double theta,
                                   double phi, int n_modes, int cutoff) {
    // The generator -i theta (e^{i phi} a^dag b - e^{-i phi} a b^dag), the
    // ladder form of the quadrature generator, conserves the pair's total
    // photon number; exponentiate sector by sector.
    const Eigen::Index d = cutoff;
    std::vector<CMatrix> sector_u(2 * cutoff - 1);
    for (int total = 0; total <= 2 * (cutoff - 1); ++total) {
        const int lo = std::max(0, total - (cutoff - 1));
        const int hi = std::min(total, cutoff - 1);
        const int width = hi - lo + 1;
        CMatrix g = CMatrix::Zero(width, width);
        for (int na = lo; na < hi; ++na) {
            const int nb = total - na;  // raising a: (na, nb) -> (na+1, nb-1)
            const Complex val =
                Complex(0, -theta) * std::exp(Complex(0, phi)) * std::sqrt((na + 1.0) * nb);
            g(na + 1 - lo, na - lo) = val;
            g(na - lo, na + 1 - lo) = std::conj(val);
        }
        sector_u[total] = ops::hermitian_evolution_operator(g, 1.0);
    }

    const int a = std::min(mode_a, mode_b);
    const int b = std::max(mode_a, mode_b);
    const bool swapped = mode_a > mode_b;
    const Eigen::Index pre = ipow(cutoff, a);
    const Eigen::Index mid = ipow(cutoff, b - a - 1);
    const Eigen::Index post = ipow(cutoff, n_modes - 1 - b);
    CVector out = CVector::Zero(amps.size());
    for (Eigen::Index ip = 0; ip < pre; ++ip)
        for (Eigen::Index im = 0; im < mid; ++im)
            for (Eigen::Index io = 0; io < post; ++io) {
                const auto flat_of = [&](Eigen::Index na, Eigen::Index nb) {
                    const Eigen::Index fa = swapped ? nb : na;
                    const Eigen::Index fb = swapped ? na : nb;
                    return (((ip * d + fa) * mid + im) * d + fb) * post + io;
                };
                for (int total = 0; total <= 2 * (cutoff - 1); ++total) {
                    const int lo = std::max(0, total - (cutoff - 1));
                    const int hi = std::min(total, cutoff - 1);
                    const int width = hi - lo + 1;
                    CVector vec(width);
                    for (int na = lo; na <= hi; ++na) vec(na - lo) = amps(flat_of(na, total - na));
                    vec = sector_u[total] * vec;
                    for (int na = lo; na <= hi; ++na) out(flat_of(na, total - na)) = vec(na - lo);
                }
            }
    return out;
}

FockState apply_gate(const FockState& state, const GateSpec& spec) {
    validate_gate(spec, state.n_modes);
    const int d = state.cutoff;
    FockState out = state;

    if (spec.kind == GateKind::Beamsplitter) {
        out.amplitudes =
            apply_passive_beamsplitter(state.amplitudes, spec.modes[0], spec.modes[1],
                                       spec.params[0].real(), spec.params[1].real(),
                                       state.n_modes, d);
        return finish_operation(std::move(out));
    }

    if (spec.kind == GateKind::ControlledPhase || spec.kind == GateKind::ControlledX) {
        const FockEvolver ev(gate_generator(spec, state.n_modes, state.conv), d, state.conv);
        return ev.apply(state, 1.0);
    }

    if (spec.kind == GateKind::Rotation || spec.kind == GateKind::Kerr) {
        // number-diagonal gates apply as exact phases
        const double par = spec.params[0].real();
        CVector phases(d);
        for (int n = 0; n < d; ++n) {
            const double gen = spec.kind == GateKind::Rotation
                                   ? par * n
                                   : par * static_cast<double>(n) * static_cast<double>(n);
            phases(n) = std::exp(Complex(0.0, -gen));
        }
        out.amplitudes = apply_single_mode(state.amplitudes, CMatrix(phases.asDiagonal()),
                                           spec.modes[0], state.n_modes, d);
        return finish_operation(std::move(out));
    }

    // remaining kinds are single-mode: Displacement, Squeezing, CubicPhase
    GateSpec local = spec;
    local.modes = {0};
    const QuadraturePolynomial g = generator_impl(local, 1, local.modes, state.conv);
    const CMatrix h = ops::hamiltonian_matrix(g, d, state.conv);
    const CMatrix u = ops::hermitian_evolution_operator(h, 1.0);
    out.amplitudes = apply_single_mode(state.amplitudes, u, spec.modes[0], state.n_modes, d);
    return finish_operation(std::move(out));
}

FockState evolve(const FockState& state, const CMatrix& h, double t) {
    if (h.rows() != state.dim() || h.cols() != state.dim())
        throw DimensionError("evolve: Hamiltonian dimension mismatch");
    FockState out = state;
    const CMatrix u = ops::hermitian_evolution_operator(h, t);
    out.amplitudes = u * state.amplitudes;
    return finish_operation(std::move(out));
}

double expectation(const FockState& state, const CMatrix& h) {
    if (h.rows() != state.dim() || h.cols() != state.dim())
        throw DimensionError("expectation: dimension mismatch");
    const Complex v = state.amplitudes.dot(h * state.amplitudes);
    const double scale = std::max(1.0, std::abs(v));
    if (std::abs(v.imag()) > 1e-10 * scale)
        throw SimulationError("expectation has a non-negligible imaginary part");
    return v.real();
}

CMatrix reduced_density(const FockState& state, int mode) {
    if (mode < 0 || mode >= state.n_modes) throw DimensionError("mode out of range");
    const Eigen::Index d = state.cutoff;
    const Eigen::Index pre = ipow(state.cutoff, mode);
    const Eigen::Index post = ipow(state.cutoff, state.n_modes - 1 - mode);
    CMatrix rho = CMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < pre; ++i) {
        Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
            block(state.amplitudes.data() + i * d * post, d, post);
        rho += block * block.adjoint();
    }
    return rho;
}

RVector fock_probabilities(const FockState& state, int mode) {
    return reduced_density(state, mode).diagonal().real();
}

double top_level_population(const FockState& state, int mode) {
    return fock_probabilities(state, mode)(state.cutoff - 1);
}

RVector homodyne_grid(int cutoff, const HbarConvention& conv) {
    const double h = conv.hbar;
    const double l =
        std::max(6.0 * std::sqrt(h / 2.0), 4.0 * std::sqrt(h * (2.0 * cutoff + 1.0) / 2.0));
    const int n = 4096;
    RVector grid(n);
    for (int i = 0; i < n; ++i) grid(i) = -l + 2.0 * l * i / (n - 1.0);
    return grid;
}

RMatrix hermite_functions(int cutoff, const RVector& grid, const HbarConvention& conv) {
    const Eigen::Index g = grid.size();
    RMatrix phi(g, cutoff);
    const double hbar = conv.hbar;
    const double norm0 = std::pow(M_PI * hbar, -0.25);
    for (Eigen::Index i = 0; i < g; ++i) {
        const double u = grid(i) / std::sqrt(hbar);
        phi(i, 0) = norm0 * std::exp(-0.5 * u * u);
        if (cutoff > 1) phi(i, 1) = std::sqrt(2.0) * u * phi(i, 0);
        for (int n = 1; n + 1 < cutoff; ++n)
            phi(i, n + 1) = std::sqrt(2.0 / (n + 1.0)) * u * phi(i, n) -
                            std::sqrt(n / (n + 1.0)) * phi(i, n - 1);
    }
    return phi;
}

namespace {

/// (-i)^n for integer n.
Complex neg_i_pow(int n) {
    switch (((n % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, -1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, 1.0};
    }
}

/// Tabulated density of a single-mode density matrix on the given grid; for
/// the P quadrature the momentum-representation phases (-i)^n are folded in.
RVector density_from_rho(const CMatrix& rho, Quadrature quad, const RMatrix& phi) {
    CMatrix r = rho;
    if (quad == Quadrature::P) {
        const Eigen::Index d = rho.rows();
        CVector ph(d);
        for (Eigen::Index n = 0; n < d; ++n) ph(n) = neg_i_pow(static_cast<int>(n));
        r = ph.asDiagonal() * r * ph.asDiagonal().toDenseMatrix().adjoint();
    }
    const CMatrix t = phi.cast<Complex>() * r;
    RVector dens = (t.array() * phi.cast<Complex>().array()).rowwise().sum().real();
    return dens.cwiseMax(0.0);
}

struct CdfSampler {
    RVector grid;
    RVector cdf;     // unnormalized cumulative weights
    double mass = 0.0;

    CdfSampler(const RVector& g, const RVector& density, bool check_mass) : grid(g) {
        const double h = g(1) - g(0);
        cdf.resize(g.size());
        double acc = 0.0;
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            acc += density(i) * h;
            cdf(i) = acc;
        }
        mass = acc;
        if (check_mass && mass < 1.0 - 1e-4)
            throw SimulationError("grid-too-small: probability mass escapes the sampling grid");
        if (mass <= 0.0) throw SimulationError("degenerate homodyne density");
    }

    double draw(Rng& rng) const {
        const double u = rng.uniform() * mass;
        Eigen::Index lo = 0, hi = cdf.size() - 1;
        while (lo < hi) {
            const Eigen::Index midpt = (lo + hi) / 2;
            if (cdf(midpt) < u)
                lo = midpt + 1;
            else
                hi = midpt;
        }
        const double prev = lo > 0 ? cdf(lo - 1) : 0.0;
        const double w = cdf(lo) - prev;
        const double h = grid(1) - grid(0);
        // each grid point's mass covers the midpoint-centered bin
        const double frac = w > 0.0 ? (u - prev) / w : 0.5;
        return grid(lo) + h * (frac - 0.5);
    }
};

}  // namespace

RVector marginal_density(const FockState& state, Quadrature quad, int mode, const RVector& grid) {
    const RMatrix phi = hermite_functions(state.cutoff, grid, state.conv);
    return density_from_rho(reduced_density(state, mode), quad, phi);
}

RVector homodyne_sample(const FockState& state, Quadrature quad, int mode, int n_shots, Rng& rng) {
    const RVector grid = homodyne_grid(state.cutoff, state.conv);
    const RVector dens = marginal_density(state, quad, mode, grid);
    CdfSampler sampler(grid, dens, true);
    RVector out(n_shots);
    for (int k = 0; k < n_shots; ++k) out(k) = sampler.draw(rng);
    return out;
}

RVector homodyne_sample(const FockState& state, Quadrature quad, int mode, int n_shots,
                        std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    return homodyne_sample(state, quad, mode, n_shots, rng);
}

RMatrix homodyne_sample_joint(const FockState& state, Quadrature quad, int n_shots, Rng& rng) {
    const int n = state.n_modes;
    const Eigen::Index d = state.cutoff;
    const RVector grid = homodyne_grid(state.cutoff, state.conv);
    const RMatrix phi = hermite_functions(state.cutoff, grid, state.conv);

    CVector base = state.amplitudes;
    if (quad == Quadrature::P) {
        // joint momentum representation: phase (-i)^{total photon number}
        for (Eigen::Index flat = 0; flat < base.size(); ++flat) {
            Eigen::Index rest = flat;
            int total = 0;
            for (int m = 0; m < n; ++m) {
                const Eigen::Index div = ipow(d, n - 1 - m);
                total += static_cast<int>(rest / div);
                rest %= div;
            }
            base(flat) *= neg_i_pow(total);
        }
    }

    RMatrix samples(n_shots, n);
    // mode 0's marginal does not depend on the shot
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        first(base.data(), d, base.size() / d);
    const CMatrix rho0 = first * first.adjoint();
    CdfSampler sampler0(grid, density_from_rho(rho0, Quadrature::X, phi), true);

    // Hermite values at a sampled point, by the same recurrence as the table
    const auto phi_at = [&](double xval) {
        RVector v(d);
        const double u = xval / std::sqrt(state.conv.hbar);
        v(0) = std::pow(M_PI * state.conv.hbar, -0.25) * std::exp(-0.5 * u * u);
        if (d > 1) v(1) = std::sqrt(2.0) * u * v(0);
        for (Eigen::Index k = 1; k + 1 < d; ++k)
            v(k + 1) = std::sqrt(2.0 / (k + 1.0)) * u * v(k) - std::sqrt(k / (k + 1.0)) * v(k - 1);
        return v;
    };

    for (int shot = 0; shot < n_shots; ++shot) {
        CVector cur = base;
        for (int mode = 0; mode < n; ++mode) {
            const Eigen::Index rest = cur.size() / d;
            Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                           Eigen::RowMajor>>
                mat(cur.data(), d, rest);
            double xval;
            if (mode == 0) {
                xval = sampler0.draw(rng);
            } else {
                const CMatrix rho = mat * mat.adjoint();
                CdfSampler sampler(grid, density_from_rho(rho, Quadrature::X, phi), false);
                xval = sampler.draw(rng);
            }
            samples(shot, mode) = xval;
            if (mode + 1 < n) {
                const RVector pv = phi_at(xval);
                CVector next = CVector::Zero(rest);
                for (Eigen::Index m = 0; m < d; ++m) next += pv(m) * mat.row(m).transpose();
                cur = next;
            }
        }
    }
    return samples;
}

std::pair<RVector, RMatrix> quadrature_moments(const FockState& state) {
    const int n = state.n_modes;
    auto [x, p] = ops::quadrature_operators(state.cutoff, state.conv);
    std::vector<CVector> applied(2 * n);
    for (int m = 0; m < n; ++m) {
        applied[2 * m] = apply_single_mode(state.amplitudes, x, m, n, state.cutoff);
        applied[2 * m + 1] = apply_single_mode(state.amplitudes, p, m, n, state.cutoff);
    }
    RVector mean(2 * n);
    for (int a = 0; a < 2 * n; ++a) mean(a) = state.amplitudes.dot(applied[a]).real();
    RMatrix cov(2 * n, 2 * n);
    for (int a = 0; a < 2 * n; ++a)
        for (int b = a; b < 2 * n; ++b) {
            const double sym = applied[a].dot(applied[b]).real();
            cov(a, b) = cov(b, a) = sym - mean(a) * mean(b);
        }
    return {mean, cov};
}

FockEvolver::FockEvolver(const QuadraturePolynomial& poly, int cutoff, const HbarConvention& conv)
    : poly_(poly), cutoff_(cutoff), conv_(conv) {
    validate_dims(poly.n_modes(), cutoff);
    const int n = poly.n_modes();
    if (poly.mode_separable()) {
        strategy_ = Strategy::Separable;
        per_mode_.resize(n);
        std::vector<QuadraturePolynomial> mode_polys(n, QuadraturePolynomial(1));
        std::vector<bool> active(n, false);
        for (const auto& term : poly.terms()) {
            if (term.factors.empty()) continue;  // constants are a global phase
            const auto& f = term.factors.front();
            mode_polys[f.mode].add_term(term.coeff, {ModePower{0, f.x_pow, f.p_pow}});
            active[f.mode] = true;
        }
        for (int m = 0; m < n; ++m) {
            if (!active[m]) continue;
            Eigen::SelfAdjointEigenSolver<CMatrix> es(
                ops::hamiltonian_matrix(mode_polys[m], cutoff, conv));
            per_mode_[m] = ModeSpectral{es.eigenvectors(), es.eigenvalues(), true};
        }
        return;
    }

    // per-mode quadrature usage: 0 = x only, 1 = p only, -1 = unused, 2 = mixed
    mode_basis_.assign(n, -1);
    for (const auto& term : poly.terms())
        for (const auto& f : term.factors) {
            int use = f.x_pow > 0 ? (f.p_pow > 0 ? 2 : 0) : (f.p_pow > 0 ? 1 : -1);
            if (use == -1) continue;
            if (mode_basis_[f.mode] == -1)
                mode_basis_[f.mode] = use;
            else if (mode_basis_[f.mode] != use)
                mode_basis_[f.mode] = 2;
        }
    const bool mixed =
        std::any_of(mode_basis_.begin(), mode_basis_.end(), [](int b) { return b == 2; });

    if (!mixed) {
        strategy_ = Strategy::QuadBasis;
        auto [x, p] = ops::quadrature_operators(cutoff, conv);
        Eigen::SelfAdjointEigenSolver<CMatrix> ex(x), ep(p);
        x_vectors_ = ex.eigenvectors();
        p_vectors_ = ep.eigenvectors();
        // x and p share their spectrum; use the x eigenvalues for both
        const RVector lam = ex.eigenvalues();
        const Eigen::Index dim = ipow(cutoff, n);
        diag_values_.resize(dim);
        std::vector<double> xs(n, 0.0), ps(n, 0.0);
        for (Eigen::Index flat = 0; flat < dim; ++flat) {
            Eigen::Index rest = flat;
            for (int m = 0; m < n; ++m) {
                const Eigen::Index div = ipow(cutoff, n - 1 - m);
                const double lam_m = lam(rest / div);
                rest %= div;
                xs[m] = mode_basis_[m] == 0 ? lam_m : 0.0;
                ps[m] = mode_basis_[m] == 1 ? lam_m : 0.0;
            }
            diag_values_(flat) = poly.evaluate(xs, ps);
        }
        return;
    }
    strategy_ = Strategy::Dense;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(ops::hamiltonian_matrix(poly, cutoff, conv));
    dense_vectors_ = es.eigenvectors();
    dense_values_ = es.eigenvalues();
}

CMatrix FockEvolver::hamiltonian() const {
    return ops::hamiltonian_matrix(poly_, cutoff_, conv_);
}

FockState FockEvolver::apply(const FockState& state, double t) const {
    if (state.n_modes != poly_.n_modes() || state.cutoff != cutoff_)
        throw DimensionError("FockEvolver: state dimensions mismatch");
    FockState out = state;
    const Eigen::Index d = cutoff_;
    switch (strategy_) {
        case Strategy::Separable: {
            for (int m = 0; m < state.n_modes; ++m) {
                if (!per_mode_[m].active) continue;
                const auto& sp = per_mode_[m];
                CVector phases(d);
                for (Eigen::Index k = 0; k < d; ++k)
                    phases(k) = std::exp(Complex(0.0, -sp.values(k) * t));
                const CMatrix u = sp.vectors * phases.asDiagonal() * sp.vectors.adjoint();
                out.amplitudes = apply_single_mode(out.amplitudes, u, m, state.n_modes, cutoff_);
            }
            break;
        }
        case Strategy::QuadBasis: {
            for (int m = 0; m < state.n_modes; ++m) {
                if (mode_basis_[m] < 0) continue;
                const CMatrix& basis = mode_basis_[m] == 0 ? x_vectors_ : p_vectors_;
                out.amplitudes = apply_single_mode(out.amplitudes, CMatrix(basis.adjoint()), m,
                                                   state.n_modes, cutoff_);
            }
            for (Eigen::Index flat = 0; flat < out.amplitudes.size(); ++flat)
                out.amplitudes(flat) *= std::exp(Complex(0.0, -diag_values_(flat) * t));
            for (int m = 0; m < state.n_modes; ++m) {
                if (mode_basis_[m] < 0) continue;
                const CMatrix& basis = mode_basis_[m] == 0 ? x_vectors_ : p_vectors_;
                out.amplitudes =
                    apply_single_mode(out.amplitudes, basis, m, state.n_modes, cutoff_);
            }
            break;
        }
        case Strategy::Dense: {
            CVector w = dense_vectors_.adjoint() * out.amplitudes;
            for (Eigen::Index k = 0; k < w.size(); ++k)
                w(k) *= std::exp(Complex(0.0, -dense_values_(k) * t));
            out.amplitudes = dense_vectors_ * w;
            break;
        }
    }
    return finish_operation(std::move(out));
}

}  // namespace fock
}  // namespace ccv
