#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ccv/fock.hpp"
#include "ccv/gaussian.hpp"

using namespace ccv;
using namespace ccv::fock;

namespace {

const HbarConvention conv(2.0);

double var_of(const RVector& v) {
    const double m = v.mean();
    return (v.array() - m).square().mean();
}

/// Kolmogorov-Smirnov statistic of samples against a tabulated CDF.
double ks_statistic(RVector samples, const RVector& grid, const RVector& density) {
    std::sort(samples.data(), samples.data() + samples.size());
    const double h = grid(1) - grid(0);
    RVector cdf(grid.size());
    double acc = 0.0;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        acc += density(i) * h;
        cdf(i) = acc;
    }
    cdf /= acc;
    double worst = 0.0;
    for (Eigen::Index k = 0; k < samples.size(); ++k) {
        const double ecdf = (k + 1.0) / static_cast<double>(samples.size());
        // locate sample in the grid
        const Eigen::Index idx = std::min<Eigen::Index>(
            grid.size() - 1,
            std::max<Eigen::Index>(0, static_cast<Eigen::Index>((samples(k) - grid(0)) / h)));
        worst = std::max(worst, std::abs(ecdf - cdf(idx)));
    }
    return worst;
}

}  // namespace

TEST_CASE("vacuum state basics") {
    const auto v = vacuum_state(1, 4, conv);
    CHECK(v.amplitudes(0) == Complex(1, 0));
    CHECK(v.amplitudes.tail(3).norm() == 0.0);
    const auto v2 = vacuum_state(2, 2, conv);
    CHECK(v2.amplitudes(0) == Complex(1, 0));
    // <N> of vacuum = 0
    CHECK(fock_probabilities(v, 0)(0) == doctest::Approx(1.0));
}

TEST_CASE("squeezed vacuum photon statistics") {
    const int d = 30;
    const auto s = apply_gate(vacuum_state(1, d, conv), gate::squeezing(0, 0.5));
    const RVector probs = fock_probabilities(s, 0);
    double n_mean = 0.0, n2 = 0.0;
    for (int n = 0; n < d; ++n) {
        n_mean += n * probs(n);
        n2 += double(n) * n * probs(n);
    }
    const double sh2 = std::sinh(0.5) * std::sinh(0.5);
    CHECK(n_mean == doctest::Approx(sh2).epsilon(1e-6));
    CHECK(n2 - n_mean * n_mean == doctest::Approx(2.0 * sh2 * (sh2 + 1.0)).epsilon(1e-6));
    // two-photon structure: odd entries vanish
    for (int n = 1; n < d; n += 2) CHECK(probs(n) < 1e-15);
}

TEST_CASE("rotation leaves vacuum invariant; displacement inverts") {
    const auto v = vacuum_state(1, 25, conv);
    const auto r = apply_gate(v, gate::rotation(0, 0.7));
    CHECK(std::abs(std::abs(r.amplitudes.dot(v.amplitudes)) - 1.0) < 1e-12);

    const Complex alpha(1.1, -0.4);
    auto s = apply_gate(v, gate::displacement(0, alpha));
    s = apply_gate(s, gate::displacement(0, -alpha));
    CHECK(std::abs(std::abs(s.amplitudes.dot(v.amplitudes)) - 1.0) < 1e-8);
}

TEST_CASE("coherent state photon distribution is Poisson") {
    const int d = 30;
    const Complex alpha(1.5, 0.0);
    const auto s = apply_gate(vacuum_state(1, d, conv), gate::displacement(0, alpha));
    const RVector probs = fock_probabilities(s, 0);
    const double nbar = std::norm(alpha) / 2.0;  // <a> = alpha / sqrt(2)
    for (int n = 0; n < 8; ++n) {
        const double want = std::exp(-nbar) * std::pow(nbar, n) / std::tgamma(n + 1.0);
        CHECK(probs(n) == doctest::Approx(want).epsilon(1e-4));
    }
}

TEST_CASE("evolve: identity, period, inverse") {
    const int d = 12;
    auto [x, p] = ops::quadrature_operators(d, conv);
    const CMatrix h = x * x + p * p + 0.25 * (x * x * x * x);
    auto psi = apply_gate(vacuum_state(1, d, conv), gate::displacement(0, Complex(0.6, 0.2)));

    const auto same = evolve(psi, h, 0.0);
    CHECK((same.amplitudes - psi.amplitudes).norm() < 1e-14);

    // number operator has integer spectrum: t = 2 pi is the identity up to phase
    const CMatrix n_op = ops::number_operator(d);
    const auto turn = evolve(psi, n_op, 2.0 * M_PI);
    CHECK(std::abs(std::abs(turn.amplitudes.dot(psi.amplitudes)) - 1.0) < 1e-12);

    const auto back = evolve(evolve(psi, h, 0.31), h, -0.31);
    CHECK((back.amplitudes - psi.amplitudes).norm() < 1e-9);
}

TEST_CASE("expectation examples") {
    const int d = 12;
    const auto v = vacuum_state(1, d, conv);
    auto [x, p] = ops::quadrature_operators(d, conv);
    CHECK(expectation(v, x * x + p * p) == doctest::Approx(2.0));
    CHECK(expectation(v, CMatrix::Zero(d, d)) == doctest::Approx(0.0));
    CHECK(expectation(v, CMatrix::Identity(d, d)) == doctest::Approx(1.0));
}

TEST_CASE("norm preservation and diagnostics") {
    auto s = vacuum_state(1, 30, conv);
    for (int i = 0; i < 4; ++i) s = apply_gate(s, gate::squeezing(0, 0.2));
    CHECK(std::abs(s.norm() - 1.0) < 1e-12);
    CHECK(s.cumulative_trunc_loss < 1e-8);
    CHECK_FALSE(s.cutoff_warning);
    // a hard displacement at tiny cutoff trips the cutoff-adequacy warning
    auto tight = apply_gate(vacuum_state(1, 4, conv), gate::displacement(0, Complex(2.0, 0.0)));
    CHECK(tight.cutoff_warning);
}

TEST_CASE("homodyne sampling: vacuum and squeezed statistics") {
    const int shots = 100000;
    const auto v = vacuum_state(1, 20, conv);
    const RVector xs = homodyne_sample(v, Quadrature::X, 0, shots, 42u);
    CHECK(std::abs(xs.mean()) < 3.0 * std::sqrt(1.0 / shots));
    CHECK(std::abs(var_of(xs) - conv.hbar / 2.0) < 3.0 * std::sqrt(2.0 / shots) * conv.hbar);

    // momentum-squeezed vacuum (r < 0) widens x: Var(x) = (hbar/2) e^{2|r|}
    const auto sq = apply_gate(vacuum_state(1, 30, conv), gate::squeezing(0, -0.5));
    const RVector xs2 = homodyne_sample(sq, Quadrature::X, 0, shots, 43u);
    const double want = conv.hbar / 2.0 * std::exp(1.0);
    CHECK(std::abs(var_of(xs2) - want) < 3.0 * want * std::sqrt(2.0 / shots));
    // and the conjugate quadrature narrows
    const RVector ps = homodyne_sample(sq, Quadrature::P, 0, shots, 44u);
    const double want_p = conv.hbar / 2.0 * std::exp(-1.0);
    CHECK(std::abs(var_of(ps) - want_p) < 3.0 * want_p * std::sqrt(2.0 / shots));
}

TEST_CASE("displaced vacuum sample mean matches the documented convention") {
    const auto d = apply_gate(vacuum_state(1, 40, conv), gate::displacement(0, Complex(2.0, 0.0)));
    const RVector xs = homodyne_sample(d, Quadrature::X, 0, 50000, 7u);
    // mean x = 2 sqrt(hbar/2) sqrt(2) = alpha sqrt(hbar)
    CHECK(xs.mean() == doctest::Approx(2.0 * std::sqrt(conv.hbar)).epsilon(0.01));
    // cross-check against the Gaussian backend mean
    const auto g = gaussian::displace(gaussian::vacuum(1, conv), 0, Complex(2.0, 0.0));
    CHECK(xs.mean() == doctest::Approx(g.mean(0)).epsilon(0.01));
}

TEST_CASE("homodyne empirical CDF converges (KS < 0.02 at 1e4 shots)") {
    const RVector grid = homodyne_grid(30, conv);
    for (double r : {0.0, 0.5}) {
        auto s = vacuum_state(1, 30, conv);
        if (r != 0.0) s = apply_gate(s, gate::squeezing(0, r));
        const RVector dens = marginal_density(s, Quadrature::X, 0, grid);
        Rng rng(101 + static_cast<std::uint64_t>(10 * r));
        const RVector samples = homodyne_sample(s, Quadrature::X, 0, 10000, rng);
        CHECK(ks_statistic(samples, grid, dens) < 0.02);
    }
}

TEST_CASE("joint homodyne sampling preserves cross-mode correlations") {
    // squeezed ⊗ vacuum through a beamsplitter correlates the two x's
    const int d = 25;
    auto s = apply_gate(vacuum_state(2, d, conv), gate::squeezing(0, 0.5));
    s = apply_gate(s, gate::beamsplitter(0, 1, M_PI / 4.0, 0.0));

    auto g = gaussian::squeeze(gaussian::vacuum(2, conv), 0, 0.5);
    g = gaussian::beamsplitter(g, 0, 1, M_PI / 4.0, 0.0);

    Rng rng(5);
    const RMatrix xs = homodyne_sample_joint(s, Quadrature::X, 40000, rng);
    const double c01 =
        ((xs.col(0).array() - xs.col(0).mean()) * (xs.col(1).array() - xs.col(1).mean())).mean();
    CHECK(std::abs(c01 - g.cov(0, 2)) < 0.05);
    CHECK(std::abs(c01) > 0.1);  // actually correlated
}

TEST_CASE("quadrature moments agree with the Gaussian backend on random circuits") {
    const int d = 25;
    Rng rng(2024);
    for (int trial = 0; trial < 10; ++trial) {
        const int n_modes = trial % 2 ? 2 : 1;
        auto f = vacuum_state(n_modes, d, conv);
        auto g = gaussian::vacuum(n_modes, conv);
        const int n_gates = 1 + static_cast<int>(rng.uniform() * 4);
        for (int k = 0; k < n_gates; ++k) {
            const double pick = rng.uniform();
            if (pick < 0.3) {
                const int m = static_cast<int>(rng.uniform() * n_modes);
                const Complex alpha(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
                f = apply_gate(f, gate::displacement(m, alpha));
                g = gaussian::displace(g, m, alpha);
            } else if (pick < 0.55) {
                const int m = static_cast<int>(rng.uniform() * n_modes);
                const double r = rng.uniform(-0.6, 0.6);
                f = apply_gate(f, gate::squeezing(m, r));
                g = gaussian::squeeze(g, m, r);
            } else if (pick < 0.75) {
                const int m = static_cast<int>(rng.uniform() * n_modes);
                const double th = rng.uniform(0.0, 2.0 * M_PI);
                f = apply_gate(f, gate::rotation(m, th));
                g = gaussian::rotate(g, m, th);
            } else if (n_modes == 2) {
                const double th = rng.uniform(0.0, 1.0);
                const double phi = rng.uniform(0.0, 2.0 * M_PI);
                f = apply_gate(f, gate::beamsplitter(0, 1, th, phi));
                g = gaussian::beamsplitter(g, 0, 1, th, phi);
            } else {
                const int m = static_cast<int>(rng.uniform() * n_modes);
                f = apply_gate(f, gate::rotation(m, 0.3));
                g = gaussian::rotate(g, m, 0.3);
            }
        }
        auto [mean, cov] = quadrature_moments(f);
        CAPTURE(trial);
        CHECK((mean - g.mean).cwiseAbs().maxCoeff() < 1e-3);
        CHECK((cov - g.cov).cwiseAbs().maxCoeff() < 1e-3);
    }
}

TEST_CASE("FockEvolver strategies match dense evolution") {
    const int d = 6;
    auto base = apply_gate(vacuum_state(2, d, conv), gate::squeezing(0, 0.3));
    base = apply_gate(base, gate::displacement(1, Complex(0.4, 0.1)));

    // separable, pure-x, and dense polynomials
    QuadraturePolynomial sep(2);
    sep.add_term(1.0, {ModePower{0, 2, 0}});
    sep.add_term(0.5, {ModePower{1, 0, 2}});
    QuadraturePolynomial purex(2);
    purex.add_term(1.0, {ModePower{0, 1, 0}, ModePower{1, 1, 0}});
    purex.add_term(-0.7, {ModePower{0, 1, 0}});
    QuadraturePolynomial dense(2);
    dense.add_term(1.0, {ModePower{0, 2, 0}, ModePower{1, 0, 1}});
    dense.add_term(0.3, {ModePower{0, 0, 2}});

    for (const auto& poly : {sep, purex, dense}) {
        const FockEvolver ev(poly, d, conv);
        const CMatrix h = ops::hamiltonian_matrix(poly, d, conv);
        const auto via_ev = ev.apply(base, 0.37);
        const auto via_dense = evolve(base, h, 0.37);
        CAPTURE(poly.terms().size());
        CHECK((via_ev.amplitudes - via_dense.amplitudes).norm() < 1e-10);
    }
}

TEST_CASE("two-mode contraction equals full-space application") {
    const int d = 4;
    Rng rng(77);
    auto s = vacuum_state(3, d, conv);
    CVector amps(s.dim());
    for (Eigen::Index i = 0; i < amps.size(); ++i) amps(i) = Complex(rng.normal(), rng.normal());
    amps /= amps.norm();
    // random two-mode unitary on modes (0, 2)
    CMatrix g(d * d, d * d);
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = Complex(rng.normal(), rng.normal());
    g = 0.5 * (g + CMatrix(g.adjoint())).eval();
    const CMatrix u = ops::hermitian_evolution_operator(g, 0.3);
    // full-space route: embed u on modes (0, 2) with identity on mode 1
    CMatrix full = CMatrix::Zero(s.dim(), s.dim());
    // u indexed by (n0*d + n2): expand to (n0, n1, n2) ordering
    for (int a0 = 0; a0 < d; ++a0)
        for (int a1 = 0; a1 < d; ++a1)
            for (int a2 = 0; a2 < d; ++a2)
                for (int b0 = 0; b0 < d; ++b0)
                    for (int b2 = 0; b2 < d; ++b2)
                        full((a0 * d + a1) * d + a2, (b0 * d + a1) * d + b2) =
                            u(a0 * d + a2, b0 * d + b2);
    const CVector via_full = full * amps;
    const CVector via_contract = apply_two_mode(amps, u, 0, 2, 3, d);
    CHECK((via_full - via_contract).norm() < 1e-12);
}

TEST_CASE("passive beamsplitter path equals dense evolution") {
    const int d = 6;
    auto base = apply_gate(vacuum_state(3, d, conv), gate::squeezing(0, 0.4));
    base = apply_gate(base, gate::displacement(2, Complex(0.5, -0.3)));
    for (auto [ma, mb] : std::vector<std::pair<int, int>>{{0, 2}, {2, 0}, {1, 2}}) {
        const auto spec = gate::beamsplitter(ma, mb, 0.6, 0.9);
        const CMatrix h =
            ops::hamiltonian_matrix(gate_generator(spec, 3, conv), d, conv);
        const auto dense = evolve(base, h, 1.0);
        const auto fast = apply_gate(base, spec);
        CAPTURE(ma);
        CHECK((fast.amplitudes - dense.amplitudes).norm() < 1e-11);
    }
}

TEST_CASE("controlled gates route through the quadrature-basis evolver") {
    const int d = 6;
    auto base = apply_gate(vacuum_state(2, d, conv), gate::squeezing(1, 0.3));
    for (const auto& spec : {gate::controlled_phase(0, 1, 0.4), gate::controlled_x(1, 0, -0.25)}) {
        const CMatrix h = ops::hamiltonian_matrix(gate_generator(spec, 2, conv), d, conv);
        const auto dense = evolve(base, h, 1.0);
        const auto fast = apply_gate(base, spec);
        CHECK((fast.amplitudes - dense.amplitudes).norm() < 1e-11);
    }
}

TEST_CASE("gate validation errors") {
    const auto v = vacuum_state(2, 4, conv);
    CHECK_THROWS_AS(apply_gate(v, gate::displacement(5, Complex(0, 0))), DimensionError);
    CHECK_THROWS_AS(apply_gate(v, gate::beamsplitter(1, 1, 0.3)), DimensionError);
    CHECK_THROWS_AS(gate_generator(gate::kerr(0, 0.1), 2, conv), EncodingError);
    CHECK_THROWS_AS(evolve(v, CMatrix::Identity(3, 3), 0.1), DimensionError);
    CHECK_THROWS_AS(expectation(v, CMatrix::Identity(3, 3)), DimensionError);
}
