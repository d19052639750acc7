#include <doctest.h>

#include <cmath>

#include "ccv/encoding.hpp"

using namespace ccv;
using namespace ccv::encoding;

namespace {

ComplexQuadraticProblem paper_instance(int n) {
    ComplexQuadraticProblem p;
    p.a = CMatrix::Identity(n, n);
    p.c = CVector::Constant(n, Complex(-4.0, -4.0));
    return p;
}

double complex_objective(const ComplexQuadraticProblem& p, const CVector& z) {
    const Complex quad = (z.adjoint() * p.a * z)(0, 0);
    const Complex lin = (p.c.adjoint() * z)(0, 0);
    return quad.real() + lin.real();
}

CMatrix random_hermitian(int n, Rng& rng) {
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = Complex(rng.normal(), rng.normal());
    return 0.5 * (m + CMatrix(m.adjoint()));
}

}  // namespace

TEST_CASE("norm objective becomes x^2 + p^2") {
    ComplexQuadraticProblem p;
    p.a = CMatrix::Identity(1, 1);
    p.c = CVector::Zero(1);
    const auto enc = encode_complex_quadratic(p);
    CHECK(enc.n_modes == 1);
    CHECK(enc.hamiltonian.terms().size() == 2);
    const double x[] = {1.5};
    const double pv[] = {-0.5};
    CHECK(enc.classical_cost(x, pv) == doctest::Approx(1.5 * 1.5 + 0.25));
    CHECK_FALSE(enc.hamiltonian.has_same_mode_mixed());
}

TEST_CASE("n=1 paper instance: cost and minimum") {
    const auto enc = encode_complex_quadratic(paper_instance(1));
    const double x[] = {2.0};
    const double pv[] = {2.0};
    CHECK(enc.classical_cost(x, pv) == doctest::Approx(-8.0));
    const auto oracle = classical_oracle(enc);
    CHECK(oracle.value == doctest::Approx(-8.0).epsilon(1e-9));
    CHECK(oracle.argmin(0) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(oracle.argmin(1) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("n=3 paper instance: minimum -24 at (2+2i)^3") {
    const auto enc = encode_complex_quadratic(paper_instance(3));
    const auto oracle = classical_oracle(enc);
    CHECK(oracle.value == doctest::Approx(-24.0).epsilon(1e-7));
    for (int m = 0; m < 3; ++m) {
        CHECK(oracle.argmin(2 * m) == doctest::Approx(2.0).epsilon(1e-4));
        CHECK(oracle.argmin(2 * m + 1) == doctest::Approx(2.0).epsilon(1e-4));
    }
}

TEST_CASE("encoding realness property on random Hermitian instances") {
    Rng rng(99);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 1 + trial % 3;
        ComplexQuadraticProblem p;
        p.a = random_hermitian(n, rng);
        p.c = CVector(n);
        for (int i = 0; i < n; ++i) p.c(i) = Complex(rng.normal(), rng.normal());
        const auto enc = encode_complex_quadratic(p);
        CHECK_FALSE(enc.hamiltonian.has_same_mode_mixed());
        for (int pt = 0; pt < 4; ++pt) {
            CVector z(n);
            RVector xp(2 * n);
            for (int i = 0; i < n; ++i) {
                const double xr = rng.uniform(-3, 3), pi_ = rng.uniform(-3, 3);
                z(i) = Complex(xr, pi_);
                xp(2 * i) = xr;
                xp(2 * i + 1) = pi_;
            }
            CHECK(enc.classical_cost_interleaved(xp) ==
                  doctest::Approx(complex_objective(p, z)).epsilon(1e-9));
        }
    }
}

TEST_CASE("non-Hermitian A is rejected") {
    ComplexQuadraticProblem p;
    p.a = CMatrix(2, 2);
    p.a << Complex(1, 0), Complex(1, 1), Complex(0, 0), Complex(1, 0);
    p.c = CVector::Zero(2);
    CHECK_THROWS_AS(encode_complex_quadratic(p), EncodingError);
}

TEST_CASE("baseline encoding: modes, structure and equal minima") {
    const auto prob = paper_instance(1);
    const auto base = encode_cv_baseline(prob);
    CHECK(base.n_modes == 2);
    CHECK(base.hamiltonian.pure_x());
    // x0^2 + x1^2 - 4 x0 - 4 x1
    RVector xp(4);
    xp << 2.0, 9.9, 2.0, -3.3;  // p entries must not matter
    CHECK(base.classical_cost_interleaved(xp) == doctest::Approx(-8.0));

    Rng rng(123);
    for (int trial = 0; trial < 5; ++trial) {
        ComplexQuadraticProblem p;
        const int n = 1 + trial % 2;
        p.a = random_hermitian(n, rng);
        // make it positive definite so minima exist
        p.a += (p.a.cwiseAbs().maxCoeff() * n + 0.5) * CMatrix::Identity(n, n);
        p.c = CVector(n);
        for (int i = 0; i < n; ++i) p.c(i) = Complex(rng.normal(), rng.normal());
        const auto ccv_enc = encode_complex_quadratic(p);
        const auto base_enc = encode_cv_baseline(p);
        const auto o1 = classical_oracle(ccv_enc);
        const auto o2 = classical_oracle(base_enc);
        CHECK(o1.value == doctest::Approx(o2.value).epsilon(1e-6));
    }
}

TEST_CASE("equality penalty: feasible point is free, monotone in lambda") {
    ComplexQuadraticProblem p;
    p.a = CMatrix::Identity(1, 1);
    p.c = CVector::Zero(1);
    const auto enc = encode_complex_quadratic(p);

    AffineEqualities eq;
    eq.c_mat = CMatrix::Identity(1, 1);
    eq.d = CVector::Constant(1, Complex(1.0, 1.0));  // g(z) = z - (1+i)

    CHECK_THROWS_AS(apply_equality_penalty(enc, eq, 0.0), EncodingError);
    CHECK_THROWS_AS(apply_equality_penalty(enc, eq, -1.0), EncodingError);

    const auto pen10 = apply_equality_penalty(enc, eq, 10.0);
    const double xf[] = {1.0};
    const double pf[] = {1.0};
    CHECK(pen10.classical_cost(xf, pf) == doctest::Approx(enc.classical_cost(xf, pf)));

    // infeasible point: strictly increasing in lambda
    const double xi[] = {0.0};
    const double pi_[] = {0.0};
    const auto pen20 = apply_equality_penalty(enc, eq, 20.0);
    CHECK(pen10.classical_cost(xi, pi_) > enc.classical_cost(xi, pi_));
    CHECK(pen20.classical_cost(xi, pi_) > pen10.classical_cost(xi, pi_));
}

TEST_CASE("constrained instance: oracle matches the convex closed form") {
    // objective z^H A z + lambda || B z - c ||^2 has the unique minimizer
    // (A + lambda B^H B) z = lambda B^H c; the oracle must find it
    ComplexQuadraticProblem p;
    p.a = CMatrix(2, 2);
    p.a << Complex(1, 0), Complex(0.5, -1.0), Complex(0.5, 1.0), Complex(2, 0);
    p.c = CVector::Zero(2);
    const double s10 = std::sqrt(10.0);
    AffineEqualities eq;
    eq.c_mat = (1.0 / s10) * CMatrix::Identity(2, 2);
    eq.d = CVector(2);
    eq.d << Complex(1.0 / (2.0 * s10), -s10 / 4.0), Complex(3.0 / (2.0 * s10), 1.0 / s10);

    const double lambda = 10.0;
    const auto enc = apply_equality_penalty(encode_complex_quadratic(p), eq, lambda);

    const CMatrix m = p.a + lambda * (eq.c_mat.adjoint() * eq.c_mat);
    const CVector rhs = lambda * (eq.c_mat.adjoint() * eq.d);
    const CVector zstar = m.colPivHouseholderQr().solve(rhs);
    RVector xp(4);
    xp << zstar(0).real(), zstar(0).imag(), zstar(1).real(), zstar(1).imag();
    const double direct = enc.classical_cost_interleaved(xp);

    const auto oracle = classical_oracle(enc);
    CHECK(oracle.value == doctest::Approx(direct).epsilon(1e-7));
    for (int i = 0; i < 4; ++i) CHECK(oracle.argmin(i) == doctest::Approx(xp(i)).epsilon(1e-3));
}

TEST_CASE("slack reformulation") {
    ComplexQuadraticProblem p;
    p.a = CMatrix::Identity(1, 1);
    p.c = CVector::Zero(1);
    const auto enc = encode_complex_quadratic(p);

    QuadraturePolynomial h(1);  // h = |z|^2 - 4 <= 0
    h.add_term(1.0, {ModePower{0, 2, 0}});
    h.add_term(1.0, {ModePower{0, 0, 2}});
    h.add_constant(-4.0);

    const double lambda = 5.0;
    const auto slacked = apply_slack_reformulation(enc, h, lambda);
    CHECK(slacked.n_modes == 2);
    CHECK(slacked.slack_modes == 1);

    // feasible z = 1 with s^2 = 3: zero penalty
    const double x[] = {1.0, std::sqrt(3.0)};
    const double pv[] = {0.0, 0.0};
    CHECK(slacked.classical_cost(x, pv) == doctest::Approx(1.0));

    // violated h = 1: min over s of lambda (1 + s^2)^2 = lambda at s = 0,
    // verified against a 1-D scan
    QuadraturePolynomial hconst(1);
    hconst.add_constant(1.0);
    const auto bad = apply_slack_reformulation(enc, hconst, lambda);
    double best = 1e300;
    for (double s = -2.0; s <= 2.0; s += 1e-4) {
        const double xs[] = {0.0, s};
        const double ps[] = {0.0, 0.0};
        best = std::min(best, bad.classical_cost(xs, ps));
    }
    CHECK(best == doctest::Approx(lambda).epsilon(1e-6));
}

TEST_CASE("swish rectifier values and penalty wiring") {
    CHECK(swish(0.0) == doctest::Approx(0.0));
    CHECK(swish(-10.0) == doctest::Approx(-4.54e-4).epsilon(0.01));
    CHECK(swish(10.0) == doctest::Approx(9.9995).epsilon(1e-4));

    ComplexQuadraticProblem p;
    p.a = CMatrix::Identity(1, 1);
    p.c = CVector::Zero(1);
    const auto enc = encode_complex_quadratic(p);
    QuadraturePolynomial h(1);
    h.add_term(1.0, {ModePower{0, 1, 0}});

    const auto with = apply_swish_penalty(enc, h, 2.0);
    // classical-only by default: Hamiltonian unchanged
    CHECK(with.hamiltonian.terms().size() == enc.hamiltonian.terms().size());
    const double x[] = {1.5};
    const double pv[] = {0.0};
    CHECK(with.classical_cost(x, pv) ==
          doctest::Approx(enc.classical_cost(x, pv) + swish(2.0 * 1.5)));

    // optional Taylor polynomial reaches the circuit Hamiltonian
    const auto taylored = apply_swish_penalty(enc, h, 2.0, 2);
    CHECK(taylored.hamiltonian.terms().size() > enc.hamiltonian.terms().size());
}

TEST_CASE("Styblinski-Tang encoding and oracle") {
    const auto enc = encode_real_multivariate(styblinski_tang(2));
    CHECK(enc.n_modes == 1);
    const double x[] = {-2.903534};
    const double pv[] = {-2.903534};
    CHECK(enc.classical_cost(x, pv) == doctest::Approx(-78.332).epsilon(1e-4));

    const auto oracle = classical_oracle(enc);
    CHECK(oracle.value == doctest::Approx(-78.33233).epsilon(1e-5));
    CHECK(oracle.argmin(0) == doctest::Approx(-2.903534).epsilon(1e-3));

    // separability: n = 4 gives two modes and twice the minimum
    const auto enc4 = encode_real_multivariate(styblinski_tang(4));
    CHECK(enc4.n_modes == 2);
    const auto oracle4 = classical_oracle(enc4);
    CHECK(oracle4.value == doctest::Approx(2.0 * oracle.value).epsilon(1e-5));

    CHECK_THROWS_AS(encode_real_multivariate(styblinski_tang(3)), EncodingError);
    const auto padded = encode_real_multivariate(styblinski_tang(3), true);
    CHECK(padded.n_modes == 2);
}

TEST_CASE("trivial real multivariate: sum of squares") {
    RealPolynomial f;
    f.n_vars = 2;
    f.terms.push_back({1.0, {2, 0}});
    f.terms.push_back({1.0, {0, 2}});
    const auto enc = encode_real_multivariate(f);
    const auto oracle = classical_oracle(enc);
    CHECK(oracle.value == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("quartic complex encodings") {
    // h = b = c = 0: |z|^4, minimum 0 at the origin
    const auto zero = encode_quartic_complex({0, 0}, {0, 0}, {0, 0});
    const auto o0 = classical_oracle(zero);
    CHECK(o0.value == doctest::Approx(0.0).epsilon(1e-9));

    // b = c = 0: minimum 0 at z = h
    const auto shifted = encode_quartic_complex({1.0, -0.5}, {0, 0}, {0, 0});
    const auto o1 = classical_oracle(shifted);
    CHECK(o1.value == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(o1.argmin(0) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(o1.argmin(1) == doctest::Approx(-0.5).epsilon(1e-3));

    // benchmark constants: double-dip landscape with a known optimum
    const auto bench = encode_quartic_complex({0, 0}, {3.0, 0.0}, {2.0, -2.0});
    const auto ob = classical_oracle(bench);
    CHECK(ob.value == doctest::Approx(-26.357274).epsilon(1e-5));
    CHECK(ob.argmin(0) == doctest::Approx(-1.552741).epsilon(1e-3));
    CHECK(ob.argmin(1) == doctest::Approx(-1.552741).epsilon(1e-3));

    // restriction to the diagonal has two strict local minima (double well)
    const auto cost_diag = [&](double s) {
        const double x[] = {s};
        const double pv[] = {s};
        return bench.classical_cost(x, pv);
    };
    CHECK(cost_diag(1.44) < cost_diag(1.2));
    CHECK(cost_diag(1.44) < cost_diag(1.7));
    CHECK(cost_diag(0.1) > cost_diag(-0.4));
}

TEST_CASE("oracle trivial case") {
    ComplexQuadraticProblem p;
    p.a = CMatrix::Identity(1, 1);
    p.c = CVector::Zero(1);
    const auto oracle = classical_oracle(encode_complex_quadratic(p));
    CHECK(oracle.value == doctest::Approx(0.0));
    CHECK(oracle.argmin.norm() < 1e-6);
}
