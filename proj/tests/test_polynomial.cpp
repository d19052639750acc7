#include <doctest.h>

#include "ccv/polynomial.hpp"

using namespace ccv;

TEST_CASE("terms merge and cancel") {
    QuadraturePolynomial q(2);
    q.add_term(1.5, {ModePower{0, 2, 0}});
    q.add_term(0.5, {ModePower{0, 2, 0}});
    q.add_term(2.0, {ModePower{1, 0, 1}});
    CHECK(q.terms().size() == 2);
    q.add_term(-2.0, {ModePower{1, 0, 1}});
    CHECK(q.terms().size() == 1);
    CHECK(q.terms().front().coeff == doctest::Approx(2.0));
}

TEST_CASE("factors canonicalize by mode and merge repeats") {
    QuadraturePolynomial q(2);
    q.add_term(1.0, {ModePower{1, 1, 0}, ModePower{0, 1, 0}, ModePower{1, 1, 0}});
    REQUIRE(q.terms().size() == 1);
    const auto& f = q.terms().front().factors;
    REQUIRE(f.size() == 2);
    CHECK(f[0].mode == 0);
    CHECK(f[1].mode == 1);
    CHECK(f[1].x_pow == 2);
}

TEST_CASE("evaluation matches scalar algebra") {
    // x0^2 p1 - 3 x1 + 0.5
    QuadraturePolynomial q(2);
    q.add_term(1.0, {ModePower{0, 2, 0}, ModePower{1, 0, 1}});
    q.add_term(-3.0, {ModePower{1, 1, 0}});
    q.add_constant(0.5);
    const double x[] = {2.0, -1.0};
    const double p[] = {0.5, 4.0};
    CHECK(q.evaluate(x, p) == doctest::Approx(4.0 * 4.0 + 3.0 + 0.5));
    RVector xp(4);
    xp << 2.0, 0.5, -1.0, 4.0;
    CHECK(q.evaluate_interleaved(xp) == doctest::Approx(q.evaluate(x, p)));
}

TEST_CASE("structure predicates") {
    QuadraturePolynomial q(2);
    q.add_term(1.0, {ModePower{0, 2, 0}});
    CHECK(q.pure_x());
    CHECK(q.mode_separable());
    CHECK_FALSE(q.has_same_mode_mixed());
    q.add_term(1.0, {ModePower{0, 1, 1}});
    CHECK(q.has_same_mode_mixed());
    CHECK_FALSE(q.pure_x());

    const auto mixer = QuadraturePolynomial::kinetic_mixer(3);
    CHECK(mixer.pure_p());
    CHECK(mixer.mode_separable());
    CHECK(mixer.total_degree() == 2);
    CHECK(mixer.terms().size() == 3);
}

TEST_CASE("product expands degrees") {
    QuadraturePolynomial a = QuadraturePolynomial::x(0, 1, 1.0, 1);
    a.add_constant(-2.0);
    const auto sq = a.product(a);  // (x - 2)^2
    const double x[] = {3.0};
    const double p[] = {0.0};
    CHECK(sq.evaluate(x, p) == doctest::Approx(1.0));
    CHECK(sq.total_degree() == 2);
    CHECK(sq.constant_part() == doctest::Approx(4.0));
}

TEST_CASE("quadratic coefficient trace picks x^2 and p^2 only") {
    QuadraturePolynomial q(2);
    q.add_term(1.0, {ModePower{0, 2, 0}});
    q.add_term(2.0, {ModePower{1, 0, 2}});
    q.add_term(7.0, {ModePower{0, 1, 0}, ModePower{1, 1, 0}});  // cross term ignored
    q.add_term(-4.0, {ModePower{0, 1, 0}});
    CHECK(q.quadratic_coefficient_trace() == doctest::Approx(3.0));
}

TEST_CASE("invalid terms rejected") {
    QuadraturePolynomial q(1);
    CHECK_THROWS_AS(q.add_term(1.0, {ModePower{3, 1, 0}}), DimensionError);
    CHECK_THROWS_AS(q.add_term(std::nan(""), {ModePower{0, 1, 0}}), EncodingError);
}
