#pragma once

#include <span>
#include <vector>

#include "ccv/types.hpp"

namespace ccv {

/// One mode's factor inside a monomial: x^x_pow * p^p_pow on `mode`.
struct ModePower {
    int mode = 0;
    int x_pow = 0;
    int p_pow = 0;

    friend bool operator==(const ModePower&, const ModePower&) = default;
};

/// Real-coefficient monomial over several modes. Factors are sorted by mode
/// and carry at least one nonzero power each; an empty factor list is a
/// constant term.
struct PolyTerm {
    double coeff = 0.0;
    std::vector<ModePower> factors;

    int total_degree() const;
    /// True when some mode carries both x and p powers; such terms are
    /// realized as the symmetrized product (x^m p^n + p^n x^m)/2.
    bool same_mode_mixed() const;
};

/// Sum of real-coefficient monomials in per-mode quadrature operators.
/// Shared intermediate representation between the problem encoders and both
/// simulation backends.
class QuadraturePolynomial {
public:
    QuadraturePolynomial() = default;
    explicit QuadraturePolynomial(int n_modes) : n_modes_(n_modes) {
        if (n_modes < 1) throw DimensionError("n_modes must be >= 1");
    }

    int n_modes() const { return n_modes_; }
    const std::vector<PolyTerm>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    /// Adds coeff * prod_k x_{mode_k}^{xp_k} p_{mode_k}^{pp_k}; like terms merge.
    void add_term(double coeff, std::vector<ModePower> factors);
    void add_constant(double c) { add_term(c, {}); }

    QuadraturePolynomial& operator+=(const QuadraturePolynomial& other);
    QuadraturePolynomial& operator*=(double s);
    friend QuadraturePolynomial operator+(QuadraturePolynomial a, const QuadraturePolynomial& b) {
        a += b;
        return a;
    }
    friend QuadraturePolynomial operator*(double s, QuadraturePolynomial p) {
        p *= s;
        return p;
    }

    /// Product of two polynomials over the same mode count.
    QuadraturePolynomial product(const QuadraturePolynomial& other) const;

    /// Evaluates at scalar quadrature values (mixed terms are plain products;
    /// symmetrization is an operator-ordering statement and has no effect on
    /// scalars).
    double evaluate(std::span<const double> x, std::span<const double> p) const;
    /// Evaluation on an interleaved (x1,p1,...,xN,pN) vector.
    double evaluate_interleaved(const RVector& xp) const;

    int total_degree() const;
    bool has_same_mode_mixed() const;
    /// True when every factor uses only the given quadrature (x_only: no
    /// p-powers anywhere, and vice versa). Constants count as both.
    bool pure_x() const;
    bool pure_p() const;
    /// True when every term touches at most one mode.
    bool mode_separable() const;
    double constant_part() const;
    /// Same polynomial with the constant term removed.
    QuadraturePolynomial without_constant() const;
    /// Sum of coefficients of the pure x_j^2 and p_j^2 terms (used by the
    /// heterodyne bias correction).
    double quadratic_coefficient_trace() const;

    /// Convenience monomials.
    static QuadraturePolynomial x(int mode, int n_modes, double coeff = 1.0, int power = 1);
    static QuadraturePolynomial p(int mode, int n_modes, double coeff = 1.0, int power = 1);
    static QuadraturePolynomial constant(double c, int n_modes);
    /// Default mixer: sum of p_j^2 over all modes.
    static QuadraturePolynomial kinetic_mixer(int n_modes);

private:
    int n_modes_ = 1;
    std::vector<PolyTerm> terms_;
};

}  // namespace ccv
