#include "ccv/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace ccv {

int PolyTerm::total_degree() const {
    int d = 0;
    for (const auto& f : factors) d += f.x_pow + f.p_pow;
    return d;
}

bool PolyTerm::same_mode_mixed() const {
    return std::any_of(factors.begin(), factors.end(),
                       [](const ModePower& f) { return f.x_pow > 0 && f.p_pow > 0; });
}

namespace {

void canonicalize(std::vector<ModePower>& factors) {
    std::erase_if(factors, [](const ModePower& f) { return f.x_pow == 0 && f.p_pow == 0; });
    std::sort(factors.begin(), factors.end(),
              [](const ModePower& a, const ModePower& b) { return a.mode < b.mode; });
    // merge repeated modes
    std::vector<ModePower> merged;
    for (const auto& f : factors) {
        if (!merged.empty() && merged.back().mode == f.mode) {
            merged.back().x_pow += f.x_pow;
            merged.back().p_pow += f.p_pow;
        } else {
            merged.push_back(f);
        }
    }
    factors = std::move(merged);
}

}  // namespace

void QuadraturePolynomial::add_term(double coeff, std::vector<ModePower> factors) {
    if (coeff == 0.0) return;
    if (!std::isfinite(coeff)) throw EncodingError("non-finite polynomial coefficient");
    canonicalize(factors);
    for (const auto& f : factors) {
        if (f.mode < 0 || f.mode >= n_modes_)
            throw DimensionError("polynomial factor mode out of range");
        if (f.x_pow < 0 || f.p_pow < 0) throw EncodingError("negative monomial power");
    }
    for (auto& t : terms_) {
        if (t.factors == factors) {
            t.coeff += coeff;
            if (t.coeff == 0.0) std::erase_if(terms_, [&](const PolyTerm& u) { return &u == &t; });
            return;
        }
    }
    terms_.push_back(PolyTerm{coeff, std::move(factors)});
}

QuadraturePolynomial& QuadraturePolynomial::operator+=(const QuadraturePolynomial& other) {
    if (other.n_modes_ > n_modes_) n_modes_ = other.n_modes_;
    for (const auto& t : other.terms_) add_term(t.coeff, t.factors);
    return *this;
}

QuadraturePolynomial& QuadraturePolynomial::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& t : terms_) t.coeff *= s;
    return *this;
}

QuadraturePolynomial QuadraturePolynomial::product(const QuadraturePolynomial& other) const {
    QuadraturePolynomial out(std::max(n_modes_, other.n_modes_));
    for (const auto& a : terms_)
        for (const auto& b : other.terms_) {
            auto factors = a.factors;
            factors.insert(factors.end(), b.factors.begin(), b.factors.end());
            out.add_term(a.coeff * b.coeff, std::move(factors));
        }
    return out;
}

double QuadraturePolynomial::evaluate(std::span<const double> x, std::span<const double> p) const {
    double acc = 0.0;
    for (const auto& t : terms_) {
        double v = t.coeff;
        for (const auto& f : t.factors) {
            for (int k = 0; k < f.x_pow; ++k) v *= x[static_cast<std::size_t>(f.mode)];
            for (int k = 0; k < f.p_pow; ++k) v *= p[static_cast<std::size_t>(f.mode)];
        }
        acc += v;
    }
    return acc;
}

double QuadraturePolynomial::evaluate_interleaved(const RVector& xp) const {
    double acc = 0.0;
    for (const auto& t : terms_) {
        double v = t.coeff;
        for (const auto& f : t.factors) {
            for (int k = 0; k < f.x_pow; ++k) v *= xp(2 * f.mode);
            for (int k = 0; k < f.p_pow; ++k) v *= xp(2 * f.mode + 1);
        }
        acc += v;
    }
    return acc;
}

int QuadraturePolynomial::total_degree() const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, t.total_degree());
    return d;
}

bool QuadraturePolynomial::has_same_mode_mixed() const {
    return std::any_of(terms_.begin(), terms_.end(),
                       [](const PolyTerm& t) { return t.same_mode_mixed(); });
}

bool QuadraturePolynomial::pure_x() const {
    for (const auto& t : terms_)
        for (const auto& f : t.factors)
            if (f.p_pow > 0) return false;
    return true;
}

bool QuadraturePolynomial::pure_p() const {
    for (const auto& t : terms_)
        for (const auto& f : t.factors)
            if (f.x_pow > 0) return false;
    return true;
}

bool QuadraturePolynomial::mode_separable() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const PolyTerm& t) { return t.factors.size() <= 1; });
}

double QuadraturePolynomial::constant_part() const {
    for (const auto& t : terms_)
        if (t.factors.empty()) return t.coeff;
    return 0.0;
}

QuadraturePolynomial QuadraturePolynomial::without_constant() const {
    QuadraturePolynomial out(n_modes_);
    for (const auto& t : terms_)
        if (!t.factors.empty()) out.add_term(t.coeff, t.factors);
    return out;
}

double QuadraturePolynomial::quadratic_coefficient_trace() const {
    double s = 0.0;
    for (const auto& t : terms_) {
        if (t.factors.size() != 1) continue;
        const auto& f = t.factors.front();
        if ((f.x_pow == 2 && f.p_pow == 0) || (f.x_pow == 0 && f.p_pow == 2)) s += t.coeff;
    }
    return s;
}

QuadraturePolynomial QuadraturePolynomial::x(int mode, int n_modes, double coeff, int power) {
    QuadraturePolynomial q(n_modes);
    q.add_term(coeff, {ModePower{mode, power, 0}});
    return q;
}

QuadraturePolynomial QuadraturePolynomial::p(int mode, int n_modes, double coeff, int power) {
    QuadraturePolynomial q(n_modes);
    q.add_term(coeff, {ModePower{mode, 0, power}});
    return q;
}

QuadraturePolynomial QuadraturePolynomial::constant(double c, int n_modes) {
    QuadraturePolynomial q(n_modes);
    q.add_constant(c);
    return q;
}

QuadraturePolynomial QuadraturePolynomial::kinetic_mixer(int n_modes) {
    QuadraturePolynomial q(n_modes);
    for (int m = 0; m < n_modes; ++m) q.add_term(1.0, {ModePower{m, 0, 2}});
    return q;
}

}  // namespace ccv
