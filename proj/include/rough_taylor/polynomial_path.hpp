#pragma once

#include <vector>

#include "multiindex.hpp"

namespace rough_taylor {

// Driver with polynomial components x^j(t) = sum_k coeffs[j][k] t^k. Iterated integrals of
// polynomial paths are themselves polynomials, so the identity checks below are exact up to
// float rounding.
struct PolynomialPath {
    std::vector<std::vector<double>> coeffs;  // one coefficient vector per component

    int m() const { return static_cast<int>(coeffs.size()); }

    double eval(int j, double t) const {
        const auto& c = coeffs[static_cast<std::size_t>(j - 1)];
        double v = 0.0;
        for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k];
        return v;
    }
};

namespace detail {

using Poly1 = std::vector<double>;  // coefficients in t

inline Poly1 poly_mul(const Poly1& a, const Poly1& b) {
    Poly1 out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

inline Poly1 poly_derivative(const Poly1& a) {
    if (a.size() <= 1) return {0.0};
    Poly1 out(a.size() - 1, 0.0);
    for (std::size_t k = 1; k < a.size(); ++k) out[k - 1] = a[k] * static_cast<double>(k);
    return out;
}

inline double poly_eval(const Poly1& a, double t) {
    double v = 0.0;
    for (std::size_t k = a.size(); k-- > 0;) v = v * t + a[k];
    return v;
}

// antiderivative vanishing at s
inline Poly1 poly_integral_from(const Poly1& a, double s) {
    Poly1 out(a.size() + 1, 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) out[k + 1] = a[k] / static_cast<double>(k + 1);
    out[0] = -poly_eval(out, s);
    return out;
}

// running iterated integral u -> x^alpha_{s,u} as a polynomial in u
inline Poly1 running_exact_integral(const PolynomialPath& path, const MultiIndex& alpha, double s) {
    Poly1 level = path.coeffs[static_cast<std::size_t>(alpha[0] - 1)];
    level[0] -= path.eval(alpha[0], s);
    for (std::size_t l = 1; l < alpha.size(); ++l) {
        const Poly1 rate = poly_derivative(path.coeffs[static_cast<std::size_t>(alpha[l] - 1)]);
        level = poly_integral_from(poly_mul(level, rate), s);
    }
    return level;
}

}  // namespace detail

inline double exact_iterated_integral(const PolynomialPath& path, const MultiIndex& alpha, double s, double t) {
    validate_word(alpha, path.m());
    return detail::poly_eval(detail::running_exact_integral(path, alpha, s), t);
}

inline double shuffle_identity_check(const PolynomialPath& path, const MultiIndex& gamma1,
                                     const MultiIndex& gamma2, double s, double t) {
    const double lhs = exact_iterated_integral(path, gamma1, s, t) * exact_iterated_integral(path, gamma2, s, t);
    MultiIndex gamma(gamma1);
    gamma.insert(gamma.end(), gamma2.begin(), gamma2.end());
    double rhs = 0.0, scale = std::abs(lhs);
    for (const auto& rho : shuffles(gamma1, gamma2)) {
        const double term = exact_iterated_integral(path, compose(gamma, rho.inverse()), s, t);
        rhs += term;
        scale += std::abs(term);
    }
    return std::abs(lhs - rhs) / (scale + 1e-300);
}

inline double nested_integral_check(const PolynomialPath& path, const std::vector<MultiIndex>& gammas,
                                    double s, double t) {
    if (gammas.empty()) throw std::invalid_argument("nested_integral_check: no words");
    detail::Poly1 level = detail::running_exact_integral(path, gammas[0], s);
    for (std::size_t i = 1; i < gammas.size(); ++i) {
        const auto integrator = detail::running_exact_integral(path, gammas[i], s);
        level = detail::poly_integral_from(detail::poly_mul(level, detail::poly_derivative(integrator)), s);
    }
    const double lhs = detail::poly_eval(level, t);

    MultiIndex gamma;
    std::vector<int> taus;
    for (const auto& g : gammas) {
        gamma.insert(gamma.end(), g.begin(), g.end());
        taus.push_back(static_cast<int>(gamma.size()));
    }
    double rhs = 0.0, scale = std::abs(lhs);
    for (const auto& rho : xi_set(taus, static_cast<int>(gamma.size()))) {
        const double term = exact_iterated_integral(path, compose(gamma, rho.inverse()), s, t);
        rhs += term;
        scale += std::abs(term);
    }
    return std::abs(lhs - rhs) / (scale + 1e-300);
}

}  // namespace rough_taylor
