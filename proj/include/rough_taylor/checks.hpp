#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "integrals.hpp"
#include "multiindex.hpp"
#include "polynomial_path.hpp"
#include "vector_field.hpp"

namespace rough_taylor {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;  // first counterexample or summary statistic
};

namespace detail {

inline std::vector<std::vector<int>> increasing_sequences_ending_at(int r) {
    std::vector<std::vector<int>> out;
    for (unsigned mask = 0; mask < (1u << (r - 1)); ++mask) {
        std::vector<int> seq;
        for (int v = 1; v < r; ++v)
            if (mask & (1u << (v - 1))) seq.push_back(v);
        seq.push_back(r);
        out.push_back(std::move(seq));
    }
    return out;
}

inline MultiIndex random_word(int len, int m, std::mt19937_64& rng) {
    MultiIndex w;
    for (int i = 0; i < len; ++i) w.push_back(1 + static_cast<int>(rng() % static_cast<std::uint64_t>(m)));
    return w;
}

}  // namespace detail

// Exhaustive inverse duality for r <= max_r: Xi_r(l;tau) = {rho : rho^{-1} in Theta_r(l;tau)}
// as exact sets, with simultaneous emptiness.
inline CheckResult check_xi_theta_duality(int max_r = 6) {
    for (int r = 1; r <= max_r; ++r) {
        const auto seqs = detail::increasing_sequences_ending_at(r);
        for (const auto& ls : seqs)
            for (const auto& taus : seqs) {
                if (ls.size() != taus.size()) continue;
                if (!check_duality(ls, taus)) {
                    std::ostringstream what;
                    what << "duality failed at r=" << r << " l=(";
                    for (int v : ls) what << v << " ";
                    what << ") tau=(";
                    for (int v : taus) what << v << " ";
                    what << ")";
                    return {"xi_theta_duality", false, what.str()};
                }
                if (xi_with_constraints(ls, taus).empty() != theta_with_constraints(ls, taus).empty())
                    return {"xi_theta_duality", false, "emptiness mismatch"};
            }
    }
    return {"xi_theta_duality", true, "all (l,tau) pairs up to r=" + std::to_string(max_r)};
}

// Every member of Theta_r(l) satisfies Rule 3.
inline CheckResult check_theta_rule3(int max_r = 6) {
    for (int r = 2; r <= max_r; ++r) {
        for (const auto& ls : detail::increasing_sequences_ending_at(r)) {
            for (const auto& mu : theta_set(ls, r)) {
                for (std::size_t i = 1; i < ls.size(); ++i)
                    for (int y = ls[i - 1] + 1; y < ls[i]; ++y)
                        if (mu(ls[i - 1]) >= mu(y))
                            return {"theta_rule3", false, "violation at r=" + std::to_string(r)};
            }
        }
    }
    return {"theta_rule3", true, "exhaustive up to r=" + std::to_string(max_r)};
}

// |Sh(gamma', gamma'')| = binomial(r'+r'', r') for all total lengths <= max_total.
inline CheckResult check_shuffle_counts(int max_total = 10) {
    for (int r1 = 1; r1 < max_total; ++r1)
        for (int r2 = 1; r1 + r2 <= max_total; ++r2) {
            const auto sh = shuffles(MultiIndex(static_cast<std::size_t>(r1), 1),
                                     MultiIndex(static_cast<std::size_t>(r2), 1));
            if (sh.size() != binomial(r1 + r2, r1))
                return {"shuffle_counts", false,
                        "count mismatch at (" + std::to_string(r1) + "," + std::to_string(r2) + ")"};
        }
    return {"shuffle_counts", true, "binomials verified to total length " + std::to_string(max_total)};
}

// Randomized Leibniz-rule cases on polynomial data; reports the worst discrepancy.
inline CheckResult check_leibniz(int cases = 100, std::uint64_t seed = 1, double tolerance = 1e-9,
                                 int max_r = 5) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    double worst = 0.0;
    for (int c = 0; c < cases; ++c) {
        const int d = 1 + static_cast<int>(rng() % 3);
        const int m = 1 + static_cast<int>(rng() % 3);
        const int r = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_r));

        std::vector<std::vector<Polynomial>> comp(static_cast<std::size_t>(m),
                                                  std::vector<Polynomial>(static_cast<std::size_t>(d), Polynomial(d)));
        for (auto& row : comp)
            for (auto& p : row)
                for (int t = 0; t < 3; ++t) {
                    std::vector<int> e(static_cast<std::size_t>(d), 0);
                    const int total = static_cast<int>(rng() % 3);
                    for (int k = 0; k < total; ++k) ++e[static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(d))];
                    p.add_term(e, coeff(rng));
                }
        PolynomialVectorField field(d, m, std::move(comp));

        const MultiIndex alpha = detail::random_word(r, m, rng);
        std::vector<int> ls;
        for (int v = 1; v < r; ++v)
            if (rng() % 2) ls.push_back(v);
        ls.push_back(r);

        std::vector<std::vector<Polynomial>> fs;
        for (std::size_t i = 0; i < ls.size(); ++i) {
            std::vector<Polynomial> row;
            for (int j = 0; j < m; ++j) {
                Polynomial f(d);
                for (int t = 0; t < 3; ++t) {
                    std::vector<int> e(static_cast<std::size_t>(d), 0);
                    const int total = static_cast<int>(rng() % 3);
                    for (int k = 0; k < total; ++k) ++e[static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(d))];
                    f.add_term(e, coeff(rng));
                }
                row.push_back(std::move(f));
            }
            fs.push_back(std::move(row));
        }
        auto fam = polynomial_family(m, std::move(fs));

        Point y(static_cast<std::size_t>(d));
        for (double& v : y) v = coeff(rng) * 0.8;
        worst = std::max(worst, leibniz_check(field, alpha, ls, fam, {y}));
        if (worst > tolerance) {
            std::ostringstream what;
            what << "discrepancy " << worst << " at case " << c << " alpha=" << to_string(alpha);
            return {"leibniz_rule", false, what.str()};
        }
    }
    std::ostringstream what;
    what << cases << " cases, worst discrepancy " << worst;
    return {"leibniz_rule", true, what.str()};
}

// Randomized iterated-field expansion cases on polynomial data.
inline CheckResult check_lemma_expansion(int cases = 100, std::uint64_t seed = 2, double tolerance = 1e-9,
                                         int max_r = 4) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    double worst = 0.0;
    for (int c = 0; c < cases; ++c) {
        const int d = 1 + static_cast<int>(rng() % 3);
        const int m = 1 + static_cast<int>(rng() % 3);
        const int r = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_r));

        std::vector<std::vector<Polynomial>> comp(static_cast<std::size_t>(m),
                                                  std::vector<Polynomial>(static_cast<std::size_t>(d), Polynomial(d)));
        for (auto& row : comp)
            for (auto& p : row)
                for (int t = 0; t < 2; ++t) {
                    std::vector<int> e(static_cast<std::size_t>(d), 0);
                    const int total = static_cast<int>(rng() % 3);
                    for (int k = 0; k < total; ++k) ++e[static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(d))];
                    p.add_term(e, coeff(rng));
                }
        PolynomialVectorField field(d, m, std::move(comp));
        const MultiIndex alpha = detail::random_word(r, m, rng);

        Polynomial f(d);
        for (int t = 0; t < 4; ++t) {
            std::vector<int> e(static_cast<std::size_t>(d), 0);
            const int total = static_cast<int>(rng() % 4);
            for (int k = 0; k < total; ++k) ++e[static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(d))];
            f.add_term(e, coeff(rng));
        }
        auto derivs = [f](const std::vector<int>& zeta, const Point& y) {
            Polynomial p = f;
            for (int v : zeta) p = p.partial(v);
            return p.eval(y);
        };

        Point y(static_cast<std::size_t>(d));
        for (double& v : y) v = coeff(rng) * 0.8;
        worst = std::max(worst, lemma_expansion_check(field, alpha, derivs, {y}));
        if (worst > tolerance) {
            std::ostringstream what;
            what << "discrepancy " << worst << " at case " << c << " alpha=" << to_string(alpha);
            return {"lemma_expansion", false, what.str()};
        }
    }
    std::ostringstream what;
    what << cases << " cases, worst discrepancy " << worst;
    return {"lemma_expansion", true, what.str()};
}

// Shuffle and nested-integral identities: exact on polynomial drivers, within tolerance on
// sampled fBm paths at the given refinement.
inline CheckResult check_path_identities(int cases = 200, std::uint64_t seed = 3, double fbm_tolerance = 5e-3,
                                         std::uint64_t refine = 256, double poly_tolerance = 1e-9) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);

    double worst_poly = 0.0, worst_fbm = 0.0;
    for (int c = 0; c < cases; ++c) {
        // polynomial driver, exact integrals
        PolynomialPath path;
        const int m = 2 + static_cast<int>(rng() % 2);
        for (int j = 0; j < m; ++j) {
            std::vector<double> coeffs = {0.0};
            const int degree = 1 + static_cast<int>(rng() % 3);
            for (int k = 0; k < degree; ++k) coeffs.push_back(coeff(rng));
            path.coeffs.push_back(std::move(coeffs));
        }
        const int l1 = 1 + static_cast<int>(rng() % 3);
        const int l2 = 1 + static_cast<int>(rng() % 2);
        const auto g1 = detail::random_word(l1, m, rng);
        const auto g2 = detail::random_word(l2, m, rng);
        worst_poly = std::max(worst_poly, shuffle_identity_check(path, g1, g2, 0.1, 0.8));
        std::vector<MultiIndex> gammas = {g1, g2};
        if (l1 + l2 <= 4 && rng() % 2) gammas.push_back(detail::random_word(1, m, rng));
        worst_poly = std::max(worst_poly, nested_integral_check(path, gammas, 0.1, 0.8));
        if (worst_poly > poly_tolerance)
            return {"path_identities", false, "polynomial-driver discrepancy " + std::to_string(worst_poly)};

        // sampled fBm driver at the configured refinement
        SignalSpec spec;
        spec.m = 2;
        spec.hurst = ExponentVector::hurst({1.0, 0.8});
        spec.component_1_is_time = true;
        spec.n_fine = 4 * refine;
        spec.seed = mix_seed(seed, static_cast<std::uint64_t>(c));
        const auto signal = build_signal(spec);
        const auto f1 = detail::random_word(1 + static_cast<int>(rng() % 3), 2, rng);
        const auto f2 = detail::random_word(1 + static_cast<int>(rng() % 2), 2, rng);
        if (f1.size() + f2.size() <= 5) {
            const std::uint64_t k = rng() % 4;
            worst_fbm = std::max(worst_fbm, shuffle_identity_check(signal, f1, f2, 4, k, refine));
            worst_fbm = std::max(worst_fbm, nested_integral_check(signal, {f1, f2}, 4, k, refine));
            if (worst_fbm > fbm_tolerance)
                return {"path_identities", false, "fBm-driver discrepancy " + std::to_string(worst_fbm)};
        }
    }
    std::ostringstream what;
    what << cases << " cases, worst poly " << worst_poly << ", worst fBm " << worst_fbm;
    return {"path_identities", true, what.str()};
}

inline std::vector<CheckResult> run_check_suite(const std::string& suite) {
    std::vector<CheckResult> results;
    const bool all = suite == "all";
    if (all || suite == "combinatorics") {
        results.push_back(check_xi_theta_duality());
        results.push_back(check_theta_rule3());
        results.push_back(check_shuffle_counts());
    }
    if (all || suite == "jets") {
        results.push_back(check_leibniz());
        results.push_back(check_lemma_expansion());
    }
    if (all || suite == "integrals") {
        results.push_back(check_path_identities());
    }
    if (results.empty()) throw config_error("unknown check suite: " + suite);
    return results;
}

}  // namespace rough_taylor
