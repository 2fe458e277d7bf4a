#pragma once

#include <cmath>
#include <iostream>
#include <limits>
#include <utility>

#include "exponents.hpp"
#include "multiindex.hpp"

namespace rough_taylor {

namespace detail {

// Minimizes `value(alpha)` over the complement of `set` by scanning word lengths.
// `length_floor(L)` must lower-bound value() on words of length L; the scan stops once
// the floor can no longer beat the current minimum. The floor grows linearly in L, so
// the horizon is finite for any finite set.
template <typename Value, typename Floor>
double minimize_over_complement(const IndexSet& set, Value&& value, Floor&& length_floor) {
    double best = std::numeric_limits<double>::infinity();
    const int m = set.alphabet_size;
    for (int L = 1;; ++L) {
        if (length_floor(L) >= best && std::isfinite(best)) break;
        if (L * std::log(static_cast<double>(m)) > std::log(static_cast<double>(kEnumerationBudget)))
            throw config_error("complement search exhausted");
        for (const auto& w : enumerate_gamma(L, m)) {
            if (set.contains_word(w)) continue;
            best = std::min(best, value(w));
        }
    }
    return best;
}

}  // namespace detail

// theta_Gamma~ = min over absent alpha of (sum_i beta_{alpha(i)} - 1).
inline double theta_of(const IndexSet& set, const ExponentVector& exps) {
    if (exps.mode != ExponentVector::Mode::HOLDER) throw std::invalid_argument("theta_of expects Holder exponents");
    if (exps.m() != set.alphabet_size) throw std::invalid_argument("alphabet size mismatch");
    const double beta_min = exps.min_value();
    return detail::minimize_over_complement(
        set, [&](const MultiIndex& w) { return exps.sum_over(w) - 1.0; },
        [&](int L) { return L * beta_min - 1.0; });
}

// rho_Gamma~ = min over absent alpha of (H_alpha - vartheta(alpha)).
inline double rho_of(const IndexSet& set, const ExponentVector& exps) {
    if (exps.mode != ExponentVector::Mode::HURST) throw std::invalid_argument("rho_of expects Hurst exponents");
    if (exps.m() != set.alphabet_size) throw std::invalid_argument("alphabet size mismatch");
    const double h_min = exps.min_value();
    return detail::minimize_over_complement(
        set, [&](const MultiIndex& w) { return exps.sum_over(w) - exps.vartheta(w); },
        [&](int L) { return L * h_min - 1.0; });
}

// Membership below a strict threshold. Ties at the threshold are excluded; summation
// roundoff is absorbed by a 1e-12 band so that values equal to theta up to float noise
// count as ties, keeping theta_of/rho_of round-trips exact.
inline bool strictly_below(double value, double threshold) { return value < threshold - 1e-12; }

// Gamma(theta) = {alpha : sum beta_{alpha(i)} - 1 < theta}. Empty result possible for tiny theta.
inline IndexSet gamma_theta(double theta, const ExponentVector& exps, int m) {
    if (exps.mode != ExponentVector::Mode::HOLDER) throw std::invalid_argument("gamma_theta expects Holder exponents");
    if (exps.m() != m) throw std::invalid_argument("alphabet size mismatch");
    std::set<MultiIndex> words;
    const double beta_min = exps.min_value();
    for (int L = 1; L * beta_min - 1.0 < theta; ++L) {
        if (L * std::log(static_cast<double>(m)) > std::log(static_cast<double>(kEnumerationBudget)))
            throw config_error("enumeration too large");
        for (auto& w : enumerate_gamma(L, m))
            if (strictly_below(exps.sum_over(w) - 1.0, theta)) words.insert(std::move(w));
    }
    if (words.empty()) std::cerr << "warning: gamma_theta(" << theta << ") is empty\n";
    return IndexSet::make_unchecked(std::move(words), m);
}

// Gamma^(rho), the two-branch best set for L_p convergence: even r'(alpha) words with
// H_alpha - 1 < rho together with odd r'(alpha) words with H_alpha - max H_{alpha_i} < rho.
inline IndexSet gamma_rho(double rho, const ExponentVector& exps, int m) {
    if (exps.mode != ExponentVector::Mode::HURST) throw std::invalid_argument("gamma_rho expects Hurst exponents");
    if (exps.m() != m) throw std::invalid_argument("alphabet size mismatch");
    std::set<MultiIndex> words;
    const double h_min = exps.min_value();
    for (int L = 1; L * h_min < rho + 1.0; ++L) {
        if (L * std::log(static_cast<double>(m)) > std::log(static_cast<double>(kEnumerationBudget)))
            throw config_error("enumeration too large");
        for (auto& w : enumerate_gamma(L, m)) {
            const double h_alpha = exps.sum_over(w);
            const bool keep = strictly_below(
                h_alpha - ((exps.r_prime(w) % 2 == 0) ? 1.0 : exps.max_fbm_exponent(w)), rho);
            if (keep) words.insert(std::move(w));
        }
    }
    if (words.empty()) std::cerr << "warning: gamma_rho(" << rho << ") is empty\n";
    return IndexSet::make_unchecked(std::move(words), m);
}

// All admissible L_p rates come from letter-count vectors (r_1,...,r_m):
//   rho = sum r_j H_j - 1                      when the fBm letter count is even,
//   rho = sum r_j H_j - max_{fBm j: r_j>0} H_j when it is odd.
inline std::vector<double> admissible_lp_rates(const ExponentVector& exps, double upper_bound) {
    std::vector<double> rates;
    const int m = exps.m();
    std::vector<int> counts(static_cast<std::size_t>(m), 0);
    auto rec = [&](auto&& self, int letter, double h_sum) -> void {
        if (h_sum > upper_bound + 1.0) return;
        if (letter > m) {
            int r_fbm = 0;
            double h_max = 0.0;
            bool any = false;
            for (int j = 1; j <= m; ++j) {
                const int c = counts[static_cast<std::size_t>(j - 1)];
                if (c > 0) any = true;
                if (!exps.letter_is_time(j) && c > 0) {
                    r_fbm += c;
                    h_max = std::max(h_max, exps[j]);
                }
            }
            if (!any) return;
            const double rate = (r_fbm % 2 == 0) ? h_sum - 1.0 : h_sum - h_max;
            if (rate <= upper_bound) rates.push_back(rate);
            return;
        }
        const double h = exps[letter];
        for (int c = 0; h_sum + c * h <= upper_bound + 1.0; ++c) {
            counts[static_cast<std::size_t>(letter - 1)] = c;
            self(self, letter + 1, h_sum + c * h);
        }
        counts[static_cast<std::size_t>(letter - 1)] = 0;
    };
    rec(rec, 1, 0.0);
    std::sort(rates.begin(), rates.end());
    rates.erase(std::unique(rates.begin(), rates.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                rates.end());
    return rates;
}

// The next admissible rate above rho together with the correction set
// Gamma^(rho)' = Gamma^(rho') \ Gamma^(rho) receiving deterministic D_gamma terms.
inline std::pair<double, IndexSet> next_rate_and_correction_set(double rho, const ExponentVector& exps, int m) {
    const double horizon = rho + 3.0;
    double rho_next = std::numeric_limits<double>::infinity();
    for (double r : admissible_lp_rates(exps, horizon))
        if (r > rho + 1e-12) {
            rho_next = r;
            break;
        }
    if (!std::isfinite(rho_next)) throw config_error("next rate beyond search horizon");
    const IndexSet base = gamma_rho(rho, exps, m);
    const IndexSet enlarged = gamma_rho(rho_next, exps, m);
    std::set<MultiIndex> diff;
    for (const auto& w : enlarged.members)
        if (!base.contains_word(w)) diff.insert(w);
    return {rho_next, IndexSet::make_unchecked(std::move(diff), m)};
}

}  // namespace rough_taylor
