#pragma once

#include <cmath>
#include <optional>

#include "exponents.hpp"
#include "integrals.hpp"
#include "multiindex.hpp"
#include "signal.hpp"

namespace rough_taylor {

enum class MomentMethod { CLOSED_FORM, QUADRATURE, MONTE_CARLO };

// Evaluation request for D_gamma(t) = E[B^gamma_{0,t}].
struct MomentSpec {
    MultiIndex gamma;
    ExponentVector hurst;  // HURST mode; letter 1 may be the time component
    MomentMethod method = MomentMethod::CLOSED_FORM;
    int quadrature_points = 0;       // 0 -> picked by order
    int mc_paths = 20000;            // Monte Carlo oracle settings
    std::uint64_t mc_refine = 1024;
    std::uint64_t mc_seed = 761204;
};

struct MomentEstimate {
    double value = 0.0;
    double std_error = 0.0;  // 0 for deterministic methods
};

// D_gamma vanishes whenever some fBm letter has an odd occurrence count.
inline bool d_gamma_parity_zero(const MultiIndex& gamma, const ExponentVector& hurst) {
    for (int j = 1; j <= hurst.m(); ++j) {
        if (hurst.letter_is_time(j)) continue;
        if (ExponentVector::letter_count(gamma, j) % 2 == 1) return true;
    }
    return false;
}

namespace detail {

inline double beta_function(double x, double y) {
    return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y));
}

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration.
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(static_cast<std::size_t>(n));
    weights.resize(static_cast<std::size_t>(n));
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < n; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        nodes[static_cast<std::size_t>(i)] = x;
        weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

// Wick pairings of the fBm positions of gamma, matched within equal letters.
// Each pairing is a list of (a, b, letter) with a < b (1-based positions).
struct Pairing {
    std::vector<std::array<int, 3>> pairs;
};

inline void matchings_of_group(const std::vector<int>& positions, std::size_t used_mask,
                               std::vector<std::array<int, 2>>& current,
                               std::vector<std::vector<std::array<int, 2>>>& out) {
    std::size_t first = positions.size();
    for (std::size_t i = 0; i < positions.size(); ++i)
        if (!(used_mask & (1u << i))) {
            first = i;
            break;
        }
    if (first == positions.size()) {
        out.push_back(current);
        return;
    }
    for (std::size_t j = first + 1; j < positions.size(); ++j) {
        if (used_mask & (1u << j)) continue;
        current.push_back({positions[first], positions[j]});
        matchings_of_group(positions, used_mask | (1u << first) | (1u << j), current, out);
        current.pop_back();
    }
}

inline std::vector<Pairing> wick_pairings(const MultiIndex& gamma, const ExponentVector& hurst) {
    std::map<int, std::vector<int>> positions_by_letter;
    for (std::size_t i = 0; i < gamma.size(); ++i)
        if (!hurst.letter_is_time(gamma[i])) positions_by_letter[gamma[i]].push_back(static_cast<int>(i) + 1);

    std::vector<Pairing> result;
    result.push_back({});
    for (const auto& [letter, positions] : positions_by_letter) {
        std::vector<std::vector<std::array<int, 2>>> group;
        std::vector<std::array<int, 2>> current;
        matchings_of_group(positions, 0, current, group);
        std::vector<Pairing> expanded;
        for (const auto& base : result)
            for (const auto& g : group) {
                Pairing p = base;
                for (const auto& [a, b] : g) p.pairs.push_back({a, b, letter});
                expanded.push_back(std::move(p));
            }
        result = std::move(expanded);
    }
    return result;
}

// Simplex integral of the pair kernels for one pairing, by nested Gauss-Legendre from the
// outermost variable inward. The |t_b - t_a|^{2H-2} factor of each pair is absorbed when
// integrating its lower variable via the substitution w = (t_b - t_a)^{2H-1}.
class PairingQuadrature {
public:
    PairingQuadrature(const MultiIndex& gamma, const ExponentVector& hurst, const Pairing& pairing, int points)
        : r_(static_cast<int>(gamma.size())), values_(gamma.size() + 2, 0.0) {
        partner_above_.assign(gamma.size() + 1, 0);
        exponent_.assign(gamma.size() + 1, 0.0);
        scale_.assign(gamma.size() + 1, 1.0);
        for (const auto& [a, b, letter] : pairing.pairs) {
            const double H = hurst[letter];
            partner_above_[static_cast<std::size_t>(a)] = b;
            exponent_[static_cast<std::size_t>(a)] = 2.0 * H - 1.0;
            scale_[static_cast<std::size_t>(a)] = H;  // alpha_H / (2H-1) = H(2H-1)/(2H-1)
        }
        gauss_legendre(points, ref_nodes_, ref_weights_);
    }

    double integrate(double t) {
        values_[static_cast<std::size_t>(r_) + 1] = t;
        return level(r_, t);
    }

private:
    double level(int i, double upper) {
        if (i == 0) return 1.0;
        const int b = partner_above_[static_cast<std::size_t>(i)];
        double sum = 0.0;
        if (b == 0) {
            // plain node: integrate t_i over [0, upper]
            for (std::size_t q = 0; q < ref_nodes_.size(); ++q) {
                const double ti = 0.5 * upper * (ref_nodes_[q] + 1.0);
                values_[static_cast<std::size_t>(i)] = ti;
                sum += ref_weights_[q] * level(i - 1, ti);
            }
            return 0.5 * upper * sum;
        }
        // lower element of a pair: substitute w = (t_b - t_i)^{2H-1}
        const double tb = values_[static_cast<std::size_t>(b)];
        const double e = exponent_[static_cast<std::size_t>(i)];
        const double w_lo = std::pow(std::max(0.0, tb - upper), e);
        const double w_hi = std::pow(tb, e);
        for (std::size_t q = 0; q < ref_nodes_.size(); ++q) {
            const double w = 0.5 * (w_hi - w_lo) * (ref_nodes_[q] + 1.0) + w_lo;
            const double ti = tb - std::pow(w, 1.0 / e);
            values_[static_cast<std::size_t>(i)] = ti;
            sum += ref_weights_[q] * level(i - 1, ti);
        }
        return 0.5 * (w_hi - w_lo) * scale_[static_cast<std::size_t>(i)] * sum;
    }

    int r_;
    std::vector<int> partner_above_;
    std::vector<double> exponent_;
    std::vector<double> scale_;
    std::vector<double> values_;
    std::vector<double> ref_nodes_, ref_weights_;
};

// closed forms -------------------------------------------------------------

inline std::optional<double> d_gamma_closed_form(const MultiIndex& gamma, const ExponentVector& hurst, double t) {
    const int r = static_cast<int>(gamma.size());

    // pure time word: deterministic simplex volume
    bool all_time = true;
    for (int a : gamma) all_time = all_time && hurst.letter_is_time(a);
    if (all_time) return std::pow(t, r) / factorial(r);

    // single repeated fBm letter: E[B_t^r] / r!
    if (is_single_letter(gamma) && !hurst.letter_is_time(gamma[0])) {
        if (r % 2 == 1) return 0.0;
        const double H = hurst[gamma[0]];
        return double_factorial(r - 1) * std::pow(t, r * H) / factorial(r);
    }

    // time letters plus exactly one fBm pair at positions a < b with equal letter
    std::vector<int> fbm_positions;
    for (int i = 1; i <= r; ++i)
        if (!hurst.letter_is_time(gamma[static_cast<std::size_t>(i - 1)])) fbm_positions.push_back(i);
    if (fbm_positions.size() == 2 &&
        gamma[static_cast<std::size_t>(fbm_positions[0] - 1)] == gamma[static_cast<std::size_t>(fbm_positions[1] - 1)]) {
        const int a = fbm_positions[0], b = fbm_positions[1];
        const double H = hurst[gamma[static_cast<std::size_t>(a - 1)]];
        const double alpha_h = H * (2.0 * H - 1.0);
        const double value = alpha_h / (factorial(a - 1) * factorial(b - a - 1) * factorial(r - b)) *
                             beta_function(a, 2.0 * H + b - a - 2.0) * beta_function(2.0 * H + b - 2.0, r - b + 1.0) *
                             std::pow(t, 2.0 * H + r - 2.0);
        return value;
    }
    return std::nullopt;
}

}  // namespace detail

// D_gamma(t) by the requested method. The parity rule is decided combinatorially first and
// returns exact zero with no numerics.
inline MomentEstimate d_gamma_estimate(const MomentSpec& spec, double t) {
    const auto& gamma = spec.gamma;
    const auto& hurst = spec.hurst;
    validate_word(gamma, hurst.m());
    if (d_gamma_parity_zero(gamma, hurst)) return {0.0, 0.0};

    switch (spec.method) {
        case MomentMethod::CLOSED_FORM: {
            auto v = detail::d_gamma_closed_form(gamma, hurst, t);
            if (!v) throw config_error("no closed form for this word");
            return {*v, 0.0};
        }
        case MomentMethod::QUADRATURE: {
            const int r = static_cast<int>(gamma.size());
            if (r > 6) throw config_error("order beyond quadrature support");
            int points = spec.quadrature_points;
            if (points <= 0) points = (r <= 2) ? 48 : (r == 3) ? 32 : (r == 4) ? 24 : (r == 5) ? 12 : 8;
            double sum = 0.0;
            for (const auto& pairing : detail::wick_pairings(gamma, hurst)) {
                detail::PairingQuadrature quad(gamma, hurst, pairing, points);
                sum += quad.integrate(t);
            }
            return {sum, 0.0};
        }
        case MomentMethod::MONTE_CARLO: {
            const bool single = is_single_letter(gamma);
            SignalSpec sig_spec;
            sig_spec.m = hurst.m();
            sig_spec.hurst = hurst;
            sig_spec.component_1_is_time = hurst.letter_is_time(1);
            sig_spec.T = t;
            sig_spec.n_fine = spec.mc_refine;
            double sum = 0.0, sum_sq = 0.0;
            for (int p = 0; p < spec.mc_paths; ++p) {
                double v;
                if (single) {
                    // B^gamma_{0,t} = B_t^r / r! and B_t ~ N(0, t^{2H}) exactly
                    GaussianStream g(mix_seed(spec.mc_seed, static_cast<std::uint64_t>(p)));
                    const double bt = std::pow(t, hurst[gamma[0]]) * g.next();
                    v = 1.0;
                    for (int i = 1; i <= static_cast<int>(gamma.size()); ++i) v *= bt / static_cast<double>(i);
                } else {
                    sig_spec.seed = mix_seed(spec.mc_seed, static_cast<std::uint64_t>(p));
                    const auto signal = build_signal(sig_spec);
                    v = step_integral(signal, gamma, 1, 0, spec.mc_refine);
                }
                sum += v;
                sum_sq += v * v;
            }
            const double n = static_cast<double>(spec.mc_paths);
            const double mean = sum / n;
            const double var = std::max(0.0, sum_sq / n - mean * mean);
            return {mean, std::sqrt(var / n)};
        }
    }
    throw std::logic_error("unreachable");
}

inline double d_gamma(const MomentSpec& spec, double t) { return d_gamma_estimate(spec, t).value; }

// Parity, then closed form, then quadrature; the scheme-facing entry point.
inline double d_gamma_auto(const MultiIndex& gamma, const ExponentVector& hurst, double t) {
    if (d_gamma_parity_zero(gamma, hurst)) return 0.0;
    if (auto v = detail::d_gamma_closed_form(gamma, hurst, t)) return *v;
    MomentSpec spec;
    spec.gamma = gamma;
    spec.hurst = hurst;
    spec.method = MomentMethod::QUADRATURE;
    return d_gamma(spec, t);
}

}  // namespace rough_taylor
