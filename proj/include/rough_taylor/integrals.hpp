#pragma once

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "multiindex.hpp"
#include "signal.hpp"

namespace rough_taylor {

inline constexpr double kRelativeEps = 1e-300;  // guards symmetric cancellations

// Locates coarse step k inside the fine grid and the refined subgrid within it.
struct StepGrid {
    std::uint64_t fine_start;   // fine index of t_k
    std::uint64_t fine_stride;  // fine steps per subgrid step
    std::uint64_t sub_steps;    // refine_factor

    static StepGrid make(const DrivingSignal& signal, std::uint64_t coarse_n, std::uint64_t k,
                         std::uint64_t refine_factor) {
        if (coarse_n == 0 || signal.spec.n_fine % coarse_n != 0)
            throw std::invalid_argument("coarse grid must divide the fine grid");
        const std::uint64_t fine_per_coarse = signal.spec.n_fine / coarse_n;
        if (refine_factor < 1 || fine_per_coarse % refine_factor != 0)
            throw std::invalid_argument("refine_factor must divide the fine steps per coarse step");
        if (k >= coarse_n) throw std::invalid_argument("coarse step index out of range");
        return {k * fine_per_coarse, fine_per_coarse / refine_factor, refine_factor};
    }

    std::uint64_t node(std::uint64_t s) const { return fine_start + s * fine_stride; }
};

namespace detail {

// Running iterated Riemann-Stieltjes sums of x^alpha over the subgrid: level 1 is the
// increment, level l accumulates level-(l-1) values against the component alpha(l) with
// averaged endpoints. Returns the level-r values at every subgrid node (0..sub_steps).
inline std::vector<double> running_step_integral(const DrivingSignal& signal, const MultiIndex& alpha,
                                                 const StepGrid& grid) {
    const std::size_t nodes = static_cast<std::size_t>(grid.sub_steps) + 1;
    std::vector<double> level(nodes, 0.0), next(nodes, 0.0);
    for (std::size_t s = 0; s < nodes; ++s)
        level[s] = signal.increment(alpha[0], grid.node(0), grid.node(static_cast<std::uint64_t>(s)));
    for (std::size_t l = 1; l < alpha.size(); ++l) {
        const int letter = alpha[l];
        next[0] = 0.0;
        for (std::size_t s = 1; s < nodes; ++s) {
            const double dx = signal.increment(letter, grid.node(static_cast<std::uint64_t>(s - 1)),
                                               grid.node(static_cast<std::uint64_t>(s)));
            next[s] = next[s - 1] + 0.5 * (level[s - 1] + level[s]) * dx;
        }
        std::swap(level, next);
    }
    return level;
}

}  // namespace detail

// x^alpha over coarse step k, approximated by nested Riemann-Stieltjes sums on the
// refined subgrid. Converges to the Young integral as refine_factor grows.
inline double step_integral(const DrivingSignal& signal, const MultiIndex& alpha, std::uint64_t coarse_n,
                            std::uint64_t k, std::uint64_t refine_factor) {
    if (alpha.empty()) throw std::invalid_argument("step_integral: empty multi-index");
    validate_word(alpha, signal.spec.m);
    const auto grid = StepGrid::make(signal, coarse_n, k, refine_factor);
    return detail::running_step_integral(signal, alpha, grid).back();
}

// Exact Young value (delta x)^r / r! for words repeating a single letter.
inline double step_integral_single_letter(const DrivingSignal& signal, int letter, int r, std::uint64_t coarse_n,
                                          std::uint64_t k) {
    const auto grid = StepGrid::make(signal, coarse_n, k, 1);
    const double dx = signal.increment(letter, grid.node(0), grid.node(grid.sub_steps));
    double value = 1.0;
    for (int i = 1; i <= r; ++i) value *= dx / static_cast<double>(i);
    return value;
}

inline bool is_single_letter(const MultiIndex& alpha) {
    for (int a : alpha)
        if (a != alpha[0]) return false;
    return true;
}

// Natural magnitude of x^alpha over the step: product of per-letter oscillations.
// Used to normalize identity discrepancies, since the integrals themselves can cancel
// to far below the size of the paths driving them.
inline double step_oscillation_scale(const DrivingSignal& signal, const MultiIndex& alpha,
                                     std::uint64_t coarse_n, std::uint64_t k, std::uint64_t refine_factor) {
    const auto grid = StepGrid::make(signal, coarse_n, k, refine_factor);
    double scale = 1.0;
    for (int letter : alpha) {
        double osc = 0.0;
        for (std::uint64_t s = 1; s <= grid.sub_steps; ++s)
            osc = std::max(osc, std::abs(signal.increment(letter, grid.node(0), grid.node(s))));
        scale *= osc;
    }
    return scale;
}

// Product of two step integrals vs the shuffle expansion. The discrepancy is reported
// relative to the magnitude of the quantities involved (|LHS| plus the absolute sum of the
// expansion terms) so that symmetric cancellations do not blow up the ratio.
inline double shuffle_identity_check(const DrivingSignal& signal, const MultiIndex& gamma1,
                                     const MultiIndex& gamma2, std::uint64_t coarse_n, std::uint64_t k,
                                     std::uint64_t refine_factor) {
    const double lhs = step_integral(signal, gamma1, coarse_n, k, refine_factor) *
                       step_integral(signal, gamma2, coarse_n, k, refine_factor);
    MultiIndex gamma(gamma1);
    gamma.insert(gamma.end(), gamma2.begin(), gamma2.end());
    double rhs = 0.0;
    for (const auto& rho : shuffles(gamma1, gamma2))
        rhs += step_integral(signal, compose(gamma, rho.inverse()), coarse_n, k, refine_factor);
    const double scale = std::abs(lhs) + step_oscillation_scale(signal, gamma, coarse_n, k, refine_factor);
    return std::abs(lhs - rhs) / (scale + kRelativeEps);
}

// Nested multiple integral of running multiple integrals vs the Xi_r expansion.
// The left side treats each g^{gamma^i} as an integrand path on the subgrid.
inline double nested_integral_check(const DrivingSignal& signal, const std::vector<MultiIndex>& gammas,
                                    std::uint64_t coarse_n, std::uint64_t k, std::uint64_t refine_factor) {
    if (gammas.empty()) throw std::invalid_argument("nested_integral_check: no words");
    const auto grid = StepGrid::make(signal, coarse_n, k, refine_factor);
    const std::size_t nodes = static_cast<std::size_t>(grid.sub_steps) + 1;

    std::vector<double> level = detail::running_step_integral(signal, gammas[0], grid);
    for (std::size_t i = 1; i < gammas.size(); ++i) {
        const auto integrator = detail::running_step_integral(signal, gammas[i], grid);
        std::vector<double> next(nodes, 0.0);
        for (std::size_t s = 1; s < nodes; ++s)
            next[s] = next[s - 1] + 0.5 * (level[s - 1] + level[s]) * (integrator[s] - integrator[s - 1]);
        level = std::move(next);
    }
    const double lhs = level.back();

    MultiIndex gamma;
    std::vector<int> taus;
    for (const auto& g : gammas) {
        gamma.insert(gamma.end(), g.begin(), g.end());
        taus.push_back(static_cast<int>(gamma.size()));
    }
    double rhs = 0.0;
    for (const auto& rho : xi_set(taus, static_cast<int>(gamma.size())))
        rhs += step_integral(signal, compose(gamma, rho.inverse()), coarse_n, k, refine_factor);
    const double scale = std::abs(lhs) + step_oscillation_scale(signal, gamma, coarse_n, k, refine_factor);
    return std::abs(lhs - rhs) / (scale + kRelativeEps);
}

// J_r^alpha summed over the per-step simplices between coarse grid points s and t.
// Single-letter words use the exact closed form; mixed words use the refined sums.
inline double simplex_sum(const DrivingSignal& signal, const MultiIndex& alpha, std::uint64_t coarse_n,
                          std::uint64_t refine_factor, std::uint64_t k_begin, std::uint64_t k_end) {
    validate_word(alpha, signal.spec.m);
    double sum = 0.0;
    if (is_single_letter(alpha)) {
        for (std::uint64_t k = k_begin; k < k_end; ++k)
            sum += step_integral_single_letter(signal, alpha[0], static_cast<int>(alpha.size()), coarse_n, k);
    } else {
        for (std::uint64_t k = k_begin; k < k_end; ++k)
            sum += step_integral(signal, alpha, coarse_n, k, refine_factor);
    }
    return sum;
}

// Table of step integrals shared across scheme variants on the same path.
struct StepIntegralTable {
    std::uint64_t coarse_n = 0;
    std::uint64_t refine_factor = 0;
    std::map<std::pair<std::uint64_t, MultiIndex>, double> values;

    double at(std::uint64_t k, const MultiIndex& alpha) const { return values.at({k, alpha}); }

    void export_csv(const std::string& filename) const {
        std::ofstream out(filename);
        if (!out) throw std::runtime_error("cannot open " + filename);
        out << "k,alpha,value\n";
        out.precision(17);
        for (const auto& [key, value] : values) out << key.first << "," << to_string(key.second) << "," << value << "\n";
    }
};

inline StepIntegralTable build_step_integral_table(const DrivingSignal& signal, const IndexSet& words,
                                                   std::uint64_t coarse_n, std::uint64_t refine_factor) {
    StepIntegralTable table;
    table.coarse_n = coarse_n;
    table.refine_factor = refine_factor;
    for (std::uint64_t k = 0; k < coarse_n; ++k) {
        for (const auto& alpha : words.members) {
            const double v = is_single_letter(alpha)
                                 ? step_integral_single_letter(signal, alpha[0], static_cast<int>(alpha.size()),
                                                               coarse_n, k)
                                 : step_integral(signal, alpha, coarse_n, k, refine_factor);
            table.values.emplace(std::make_pair(k, alpha), v);
        }
    }
    return table;
}

}  // namespace rough_taylor
