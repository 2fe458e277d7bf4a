#pragma once

#include <cmath>
#include <iostream>
#include <optional>
#include <string>

#include <json.hpp>

#include "integrals.hpp"
#include "moments.hpp"
#include "multiindex.hpp"
#include "rate_formulas.hpp"
#include "signal.hpp"
#include "vector_field.hpp"

namespace rough_taylor {

inline constexpr double kDivergenceGuard = 1e8;

enum class SchemeKind { COMPLETE_TAYLOR, INCOMPLETE, MODIFIED, EULER, MILSTEIN, MODIFIED_EULER };

inline std::string to_string(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::COMPLETE_TAYLOR: return "complete_taylor";
        case SchemeKind::INCOMPLETE: return "incomplete";
        case SchemeKind::MODIFIED: return "modified";
        case SchemeKind::EULER: return "euler";
        case SchemeKind::MILSTEIN: return "milstein";
        case SchemeKind::MODIFIED_EULER: return "modified_euler";
    }
    return "?";
}

struct SchemeConfig {
    SchemeKind kind = SchemeKind::EULER;
    int taylor_order = 1;       // COMPLETE_TAYLOR(N)
    IndexSet index_set;         // INCOMPLETE / MODIFIED
    IndexSet correction_set;    // MODIFIED
    ExponentVector hurst;       // MODIFIED: exponents for D_gamma
    std::uint64_t coarse_n = 64;
    std::uint64_t refine_factor = 64;
    bool interpolate_in_step = false;
    bool allow_non_hierarchical = false;  // negative-experiment override
};

struct SolveResult {
    std::vector<std::vector<double>> values;        // (coarse_n+1) x d
    std::vector<std::vector<double>> dense_values;  // (n_fine+1) x d, when interpolated
    bool diverged = false;
    std::uint64_t diverged_at_step = 0;
    nlohmann::json provenance;

    double component(std::uint64_t k, int i) const { return values[k][static_cast<std::size_t>(i - 1)]; }

    double sup_distance(const SolveResult& other, std::uint64_t stride_self, std::uint64_t stride_other) const {
        double worst = 0.0;
        for (std::uint64_t k = 0; k * stride_self < values.size(); ++k) {
            const auto& a = values[k * stride_self];
            const auto& b = other.values[k * stride_other];
            for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
        }
        return worst;
    }
};

namespace detail {

inline void check_scheme_inputs(const JetOracle& oracle, const IndexSet& set, const DrivingSignal& signal,
                                const Point& y0, const SchemeConfig& config, bool enforce_hierarchy) {
    if (set.empty()) throw config_error("scheme index set is empty");
    if (set.alphabet_size != signal.spec.m) throw config_error("index set alphabet does not match signal");
    if (oracle.alphabet() != signal.spec.m) throw config_error("vector field alphabet does not match signal");
    if (static_cast<int>(y0.size()) != oracle.dimension()) throw config_error("y0 dimension mismatch");
    if (config.coarse_n == 0 || signal.spec.n_fine % config.coarse_n != 0)
        throw config_error("coarse grid must divide the fine grid");
    const int N = set.max_length();
    if (oracle.max_order() < N - 1) throw config_error("derivative order unavailable for this scheme");
    if (enforce_hierarchy && !config.allow_non_hierarchical && !is_hierarchical(set))
        throw config_error("index set is not hierarchical (set allow_non_hierarchical to override)");
}

inline std::uint64_t clamped_refine(const DrivingSignal& signal, const SchemeConfig& config) {
    const std::uint64_t fine_per_coarse = signal.spec.n_fine / config.coarse_n;
    return std::min<std::uint64_t>(std::max<std::uint64_t>(1, config.refine_factor), fine_per_coarse);
}

// partial integrals x^gamma_{t_k, t} at every fine node of step k, for in-step interpolation
inline std::vector<double> partial_integrals_on_fine(const DrivingSignal& signal, const MultiIndex& alpha,
                                                     std::uint64_t coarse_n, std::uint64_t k) {
    const std::uint64_t full = signal.spec.n_fine / coarse_n;
    const auto grid = StepGrid::make(signal, coarse_n, k, full);
    if (is_single_letter(alpha)) {
        std::vector<double> out(static_cast<std::size_t>(full) + 1, 0.0);
        for (std::uint64_t s = 0; s <= full; ++s) {
            const double dx = signal.increment(alpha[0], grid.node(0), grid.node(s));
            double v = 1.0;
            for (int i = 1; i <= static_cast<int>(alpha.size()); ++i) v *= dx / static_cast<double>(i);
            out[s] = v;
        }
        return out;
    }
    return running_step_integral(signal, alpha, grid);
}

}  // namespace detail

// One-step map y -> y + sum_gamma (V_gamma I)(y) x^gamma; the core incomplete Taylor scheme.
// A precomputed StepIntegralTable for the same (signal, coarse_n, refine) may be shared
// across scheme variants in rate sweeps.
inline SolveResult solve_incomplete(const JetOracle& oracle, const IndexSet& set, const DrivingSignal& signal,
                                    const Point& y0, const SchemeConfig& config,
                                    const StepIntegralTable* shared_table = nullptr,
                                    const IndexSet* correction_set = nullptr) {
    detail::check_scheme_inputs(oracle, set, signal, y0, config, true);
    const std::uint64_t refine = detail::clamped_refine(signal, config);
    const int d = oracle.dimension();
    const int N = set.max_length();

    std::optional<StepIntegralTable> local_table;
    const StepIntegralTable* table = shared_table;
    if (!table || table->coarse_n != config.coarse_n) {
        local_table = build_step_integral_table(signal, set, config.coarse_n, refine);
        table = &*local_table;
    }

    // deterministic corrections, evaluated once (uniform grid)
    std::vector<std::pair<MultiIndex, double>> corrections;
    if (correction_set) {
        const double dt = signal.spec.T / static_cast<double>(config.coarse_n);
        for (const auto& gamma : correction_set->members) {
            bool parity_ok = true;
            for (int j = 1; j <= config.hurst.m(); ++j)
                if (!config.hurst.letter_is_time(j) && ExponentVector::letter_count(gamma, j) % 2 == 1)
                    parity_ok = false;
            if (!parity_ok)
                std::cerr << "warning: correction word " << to_string(gamma)
                          << " has an odd fBm letter count; its D term vanishes\n";
            corrections.emplace_back(gamma, d_gamma_auto(gamma, config.hurst, dt));
        }
    }

    SolveResult result;
    result.values.assign(config.coarse_n + 1, Point(static_cast<std::size_t>(d), 0.0));
    result.values[0] = y0;
    if (config.interpolate_in_step)
        result.dense_values.assign(static_cast<std::size_t>(signal.spec.n_fine) + 1,
                                   Point(static_cast<std::size_t>(d), 0.0));

    const int max_word_len = correction_set ? std::max(N, correction_set->max_length()) : N;
    JetCache cache;
    Point y = y0;
    const std::uint64_t fine_per_coarse = signal.spec.n_fine / config.coarse_n;

    for (std::uint64_t k = 0; k < config.coarse_n; ++k) {
        bool finite = true;
        for (double v : y) finite = finite && std::isfinite(v) && std::abs(v) <= kDivergenceGuard;
        if (!finite) {
            result.diverged = true;
            result.diverged_at_step = k;
            for (std::uint64_t kk = k; kk < config.coarse_n; ++kk) result.values[kk + 1] = y;
            break;
        }

        cache.reset(JetSpace::get(d, max_word_len - 1), y);
        Point y_next = y;
        std::vector<std::pair<MultiIndex, FieldValue>> fields;  // reused for interpolation
        for (const auto& gamma : set.members) {
            FieldValue f = iterated_field(oracle, gamma, y, &cache);
            const double xg = table->at(k, gamma);
            for (int i = 0; i < d; ++i) y_next[static_cast<std::size_t>(i)] += f[static_cast<std::size_t>(i)] * xg;
            if (config.interpolate_in_step) fields.emplace_back(gamma, std::move(f));
        }
        std::vector<FieldValue> correction_fields;
        correction_fields.reserve(corrections.size());
        for (const auto& [gamma, dval] : corrections) {
            FieldValue f = iterated_field(oracle, gamma, y, &cache);
            for (int i = 0; i < d; ++i) y_next[static_cast<std::size_t>(i)] += f[static_cast<std::size_t>(i)] * dval;
            correction_fields.push_back(std::move(f));
        }

        if (config.interpolate_in_step) {
            // y^n_t = y^n_{t_k} + sum_gamma (V_gamma I)(y_k) x^gamma_{t_k,t} on the fine grid,
            // plus D_gamma(t - t_k) for the corrected words
            std::vector<std::vector<double>> partials;
            partials.reserve(fields.size());
            for (const auto& [gamma, f] : fields)
                partials.push_back(detail::partial_integrals_on_fine(signal, gamma, config.coarse_n, k));
            const double dt = signal.spec.T / static_cast<double>(config.coarse_n);
            for (std::uint64_t s = 0; s <= fine_per_coarse; ++s) {
                Point yt = y;
                for (std::size_t gi = 0; gi < fields.size(); ++gi)
                    for (int i = 0; i < d; ++i)
                        yt[static_cast<std::size_t>(i)] += fields[gi].second[static_cast<std::size_t>(i)] * partials[gi][s];
                if (!corrections.empty()) {
                    const double tau = dt * static_cast<double>(s) / static_cast<double>(fine_per_coarse);
                    for (std::size_t ci = 0; ci < corrections.size(); ++ci) {
                        // D_gamma(tau) = D_gamma(dt) (tau/dt)^{H_gamma} by self-similarity
                        const double h_gamma = config.hurst.sum_over(corrections[ci].first);
                        const double scale = (tau == 0.0) ? 0.0 : std::pow(tau / dt, h_gamma);
                        const auto& f = correction_fields[ci];
                        for (int i = 0; i < d; ++i)
                            yt[static_cast<std::size_t>(i)] += f[static_cast<std::size_t>(i)] * corrections[ci].second * scale;
                    }
                }
                result.dense_values[k * fine_per_coarse + s] = yt;
            }
        }

        result.values[k + 1] = y_next;
        y = std::move(y_next);
    }

    result.provenance = {{"scheme", "incomplete"},
                         {"coarse_n", config.coarse_n},
                         {"refine_factor", refine},
                         {"index_set", to_json(set)},
                         {"signal", signal.spec.to_json()}};
    if (correction_set) result.provenance["correction_set"] = to_json(*correction_set);
    return result;
}

// Incomplete scheme plus deterministic corrections (V_gamma I)(y) D_gamma(dt).
inline SolveResult solve_modified(const JetOracle& oracle, const IndexSet& set_rho, const IndexSet& correction_set,
                                  const ExponentVector& hurst, const DrivingSignal& signal, const Point& y0,
                                  SchemeConfig config) {
    config.hurst = hurst;
    auto result = solve_incomplete(oracle, set_rho, signal, y0, config, nullptr, &correction_set);
    result.provenance["scheme"] = "modified";
    return result;
}

// Complete Taylor of order N: all words up to length N.
inline SolveResult solve_complete_taylor(const JetOracle& oracle, int order, const DrivingSignal& signal,
                                         const Point& y0, const SchemeConfig& config) {
    auto result = solve_incomplete(oracle, IndexSet::all_words_up_to(order, signal.spec.m), signal, y0, config);
    result.provenance["scheme"] = "complete_taylor";
    result.provenance["order"] = order;
    return result;
}

// The named classical schemes as thin wrappers over the general forms.
inline SolveResult solve_named(SchemeKind kind, const JetOracle& oracle, const DrivingSignal& signal,
                               const Point& y0, const SchemeConfig& config) {
    const int m = signal.spec.m;
    switch (kind) {
        case SchemeKind::EULER:
            return solve_incomplete(oracle, IndexSet::letters(m), signal, y0, config);
        case SchemeKind::MILSTEIN: {
            if (!signal.spec.component_1_is_time)
                throw config_error("Milstein requires component 1 to be the time path");
            std::set<MultiIndex> words;
            for (int j = 1; j <= m; ++j) words.insert({j});
            for (int j = 2; j <= m; ++j)
                for (int j2 = 2; j2 <= m; ++j2) words.insert({j, j2});
            return solve_incomplete(oracle, IndexSet(std::move(words), m), signal, y0, config);
        }
        case SchemeKind::MODIFIED_EULER: {
            const auto& hurst = signal.spec.hurst;
            const double rho = rho_of(IndexSet::letters(m), hurst);
            const auto [rho_next, corrections] = next_rate_and_correction_set(rho, hurst, m);
            (void)rho_next;
            return solve_modified(oracle, IndexSet::letters(m), corrections, hurst, signal, y0, config);
        }
        default:
            throw config_error("solve_named expects EULER, MILSTEIN or MODIFIED_EULER");
    }
}

// Self-convergence reference: complete Taylor (default order 3) on a much finer coarse grid.
inline SolveResult reference_solution(const JetOracle& oracle, const DrivingSignal& signal, const Point& y0,
                                      std::uint64_t ref_n, int order = 3) {
    SchemeConfig config;
    config.coarse_n = ref_n;
    config.refine_factor = signal.spec.n_fine / ref_n;
    auto result = solve_complete_taylor(oracle, order, signal, y0, config);
    result.provenance["scheme"] = "reference";
    return result;
}

}  // namespace rough_taylor
