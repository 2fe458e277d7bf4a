#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "parallel.hpp"
#include "rate_formulas.hpp"
#include "schemes.hpp"

namespace rough_taylor {

// ---------------------------------------------------------------------------
// slope fitting
// ---------------------------------------------------------------------------

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double ci_half_width = 0.0;  // 2 SE of the slope
    double log_coefficient = 0.0;  // coefficient of log log n when regressed jointly
};

// OLS of log(error) on log(n); optional weights 1/sigma^2 and an optional joint
// log log n regressor (used at H = 3/4 where a sqrt(log n) factor is expected).
inline SlopeFit fit_loglog(const std::vector<std::uint64_t>& ns, const std::vector<double>& errors,
                           const std::vector<double>& sigmas = {}, bool with_loglog_term = false) {
    const std::size_t n = ns.size();
    if (n < 2 || errors.size() != n) throw std::invalid_argument("fit_loglog needs >= 2 points");
    std::vector<double> x(n), y(n), w(n, 1.0), z(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(errors[i] > 0.0)) throw infeasible_error("nonpositive error in slope fit");
        x[i] = std::log(static_cast<double>(ns[i]));
        y[i] = std::log(errors[i]);
        z[i] = std::log(x[i]);
        if (!sigmas.empty() && sigmas[i] > 0.0) {
            const double sigma_log = sigmas[i] / errors[i];
            w[i] = 1.0 / (sigma_log * sigma_log + 1e-12);
        }
    }

    if (!with_loglog_term) {
        double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            sw += w[i];
            sx += w[i] * x[i];
            sy += w[i] * y[i];
            sxx += w[i] * x[i] * x[i];
            sxy += w[i] * x[i] * y[i];
        }
        const double denom = sw * sxx - sx * sx;
        SlopeFit fit;
        fit.slope = (sw * sxy - sx * sy) / denom;
        fit.intercept = (sy - fit.slope * sx) / sw;
        double rss = 0.0, wsum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - fit.intercept - fit.slope * x[i];
            rss += w[i] * r * r;
            wsum += w[i];
        }
        const double dof = std::max(1.0, static_cast<double>(n) - 2.0);
        const double sigma2 = (n > 2) ? rss / dof : 1.0 / wsum;
        fit.ci_half_width = 2.0 * std::sqrt(std::max(sigma2 * sw / denom, 1.0 / denom));
        return fit;
    }

    // regress y = a + b x + c log x (3-parameter normal equations)
    double M[3][3] = {{0}}, v[3] = {0};
    for (std::size_t i = 0; i < n; ++i) {
        const double row[3] = {1.0, x[i], z[i]};
        for (int a = 0; a < 3; ++a) {
            v[a] += w[i] * row[a] * y[i];
            for (int b = 0; b < 3; ++b) M[a][b] += w[i] * row[a] * row[b];
        }
    }
    // solve 3x3 by Gaussian elimination
    double A[3][4];
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) A[a][b] = M[a][b];
        A[a][3] = v[a];
    }
    for (int c = 0; c < 3; ++c) {
        int pivot = c;
        for (int r2 = c + 1; r2 < 3; ++r2)
            if (std::abs(A[r2][c]) > std::abs(A[pivot][c])) pivot = r2;
        std::swap(A[c], A[pivot]);
        for (int r2 = 0; r2 < 3; ++r2) {
            if (r2 == c) continue;
            const double f = A[r2][c] / A[c][c];
            for (int b = c; b < 4; ++b) A[r2][b] -= f * A[c][b];
        }
    }
    SlopeFit fit;
    fit.intercept = A[0][3] / A[0][0];
    fit.slope = A[1][3] / A[1][1];
    fit.log_coefficient = A[2][3] / A[2][2];
    fit.ci_half_width = 0.3;  // 3-parameter fit on a short ladder: wide nominal band
    return fit;
}

// ---------------------------------------------------------------------------
// experiment plan and report
// ---------------------------------------------------------------------------

struct ExperimentPlan {
    std::string experiment = "lp";  // "as" | "lp" | "nu" | "omega"
    std::string model = "sine_field";
    nlohmann::json model_spec;  // optional polynomial field JSON

    SchemeKind scheme = SchemeKind::EULER;
    int taylor_order = 1;
    IndexSet index_set;       // INCOMPLETE / MODIFIED
    IndexSet correction_set;  // MODIFIED

    int m = 1;
    ExponentVector hurst = ExponentVector::hurst({0.7});
    bool component_1_is_time = false;
    double T = 1.0;
    Point y0 = {0.7};

    std::vector<std::uint64_t> n_values = {64, 128, 256, 512, 1024, 2048};
    int paths = 100;
    double p_moment = 2.0;
    std::uint64_t seed = 1;
    std::uint64_t ref_n = 0;  // 0: 8x the largest n
    int ref_order = 3;
    std::uint64_t refine_factor = 64;
    double tolerance = 0.1;
    double reg_offset = 0.02;  // beta_j = H_j - offset for the a.s. theory column
    int threads = 0;           // 0: default_thread_count()

    MultiIndex alpha = {1, 1};  // nu/omega experiments

    // optional side evaluation of D_gamma, attached to the report meta
    MultiIndex moment_gamma;
    MomentMethod moment_method = MomentMethod::QUADRATURE;
    double moment_t = 1.0;

    void validate() const {
        if (n_values.size() < 4 && (experiment == "as" || experiment == "lp"))
            throw infeasible_error("insufficient ladder: need at least 4 n values");
        for (std::size_t i = 1; i < n_values.size(); ++i)
            if (n_values[i] <= n_values[i - 1]) throw config_error("n_values must be strictly increasing");
        if (paths < 1) throw config_error("paths must be positive");
        if ((experiment == "lp") && paths < 30) throw infeasible_error("L_p claims need at least 30 paths");
        if (hurst.m() != m) throw config_error("hurst vector must have m entries");
    }
};

struct RateRow {
    std::uint64_t n = 0;
    double q25 = 0.0, median = 0.0, q75 = 0.0;  // pathwise sup-error quantiles (a.s.)
    double lp_mean = 0.0, lp_se = 0.0;          // L_p statistic and its standard error
};

struct RateReport {
    std::string experiment;
    std::vector<RateRow> rows;
    double slope = 0.0;
    double ci_half_width = 0.0;
    double theory = 0.0;  // expected slope (negative rate)
    double tolerance = 0.0;
    bool pass = false;
    double log_coefficient = 0.0;
    int excluded_paths = 0;
    nlohmann::json meta;

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json rows_json = nlohmann::ordered_json::array();
        for (const auto& r : rows)
            rows_json.push_back({{"n", r.n},
                                 {"q25", r.q25},
                                 {"median", r.median},
                                 {"q75", r.q75},
                                 {"lp_mean", r.lp_mean},
                                 {"lp_se", r.lp_se}});
        return {{"experiment", experiment}, {"slope", slope},         {"ci", ci_half_width},
                {"theory", theory},         {"tolerance", tolerance}, {"verdict", pass ? "pass" : "fail"},
                {"log_coefficient", log_coefficient},                 {"excluded_paths", excluded_paths},
                {"rows", rows_json},        {"meta", meta}};
    }
};

namespace detail {

inline double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * (static_cast<double>(v.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline std::unique_ptr<JetOracle> make_model(const ExperimentPlan& plan) {
    if (!plan.model_spec.is_null() && !plan.model_spec.empty())
        return std::make_unique<PolynomialVectorField>(PolynomialVectorField::from_json(plan.model_spec));
    if (plan.model == "sine_field") return std::make_unique<CallbackOracle>(make_sine_field(1, plan.m));
    return make_builtin_model(plan.model);
}

inline IndexSet scheme_set(const ExperimentPlan& plan) {
    switch (plan.scheme) {
        case SchemeKind::EULER: return IndexSet::letters(plan.m);
        case SchemeKind::MILSTEIN: {
            std::set<MultiIndex> words;
            for (int j = 1; j <= plan.m; ++j) words.insert({j});
            for (int j = 2; j <= plan.m; ++j)
                for (int j2 = 2; j2 <= plan.m; ++j2) words.insert({j, j2});
            return IndexSet(std::move(words), plan.m);
        }
        case SchemeKind::COMPLETE_TAYLOR: return IndexSet::all_words_up_to(plan.taylor_order, plan.m);
        case SchemeKind::MODIFIED_EULER: return IndexSet::letters(plan.m);
        case SchemeKind::INCOMPLETE:
        case SchemeKind::MODIFIED: return plan.index_set;
    }
    throw config_error("unknown scheme kind");
}

inline IndexSet scheme_corrections(const ExperimentPlan& plan) {
    if (plan.scheme == SchemeKind::MODIFIED) return plan.correction_set;
    if (plan.scheme == SchemeKind::MODIFIED_EULER) {
        const double rho = rho_of(IndexSet::letters(plan.m), plan.hurst);
        return next_rate_and_correction_set(rho, plan.hurst, plan.m).second;
    }
    return {};
}

inline bool is_modified(SchemeKind kind) {
    return kind == SchemeKind::MODIFIED || kind == SchemeKind::MODIFIED_EULER;
}

// sigma_n adjustment of the modified-scheme theory slope: an extra 1/2 below H = 3/4,
// 2 - 2H above it, and a sqrt(log n) factor exactly at 3/4 that the fit regresses out.
inline double sigma_exponent_gain(double h_max) {
    if (h_max < 0.75) return 0.5;
    if (h_max > 0.75) return 2.0 - 2.0 * h_max;
    return 0.5;
}

inline SignalSpec signal_spec_for(const ExperimentPlan& plan, std::uint64_t n_fine, std::uint64_t path_index) {
    SignalSpec spec;
    spec.m = plan.m;
    spec.hurst = plan.hurst;
    spec.component_1_is_time = plan.component_1_is_time;
    spec.T = plan.T;
    spec.n_fine = n_fine;
    spec.seed = mix_seed(plan.seed, path_index);
    return spec;
}

}  // namespace detail

// Almost-sure rate experiment: per path, sup-grid errors against the self-convergence
// reference, a per-path slope, and the median/IQR of the slope distribution against
// theta computed from Holder exponents beta_j = H_j - reg_offset.
inline RateReport as_rate_experiment(const ExperimentPlan& plan) {
    plan.validate();
    const std::uint64_t n_max = plan.n_values.back();
    const std::uint64_t ref_n = plan.ref_n ? plan.ref_n : 8 * n_max;
    for (std::uint64_t n : plan.n_values)
        if (ref_n % n != 0) throw config_error("ref_n must be a multiple of every n");
    const std::uint64_t n_fine = ref_n;
    const auto oracle = detail::make_model(plan);
    const IndexSet set = detail::scheme_set(plan);
    const IndexSet corrections = detail::scheme_corrections(plan);

    const std::size_t paths = static_cast<std::size_t>(plan.paths);
    std::vector<std::vector<double>> sup_errors(paths, std::vector<double>(plan.n_values.size(), 0.0));
    std::vector<char> usable(paths, 1);
    std::vector<double> ref_sensitivity(paths, 0.0);

    parallel_for(paths, plan.threads ? plan.threads : default_thread_count(), [&](std::size_t p) {
        const auto signal = build_signal(detail::signal_spec_for(plan, n_fine, static_cast<std::uint64_t>(p)));
        const auto reference = reference_solution(*oracle, signal, plan.y0, ref_n, plan.ref_order);
        if (reference.diverged) {
            usable[p] = 0;
            return;
        }
        if (p == 0) {
            const auto alt = reference_solution(*oracle, signal, plan.y0, ref_n, plan.ref_order - 1);
            ref_sensitivity[0] = reference.sup_distance(alt, 1, 1);
        }
        for (std::size_t ni = 0; ni < plan.n_values.size(); ++ni) {
            const std::uint64_t n = plan.n_values[ni];
            SchemeConfig config;
            config.coarse_n = n;
            config.refine_factor = plan.refine_factor;
            config.hurst = plan.hurst;
            SolveResult run = detail::is_modified(plan.scheme)
                                  ? solve_modified(*oracle, set, corrections, plan.hurst, signal, plan.y0, config)
                                  : solve_incomplete(*oracle, set, signal, plan.y0, config);
            if (run.diverged) {
                usable[p] = 0;
                return;
            }
            sup_errors[p][ni] = run.sup_distance(reference, 1, ref_n / n);
        }
    });

    RateReport report;
    report.experiment = "as";
    std::vector<double> slopes;
    for (std::size_t p = 0; p < paths; ++p) {
        if (!usable[p]) continue;
        bool positive = true;
        for (double e : sup_errors[p]) positive = positive && e > 0.0;
        if (!positive) continue;
        slopes.push_back(fit_loglog(plan.n_values, sup_errors[p]).slope);
    }
    if (slopes.size() < 4) throw infeasible_error("insufficient ladder: too few usable paths");

    for (std::size_t ni = 0; ni < plan.n_values.size(); ++ni) {
        std::vector<double> column;
        for (std::size_t p = 0; p < paths; ++p)
            if (usable[p]) column.push_back(sup_errors[p][ni]);
        RateRow row;
        row.n = plan.n_values[ni];
        row.q25 = detail::quantile(column, 0.25);
        row.median = detail::quantile(column, 0.5);
        row.q75 = detail::quantile(column, 0.75);
        report.rows.push_back(row);
    }

    report.slope = detail::quantile(slopes, 0.5);
    report.ci_half_width = 0.5 * (detail::quantile(slopes, 0.75) - detail::quantile(slopes, 0.25));
    report.excluded_paths = static_cast<int>(paths - slopes.size());

    // theory column via theta_of on Holder exponents H_j - offset (time letter stays at 1)
    std::vector<double> betas(plan.hurst.values);
    for (std::size_t j = 0; j < betas.size(); ++j)
        if (!(plan.component_1_is_time && j == 0)) betas[j] -= plan.reg_offset;
    report.theory = -theta_of(set, ExponentVector::holder(betas));
    report.tolerance = plan.tolerance;
    report.pass = std::abs(report.slope - report.theory) <= plan.tolerance;
    report.meta = {{"scheme", to_string(plan.scheme)},
                   {"paths", plan.paths},
                   {"ref_n", ref_n},
                   {"ref_order", plan.ref_order},
                   {"reference_sensitivity", ref_sensitivity[0]},
                   {"reg_offset", plan.reg_offset},
                   {"slope_statistic", "median of per-path slopes"},
                   {"seed", plan.seed}};
    return report;
}

// L_p rate experiment at t = T against the reference, with MC standard errors propagated
// into a weighted log-log fit. Modified schemes compare against rho plus the sigma_n gain.
inline RateReport lp_rate_experiment(const ExperimentPlan& plan) {
    plan.validate();
    const std::uint64_t n_max = plan.n_values.back();
    const std::uint64_t ref_n = plan.ref_n ? plan.ref_n : 8 * n_max;
    for (std::uint64_t n : plan.n_values)
        if (ref_n % n != 0) throw config_error("ref_n must be a multiple of every n");
    const std::uint64_t n_fine = ref_n;
    const auto oracle = detail::make_model(plan);
    const IndexSet set = detail::scheme_set(plan);
    const IndexSet corrections = detail::scheme_corrections(plan);

    const std::size_t paths = static_cast<std::size_t>(plan.paths);
    std::vector<std::vector<double>> terminal_error(paths, std::vector<double>(plan.n_values.size(), 0.0));
    std::vector<char> usable(paths, 1);
    std::vector<double> ref_sensitivity(paths, 0.0);

    parallel_for(paths, plan.threads ? plan.threads : default_thread_count(), [&](std::size_t p) {
        const auto signal = build_signal(detail::signal_spec_for(plan, n_fine, static_cast<std::uint64_t>(p)));
        const auto reference = reference_solution(*oracle, signal, plan.y0, ref_n, plan.ref_order);
        if (reference.diverged) {
            usable[p] = 0;
            return;
        }
        if (p == 0) {
            const auto alt = reference_solution(*oracle, signal, plan.y0, ref_n, plan.ref_order - 1);
            ref_sensitivity[0] = reference.sup_distance(alt, 1, 1);
        }
        for (std::size_t ni = 0; ni < plan.n_values.size(); ++ni) {
            SchemeConfig config;
            config.coarse_n = plan.n_values[ni];
            config.refine_factor = plan.refine_factor;
            config.hurst = plan.hurst;
            SolveResult run = detail::is_modified(plan.scheme)
                                  ? solve_modified(*oracle, set, corrections, plan.hurst, signal, plan.y0, config)
                                  : solve_incomplete(*oracle, set, signal, plan.y0, config);
            if (run.diverged) {
                usable[p] = 0;
                return;
            }
            double err = 0.0;
            const auto& a = run.values.back();
            const auto& b = reference.values.back();
            for (std::size_t i = 0; i < a.size(); ++i) err = std::max(err, std::abs(a[i] - b[i]));
            terminal_error[p][ni] = err;
        }
    });

    RateReport report;
    report.experiment = "lp";
    std::vector<double> lp(plan.n_values.size(), 0.0), lp_se(plan.n_values.size(), 0.0);
    int used = 0;
    for (std::size_t p = 0; p < paths; ++p)
        if (usable[p]) ++used;
    if (used < 4) throw infeasible_error("insufficient ladder: too few usable paths");
    report.excluded_paths = static_cast<int>(paths) - used;

    for (std::size_t ni = 0; ni < plan.n_values.size(); ++ni) {
        double mean_pow = 0.0, mean_pow_sq = 0.0;
        for (std::size_t p = 0; p < paths; ++p) {
            if (!usable[p]) continue;
            const double e = std::pow(terminal_error[p][ni], plan.p_moment);
            mean_pow += e;
            mean_pow_sq += e * e;
        }
        mean_pow /= used;
        mean_pow_sq /= used;
        const double se_pow = std::sqrt(std::max(0.0, mean_pow_sq - mean_pow * mean_pow) / used);
        lp[ni] = std::pow(mean_pow, 1.0 / plan.p_moment);
        // delta method: d(mean^{1/p})/d(mean) = mean^{1/p - 1} / p
        lp_se[ni] = se_pow * std::pow(mean_pow, 1.0 / plan.p_moment - 1.0) / plan.p_moment;

        RateRow row;
        row.n = plan.n_values[ni];
        row.lp_mean = lp[ni];
        row.lp_se = lp_se[ni];
        report.rows.push_back(row);
    }

    double h_fbm = 0.0;
    for (int j = 1; j <= plan.m; ++j)
        if (!plan.hurst.letter_is_time(j)) h_fbm = std::max(h_fbm, plan.hurst[j]);
    const bool at_three_quarters = detail::is_modified(plan.scheme) && std::abs(h_fbm - 0.75) < 1e-9;

    const SlopeFit fit = fit_loglog(plan.n_values, lp, lp_se, at_three_quarters);
    report.slope = fit.slope;
    report.ci_half_width = fit.ci_half_width;
    report.log_coefficient = fit.log_coefficient;

    double rho = rho_of(set, plan.hurst);
    if (detail::is_modified(plan.scheme)) rho += detail::sigma_exponent_gain(h_fbm);
    report.theory = -rho;
    report.tolerance = plan.tolerance;
    report.pass = std::abs(report.slope - report.theory) <= plan.tolerance;
    report.meta = {{"scheme", to_string(plan.scheme)},
                   {"paths", plan.paths},
                   {"p", plan.p_moment},
                   {"ref_n", ref_n},
                   {"ref_order", plan.ref_order},
                   {"reference_sensitivity", ref_sensitivity[0]},
                   {"seed", plan.seed}};
    return report;
}

// L2 scaling of raw simplex sums against the nu_n law.
inline RateReport nu_scaling_experiment(const ExperimentPlan& plan) {
    validate_word(plan.alpha, plan.m);
    const std::uint64_t n_max = plan.n_values.back();
    const std::uint64_t n_fine = is_single_letter(plan.alpha)
                                     ? n_max
                                     : n_max * std::max<std::uint64_t>(1, plan.refine_factor);

    const std::size_t paths = static_cast<std::size_t>(plan.paths);
    std::vector<std::vector<double>> sums(paths, std::vector<double>(plan.n_values.size(), 0.0));
    parallel_for(paths, plan.threads ? plan.threads : default_thread_count(), [&](std::size_t p) {
        const auto signal = build_signal(detail::signal_spec_for(plan, n_fine, static_cast<std::uint64_t>(p)));
        for (std::size_t ni = 0; ni < plan.n_values.size(); ++ni) {
            const std::uint64_t n = plan.n_values[ni];
            sums[p][ni] = simplex_sum(signal, plan.alpha, n, std::min(plan.refine_factor, n_fine / n), 0, n);
        }
    });

    RateReport report;
    report.experiment = "nu";
    std::vector<double> l2(plan.n_values.size()), se(plan.n_values.size());
    for (std::size_t ni = 0; ni < plan.n_values.size(); ++ni) {
        double s2 = 0.0, s4 = 0.0;
        for (std::size_t p = 0; p < paths; ++p) {
            const double v = sums[p][ni];
            s2 += v * v;
            s4 += v * v * v * v;
        }
        s2 /= paths;
        s4 /= paths;
        const double se_s2 = std::sqrt(std::max(0.0, s4 - s2 * s2) / paths);
        l2[ni] = std::sqrt(s2);
        se[ni] = 0.5 * se_s2 / std::max(l2[ni], 1e-300);

        RateRow row;
        row.n = plan.n_values[ni];
        row.lp_mean = l2[ni];
        row.lp_se = se[ni];
        report.rows.push_back(row);
    }

    const SlopeFit fit = fit_loglog(plan.n_values, l2, se);
    report.slope = fit.slope;
    report.ci_half_width = fit.ci_half_width;

    const double h_alpha = plan.hurst.sum_over(plan.alpha);
    const int r_prime = plan.hurst.r_prime(plan.alpha);
    report.theory = (r_prime % 2 == 0) ? -(h_alpha - 1.0) : -(h_alpha - plan.hurst.max_fbm_exponent(plan.alpha));
    report.tolerance = plan.tolerance;
    report.pass = std::abs(report.slope - report.theory) <= plan.tolerance;
    report.meta = {{"alpha", to_string(plan.alpha)}, {"paths", plan.paths}, {"seed", plan.seed}};
    return report;
}

// L2 scaling of centered simplex sums against the omega_n law. The centering uses the
// per-step mean D_alpha(T/n) from the moments module; the omega law covers even fBm counts only.
inline RateReport omega_scaling_experiment(const ExperimentPlan& plan) {
    validate_word(plan.alpha, plan.m);
    for (int j = 1; j <= plan.m; ++j)
        if (!plan.hurst.letter_is_time(j) && ExponentVector::letter_count(plan.alpha, j) % 2 == 1)
            throw config_error("omega experiment needs even fBm letter counts");

    const std::uint64_t n_max = plan.n_values.back();
    const std::uint64_t n_fine = is_single_letter(plan.alpha)
                                     ? n_max
                                     : n_max * std::max<std::uint64_t>(1, plan.refine_factor);

    const std::size_t paths = static_cast<std::size_t>(plan.paths);
    std::vector<std::vector<double>> sums(paths, std::vector<double>(plan.n_values.size(), 0.0));
    parallel_for(paths, plan.threads ? plan.threads : default_thread_count(), [&](std::size_t p) {
        const auto signal = build_signal(detail::signal_spec_for(plan, n_fine, static_cast<std::uint64_t>(p)));
        for (std::size_t ni = 0; ni < plan.n_values.size(); ++ni) {
            const std::uint64_t n = plan.n_values[ni];
            sums[p][ni] = simplex_sum(signal, plan.alpha, n, std::min(plan.refine_factor, n_fine / n), 0, n);
        }
    });

    RateReport report;
    report.experiment = "omega";
    std::vector<double> l2(plan.n_values.size()), se(plan.n_values.size());
    for (std::size_t ni = 0; ni < plan.n_values.size(); ++ni) {
        const std::uint64_t n = plan.n_values[ni];
        const double step_mean = d_gamma_auto(plan.alpha, plan.hurst, plan.T / static_cast<double>(n));
        const double total_mean = static_cast<double>(n) * step_mean;
        double s2 = 0.0, s4 = 0.0;
        for (std::size_t p = 0; p < paths; ++p) {
            const double v = sums[p][ni] - total_mean;
            s2 += v * v;
            s4 += v * v * v * v;
        }
        s2 /= paths;
        s4 /= paths;
        const double se_s2 = std::sqrt(std::max(0.0, s4 - s2 * s2) / paths);
        l2[ni] = std::sqrt(s2);
        se[ni] = 0.5 * se_s2 / std::max(l2[ni], 1e-300);

        RateRow row;
        row.n = n;
        row.lp_mean = l2[ni];
        row.lp_se = se[ni];
        report.rows.push_back(row);
    }

    double h_fbm = plan.hurst.max_fbm_exponent(plan.alpha);
    const bool at_three_quarters = std::abs(h_fbm - 0.75) < 1e-9;
    const SlopeFit fit = fit_loglog(plan.n_values, l2, se, at_three_quarters);
    report.slope = fit.slope;
    report.ci_half_width = fit.ci_half_width;
    report.log_coefficient = fit.log_coefficient;

    const double h_alpha = plan.hurst.sum_over(plan.alpha);
    report.theory = (h_fbm < 0.75 || at_three_quarters) ? -(h_alpha - 0.5) : -(h_alpha + 1.0 - 2.0 * h_fbm);
    report.tolerance = plan.tolerance;
    report.pass = std::abs(report.slope - report.theory) <= plan.tolerance;
    report.meta = {{"alpha", to_string(plan.alpha)}, {"paths", plan.paths}, {"seed", plan.seed}};
    return report;
}

inline RateReport run_experiment(const ExperimentPlan& plan) {
    RateReport report;
    if (plan.experiment == "as")
        report = as_rate_experiment(plan);
    else if (plan.experiment == "lp")
        report = lp_rate_experiment(plan);
    else if (plan.experiment == "nu")
        report = nu_scaling_experiment(plan);
    else if (plan.experiment == "omega")
        report = omega_scaling_experiment(plan);
    else
        throw config_error("unknown experiment: " + plan.experiment);

    if (!plan.moment_gamma.empty()) {
        MomentSpec moment;
        moment.gamma = plan.moment_gamma;
        moment.hurst = plan.hurst;
        moment.method = plan.moment_method;
        const auto estimate = d_gamma_estimate(moment, plan.moment_t);
        report.meta["moment"] = {{"gamma", plan.moment_gamma},
                                 {"t", plan.moment_t},
                                 {"value", estimate.value},
                                 {"std_error", estimate.std_error}};
    }
    return report;
}

// CSV per-n table + JSON fit/verdict + long-format plot data, deterministic ordering.
inline void emit_report(const RateReport& report, const std::string& prefix) {
    {
        std::ofstream csv(prefix + "_table.csv");
        if (!csv) throw std::runtime_error("cannot open " + prefix + "_table.csv");
        csv << "n,q25,median,q75,lp_mean,lp_se\n";
        csv.precision(17);
        for (const auto& r : report.rows)
            csv << r.n << "," << r.q25 << "," << r.median << "," << r.q75 << "," << r.lp_mean << "," << r.lp_se
                << "\n";
    }
    {
        std::ofstream json_out(prefix + "_report.json");
        if (!json_out) throw std::runtime_error("cannot open " + prefix + "_report.json");
        json_out << report.to_json().dump(2) << "\n";
    }
    {
        std::ofstream plot(prefix + "_plotdata.csv");
        if (!plot) throw std::runtime_error("cannot open " + prefix + "_plotdata.csv");
        plot << "series,n,value\n";
        plot.precision(17);
        for (const auto& r : report.rows) {
            const double v = (report.experiment == "as") ? r.median : r.lp_mean;
            plot << report.experiment << "," << r.n << "," << v << "\n";
            plot << "theory," << r.n << ","
                 << v * std::pow(static_cast<double>(r.n) / static_cast<double>(report.rows.front().n),
                                 report.theory - report.slope)
                 << "\n";
        }
    }
}

}  // namespace rough_taylor
