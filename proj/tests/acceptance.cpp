// Acceptance suite: one runnable criterion per numbered claim, each printing a single
// PASS/FAIL line with the measured value against its pinned tolerance.
//
//   acceptance                 runs everything
//   acceptance --criterion N   runs one criterion
//
// Exit code is the number of failed criteria.

#include <cmath>
#include <cstring>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <rough_taylor/rough_taylor.hpp>

namespace rt = rough_taylor;

namespace {

struct Outcome {
    int criterion;
    bool pass;
    std::string detail;
    std::string note;  // optional extra context
};

std::vector<Outcome> g_outcomes;

void record(int criterion, bool pass, const std::string& detail, const std::string& note = "") {
    g_outcomes.push_back({criterion, pass, detail, note});
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << detail << "\n";
    if (!note.empty()) std::cout << "       note: " << note << "\n";
    std::cout.flush();
}

std::string slope_detail(const char* what, const rt::RateReport& report) {
    std::ostringstream s;
    s << what << ": slope " << std::setprecision(4) << report.slope << " vs theory " << report.theory << " +/- "
      << report.tolerance;
    return s.str();
}

// 1. Inverse duality of the constrained permutation families, exhaustive for r <= 6.
void criterion_1() {
    const auto duality = rt::check_xi_theta_duality(6);
    const auto rule3 = rt::check_theta_rule3(6);
    record(1, duality.pass && rule3.pass,
           "Xi/Theta inverse duality and simultaneous emptiness, all (l,tau) with r <= 6",
           duality.pass ? rule3.detail : duality.detail);
}

// 2. Shuffle cardinalities up to total length 10.
void criterion_2() {
    const auto counts = rt::check_shuffle_counts(10);
    record(2, counts.pass, "|Sh(g',g'')| = C(r'+r'', r') for total length <= 10", counts.detail);
}

// 3. Leibniz rule and iterated-field expansion on 200 randomized polynomial cases.
void criterion_3() {
    const auto leibniz = rt::check_leibniz(120, 3001, 1e-9, 5);
    const auto lemma = rt::check_lemma_expansion(80, 3002, 1e-9, 5);
    record(3, leibniz.pass && lemma.pass, "Leibniz rule + iterated-field expansion <= 1e-9 on 200 polynomial cases",
           leibniz.detail + "; " + lemma.detail);
}

// 4. Shuffle identity and nested expansion on paths.
void criterion_4() {
    const auto identities = rt::check_path_identities(200, 3003, 5e-3, 256, 1e-9);
    record(4, identities.pass, "path shuffle/nested identities: <= 1e-9 polynomial, <= 5e-3 fBm at refine 256",
           identities.detail);
}

// 5. Moment closed forms, the parity rule, and the scalar step-integral closed form.
void criterion_5() {
    bool pass = true;
    std::ostringstream detail;

    auto hurst = rt::ExponentVector::hurst({0.7, 0.7});
    rt::MomentSpec spec;
    spec.hurst = hurst;
    spec.gamma = {1, 1};
    spec.method = rt::MomentMethod::CLOSED_FORM;
    const double t = 0.8;
    const double closed = rt::d_gamma(spec, t);
    pass = pass && closed == 0.5 * std::pow(t, 1.4);

    spec.method = rt::MomentMethod::MONTE_CARLO;
    spec.mc_paths = 20000;
    const auto mc = rt::d_gamma_estimate(spec, t);
    pass = pass && std::abs(mc.value - closed) <= 3.0 * mc.std_error;
    detail << "D_(j,j): closed " << closed << ", MC " << mc.value << " +/- " << mc.std_error;

    // parity rule: exact zeros, no numerics
    for (const rt::MultiIndex& gamma : {rt::MultiIndex{1, 2}, rt::MultiIndex{1, 1, 1}, rt::MultiIndex{2, 1, 2, 2}}) {
        spec.gamma = gamma;
        for (auto method : {rt::MomentMethod::CLOSED_FORM, rt::MomentMethod::QUADRATURE, rt::MomentMethod::MONTE_CARLO}) {
            spec.method = method;
            pass = pass && rt::d_gamma(spec, t) == 0.0;
        }
    }

    // scalar closed form on a smooth path
    rt::SignalSpec sig_spec;
    sig_spec.m = 1;
    sig_spec.hurst = rt::ExponentVector::hurst({1.0});
    sig_spec.component_1_is_time = true;
    sig_spec.n_fine = 8192;
    sig_spec.seed = 0;
    auto smooth = rt::build_signal(sig_spec);
    for (std::uint64_t k = 0; k <= sig_spec.n_fine; ++k)
        smooth.samples[0][k] = std::sin(smooth.time_at(k)) + smooth.time_at(k);
    double worst = 0.0;
    for (int r = 2; r <= 4; ++r) {
        const double approx = rt::step_integral(smooth, rt::MultiIndex(static_cast<std::size_t>(r), 1), 4, 1, 2048);
        const double exact = rt::step_integral_single_letter(smooth, 1, r, 4, 1);
        worst = std::max(worst, std::abs(approx - exact) / std::abs(exact));
    }
    pass = pass && worst <= 1e-6;
    detail << "; parity zeros exact; scalar (dx)^r/r! rel err " << worst;
    record(5, pass, "moment closed forms, parity rule, scalar step closed form", detail.str());
}

// 6. nu_n scaling of raw simplex sums.
void criterion_6() {
    const auto report = rt::run_experiment(rt::make_builtin_plan("nu_jj_h065"));
    record(6, report.pass, slope_detail("nu scaling, alpha=(j,j), H=0.65", report));
}

// 7. omega_n scaling of centered simplex sums, below and above H = 3/4.
void criterion_7() {
    const auto low = rt::run_experiment(rt::make_builtin_plan("omega_jj_h065"));
    const auto high = rt::run_experiment(rt::make_builtin_plan("omega_jj_h085"));
    record(7, low.pass && high.pass,
           slope_detail("omega H=0.65", low) + "; " + slope_detail("omega H=0.85", high));
}

// 8. Euler L2 rate on the scalar sine model.
void criterion_8() {
    const auto report = rt::run_experiment(rt::make_builtin_plan("euler_h07"));
    record(8, report.pass, slope_detail("Euler, H=0.7", report));
}

// 9. Modified Euler L2 rates at H = 0.7 and H = 0.8.
void criterion_9() {
    const auto h07 = rt::run_experiment(rt::make_builtin_plan("modified_euler_h07"));
    const auto h08 = rt::run_experiment(rt::make_builtin_plan("modified_euler_h08"));
    record(9, h07.pass && h08.pass,
           slope_detail("modified Euler H=0.7", h07) + "; " + slope_detail("H=0.8", h08));
}

// 10. Scalar complete Taylor family: N even -> NH, N odd -> (N+1)H - 1.
void criterion_10() {
    const auto n2 = rt::run_experiment(rt::make_builtin_plan("taylor2_h07"));
    const auto n3 = rt::run_experiment(rt::make_builtin_plan("taylor3_h07"));
    record(10, n2.pass && n3.pass, slope_detail("Taylor N=2", n2) + "; " + slope_detail("N=3", n3));
}

// 11. Almost-sure rate of the complete N=2 Taylor scheme against theta = (N+1)beta - 1.
void criterion_11() {
    const auto report = rt::run_experiment(rt::make_builtin_plan("as_taylor2_h07"));
    record(11, report.pass, slope_detail("a.s. median slope, Taylor N=2, H=0.7", report),
           "the Holder-exponent bound is not attained for even N: the minimizing absent words have odd fBm "
           "letter count, so their centered step sums decay at n^{-NH} (the criterion-10 rate, observed "
           "here as well); see the acceptance notes in the README");
}

// 12. Best-set constructors and rate round trips.
void criterion_12() {
    bool pass = true;
    std::ostringstream detail;

    // gamma_rho(2H-1) = {(1),...,(m)} for uniform fBm
    const double H = 0.7;
    auto hurst2 = rt::ExponentVector::hurst({H, H});
    const auto letters = rt::gamma_rho(2 * H - 1, hurst2, 2);
    pass = pass && letters.members == rt::IndexSet::letters(2).members;

    // gamma_theta((N+1)beta - 1) = {|alpha| <= N} for uniform beta
    const double beta = 0.68;
    auto holder = rt::ExponentVector::holder({beta, beta});
    for (int N = 1; N <= 3; ++N) {
        const auto set = rt::gamma_theta((N + 1) * beta - 1, holder, 2);
        pass = pass && set.members == rt::IndexSet::all_words_up_to(N, 2).members;
        pass = pass && std::abs(rt::theta_of(set, holder) - ((N + 1) * beta - 1)) <= 1e-12;
        pass = pass && rt::is_hierarchical(set);
    }

    // rho_of / gamma_rho round trips at both parities
    auto hurst1 = rt::ExponentVector::hurst({H});
    for (double rho : {2 * H - 1, 2 * H, 4 * H - 1}) {
        const auto set = rt::gamma_rho(rho, hurst1, 1);
        pass = pass && std::abs(rt::rho_of(set, hurst1) - rho) <= 1e-12;
        pass = pass && rt::is_hierarchical(set);
    }
    detail << "gamma_rho(2H-1) = letters; gamma_theta((N+1)b-1) = {|a|<=N}; round trips exact to 1e-12";
    record(12, pass, detail.str());
}

// 13. Named schemes equal their general-form constructions bitwise on 20 random paths.
void criterion_13() {
    auto field = rt::make_sde_2d_quadratic();
    rt::SchemeConfig config;
    config.coarse_n = 32;
    config.refine_factor = 16;
    const rt::Point y0 = {0.2, -0.1};
    bool pass = true;
    for (std::uint64_t seed = 1; seed <= 20 && pass; ++seed) {
        rt::SignalSpec spec;
        spec.m = 2;
        spec.hurst = rt::ExponentVector::hurst({1.0, 0.7});
        spec.component_1_is_time = true;
        spec.n_fine = 2048;
        spec.seed = seed;
        const auto sig = rt::build_signal(spec);

        pass = pass && rt::solve_named(rt::SchemeKind::EULER, field, sig, y0, config).values ==
                           rt::solve_incomplete(field, rt::IndexSet::letters(2), sig, y0, config).values;
        pass = pass && rt::solve_named(rt::SchemeKind::MILSTEIN, field, sig, y0, config).values ==
                           rt::solve_incomplete(field, rt::IndexSet({{1}, {2}, {2, 2}}, 2), sig, y0, config).values;
        const auto [rho2, corr] =
            rt::next_rate_and_correction_set(rt::rho_of(rt::IndexSet::letters(2), spec.hurst), spec.hurst, 2);
        pass = pass && rt::solve_named(rt::SchemeKind::MODIFIED_EULER, field, sig, y0, config).values ==
                           rt::solve_modified(field, rt::IndexSet::letters(2), corr, spec.hurst, sig, y0, config).values;
    }
    record(13, pass, "Euler/Milstein/modified-Euler bitwise equal to their general forms on 20 paths");
}

}  // namespace

int main(int argc, char** argv) {
    int which = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) which = std::atoi(argv[i + 1]);
    }

    using CriterionFn = void (*)();
    const CriterionFn criteria[] = {criterion_1, criterion_2, criterion_3,  criterion_4,  criterion_5,
                                    criterion_6, criterion_7, criterion_8,  criterion_9,  criterion_10,
                                    criterion_11, criterion_12, criterion_13};

    try {
        if (which >= 1 && which <= 13) {
            criteria[which - 1]();
        } else {
            for (auto fn : criteria) fn();
        }
    } catch (const std::exception& e) {
        std::cerr << "acceptance suite error: " << e.what() << "\n";
        return 99;
    }

    int failed = 0;
    for (const auto& o : g_outcomes)
        if (!o.pass) ++failed;
    if (g_outcomes.size() > 1)
        std::cout << g_outcomes.size() - failed << "/" << g_outcomes.size() << " criteria passed\n";
    return failed;
}
