#include <doctest.h>

#include <cmath>

#include <rough_taylor/schemes.hpp>

namespace rt = rough_taylor;

namespace {

rt::DrivingSignal make_signal(int m, double H, std::uint64_t n_fine, std::uint64_t seed, bool with_time) {
    rt::SignalSpec spec;
    spec.m = m;
    std::vector<double> hs(static_cast<std::size_t>(m), H);
    if (with_time) hs[0] = 1.0;
    spec.hurst = rt::ExponentVector::hurst(hs);
    spec.component_1_is_time = with_time;
    spec.n_fine = n_fine;
    spec.seed = seed;
    return rt::build_signal(spec);
}

}  // namespace

TEST_CASE("named schemes equal their general-form constructions bitwise") {
    auto field = rt::make_sde_2d_quadratic();
    rt::SchemeConfig config;
    config.coarse_n = 32;
    config.refine_factor = 16;
    const rt::Point y0 = {0.2, -0.1};

    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto sig = make_signal(2, 0.7, 2048, seed, true);

        auto euler_named = rt::solve_named(rt::SchemeKind::EULER, field, sig, y0, config);
        auto euler_general = rt::solve_incomplete(field, rt::IndexSet::letters(2), sig, y0, config);
        CHECK(euler_named.values == euler_general.values);

        auto milstein_named = rt::solve_named(rt::SchemeKind::MILSTEIN, field, sig, y0, config);
        auto milstein_general =
            rt::solve_incomplete(field, rt::IndexSet({{1}, {2}, {2, 2}}, 2), sig, y0, config);
        CHECK(milstein_named.values == milstein_general.values);

        auto modified_named = rt::solve_named(rt::SchemeKind::MODIFIED_EULER, field, sig, y0, config);
        const auto& hurst = sig.spec.hurst;
        const auto [rho2, corr] = rt::next_rate_and_correction_set(rt::rho_of(rt::IndexSet::letters(2), hurst), hurst, 2);
        auto modified_general = rt::solve_modified(field, rt::IndexSet::letters(2), corr, hurst, sig, y0, config);
        CHECK(modified_named.values == modified_general.values);
    }
}

TEST_CASE("Milstein requires the time component") {
    auto field = rt::make_sde_2d_quadratic();
    rt::SchemeConfig config;
    config.coarse_n = 16;
    auto sig = make_signal(2, 0.7, 1024, 3, false);
    CHECK_THROWS_AS(rt::solve_named(rt::SchemeKind::MILSTEIN, field, sig, {0.1, 0.1}, config), rt::config_error);
}

TEST_CASE("time-driven linear model matches the exponential") {
    // dy = a y dt; complete Taylor of order N gives the truncated exponential per step
    auto field = rt::make_linear_scalar(1.0);
    rt::SignalSpec spec;
    spec.m = 1;
    spec.hurst = rt::ExponentVector::hurst({1.0});
    spec.component_1_is_time = true;
    spec.n_fine = 16384;
    spec.seed = 0;
    auto sig = rt::build_signal(spec);

    rt::SchemeConfig config;
    config.coarse_n = 256;
    auto result = rt::solve_complete_taylor(field, 3, sig, {1.0}, config);
    CHECK_FALSE(result.diverged);
    CHECK(std::abs(result.component(256, 1) - std::exp(1.0)) < 1e-8);

    // one explicit step: y(dt) = 1 + dt + dt^2/2 + dt^3/6 with dt = 1/256
    const double dt = 1.0 / 256.0;
    const double expected = 1.0 + dt + dt * dt / 2.0 + dt * dt * dt / 6.0;
    CHECK(result.component(1, 1) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("constant fields are solved exactly by any scheme containing the letters") {
    rt::Polynomial c1(2), c2(2);
    c1.add_term({0, 0}, 0.7);
    c2.add_term({0, 0}, -0.4);
    rt::PolynomialVectorField constant(2, 2, {{c1, c2}, {c2, c1}});

    auto sig = make_signal(2, 0.75, 1024, 9, true);
    rt::SchemeConfig config;
    config.coarse_n = 16;
    const rt::Point y0 = {0.0, 0.0};

    auto euler = rt::solve_named(rt::SchemeKind::EULER, constant, sig, y0, config);
    auto taylor = rt::solve_complete_taylor(constant, 3, sig, y0, config);
    for (std::uint64_t k = 0; k <= 16; ++k)
        for (int i = 1; i <= 2; ++i) CHECK(euler.component(k, i) == doctest::Approx(taylor.component(k, i)).epsilon(1e-14));

    // exact solution y_t = V . x_t for constant V
    for (std::uint64_t k = 0; k <= 16; ++k) {
        const double x1 = sig.value(1, k * 64), x2 = sig.value(2, k * 64);
        CHECK(euler.component(k, 1) == doctest::Approx(0.7 * x1 - 0.4 * x2).epsilon(1e-12));
        CHECK(euler.component(k, 2) == doctest::Approx(-0.4 * x1 + 0.7 * x2).epsilon(1e-12));
    }
}

TEST_CASE("scalar fBm linear model matches the pathwise exponential") {
    // dy = a y dB has pathwise solution y0 exp(a B_t) in the Young regime
    auto field = rt::make_linear_scalar(0.8);
    auto sig = make_signal(1, 0.7, 8192, 21, false);
    auto ref = rt::reference_solution(field, sig, {1.0}, 8192, 3);
    CHECK_FALSE(ref.diverged);
    double worst = 0.0;
    for (std::uint64_t k = 0; k <= 8192; k += 64) {
        const double exact = std::exp(0.8 * sig.value(1, k));
        worst = std::max(worst, std::abs(ref.component(k, 1) - exact));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("one-step consistency: complete Taylor order N has local order N+1") {
    auto field = rt::make_sde_2d_quadratic();
    const rt::Point y0 = {0.3, 0.2};

    // smooth driver: x1 = t, x2 = sin t; exact one-step values from a very fine order-3 solve
    auto smooth = [&](std::uint64_t n_fine) {
        rt::SignalSpec spec;
        spec.m = 2;
        spec.hurst = rt::ExponentVector::hurst({1.0, 0.9});
        spec.component_1_is_time = true;
        spec.n_fine = n_fine;
        spec.seed = 0;
        auto sig = rt::build_signal(spec);
        for (std::uint64_t k = 0; k <= n_fine; ++k) sig.samples[1][k] = std::sin(sig.time_at(k));
        return sig;
    };

    auto sig = smooth(8192);
    auto truth = rt::reference_solution(field, sig, y0, 8192, 3);

    for (int N : {1, 2}) {
        std::vector<double> errs;
        for (std::uint64_t coarse : {4ull, 8ull, 16ull}) {
            rt::SchemeConfig config;
            config.coarse_n = coarse;
            config.refine_factor = 8192 / coarse;
            auto one = rt::solve_complete_taylor(field, N, sig, y0, config);
            // error after the first step vs the fine reference at the same time
            const std::uint64_t stride = 8192 / coarse;
            double e = 0.0;
            for (int i = 1; i <= 2; ++i) e = std::max(e, std::abs(one.component(1, i) - truth.component(stride, i)));
            errs.push_back(e);
        }
        const double slope01 = std::log2(errs[0] / errs[1]);
        const double slope12 = std::log2(errs[1] / errs[2]);
        CHECK(slope01 == doctest::Approx(N + 1).epsilon(0.2));
        CHECK(slope12 == doctest::Approx(N + 1).epsilon(0.2));
    }
}

TEST_CASE("hierarchy is enforced unless overridden") {
    auto field = rt::make_sde_2d_quadratic();
    auto sig = make_signal(2, 0.7, 1024, 4, true);
    rt::SchemeConfig config;
    config.coarse_n = 16;
    rt::IndexSet broken({{1, 2}}, 2);
    CHECK_THROWS_AS(rt::solve_incomplete(field, broken, sig, {0.1, 0.1}, config), rt::config_error);
    config.allow_non_hierarchical = true;
    CHECK_NOTHROW(rt::solve_incomplete(field, broken, sig, {0.1, 0.1}, config));
}

TEST_CASE("divergence guard flags exploding trajectories") {
    rt::Polynomial p(1);
    p.add_term({2}, 50.0);  // dy = 50 y^2 dt blows up quickly
    rt::PolynomialVectorField field(1, 1, {{p}});
    rt::SignalSpec spec;
    spec.m = 1;
    spec.hurst = rt::ExponentVector::hurst({1.0});
    spec.component_1_is_time = true;
    spec.n_fine = 1024;
    spec.seed = 0;
    auto sig = rt::build_signal(spec);
    rt::SchemeConfig config;
    config.coarse_n = 256;
    auto result = rt::solve_complete_taylor(field, 2, sig, {1.0}, config);
    CHECK(result.diverged);
    CHECK(result.diverged_at_step > 0);
    for (const auto& row : result.values)
        for (double v : row) CHECK(std::isfinite(v));
}

TEST_CASE("in-step interpolation agrees at the knots and refines between them") {
    auto field = rt::make_linear_scalar(0.9);
    auto sig = make_signal(1, 0.75, 2048, 17, false);
    rt::SchemeConfig config;
    config.coarse_n = 32;
    config.interpolate_in_step = true;
    auto result = rt::solve_named(rt::SchemeKind::EULER, field, sig, {1.0}, config);

    CHECK(result.dense_values.size() == 2049);
    const std::uint64_t stride = 2048 / 32;
    for (std::uint64_t k = 0; k <= 32; ++k)
        CHECK(result.dense_values[k * stride][0] == doctest::Approx(result.component(k, 1)).epsilon(1e-14));

    // inside a step the interpolant follows y_k + V(y_k) (B_t - B_{t_k})
    const std::uint64_t k = 5, s = 13;
    const double expected = result.component(k, 1) +
                            0.9 * result.component(k, 1) * sig.increment(1, k * stride, k * stride + s);
    CHECK(result.dense_values[k * stride + s][0] == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("modified scheme with all-odd-parity corrections equals the incomplete scheme") {
    auto field = rt::make_sde_2d_quadratic();
    auto sig = make_signal(2, 0.7, 1024, 31, true);
    rt::SchemeConfig config;
    config.coarse_n = 16;
    const rt::Point y0 = {0.1, 0.2};
    // (2) has r_2 = 1 odd: the correction vanishes identically
    rt::IndexSet odd_corrections({{1, 2}}, 2);
    auto modified = rt::solve_modified(field, rt::IndexSet::letters(2), odd_corrections, sig.spec.hurst, sig, y0, config);
    auto incomplete = rt::solve_incomplete(field, rt::IndexSet::letters(2), sig, y0, config);
    CHECK(modified.values == incomplete.values);
}

TEST_CASE("reference solution is stable under doubling") {
    auto field = rt::make_sine_field();
    auto sig = make_signal(1, 0.7, 8192, 77, false);
    const rt::Point y0 = {0.7};

    auto ref_a = rt::reference_solution(field, sig, y0, 4096, 3);
    auto ref_b = rt::reference_solution(field, sig, y0, 8192, 3);

    rt::SchemeConfig config;
    config.coarse_n = 64;
    auto euler = rt::solve_named(rt::SchemeKind::EULER, field, sig, y0, config);

    // errors measured against either reference differ by well under 5%
    double err_a = 0.0, err_b = 0.0;
    for (std::uint64_t k = 0; k <= 64; ++k) {
        err_a = std::max(err_a, std::abs(euler.component(k, 1) - ref_a.component(k * 64, 1)));
        err_b = std::max(err_b, std::abs(euler.component(k, 1) - ref_b.component(k * 128, 1)));
    }
    CHECK(std::abs(err_a - err_b) / err_b < 0.05);
}

TEST_CASE("enlarging the index set does not worsen the median error") {
    auto field = rt::make_sine_field();
    const rt::Point y0 = {0.7};
    std::vector<double> euler_errors, taylor2_errors, taylor3_errors;
    for (std::uint64_t seed = 1; seed <= 16; ++seed) {
        auto sig = make_signal(1, 0.7, 8192, 1000 + seed, false);
        auto ref = rt::reference_solution(field, sig, y0, 8192, 3);
        rt::SchemeConfig config;
        config.coarse_n = 64;
        auto e1 = rt::solve_complete_taylor(field, 1, sig, y0, config);
        auto e2 = rt::solve_complete_taylor(field, 2, sig, y0, config);
        auto e3 = rt::solve_complete_taylor(field, 3, sig, y0, config);
        euler_errors.push_back(e1.sup_distance(ref, 1, 128));
        taylor2_errors.push_back(e2.sup_distance(ref, 1, 128));
        taylor3_errors.push_back(e3.sup_distance(ref, 1, 128));
    }
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };
    // generous noise band: enlargement must not worsen the median by more than 20%
    CHECK(median(taylor2_errors) <= 1.2 * median(euler_errors));
    CHECK(median(taylor3_errors) <= 1.2 * median(taylor2_errors));
}
