#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include <rough_taylor/signal.hpp>

namespace rt = rough_taylor;

namespace {

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
    const double mu = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - mu) * (x - mu);
    return s / static_cast<double>(v.size() - 1);
}

// two-sample Kolmogorov-Smirnov p-value (asymptotic)
double ks_two_sample_p(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t ia = 0, ib = 0;
    double d = 0.0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia] <= b[ib])
            ++ia;
        else
            ++ib;
        d = std::max(d, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    const double lambda = (ne + 0.12 + 0.11 / ne) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) p += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    return std::clamp(p, 0.0, 1.0);
}

double fbm_covariance(double H, double t, double s) {
    return 0.5 * (std::pow(t, 2 * H) + std::pow(s, 2 * H) - std::pow(std::abs(t - s), 2 * H));
}

}  // namespace

TEST_CASE("Brownian special case has uncorrelated increments") {
    const std::uint64_t n = 512;
    const int paths = 400;
    double sum_prod = 0.0, sum_sq = 0.0;
    std::size_t count = 0;
    for (int p = 0; p < paths; ++p) {
        auto path = rt::sample_fbm(0.5, n, 1.0, 1000 + static_cast<std::uint64_t>(p));
        for (std::uint64_t k = 0; k + 2 <= n; k += 2) {
            const double d1 = path[k + 1] - path[k];
            const double d2 = path[k + 2] - path[k + 1];
            sum_prod += d1 * d2;
            sum_sq += d1 * d1;
            ++count;
        }
    }
    const double corr = sum_prod / sum_sq;
    CHECK(std::abs(corr) < 3.0 / std::sqrt(static_cast<double>(count)));
}

TEST_CASE("terminal variance and mid-covariance match the fBm law") {
    const double H = 0.7;
    const std::uint64_t n = 256;
    const int paths = 10000;
    std::vector<double> b_half(paths), b_one(paths);
    for (int p = 0; p < paths; ++p) {
        auto path = rt::sample_fbm(H, n, 1.0, 77000 + static_cast<std::uint64_t>(p));
        b_half[static_cast<std::size_t>(p)] = path[n / 2];
        b_one[static_cast<std::size_t>(p)] = path[n];
    }
    // Var(B_1) = 1; the sample variance of a Gaussian has SE ~ sqrt(2/n)
    const double var1 = variance(b_one);
    CHECK(std::abs(var1 - 1.0) < 3.0 * std::sqrt(2.0 / paths));

    // E[B_{1/2} B_1] = 1/2 (0.5^{2H} + 1 - 0.5^{2H}) = 1/2
    std::vector<double> prods(static_cast<std::size_t>(paths));
    for (int p = 0; p < paths; ++p)
        prods[static_cast<std::size_t>(p)] = b_half[static_cast<std::size_t>(p)] * b_one[static_cast<std::size_t>(p)];
    const double se = std::sqrt(variance(prods) / paths);
    CHECK(std::abs(mean(prods) - 0.5) < 3.0 * se);
}

TEST_CASE("empirical covariance on an 8-point grid matches the closed form") {
    const double H = 0.65;
    const std::uint64_t n = 8;
    const int paths = 100000;
    std::vector<std::vector<double>> values(static_cast<std::size_t>(n + 1));
    for (auto& v : values) v.reserve(paths);
    for (int p = 0; p < paths; ++p) {
        auto path = rt::sample_fbm(H, n, 1.0, 33000 + static_cast<std::uint64_t>(p));
        for (std::uint64_t k = 0; k <= n; ++k) values[k].push_back(path[k]);
    }
    for (std::uint64_t a = 1; a <= n; ++a) {
        for (std::uint64_t b = a; b <= n; ++b) {
            const double ta = static_cast<double>(a) / static_cast<double>(n);
            const double tb = static_cast<double>(b) / static_cast<double>(n);
            std::vector<double> prods(static_cast<std::size_t>(paths));
            for (int p = 0; p < paths; ++p)
                prods[static_cast<std::size_t>(p)] =
                    values[a][static_cast<std::size_t>(p)] * values[b][static_cast<std::size_t>(p)];
            const double se = std::sqrt(variance(prods) / paths);
            CHECK(std::abs(mean(prods) - fbm_covariance(H, ta, tb)) < 4.0 * se);
        }
    }
}

TEST_CASE("circulant and Cholesky samplers agree in law (KS on B_T)") {
    const double H = 0.7;
    const std::uint64_t n = 256;
    const int paths = 10000;
    std::vector<double> circulant(paths), cholesky(paths);
    for (int p = 0; p < paths; ++p) {
        auto path = rt::sample_fbm(H, n, 1.0, 500000 + static_cast<std::uint64_t>(p));
        circulant[static_cast<std::size_t>(p)] = path.back();
    }
    rt::CholeskyFgnSampler sampler(H, n, 1.0 / static_cast<double>(n));
    for (int p = 0; p < paths; ++p) {
        rt::GaussianStream g(900000 + static_cast<std::uint64_t>(p));
        auto inc = sampler.sample(g);
        double sum = 0.0;
        for (double d : inc) sum += d;
        cholesky[static_cast<std::size_t>(p)] = sum;
    }
    CHECK(ks_two_sample_p(circulant, cholesky) > 0.001);
}

TEST_CASE("self-similarity via variance ratios at c = 2") {
    const double H = 0.8;
    const std::uint64_t n = 256;
    const int paths = 20000;
    std::vector<double> bt(paths), b2t(paths);
    for (int p = 0; p < paths; ++p) {
        auto path = rt::sample_fbm(H, n, 2.0, 4200 + static_cast<std::uint64_t>(p));
        bt[static_cast<std::size_t>(p)] = path[n / 2];  // B_1
        b2t[static_cast<std::size_t>(p)] = path[n];     // B_2
    }
    // Var(B_{2t}) = 2^{2H} Var(B_t)
    const double ratio = variance(b2t) / variance(bt);
    const double target = std::pow(2.0, 2 * H);
    const double se = target * std::sqrt(2.0 / paths) * 2.0;
    CHECK(std::abs(ratio - target) < 3.0 * se);
}

TEST_CASE("build_signal determinism and structure") {
    rt::SignalSpec spec;
    spec.m = 3;
    spec.hurst = rt::ExponentVector::hurst({1.0, 0.7, 0.8});
    spec.component_1_is_time = true;
    spec.n_fine = 512;
    spec.seed = 12345;
    spec.T = 2.0;

    auto s1 = rt::build_signal(spec);
    auto s2 = rt::build_signal(spec);
    CHECK(s1.samples == s2.samples);  // bit-for-bit reproducibility

    for (std::uint64_t k = 0; k <= spec.n_fine; ++k)
        CHECK(s1.value(1, k) == doctest::Approx(2.0 * static_cast<double>(k) / 512.0).epsilon(1e-15));
    CHECK(s1.value(2, 0) == 0.0);
    CHECK(s1.value(3, 0) == 0.0);

    // independent components: modest cross-correlation of terminal values
    const int paths = 4000;
    double cross = 0.0, var2 = 0.0, var3 = 0.0;
    for (int p = 0; p < paths; ++p) {
        rt::SignalSpec sp = spec;
        sp.n_fine = 64;
        sp.seed = 777 + static_cast<std::uint64_t>(p);
        auto s = rt::build_signal(sp);
        cross += s.value(2, sp.n_fine) * s.value(3, sp.n_fine);
        var2 += s.value(2, sp.n_fine) * s.value(2, sp.n_fine);
        var3 += s.value(3, sp.n_fine) * s.value(3, sp.n_fine);
    }
    const double corr = cross / std::sqrt(var2 * var3);
    CHECK(std::abs(corr) < 3.0 / std::sqrt(static_cast<double>(paths)));
}

TEST_CASE("holder seminorm diagnostics") {
    rt::SignalSpec spec;
    spec.m = 2;
    spec.hurst = rt::ExponentVector::hurst({1.0, 0.7});
    spec.component_1_is_time = true;
    spec.n_fine = 1024;
    spec.seed = 5;
    auto sig = rt::build_signal(spec);

    CHECK(rt::holder_seminorm(sig, 1, 1.0, 0.0, 1.0, 64) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rt::holder_seminorm(sig, 1, 0.7, 0.0, 1.0, 64) == doctest::Approx(1.0).epsilon(1e-12));

    // roughly stable as the coarse grid doubles
    const double a = rt::holder_seminorm(sig, 2, 0.65, 0.0, 1.0, 128);
    const double b = rt::holder_seminorm(sig, 2, 0.65, 0.0, 1.0, 256);
    CHECK(b >= a);       // finer grid sees at least as much
    CHECK(b < 3.0 * a);  // but not wildly more
}

TEST_CASE("path file round trip") {
    rt::SignalSpec spec;
    spec.m = 2;
    spec.hurst = rt::ExponentVector::hurst({0.75, 0.6});
    spec.n_fine = 128;
    spec.seed = 99;
    auto sig = rt::build_signal(spec);

    const std::string file = "test_path_roundtrip.rtpath";
    rt::save_signal(sig, file);
    auto back = rt::load_signal(file);
    CHECK(back.samples == sig.samples);
    CHECK(back.spec.seed == spec.seed);
    CHECK(back.spec.m == spec.m);
    std::remove(file.c_str());
}

TEST_CASE("signal spec validation") {
    rt::SignalSpec spec;
    spec.m = 1;
    spec.hurst = rt::ExponentVector::hurst({0.7});
    spec.n_fine = 100;  // not a power of two
    CHECK_THROWS_AS(spec.validate(), rt::config_error);
    spec.n_fine = 128;
    CHECK_NOTHROW(spec.validate());
}

TEST_CASE("holder seminorm argument validation") {
    rt::SignalSpec spec;
    spec.m = 1;
    spec.hurst = rt::ExponentVector::hurst({0.7});
    spec.n_fine = 256;
    spec.seed = 1;
    auto sig = rt::build_signal(spec);
    CHECK_THROWS_AS(rt::holder_seminorm(sig, 1, 1.5, 0.0, 1.0, 16), std::invalid_argument);
    CHECK_THROWS_AS(rt::holder_seminorm(sig, 1, 0.7, 0.013, 1.0, 16), std::invalid_argument);
    CHECK_THROWS_AS(rt::holder_seminorm(sig, 1, 0.7, 0.5, 0.25, 16), std::invalid_argument);
}
