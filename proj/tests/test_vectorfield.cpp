#include <doctest.h>

#include <cmath>
#include <random>

#include <rough_taylor/vector_field.hpp>

namespace rt = rough_taylor;

namespace {

// Independent symbolic oracle: build the polynomial V_gamma I^i by repeated symbolic
// application of V_j f = sum_i V_j^i partial_i f, then evaluate. No jets involved.
rt::Polynomial symbolic_apply(const rt::PolynomialVectorField& field, int j, const rt::Polynomial& f) {
    rt::Polynomial out(f.dim());
    for (int i = 1; i <= field.dimension(); ++i) out += field.component(j, i) * f.partial(i);
    return out;
}

rt::FieldValue symbolic_iterated_field(const rt::PolynomialVectorField& field, const rt::MultiIndex& gamma,
                                       const rt::Point& y) {
    rt::FieldValue out(static_cast<std::size_t>(field.dimension()));
    for (int i = 1; i <= field.dimension(); ++i) {
        rt::Polynomial f(field.dimension());
        std::vector<int> e(static_cast<std::size_t>(field.dimension()), 0);
        e[static_cast<std::size_t>(i - 1)] = 1;
        f.add_term(e, 1.0);  // identity component I_i
        for (auto it = gamma.rbegin(); it != gamma.rend(); ++it) f = symbolic_apply(field, *it, f);
        out[static_cast<std::size_t>(i - 1)] = f.eval(y);
    }
    return out;
}

rt::PolynomialVectorField random_polynomial_field(int d, int m, std::mt19937_64& rng, int max_degree = 3) {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::uniform_int_distribution<int> deg(0, max_degree);
    std::vector<std::vector<rt::Polynomial>> comp(static_cast<std::size_t>(m),
                                                  std::vector<rt::Polynomial>(static_cast<std::size_t>(d), rt::Polynomial(d)));
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < d; ++i) {
            for (int t = 0; t < 3; ++t) {
                std::vector<int> e(static_cast<std::size_t>(d), 0);
                int total = deg(rng);
                for (int k = 0; k < total; ++k) ++e[static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(d))];
                comp[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)].add_term(e, coeff(rng));
            }
        }
    return rt::PolynomialVectorField(d, m, std::move(comp));
}

rt::Point random_point(int d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    rt::Point y(static_cast<std::size_t>(d));
    for (double& v : y) v = u(rng);
    return y;
}

}  // namespace

TEST_CASE("iterated_field on closed-form scalar examples") {
    // V(y) = y: every iterated field equals y
    auto linear = rt::make_linear_scalar(1.0);
    for (int r = 1; r <= 5; ++r) {
        auto v = rt::iterated_field(linear, rt::MultiIndex(static_cast<std::size_t>(r), 1), {0.37});
        CHECK(v[0] == doctest::Approx(0.37).epsilon(1e-14));
    }

    // V(y) = y^2: V I = y^2, V^2 I = 2y^3, V^3 I = 6y^4
    rt::Polynomial p(1);
    p.add_term({2}, 1.0);
    rt::PolynomialVectorField quad(1, 1, {{p}});
    const double y = 0.6;
    CHECK(rt::iterated_field(quad, {1}, {y})[0] == doctest::Approx(y * y).epsilon(1e-14));
    CHECK(rt::iterated_field(quad, {1, 1}, {y})[0] == doctest::Approx(2 * y * y * y).epsilon(1e-14));
    CHECK(rt::iterated_field(quad, {1, 1, 1}, {y})[0] == doctest::Approx(6 * y * y * y * y).epsilon(1e-13));

    // constant field: all iterated fields of length >= 2 vanish
    rt::Polynomial c1(2), c2(2);
    c1.add_term({0, 0}, 0.4);
    c2.add_term({0, 0}, -0.9);
    rt::PolynomialVectorField constant(2, 2, {{c1, c2}, {c2, c1}});
    for (const rt::MultiIndex& gamma : {rt::MultiIndex{1, 2}, rt::MultiIndex{2, 1, 1}}) {
        auto v = rt::iterated_field(constant, gamma, {0.1, 0.2});
        CHECK(v[0] == doctest::Approx(0.0));
        CHECK(v[1] == doctest::Approx(0.0));
    }
}

TEST_CASE("iterated_field agrees with the symbolic oracle on random polynomial fields") {
    std::mt19937_64 rng(20240811);
    for (int trial = 0; trial < 60; ++trial) {
        const int d = 1 + static_cast<int>(rng() % 3);
        const int m = 1 + static_cast<int>(rng() % 3);
        auto field = random_polynomial_field(d, m, rng);
        const int r = 1 + static_cast<int>(rng() % 5);
        rt::MultiIndex gamma;
        for (int k = 0; k < r; ++k) gamma.push_back(1 + static_cast<int>(rng() % static_cast<std::uint64_t>(m)));
        const auto y = random_point(d, rng);

        const auto via_jets = rt::iterated_field(field, gamma, y);
        const auto via_symbols = symbolic_iterated_field(field, gamma, y);
        for (int i = 0; i < d; ++i) {
            const double scale = std::max(1.0, std::abs(via_symbols[static_cast<std::size_t>(i)]));
            CHECK(std::abs(via_jets[static_cast<std::size_t>(i)] - via_symbols[static_cast<std::size_t>(i)]) / scale <=
                  1e-9);
        }
    }
}

TEST_CASE("iterated_field agrees with finite differences on smooth fields") {
    // componentwise sin/exp field, d = m = 2
    auto value = [](int j, int i, const rt::Point& y) {
        const double a = 0.3 * i + 0.2 * j;
        return (i == 1) ? std::sin(y[0] + a * y[1]) : std::exp(0.2 * y[1] - 0.1 * y[0]) + 0.1 * j;
    };
    rt::FiniteDifferenceOracle fd(2, 2, 2, value);
    rt::CallbackOracle exact(
        2, 2, 8, [&](int j, int i, const std::vector<int>& zeta, const rt::Point& y) {
            // closed-form derivatives for the two families above
            const double a = 0.3 * i + 0.2 * j;
            if (i == 1) {
                double factor = 1.0;
                for (int v : zeta) factor *= (v == 1) ? 1.0 : a;
                const double arg = y[0] + a * y[1];
                switch (zeta.size() % 4) {
                    case 0: return factor * std::sin(arg);
                    case 1: return factor * std::cos(arg);
                    case 2: return factor * -std::sin(arg);
                    default: return factor * -std::cos(arg);
                }
            }
            double factor = 1.0;
            for (int v : zeta) factor *= (v == 1) ? -0.1 : 0.2;
            double val = std::exp(0.2 * y[1] - 0.1 * y[0]);
            if (zeta.empty()) val += 0.1 * j;
            return factor * (zeta.empty() ? std::exp(0.2 * y[1] - 0.1 * y[0]) + 0.1 * j : val);
        });

    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const int r = 1 + static_cast<int>(rng() % 3);
        rt::MultiIndex gamma;
        for (int k = 0; k < r; ++k) gamma.push_back(1 + static_cast<int>(rng() % 2));
        rt::Point y = {0.3 + 0.1 * static_cast<double>(trial % 5), -0.2 + 0.05 * static_cast<double>(trial % 7)};
        const auto a = rt::iterated_field(exact, gamma, y);
        const auto b = rt::iterated_field(fd, gamma, y);
        for (int i = 0; i < 2; ++i) {
            const double scale = std::max(1.0, std::abs(a[static_cast<std::size_t>(i)]));
            CHECK(std::abs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]) / scale <= 1e-4);
        }
    }
}

TEST_CASE("h_function basics") {
    // p = |alpha|: bare product of field components
    std::mt19937_64 rng(99);
    auto field = random_polynomial_field(2, 2, rng);
    const rt::Point y = {0.25, -0.4};
    rt::MultiIndex alpha = {1, 2, 1};
    std::vector<int> taus = {1, 2, 3};
    std::vector<int> zeta = {1, 2, 1};
    double expected = field.component(1, 1).eval(y) * field.component(2, 2).eval(y) * field.component(1, 1).eval(y);
    CHECK(rt::h_function(field, alpha, zeta, taus, y) == doctest::Approx(expected).epsilon(1e-12));

    // p = 1: equals the zeta_1 component of iterated_field on the full word
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 1 + static_cast<int>(rng() % 2);
        auto f2 = random_polynomial_field(d, 2, rng);
        const int r = 1 + static_cast<int>(rng() % 4);
        rt::MultiIndex a;
        for (int k = 0; k < r; ++k) a.push_back(1 + static_cast<int>(rng() % 2));
        const auto yy = random_point(d, rng);
        const int i = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(d));
        const double h = rt::h_function(f2, a, {i}, {r}, yy);
        const double f = rt::iterated_field(f2, a, yy)[static_cast<std::size_t>(i - 1)];
        CHECK(h == doctest::Approx(f).epsilon(1e-10));
    }

    // d = m = 1, V = y^2, alpha = (1,1), p = 1: H = V V' = 2y^3
    rt::Polynomial p(1);
    p.add_term({2}, 1.0);
    rt::PolynomialVectorField quad(1, 1, {{p}});
    CHECK(rt::h_function(quad, {1, 1}, {1}, {2}, {0.5}) == doctest::Approx(2 * 0.5 * 0.5 * 0.5).epsilon(1e-13));

    CHECK_THROWS_AS(rt::h_function(quad, {1, 1}, {1, 1, 1}, {2}, {0.5}), std::invalid_argument);
}

TEST_CASE("generalized Leibniz rule") {
    std::mt19937_64 rng(31337);

    // trivial case p = r: both sides are plain products
    {
        auto field = random_polynomial_field(2, 2, rng);
        std::vector<std::vector<rt::Polynomial>> fs;
        for (int i = 0; i < 3; ++i) {
            std::vector<rt::Polynomial> row;
            for (int j = 0; j < 2; ++j) {
                rt::Polynomial f(2);
                f.add_term({1, 0}, 0.5 + i);
                f.add_term({0, 2}, -0.25 * (j + 1));
                row.push_back(f);
            }
            fs.push_back(row);
        }
        auto fam = rt::polynomial_family(2, fs);
        CHECK(rt::leibniz_check(field, {1, 2, 2}, {1, 2, 3}, fam, {{0.3, 0.4}}) <= 1e-12);
    }

    // r = 2, p = 1, l = (2): product-rule expansion matches Xi_2
    {
        auto field = random_polynomial_field(1, 2, rng);
        rt::Polynomial f(1);
        f.add_term({2}, 0.7);
        f.add_term({1}, -0.3);
        auto fam = rt::polynomial_family(2, {{f, f}});
        CHECK(rt::leibniz_check(field, {1, 2}, {2}, fam, {{0.45}}) <= 1e-12);
    }

    // randomized property: r <= 5, quadratic test functions
    for (int trial = 0; trial < 40; ++trial) {
        const int d = 1 + static_cast<int>(rng() % 3);
        const int m = 1 + static_cast<int>(rng() % 3);
        auto field = random_polynomial_field(d, m, rng, 2);
        const int r = 1 + static_cast<int>(rng() % 5);
        rt::MultiIndex alpha;
        for (int k = 0; k < r; ++k) alpha.push_back(1 + static_cast<int>(rng() % static_cast<std::uint64_t>(m)));
        std::vector<int> ls;
        for (int v = 1; v < r; ++v)
            if (rng() % 2) ls.push_back(v);
        ls.push_back(r);
        const int p = static_cast<int>(ls.size());

        std::vector<std::vector<rt::Polynomial>> fs;
        std::uniform_real_distribution<double> coeff(-1.0, 1.0);
        for (int i = 0; i < p; ++i) {
            std::vector<rt::Polynomial> row;
            for (int j = 0; j < m; ++j) {
                rt::Polynomial f(d);
                for (int t = 0; t < 3; ++t) {
                    std::vector<int> e(static_cast<std::size_t>(d), 0);
                    const int total = static_cast<int>(rng() % 3);
                    for (int k = 0; k < total; ++k) ++e[static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(d))];
                    f.add_term(e, coeff(rng));
                }
                row.push_back(f);
            }
            fs.push_back(row);
        }
        auto fam = rt::polynomial_family(m, fs);
        CHECK(rt::leibniz_check(field, alpha, ls, fam, {random_point(d, rng)}) <= 1e-9);
    }
}

TEST_CASE("iterated-field expansion identity") {
    std::mt19937_64 rng(4242);

    // r = 1: single term
    {
        auto field = random_polynomial_field(2, 2, rng);
        rt::Polynomial f(2);
        f.add_term({1, 1}, 1.0);
        f.add_term({2, 0}, 0.5);
        auto derivs = [f](const std::vector<int>& zeta, const rt::Point& y) {
            rt::Polynomial p = f;
            for (int v : zeta) p = p.partial(v);
            return p.eval(y);
        };
        CHECK(rt::lemma_expansion_check(field, {2}, derivs, {{0.2, -0.3}}) <= 1e-12);
    }

    // randomized: r <= 3 at d,m <= 2, cubic f
    for (int trial = 0; trial < 25; ++trial) {
        const int d = 1 + static_cast<int>(rng() % 2);
        const int m = 1 + static_cast<int>(rng() % 2);
        auto field = random_polynomial_field(d, m, rng, 2);
        const int r = 1 + static_cast<int>(rng() % 3);
        rt::MultiIndex alpha;
        for (int k = 0; k < r; ++k) alpha.push_back(1 + static_cast<int>(rng() % static_cast<std::uint64_t>(m)));

        rt::Polynomial f(d);
        std::uniform_real_distribution<double> coeff(-1.0, 1.0);
        for (int t = 0; t < 4; ++t) {
            std::vector<int> e(static_cast<std::size_t>(d), 0);
            const int total = static_cast<int>(rng() % 4);
            for (int k = 0; k < total; ++k) ++e[static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(d))];
            f.add_term(e, coeff(rng));
        }
        auto derivs = [f](const std::vector<int>& zeta, const rt::Point& y) {
            rt::Polynomial p = f;
            for (int v : zeta) p = p.partial(v);
            return p.eval(y);
        };
        CHECK(rt::lemma_expansion_check(field, alpha, derivs, {random_point(d, rng)}) <= 1e-9);
    }
}

TEST_CASE("polynomial field JSON loader and builtin models") {
    nlohmann::json spec = {
        {"d", 1},
        {"m", 1},
        {"terms", {{{"j", 1}, {"i", 1}, {"monomial", {1}}, {"coeff", 2.5}}}},
    };
    auto field = rt::PolynomialVectorField::from_json(spec);
    CHECK(field.evaluate(1, 1, {}, {2.0}) == doctest::Approx(5.0));
    CHECK(field.evaluate(1, 1, {1}, {2.0}) == doctest::Approx(2.5));

    auto sine = rt::make_sine_field();
    CHECK(sine.evaluate(1, 1, {}, {0.5}) == doctest::Approx(std::sin(0.5)));
    CHECK(sine.evaluate(1, 1, {1}, {0.5}) == doctest::Approx(std::cos(0.5)));
    CHECK(sine.evaluate(1, 1, {1, 1}, {0.5}) == doctest::Approx(-std::sin(0.5)));

    CHECK_NOTHROW(rt::make_builtin_model("sde_2d_quadratic"));
    CHECK_THROWS_AS(rt::make_builtin_model("nope"), rt::config_error);
}
