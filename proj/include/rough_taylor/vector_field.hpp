#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "jets.hpp"
#include "multiindex.hpp"

namespace rough_taylor {

using Point = std::vector<double>;

// A tangent vector at y.
using FieldValue = std::vector<double>;

inline std::vector<int> canonical_zeta(std::vector<int> zeta) {
    std::sort(zeta.begin(), zeta.end());
    return zeta;
}

// Evaluator of the vector field V = (V_j^i) and its partial derivatives at a point.
// zeta is a derivative word over {1,...,d}; implementations may assume it arrives sorted.
class JetOracle {
public:
    virtual ~JetOracle() = default;
    virtual int dimension() const = 0;
    virtual int alphabet() const = 0;
    virtual int max_order() const = 0;
    virtual double evaluate(int j, int i, const std::vector<int>& zeta, const Point& y) const = 0;
};

// ---------------------------------------------------------------------------
// sparse multivariate polynomials, used for exact test fields and field specs
// ---------------------------------------------------------------------------

struct Monomial {
    std::vector<int> exponents;
    double coeff = 0.0;
};

class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(int dim) : dim_(dim) {}
    Polynomial(int dim, std::vector<Monomial> terms) : dim_(dim), terms_(std::move(terms)) {}

    int dim() const { return dim_; }
    const std::vector<Monomial>& terms() const { return terms_; }

    void add_term(const std::vector<int>& exponents, double coeff) {
        if (static_cast<int>(exponents.size()) != dim_) throw std::invalid_argument("monomial arity mismatch");
        terms_.push_back({exponents, coeff});
    }

    double eval(const Point& y) const {
        double s = 0.0;
        for (const auto& t : terms_) {
            double v = t.coeff;
            for (int i = 0; i < dim_; ++i)
                for (int k = 0; k < t.exponents[static_cast<std::size_t>(i)]; ++k) v *= y[static_cast<std::size_t>(i)];
            s += v;
        }
        return s;
    }

    Polynomial partial(int v) const {
        Polynomial out(dim_);
        for (const auto& t : terms_) {
            const int e = t.exponents[static_cast<std::size_t>(v - 1)];
            if (e == 0) continue;
            Monomial m = t;
            m.coeff *= e;
            --m.exponents[static_cast<std::size_t>(v - 1)];
            out.terms_.push_back(std::move(m));
        }
        return out;
    }

    Polynomial operator*(const Polynomial& other) const {
        Polynomial out(dim_);
        for (const auto& a : terms_)
            for (const auto& b : other.terms_) {
                Monomial m;
                m.coeff = a.coeff * b.coeff;
                m.exponents.resize(static_cast<std::size_t>(dim_));
                for (int i = 0; i < dim_; ++i)
                    m.exponents[static_cast<std::size_t>(i)] =
                        a.exponents[static_cast<std::size_t>(i)] + b.exponents[static_cast<std::size_t>(i)];
                out.terms_.push_back(std::move(m));
            }
        out.compress();
        return out;
    }

    Polynomial& operator+=(const Polynomial& other) {
        terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
        compress();
        return *this;
    }

    void compress() {
        std::map<std::vector<int>, double> acc;
        for (const auto& t : terms_) acc[t.exponents] += t.coeff;
        terms_.clear();
        for (auto& [e, c] : acc)
            if (c != 0.0) terms_.push_back({e, c});
    }

    int degree() const {
        int d = 0;
        for (const auto& t : terms_) {
            int s = 0;
            for (int e : t.exponents) s += e;
            d = std::max(d, s);
        }
        return d;
    }

private:
    int dim_ = 0;
    std::vector<Monomial> terms_;
};

// Vector field with polynomial components; derivatives are exact (symbolic differentiation
// precomputed up to the highest nonvanishing order).
class PolynomialVectorField : public JetOracle {
public:
    PolynomialVectorField(int d, int m, std::vector<std::vector<Polynomial>> components)
        : d_(d), m_(m), components_(std::move(components)) {
        if (static_cast<int>(components_.size()) != m_) throw std::invalid_argument("field needs m rows");
        for (const auto& row : components_)
            if (static_cast<int>(row.size()) != d_) throw std::invalid_argument("field row needs d entries");
    }

    int dimension() const override { return d_; }
    int alphabet() const override { return m_; }
    int max_order() const override { return 64; }  // polynomial derivatives are exact at any order

    const Polynomial& component(int j, int i) const {
        return components_[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i - 1)];
    }

    double evaluate(int j, int i, const std::vector<int>& zeta, const Point& y) const override {
        Polynomial p = component(j, i);
        for (int v : zeta) p = p.partial(v);
        return p.eval(y);
    }

    static PolynomialVectorField from_json(const nlohmann::json& spec) {
        const int d = spec.at("d").get<int>();
        const int m = spec.at("m").get<int>();
        std::vector<std::vector<Polynomial>> comp(static_cast<std::size_t>(m),
                                                  std::vector<Polynomial>(static_cast<std::size_t>(d), Polynomial(d)));
        for (const auto& term : spec.at("terms")) {
            const int j = term.at("j").get<int>();
            const int i = term.at("i").get<int>();
            if (j < 1 || j > m || i < 1 || i > d) throw config_error("field term index out of range");
            comp[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i - 1)].add_term(
                term.at("monomial").get<std::vector<int>>(), term.at("coeff").get<double>());
        }
        return PolynomialVectorField(d, m, std::move(comp));
    }

private:
    int d_, m_;
    std::vector<std::vector<Polynomial>> components_;
};

// User-supplied closed-form derivatives.
class CallbackOracle : public JetOracle {
public:
    using Fn = std::function<double(int j, int i, const std::vector<int>& zeta, const Point& y)>;

    CallbackOracle(int d, int m, int max_order, Fn fn)
        : d_(d), m_(m), max_order_(max_order), fn_(std::move(fn)) {}

    int dimension() const override { return d_; }
    int alphabet() const override { return m_; }
    int max_order() const override { return max_order_; }
    double evaluate(int j, int i, const std::vector<int>& zeta, const Point& y) const override {
        return fn_(j, i, zeta, y);
    }

private:
    int d_, m_, max_order_;
    Fn fn_;
};

// Central finite differences on plain field values. Test-only fallback; step size widens
// with the derivative order to balance truncation against cancellation.
class FiniteDifferenceOracle : public JetOracle {
public:
    using ValueFn = std::function<double(int j, int i, const Point& y)>;

    FiniteDifferenceOracle(int d, int m, int max_order, ValueFn fn)
        : d_(d), m_(m), max_order_(max_order), fn_(std::move(fn)) {}

    int dimension() const override { return d_; }
    int alphabet() const override { return m_; }
    int max_order() const override { return max_order_; }

    double evaluate(int j, int i, const std::vector<int>& zeta, const Point& y) const override {
        return diff(j, i, zeta, static_cast<int>(zeta.size()), y);
    }

private:
    double diff(int j, int i, const std::vector<int>& zeta, int depth, const Point& y) const {
        if (depth == 0) return fn_(j, i, y);
        const int v = zeta[static_cast<std::size_t>(depth - 1)];
        const double h = std::pow(2.2e-16, 1.0 / (2.0 + static_cast<double>(zeta.size())));
        Point yp = y, ym = y;
        yp[static_cast<std::size_t>(v - 1)] += h;
        ym[static_cast<std::size_t>(v - 1)] -= h;
        return (diff(j, i, zeta, depth - 1, yp) - diff(j, i, zeta, depth - 1, ym)) / (2.0 * h);
    }

    int d_, m_, max_order_;
    ValueFn fn_;
};

// ---------------------------------------------------------------------------
// jet propagation
// ---------------------------------------------------------------------------

// Per-step cache of V-component jets at a fixed base point.
struct JetCache {
    std::shared_ptr<const JetSpace> space;
    std::map<std::pair<int, int>, Jet> v_jets;
    Point base;

    void reset(std::shared_ptr<const JetSpace> s, const Point& y) {
        space = std::move(s);
        v_jets.clear();
        base = y;
    }
};

namespace detail {

inline Jet jet_of_scalar(const std::function<double(const std::vector<int>&, const Point&)>& derivs,
                         std::shared_ptr<const JetSpace> space, const Point& y) {
    Jet jet(space);
    for (int idx = 0; idx < space->size(); ++idx) {
        const auto& e = space->exponent(idx);
        std::vector<int> zeta;
        double fact = 1.0;
        for (int v = 1; v <= space->dim(); ++v) {
            const int k = e[static_cast<std::size_t>(v - 1)];
            for (int c = 1; c <= k; ++c) {
                zeta.push_back(v);
                fact *= c;
            }
        }
        jet.coeff(idx) = derivs(zeta, y) / fact;
    }
    return jet;
}

inline const Jet& v_component_jet(const JetOracle& oracle, int j, int i, JetCache& cache) {
    auto key = std::make_pair(j, i);
    auto it = cache.v_jets.find(key);
    if (it != cache.v_jets.end()) return it->second;
    Jet jet = jet_of_scalar(
        [&](const std::vector<int>& zeta, const Point& y) { return oracle.evaluate(j, i, zeta, y); },
        cache.space, cache.base);
    return cache.v_jets.emplace(key, std::move(jet)).first->second;
}

// Applies the operator word V_{w_1} ... V_{w_k} to g, rightmost operator first.
inline Jet apply_word(const JetOracle& oracle, const MultiIndex& word, Jet g, JetCache& cache) {
    const int d = oracle.dimension();
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        Jet next(g.space_ptr());
        for (int i = 1; i <= d; ++i) next += v_component_jet(oracle, *it, i, cache) * g.partial(i);
        g = std::move(next);
    }
    return g;
}

inline void require_order(const JetOracle& oracle, int needed) {
    if (needed > oracle.max_order()) throw config_error("derivative order unavailable");
}

}  // namespace detail

// (V_gamma I)(y): the iterated vector field applied to the identity, evaluated via jet
// propagation. Composition is rightmost-first: V_{gamma(1)} ... V_{gamma(r)} I.
inline FieldValue iterated_field(const JetOracle& oracle, const MultiIndex& gamma, const Point& y,
                                 JetCache* cache = nullptr) {
    validate_word(gamma, oracle.alphabet());
    const int d = oracle.dimension();
    const int r = static_cast<int>(gamma.size());
    detail::require_order(oracle, r - 1);

    JetCache local;
    JetCache& jc = cache ? *cache : local;
    if (!jc.space || jc.space->dim() != d || jc.space->order() < r - 1) {
        jc.reset(JetSpace::get(d, r - 1), y);
    }

    const MultiIndex prefix(gamma.begin(), gamma.end() - 1);
    FieldValue out(static_cast<std::size_t>(d));
    for (int i = 1; i <= d; ++i) {
        Jet g = detail::v_component_jet(oracle, gamma.back(), i, jc);
        out[static_cast<std::size_t>(i - 1)] = detail::apply_word(oracle, prefix, std::move(g), jc).value();
    }
    return out;
}

// H(alpha, zeta, tau)(y) = prod_i (V_{alpha_{tau_{i-1},tau_i}} V^{zeta_i}_{alpha_{tau_i}})(y),
// where alpha_{a,b} is the subword strictly between positions a and b.
inline double h_function(const JetOracle& oracle, const MultiIndex& alpha, const std::vector<int>& zeta,
                         const std::vector<int>& taus, const Point& y, JetCache* cache = nullptr) {
    const int r = static_cast<int>(alpha.size());
    if (zeta.size() != taus.size()) throw std::invalid_argument("h_function: |zeta| must equal |taus|");
    detail::validate_breakpoints(taus, r, "taus");

    int longest = 0;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const int lo = (i == 0) ? 0 : taus[i - 1];
        longest = std::max(longest, taus[i] - lo - 1);
    }
    detail::require_order(oracle, longest + 1);

    JetCache local;
    JetCache& jc = cache ? *cache : local;
    if (!jc.space || jc.space->dim() != oracle.dimension() || jc.space->order() < longest) {
        jc.reset(JetSpace::get(oracle.dimension(), longest), y);
    }

    double prod = 1.0;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const int lo = (i == 0) ? 0 : taus[i - 1];
        const int hi = taus[i];
        const MultiIndex inner(alpha.begin() + lo, alpha.begin() + (hi - 1));
        Jet g = detail::v_component_jet(oracle, alpha[static_cast<std::size_t>(hi - 1)], zeta[i], jc);
        prod *= detail::apply_word(oracle, inner, std::move(g), jc).value();
    }
    return prod;
}

// Family of test functions f^i_j with exact derivatives, for the identity checks below.
struct ScalarFamily {
    int count = 0;  // i ranges over 1..count
    int m = 0;      // j ranges over 1..m
    std::function<double(int i, int j, const std::vector<int>& zeta, const Point& y)> derivs;
};

inline ScalarFamily polynomial_family(int m, std::vector<std::vector<Polynomial>> polys) {
    ScalarFamily fam;
    fam.count = static_cast<int>(polys.size());
    fam.m = m;
    auto shared = std::make_shared<std::vector<std::vector<Polynomial>>>(std::move(polys));
    fam.derivs = [shared](int i, int j, const std::vector<int>& zeta, const Point& y) {
        Polynomial p = (*shared)[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
        for (int v : zeta) p = p.partial(v);
        return p.eval(y);
    };
    return fam;
}

// Generalized Leibniz rule: the nested expression
//   V_{alpha_{0,l_1}} ( f^1_{alpha_{l_1}} ... V_{alpha_{l_{p-1},l_p}} f^p_{alpha_{l_p}} )
// equals sum over tau and rho in Xi_r(l;tau) of the factored products. Returns the largest
// absolute discrepancy over the evaluation points.
inline double leibniz_check(const JetOracle& oracle, const MultiIndex& alpha, const std::vector<int>& ls,
                            const ScalarFamily& f, const std::vector<Point>& points) {
    const int r = static_cast<int>(alpha.size());
    const int p = static_cast<int>(ls.size());
    detail::validate_breakpoints(ls, r, "ls");
    if (f.count < p) throw std::invalid_argument("leibniz_check: family too small");
    const int d = oracle.dimension();

    // tau candidates: strictly increasing length-p sequences ending at r
    std::vector<std::vector<int>> tau_list;
    {
        std::vector<int> tau(static_cast<std::size_t>(p));
        tau[static_cast<std::size_t>(p - 1)] = r;
        auto rec = [&](auto&& self, int pos, int low) -> void {
            if (pos == p - 1) {
                tau_list.push_back(tau);
                return;
            }
            for (int v = low; v <= r - (p - 1 - pos); ++v) {
                tau[static_cast<std::size_t>(pos)] = v;
                self(self, pos + 1, v + 1);
            }
        };
        if (p == 1)
            tau_list.push_back(tau);
        else
            rec(rec, 0, 1);
    }

    double worst = 0.0;
    for (const Point& y : points) {
        auto space = JetSpace::get(d, r - p);
        JetCache jc;
        jc.reset(space, y);

        auto f_jet = [&](int i, int j) {
            return detail::jet_of_scalar(
                [&](const std::vector<int>& zeta, const Point& yy) { return f.derivs(i, j, zeta, yy); }, space, y);
        };
        auto subword = [&](const MultiIndex& word, int a, int b) {
            return MultiIndex(word.begin() + a, word.begin() + (b - 1));
        };

        // left side, innermost factor first
        Jet lhs_jet = detail::apply_word(
            oracle, subword(alpha, p == 1 ? 0 : ls[static_cast<std::size_t>(p - 2)], ls.back()),
            f_jet(p, alpha[static_cast<std::size_t>(ls.back() - 1)]), jc);
        for (int i = p - 1; i >= 1; --i) {
            const int lo = (i == 1) ? 0 : ls[static_cast<std::size_t>(i - 2)];
            const int li = ls[static_cast<std::size_t>(i - 1)];
            Jet inner = f_jet(i, alpha[static_cast<std::size_t>(li - 1)]) * lhs_jet;
            lhs_jet = detail::apply_word(oracle, subword(alpha, lo, li), std::move(inner), jc);
        }
        const double lhs = lhs_jet.value();

        double rhs = 0.0;
        for (const auto& tau : tau_list) {
            for (const auto& rho : xi_with_constraints(ls, tau)) {
                const MultiIndex permuted = compose(alpha, rho);
                double prod = 1.0;
                for (int i = 1; i <= p; ++i) {
                    const int lo = (i == 1) ? 0 : tau[static_cast<std::size_t>(i - 2)];
                    const int hi = tau[static_cast<std::size_t>(i - 1)];
                    Jet g = f_jet(i, alpha[static_cast<std::size_t>(ls[static_cast<std::size_t>(i - 1)] - 1)]);
                    prod *= detail::apply_word(oracle, subword(permuted, lo, hi), std::move(g), jc).value();
                }
                rhs += prod;
            }
        }
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

// Iterated-field expansion: V_alpha f = sum_{p,zeta,tau} sum_{rho in Xi_r(tau)}
// H(alpha o rho, zeta, tau) partial_zeta f. Returns the largest absolute discrepancy.
inline double lemma_expansion_check(const JetOracle& oracle, const MultiIndex& alpha,
                                    const std::function<double(const std::vector<int>&, const Point&)>& f_derivs,
                                    const std::vector<Point>& points) {
    const int r = static_cast<int>(alpha.size());
    const int d = oracle.dimension();

    double worst = 0.0;
    for (const Point& y : points) {
        JetCache jc;
        jc.reset(JetSpace::get(d, r), y);
        const double lhs =
            detail::apply_word(oracle, alpha, detail::jet_of_scalar(f_derivs, jc.space, y), jc).value();

        double rhs = 0.0;
        for (int p = 1; p <= r; ++p) {
            // tau: strictly increasing length-p, ending at r
            std::vector<std::vector<int>> tau_list;
            std::vector<int> tau(static_cast<std::size_t>(p));
            tau[static_cast<std::size_t>(p - 1)] = r;
            auto rec = [&](auto&& self, int pos, int low) -> void {
                if (pos == p - 1) {
                    tau_list.push_back(tau);
                    return;
                }
                for (int v = low; v <= r - (p - 1 - pos); ++v) {
                    tau[static_cast<std::size_t>(pos)] = v;
                    self(self, pos + 1, v + 1);
                }
            };
            if (p == 1)
                tau_list.push_back(tau);
            else
                rec(rec, 0, 1);

            for (const auto& zeta : enumerate_gamma(p, d)) {
                const double df = f_derivs(canonical_zeta(zeta), y);
                if (df == 0.0) continue;
                for (const auto& t : tau_list)
                    for (const auto& rho : xi_set(t, r))
                        rhs += h_function(oracle, compose(alpha, rho), zeta, t, y, &jc) * df;
            }
        }
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// built-in models
// ---------------------------------------------------------------------------

inline PolynomialVectorField make_linear_scalar(double a = 1.0) {
    Polynomial p(1);
    p.add_term({1}, a);
    return PolynomialVectorField(1, 1, {{p}});
}

// Quadratic 2-d field with two driving components and small coefficients; rate experiments
// keep trajectories inside a compact box where all derivatives stay moderate.
inline PolynomialVectorField make_sde_2d_quadratic() {
    auto poly = [](std::initializer_list<std::pair<std::vector<int>, double>> terms) {
        Polynomial p(2);
        for (const auto& [e, c] : terms) p.add_term(e, c);
        return p;
    };
    std::vector<std::vector<Polynomial>> comp(2, std::vector<Polynomial>(2, Polynomial(2)));
    comp[0][0] = poly({{{0, 0}, 0.5}, {{0, 1}, -0.2}, {{2, 0}, 0.05}});
    comp[0][1] = poly({{{0, 0}, 0.3}, {{1, 0}, 0.1}, {{1, 1}, -0.05}});
    comp[1][0] = poly({{{0, 0}, -0.4}, {{1, 0}, 0.15}, {{0, 2}, 0.05}});
    comp[1][1] = poly({{{0, 0}, 0.6}, {{0, 1}, -0.1}, {{1, 1}, 0.05}});
    return PolynomialVectorField(2, 2, std::move(comp));
}

// V_j^i = sin(y_{1+((i+j) mod d)} + 0.35 i + 0.15 j); the scalar case reduces to V = sin(y).
inline CallbackOracle make_sine_field(int d = 1, int m = 1) {
    auto fn = [d](int j, int i, const std::vector<int>& zeta, const Point& y) {
        const int var = 1 + (i + j) % d;
        const double shift = (d == 1) ? 0.0 : 0.35 * i + 0.15 * j;
        for (int v : zeta)
            if (v != var) return 0.0;
        const double arg = y[static_cast<std::size_t>(var - 1)] + shift;
        switch (zeta.size() % 4) {
            case 0: return std::sin(arg);
            case 1: return std::cos(arg);
            case 2: return -std::sin(arg);
            default: return -std::cos(arg);
        }
    };
    return CallbackOracle(d, m, 64, fn);
}

inline std::unique_ptr<JetOracle> make_builtin_model(const std::string& name) {
    if (name == "linear_scalar") return std::make_unique<PolynomialVectorField>(make_linear_scalar());
    if (name == "sde_2d_quadratic") return std::make_unique<PolynomialVectorField>(make_sde_2d_quadratic());
    if (name == "sine_field") return std::make_unique<CallbackOracle>(make_sine_field());
    throw config_error("unknown model: " + name);
}

}  // namespace rough_taylor
