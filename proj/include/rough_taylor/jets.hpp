#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "common.hpp"

namespace rough_taylor {

// Dense index space for truncated multivariate Taylor polynomials in `dim` variables up to
// total degree `order`. Shared between jets so multiplication can use a precomputed table.
class JetSpace {
public:
    JetSpace(int dim, int order) : dim_(dim), order_(order) {
        if (dim < 1 || dim > 8) throw std::invalid_argument("jet dimension must be in [1,8]");
        if (order < 0 || order > 15) throw std::invalid_argument("jet order must be in [0,15]");
        std::vector<int> e(static_cast<std::size_t>(dim), 0);
        for (int total = 0; total <= order; ++total) emit_degree(e, 0, total);
        for (std::size_t idx = 0; idx < exponents_.size(); ++idx) index_of_[pack(exponents_[idx])] = static_cast<int>(idx);
        build_product_table();
    }

    int dim() const { return dim_; }
    int order() const { return order_; }
    int size() const { return static_cast<int>(exponents_.size()); }
    const std::vector<int>& exponent(int idx) const { return exponents_[static_cast<std::size_t>(idx)]; }
    int degree(int idx) const { return degree_[static_cast<std::size_t>(idx)]; }

    int index(const std::vector<int>& e) const {
        auto it = index_of_.find(pack(e));
        return it == index_of_.end() ? -1 : it->second;
    }

    // index of e + unit vector in variable v (1-based), or -1 beyond the truncation order
    int raise(int idx, int v) const { return raise_[static_cast<std::size_t>(idx) * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(v - 1)]; }

    struct ProductEntry {
        int a, b, out;
    };
    const std::vector<ProductEntry>& product_table() const { return products_; }

    static std::shared_ptr<const JetSpace> get(int dim, int order) {
        static std::mutex mu;
        static std::unordered_map<std::uint64_t, std::shared_ptr<const JetSpace>> cache;
        std::lock_guard<std::mutex> lock(mu);
        const std::uint64_t key = (static_cast<std::uint64_t>(dim) << 8) | static_cast<std::uint64_t>(order);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        auto space = std::make_shared<const JetSpace>(dim, order);
        cache[key] = space;
        return space;
    }

private:
    void emit_degree(std::vector<int>& e, int pos, int remaining) {
        if (pos == dim_ - 1) {
            e[static_cast<std::size_t>(pos)] = remaining;
            exponents_.push_back(e);
            degree_.push_back(remaining + sum_prefix(e, pos));
            return;
        }
        for (int k = remaining; k >= 0; --k) {
            e[static_cast<std::size_t>(pos)] = k;
            emit_degree(e, pos + 1, remaining - k);
        }
        e[static_cast<std::size_t>(pos)] = 0;
    }

    static int sum_prefix(const std::vector<int>& e, int pos) {
        int s = 0;
        for (int i = 0; i < pos; ++i) s += e[static_cast<std::size_t>(i)];
        return s;
    }

    std::uint64_t pack(const std::vector<int>& e) const {
        std::uint64_t k = 0;
        for (int i = 0; i < dim_; ++i) k = (k << 8) | static_cast<std::uint64_t>(e[static_cast<std::size_t>(i)]);
        return k;
    }

    void build_product_table() {
        raise_.assign(exponents_.size() * static_cast<std::size_t>(dim_), -1);
        for (int idx = 0; idx < size(); ++idx) {
            for (int v = 1; v <= dim_; ++v) {
                std::vector<int> e = exponents_[static_cast<std::size_t>(idx)];
                ++e[static_cast<std::size_t>(v - 1)];
                raise_[static_cast<std::size_t>(idx) * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(v - 1)] = index(e);
            }
        }
        for (int a = 0; a < size(); ++a) {
            for (int b = 0; b < size(); ++b) {
                if (degree(a) + degree(b) > order_) continue;
                std::vector<int> e = exponents_[static_cast<std::size_t>(a)];
                for (int i = 0; i < dim_; ++i) e[static_cast<std::size_t>(i)] += exponents_[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)];
                products_.push_back({a, b, index(e)});
            }
        }
    }

    int dim_;
    int order_;
    std::vector<std::vector<int>> exponents_;
    std::vector<int> degree_;
    std::unordered_map<std::uint64_t, int> index_of_;
    std::vector<int> raise_;
    std::vector<ProductEntry> products_;
};

// Truncated Taylor polynomial around a base point, stored as Taylor coefficients
// c_e = (partial^e f)(y) / e!. The constant term is the function value.
class Jet {
public:
    Jet() = default;
    explicit Jet(std::shared_ptr<const JetSpace> space)
        : space_(std::move(space)), c_(static_cast<std::size_t>(space_->size()), 0.0) {}

    static Jet constant(std::shared_ptr<const JetSpace> space, double value) {
        Jet j(std::move(space));
        j.c_[0] = value;
        return j;
    }

    const JetSpace& space() const { return *space_; }
    std::shared_ptr<const JetSpace> space_ptr() const { return space_; }
    double value() const { return c_[0]; }
    double& coeff(int idx) { return c_[static_cast<std::size_t>(idx)]; }
    double coeff(int idx) const { return c_[static_cast<std::size_t>(idx)]; }

    Jet& operator+=(const Jet& other) {
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += other.c_[i];
        return *this;
    }

    Jet& operator*=(double s) {
        for (double& v : c_) v *= s;
        return *this;
    }

    Jet operator*(const Jet& other) const {
        Jet out(space_);
        for (const auto& p : space_->product_table())
            out.c_[static_cast<std::size_t>(p.out)] += c_[static_cast<std::size_t>(p.a)] * other.c_[static_cast<std::size_t>(p.b)];
        return out;
    }

    // d/dy_v as a jet in the same space; coefficients at the truncation order are dropped.
    Jet partial(int v) const {
        Jet out(space_);
        for (int idx = 0; idx < space_->size(); ++idx) {
            const int up = space_->raise(idx, v);
            if (up < 0) continue;
            out.c_[static_cast<std::size_t>(idx)] =
                c_[static_cast<std::size_t>(up)] * (space_->exponent(idx)[static_cast<std::size_t>(v - 1)] + 1);
        }
        return out;
    }

    // accumulate a * (b scaled by s)
    void add_scaled(const Jet& b, double s) {
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += s * b.c_[i];
    }

private:
    std::shared_ptr<const JetSpace> space_;
    std::vector<double> c_;
};

}  // namespace rough_taylor
