#pragma once

#include <algorithm>
#include <vector>

#include "common.hpp"
#include "multiindex.hpp"

namespace rough_taylor {

// Per-letter regularity exponents. HOLDER carries beta_j in (1/2,1] for the a.s. theory;
// HURST carries H_j with H_1 = 1 exactly when letter 1 is the time component and
// H_j in (1/2,1) for fBm letters.
struct ExponentVector {
    enum class Mode { HOLDER, HURST };

    Mode mode = Mode::HURST;
    std::vector<double> values;

    ExponentVector() = default;
    ExponentVector(Mode mode_, std::vector<double> values_) : mode(mode_), values(std::move(values_)) {
        validate();
    }

    static ExponentVector holder(std::vector<double> betas) { return {Mode::HOLDER, std::move(betas)}; }
    static ExponentVector hurst(std::vector<double> hs) { return {Mode::HURST, std::move(hs)}; }
    static ExponentVector uniform_hurst(int m, double H, bool component_1_is_time) {
        std::vector<double> v(static_cast<std::size_t>(m), H);
        if (component_1_is_time) v[0] = 1.0;
        return hurst(std::move(v));
    }

    void validate() const {
        if (values.empty()) throw std::invalid_argument("ExponentVector must be nonempty");
        for (std::size_t j = 0; j < values.size(); ++j) {
            const double v = values[j];
            if (mode == Mode::HOLDER) {
                if (!(v > 0.5 && v <= 1.0)) throw std::invalid_argument("Holder exponent must lie in (1/2,1]");
            } else {
                const bool time_letter = (j == 0 && v == 1.0);
                if (!time_letter && !(v > 0.5 && v < 1.0))
                    throw std::invalid_argument("Hurst exponent must lie in (1/2,1), or H_1 = 1 for the time letter");
            }
        }
    }

    int m() const { return static_cast<int>(values.size()); }
    double operator[](int letter) const { return values[static_cast<std::size_t>(letter - 1)]; }

    // letter 1 acts as the time component exactly when its recorded exponent is 1
    bool letter_is_time(int letter) const { return letter == 1 && values[0] == 1.0; }

    double min_value() const { return *std::min_element(values.begin(), values.end()); }

    double sum_over(const MultiIndex& alpha) const {
        double s = 0.0;
        for (int a : alpha) s += (*this)[a];
        return s;
    }

    // number of non-time letters of alpha
    int r_prime(const MultiIndex& alpha) const {
        int c = 0;
        for (int a : alpha)
            if (!letter_is_time(a)) ++c;
        return c;
    }

    // occurrences of a given letter
    static int letter_count(const MultiIndex& alpha, int letter) {
        return static_cast<int>(std::count(alpha.begin(), alpha.end(), letter));
    }

    double max_fbm_exponent(const MultiIndex& alpha) const {
        double h = 0.0;
        for (int a : alpha)
            if (!letter_is_time(a)) h = std::max(h, (*this)[a]);
        return h;
    }

    // vartheta(alpha): 1 for even r'(alpha), the largest fBm exponent in alpha otherwise
    double vartheta(const MultiIndex& alpha) const {
        const int rp = r_prime(alpha);
        if (rp % 2 == 0) return 1.0;
        return max_fbm_exponent(alpha);
    }
};

}  // namespace rough_taylor
