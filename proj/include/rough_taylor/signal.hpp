#pragma once

#include <cstring>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "exponents.hpp"
#include "fft.hpp"
#include "rng.hpp"
#include "serialize.hpp"

namespace rough_taylor {

struct SignalSpec {
    int m = 1;
    ExponentVector hurst;  // HURST mode; hurst[1] recorded as 1 when component 1 is time
    double T = 1.0;
    std::uint64_t n_fine = 1024;  // number of fine steps, power of two
    std::uint64_t seed = 0;
    bool component_1_is_time = false;

    void validate() const {
        if (m < 1) throw config_error("signal needs m >= 1");
        if (hurst.mode != ExponentVector::Mode::HURST || hurst.m() != m)
            throw config_error("signal spec needs m Hurst exponents");
        if (n_fine == 0 || (n_fine & (n_fine - 1)) != 0) throw config_error("n_fine must be a power of two");
        if (T <= 0) throw config_error("horizon T must be positive");
        if (component_1_is_time && hurst.values[0] != 1.0)
            throw config_error("time component must record H_1 = 1");
        if (!component_1_is_time && !(hurst.values[0] > 0.5 && hurst.values[0] < 1.0))
            throw config_error("fBm component needs H in (1/2,1)");
    }

    nlohmann::json to_json() const {
        return {{"m", m},           {"hurst", rough_taylor::to_json(hurst)},
                {"T", T},           {"n_fine", n_fine},
                {"seed", seed},     {"component_1_is_time", component_1_is_time}};
    }

    static SignalSpec from_json(const nlohmann::json& j) {
        SignalSpec s;
        s.m = j.at("m").get<int>();
        s.hurst = exponent_vector_from_json(j.at("hurst"));
        s.T = j.at("T").get<double>();
        s.n_fine = j.at("n_fine").get<std::uint64_t>();
        s.seed = j.at("seed").get<std::uint64_t>();
        s.component_1_is_time = j.value("component_1_is_time", false);
        s.validate();
        return s;
    }
};

// Exact-in-law fBm increments via circulant embedding of the stationary increment
// covariance. Returns n increments with spacing dt.
inline std::vector<double> sample_fgn_circulant(double H, std::size_t n, double dt, GaussianStream& gauss) {
    const std::size_t m2 = 2 * n;
    auto covariance = [&](std::size_t k) {
        const double kk = static_cast<double>(k);
        return 0.5 * std::pow(dt, 2.0 * H) *
               (std::pow(kk + 1.0, 2.0 * H) - 2.0 * std::pow(kk, 2.0 * H) + std::pow(std::abs(kk - 1.0), 2.0 * H));
    };

    std::vector<std::complex<double>> eigen(m2);
    for (std::size_t k = 0; k <= n; ++k) eigen[k] = covariance(k);
    for (std::size_t k = n + 1; k < m2; ++k) eigen[k] = covariance(m2 - k);
    fft(eigen);

    double lambda_max = 0.0, lambda_min = 0.0;
    for (const auto& l : eigen) {
        lambda_max = std::max(lambda_max, l.real());
        lambda_min = std::min(lambda_min, l.real());
    }
    if (lambda_min < -1e-10 * lambda_max) throw config_error("circulant embedding not nonnegative");

    std::vector<std::complex<double>> a(m2, 0.0);
    const double mm = static_cast<double>(m2);
    a[0] = std::sqrt(std::max(0.0, eigen[0].real()) / mm) * gauss.next();
    a[n] = std::sqrt(std::max(0.0, eigen[n].real()) / mm) * gauss.next();
    for (std::size_t k = 1; k < n; ++k) {
        const double scale = std::sqrt(std::max(0.0, eigen[k].real()) / (2.0 * mm));
        const std::complex<double> z(gauss.next(), gauss.next());
        a[k] = scale * z;
        a[m2 - k] = std::conj(a[k]);
    }
    fft(a);

    std::vector<double> increments(n);
    for (std::size_t k = 0; k < n; ++k) increments[k] = a[k].real();
    return increments;
}

// Dense Cholesky on the increment covariance; cross-check oracle and fallback.
// Factorizes once so many paths can reuse the factor.
class CholeskyFgnSampler {
public:
    CholeskyFgnSampler(double H, std::size_t n, double dt) : n_(n), L_(n * n, 0.0) {
        if (n > 4096) throw config_error("Cholesky sampler limited to n <= 4096");
        auto covariance = [&](std::size_t k) {
            const double kk = static_cast<double>(k);
            return 0.5 * std::pow(dt, 2.0 * H) *
                   (std::pow(kk + 1.0, 2.0 * H) - 2.0 * std::pow(kk, 2.0 * H) + std::pow(std::abs(kk - 1.0), 2.0 * H));
        };
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double s = covariance(i >= j ? i - j : j - i);
                for (std::size_t k = 0; k < j; ++k) s -= L_[i * n + k] * L_[j * n + k];
                if (i == j) {
                    if (s <= 0) throw config_error("increment covariance not positive definite");
                    L_[i * n + i] = std::sqrt(s);
                } else {
                    L_[i * n + j] = s / L_[j * n + j];
                }
            }
        }
    }

    std::vector<double> sample(GaussianStream& gauss) const {
        std::vector<double> z(n_), increments(n_, 0.0);
        for (double& v : z) v = gauss.next();
        for (std::size_t i = 0; i < n_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j <= i; ++j) s += L_[i * n_ + j] * z[j];
            increments[i] = s;
        }
        return increments;
    }

private:
    std::size_t n_;
    std::vector<double> L_;
};

inline std::vector<double> sample_fgn_cholesky(double H, std::size_t n, double dt, GaussianStream& gauss) {
    return CholeskyFgnSampler(H, n, dt).sample(gauss);
}

// One fBm path on the fine grid, starting at 0. Circulant embedding by default with the
// Cholesky fallback when the embedding has a negative eigenvalue beyond tolerance.
inline std::vector<double> sample_fbm(double H, std::uint64_t n_fine, double T, std::uint64_t seed) {
    if (!(H > 0.0 && H < 1.0)) throw config_error("sample_fbm needs H in (0,1)");
    if (n_fine == 0 || (n_fine & (n_fine - 1)) != 0) throw config_error("n_fine must be a power of two");
    GaussianStream gauss(seed);
    const double dt = T / static_cast<double>(n_fine);
    std::vector<double> increments;
    try {
        increments = sample_fgn_circulant(H, static_cast<std::size_t>(n_fine), dt, gauss);
    } catch (const config_error& e) {
        std::cerr << "warning: " << e.what() << "; falling back to Cholesky sampler\n";
        GaussianStream retry(seed);
        increments = sample_fgn_cholesky(H, static_cast<std::size_t>(n_fine), dt, retry);
    }
    std::vector<double> path(static_cast<std::size_t>(n_fine) + 1, 0.0);
    for (std::size_t k = 0; k < increments.size(); ++k) path[k + 1] = path[k] + increments[k];
    return path;
}

// m sampled components on the fine grid. Component 1 is the identity path when requested;
// fBm components come from independent substreams derived from (seed, component index).
struct DrivingSignal {
    SignalSpec spec;
    std::vector<std::vector<double>> samples;  // m x (n_fine+1)

    double time_at(std::uint64_t k) const {
        return spec.T * static_cast<double>(k) / static_cast<double>(spec.n_fine);
    }
    double value(int j, std::uint64_t k) const { return samples[static_cast<std::size_t>(j - 1)][k]; }
    double increment(int j, std::uint64_t k0, std::uint64_t k1) const {
        const auto& s = samples[static_cast<std::size_t>(j - 1)];
        return s[k1] - s[k0];
    }
};

inline DrivingSignal build_signal(const SignalSpec& spec) {
    spec.validate();
    DrivingSignal sig;
    sig.spec = spec;
    sig.samples.resize(static_cast<std::size_t>(spec.m));
    for (int j = 1; j <= spec.m; ++j) {
        auto& s = sig.samples[static_cast<std::size_t>(j - 1)];
        if (j == 1 && spec.component_1_is_time) {
            s.resize(static_cast<std::size_t>(spec.n_fine) + 1);
            for (std::uint64_t k = 0; k <= spec.n_fine; ++k)
                s[k] = spec.T * static_cast<double>(k) / static_cast<double>(spec.n_fine);
        } else {
            s = sample_fbm(spec.hurst[j], spec.n_fine, spec.T, mix_seed(spec.seed, static_cast<std::uint64_t>(j)));
        }
    }
    return sig;
}

// Discrete Holder seminorm on the coarse grid: sup over grid pairs in [a,b] of
// |z_u - z_v| / (v-u)^beta. A lower bound of the continuous seminorm, reported as such.
inline double holder_seminorm(const DrivingSignal& signal, int j, double beta, double a, double b,
                              std::uint64_t coarse_n) {
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0,1]");
    if (signal.spec.n_fine % coarse_n != 0) throw std::invalid_argument("coarse grid must divide the fine grid");
    const std::uint64_t stride = signal.spec.n_fine / coarse_n;
    const double dt = signal.spec.T / static_cast<double>(coarse_n);
    const auto idx_of = [&](double t) {
        const double pos = t / dt;
        const auto k = static_cast<std::uint64_t>(pos + 0.5);
        if (std::abs(pos - static_cast<double>(k)) > 1e-9) throw std::invalid_argument("a,b must be coarse grid points");
        return k;
    };
    const std::uint64_t ka = idx_of(a), kb = idx_of(b);
    if (ka >= kb || kb > coarse_n) throw std::invalid_argument("need grid points a < b <= T");
    double sup = 0.0;
    for (std::uint64_t u = ka; u < kb; ++u)
        for (std::uint64_t v = u + 1; v <= kb; ++v) {
            const double dz = std::abs(signal.value(j, v * stride) - signal.value(j, u * stride));
            sup = std::max(sup, dz / std::pow(static_cast<double>(v - u) * dt, beta));
        }
    return sup;
}

// ---------------------------------------------------------------------------
// path files: 8-byte magic, u64 header length, JSON header, column-major doubles
// ---------------------------------------------------------------------------

inline constexpr char kPathMagic[8] = {'R', 'T', 'P', 'A', 'T', 'H', '0', '1'};

inline void save_signal(const DrivingSignal& signal, const std::string& filename) {
    std::ofstream out(filename, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + filename + " for writing");
    const std::string header = signal.spec.to_json().dump();
    const std::uint64_t header_len = header.size();
    out.write(kPathMagic, 8);
    out.write(reinterpret_cast<const char*>(&header_len), 8);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    for (const auto& component : signal.samples)
        out.write(reinterpret_cast<const char*>(component.data()),
                  static_cast<std::streamsize>(component.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write failed: " + filename);
}

inline DrivingSignal load_signal(const std::string& filename) {
    std::ifstream in(filename, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + filename);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kPathMagic, 8) != 0) throw std::runtime_error("not a path file: " + filename);
    std::uint64_t header_len = 0;
    in.read(reinterpret_cast<char*>(&header_len), 8);
    std::string header(header_len, '\0');
    in.read(header.data(), static_cast<std::streamsize>(header_len));
    DrivingSignal sig;
    sig.spec = SignalSpec::from_json(nlohmann::json::parse(header));
    sig.samples.assign(static_cast<std::size_t>(sig.spec.m),
                       std::vector<double>(static_cast<std::size_t>(sig.spec.n_fine) + 1));
    for (auto& component : sig.samples)
        in.read(reinterpret_cast<char*>(component.data()),
                static_cast<std::streamsize>(component.size() * sizeof(double)));
    if (!in) throw std::runtime_error("truncated path file: " + filename);
    return sig;
}

}  // namespace rough_taylor
