#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rough_taylor {

// Configuration problems (bad sets, bad specs, unavailable orders). CLI exit code 2.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// A requested experiment cannot run as specified (ladder too short, ...). CLI exit code 3.
class infeasible_error : public std::runtime_error {
public:
    explicit infeasible_error(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr std::uint64_t kEnumerationBudget = 10'000'000;

inline double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

inline double double_factorial(int n) {
    double r = 1.0;
    for (int i = n; i > 1; i -= 2) r *= i;
    return r;
}

inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}

// splitmix64, used to derive independent RNG substreams from (seed, component, index).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t x = splitmix64(seed ^ (a * 0x9e3779b97f4a7c15ULL));
    return splitmix64(x ^ (b * 0xd1b54a32d192ed03ULL));
}

}  // namespace rough_taylor
