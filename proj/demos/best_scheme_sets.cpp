// Prints the ladder of admissible L_p rates for a driving signal and, for each rate,
// the best incomplete scheme set and the correction words of the modified scheme.

#include <iostream>

#include <rough_taylor/rough_taylor.hpp>

namespace rt = rough_taylor;

namespace {

void print_set(const char* label, const rt::IndexSet& set) {
    std::cout << label << " {";
    bool first = true;
    for (const auto& w : set.members) {
        if (!first) std::cout << ", ";
        std::cout << rt::to_string(w);
        first = false;
    }
    std::cout << "}\n";
}

}  // namespace

int main(int argc, char** argv) {
    // time component plus one fBm component; pass H as the first argument
    const double H = argc > 1 ? std::atof(argv[1]) : 0.7;
    const int m = 2;
    auto hurst = rt::ExponentVector::hurst({1.0, H});
    std::cout << "driving signal: x^1 = t, x^2 = fBm(H = " << H << ")\n\n";

    const auto rates = rt::admissible_lp_rates(hurst, 2.5);
    for (double rho : rates) {
        if (rho <= 0) continue;
        const auto set = rt::gamma_rho(rho, hurst, m);
        if (set.empty()) continue;
        std::cout << "rate n^{-" << rho << "}\n";
        print_set("  best incomplete set:", set);
        std::cout << "  hierarchical: " << (rt::is_hierarchical(set) ? "yes" : "no")
                  << ", rho round trip: " << rt::rho_of(set, hurst) << "\n";
        const auto [rho_next, corrections] = rt::next_rate_and_correction_set(rho, hurst, m);
        print_set("  modified-scheme corrections:", corrections);
        std::cout << "  next admissible rate: n^{-" << rho_next << "}\n\n";
    }
    return 0;
}
