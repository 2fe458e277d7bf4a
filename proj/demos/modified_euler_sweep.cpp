// Compares the classical and modified Euler schemes on dy = sin(y) dB at H = 0.7:
// prints the L2 error ladder and the fitted rates for both, showing the sigma_n gain.

#include <iomanip>
#include <iostream>

#include <rough_taylor/rough_taylor.hpp>

namespace rt = rough_taylor;

int main() {
    rt::ExperimentPlan plan;
    plan.experiment = "lp";
    plan.model = "sine_field";
    plan.m = 1;
    plan.hurst = rt::ExponentVector::hurst({0.7});
    plan.y0 = {0.7};
    plan.n_values = {32, 64, 128, 256, 512};
    plan.paths = 100;
    plan.ref_n = 8192;
    plan.seed = 2024;
    plan.tolerance = 0.15;

    plan.scheme = rt::SchemeKind::EULER;
    const auto euler = rt::lp_rate_experiment(plan);
    plan.scheme = rt::SchemeKind::MODIFIED_EULER;
    const auto modified = rt::lp_rate_experiment(plan);

    std::cout << "dy = sin(y) dB, H = 0.7, " << plan.paths << " paths, reference n = " << plan.ref_n << "\n\n";
    std::cout << std::setw(8) << "n" << std::setw(16) << "euler L2" << std::setw(18) << "modified L2" << "\n";
    for (std::size_t i = 0; i < euler.rows.size(); ++i)
        std::cout << std::setw(8) << euler.rows[i].n << std::setw(16) << std::setprecision(4) << std::scientific
                  << euler.rows[i].lp_mean << std::setw(18) << modified.rows[i].lp_mean << "\n";

    std::cout << std::defaultfloat << "\nfitted rates:  euler " << euler.slope << " (theory " << euler.theory
              << ")   modified " << modified.slope << " (theory " << modified.theory << ")\n";
    std::cout << "the deterministic D corrections buy an extra n^{-1/2} below H = 3/4\n";
    return 0;
}
