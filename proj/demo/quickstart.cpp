// Solve one mean pair, evaluate the mechanism and check the worst case.

#include <cstdio>
#include <vector>

#include "robustpg/robustpg.hpp"

int main() {
    using namespace robustpg;

    const MeanVector means{0.6, 0.45};
    const SolvedParams params = solve(means);
    const Mechanism mech(params);
    const WorstCaseDistribution worst(params);

    std::printf("case %s, guarantee %.6f\n", case_name(params).c_str(), mech.guarantee());
    for (const auto& [name, value] : named_constants(params)) std::printf("  %s = %.12f\n", name.c_str(), value);

    const std::vector<double> v{0.9, 0.7};
    std::printf("q(0.9, 0.7) = %.6f, payments %.6f %.6f\n", mech.provision(v), mech.payment(v, 0), mech.payment(v, 1));

    const auto [mass, moments] = worst.mass_and_moments();
    std::printf("worst case: mass %.10f, means %.10f %.10f\n", mass, moments[0], moments[1]);

    const DualCertificate cert = dual_certificate(params);
    std::printf("certificate value %.10f\n", cert.value);

    const auto [revenue, se] = mc_revenue(mech, worst, 100000, SamplerState{});
    std::printf("Monte Carlo revenue %.5f +- %.5f\n", revenue, se);
}
