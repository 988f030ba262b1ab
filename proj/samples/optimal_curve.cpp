// Prints the maximal squared speed of a four-level system across purity,
// next to the best of a few random states at the same purity.

#include <cmath>
#include <cstdio>

#include "qspeed/qspeed.hpp"

int main() {
    using namespace qspeed;
    const double w14 = std::sqrt(2.0);
    const double w23 = 2.0 / std::sqrt(3.0);
    const Hamiltonian h({0.0, 0.5 * (w14 - w23), 0.5 * (w14 + w23), w14});

    const RegimeParams p = regime_params(h);
    std::printf("gamma1 = %.4f  kappa0 = %.4f  kappa1 = %.4f  kappa2 = %.4f\n\n", p.gamma1(), p.kappa0, p.kappa1, p.kappa2);
    std::printf("%8s  %-10s  %10s  %10s\n", "kappa", "band", "v2_opt", "v2_wy");
    for (int k = 0; k <= 15; ++k) {
        const double kappa = 0.25 + 0.05 * k;
        const OptimalState s = optimal_state(h, kappa);
        std::printf("%8.3f  %-10s  %10.6f  %10.6f\n", kappa, std::string(to_string(s.regime)).c_str(), squared_speed(h, s.state),
                    wy_squared_speed(h, s));
    }

    Engine rng = derive_stream(1, 0);
    double worst = -1.0;
    for (int n = 0; n < 2000; ++n) {
        const DensityMatrix rho = sample_density(4, rng);
        worst = std::max(worst, squared_speed(h, rho) - optimal_speed(h, purity(rho)));
    }
    std::printf("\nlargest v2 - v2_opt over 2000 random states: %.3e\n", worst);
}
