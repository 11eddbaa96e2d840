// polariton_spectrum: dressed-state energies and photon weight of |1-> vs detuning.

#include "jch/model.hpp"

#include <cstdio>

int main() {
    const double g = 1.0;
    std::printf("# delta  E(1+)  E(1-)  E(2+)  E(2-)  photon_weight(1-)\n");
    for (int k = -10; k <= 10; ++k) {
        const double d = k;
        const auto p1 = jch::polariton_state(1, jch::Branch::plus, d, g);
        const auto m1 = jch::polariton_state(1, jch::Branch::minus, d, g);
        const auto p2 = jch::polariton_state(2, jch::Branch::plus, d, g);
        const auto m2 = jch::polariton_state(2, jch::Branch::minus, d, g);
        std::printf("%6.1f %9.5f %9.5f %9.5f %9.5f %8.5f\n", d, p1.energy, m1.energy, p2.energy, m2.energy,
                    m1.ground * m1.ground);
    }
}
