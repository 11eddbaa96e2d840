// two_site_crossover: N=2 ground state of the two-site model while the hopping grows.

#include "jch/eigensolve.hpp"
#include "jch/model.hpp"
#include "jch/quantum_info.hpp"

#include <cmath>
#include <cstdio>

int main() {
    const jch::HilbertSpace sp{jch::SiteBasis(6), jch::LatticeSpec::chain(2)};
    jch::JCHTerms terms(sp);
    std::printf("# A/g  E0  site-site  in-site  atom-atom\n");
    for (int k = -30; k <= 10; k += 2) {
        const double a = std::pow(10.0, 0.1 * k);
        const auto p = jch::JCHParams::uniform(sp.lattice, 10.0, 0.0, 1.0, a);
        const auto r = jch::ground_state_in_sector(terms.assemble(p), 2, sp);
        std::printf("%10.4g %11.6f %8.5f %8.5f %8.5f\n", a, r.energy, jch::site_site_entanglement(r.state, 0, 1, sp),
                    jch::in_site_entanglement(r.state, 0, sp), jch::atom_atom_entanglement(r.state, 0, 1, sp));
    }
}
