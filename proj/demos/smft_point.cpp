// smft_point: one stochastic mean-field solve with detuning disorder.
// usage: demo_smft_point [delta] [log10 A] [mu/g]

#include "jch/smft.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

int main(int argc, char** argv) {
    jch::SMFTModel m;
    m.target = jch::DisorderTarget::detuning;
    m.delta = argc > 1 ? std::atof(argv[1]) : 0.1;
    m.hopping = std::pow(10.0, argc > 2 ? std::atof(argv[2]) : -1.9);
    m.mu_over_g = argc > 3 ? std::atof(argv[3]) : -1.0;
    jch::SMFTConfig c;
    c.n_grid = 256;
    const auto r = jch::smft_solve(m, c);
    std::printf("converged %d after %d iterations (last TV %.2e)\n", int(r.converged), r.iterations,
                r.tv_history.empty() ? 0.0 : r.tv_history.back());
    std::printf("<alpha> %.6f  <N> %.5f  var N %.5f  E(avg state) %.5f  <E in-site> %.5f\n", r.mean_alpha, r.mean_n,
                r.number_variance, r.ent_of_avg_state, r.mean_in_site);
    const auto h = r.p_alpha;
    std::printf("# alpha  P(alpha)\n");
    for (int k = 0; k < h.size(); k += 8) std::printf("%.4f %.6e\n", h.x(k), h.density()(k));
}
