// Same training budget, different wiring. Prints mean and spread of the final
// loss over a handful of seeds for each 5-qubit topology.

#include <algorithm>
#include <cstdio>

#include "entforge/entforge.hpp"

using namespace entforge;

int main() {
    TrainConfig cfg;
    cfg.max_epochs = 600;
    for (const char *name : {"sc", "sc+1", "sc+2"}) {
        const Circuit c{named_topology(name, 5), 1, Activation::bm(4.0, 1.0), 2};
        const SeedStats s = multi_seed_stats(c, cfg, std::nullopt, 6, {});
        double mean = 0.0, lo = 1.0, hi = 0.0;
        for (const auto &r : s.runs) {
            mean += r.final_loss;
            lo = std::min(lo, r.final_loss);
            hi = std::max(hi, r.final_loss);
        }
        mean /= static_cast<double>(s.runs.size());
        std::printf("%-5s gates %2zu  loss mean %.4f  min %.4f  max %.4f\n", name, c.topology.pairs.size(), mean, lo, hi);
    }
}
