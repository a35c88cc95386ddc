// Train a 5-qubit staircase+1 network with memristor activation under light
// damping and print the entanglement it reaches.

#include <cstdio>

#include "entforge/entforge.hpp"

using namespace entforge;

int main() {
    const Circuit c{staircase_plus_1(5), 1, Activation::bm(4.0, 1.0), 2};
    const auto noise = NoiseModel::damping_only(0.01);

    TrainConfig cfg;
    cfg.seed = 7;
    const Bipartition cut{0, 1, 2};
    const TrainingTrace tr = train(c, cfg, noise, {cut});

    for (std::size_t e = 0; e < tr.epochs.size(); e += 200)
        std::printf("epoch %4zu  loss %.4f  mw %.4f\n", e, tr.epochs[e].loss, tr.epochs[e].mw);
    std::printf("best epoch %d: mw %.4f, negativity[0,1,2] %.4f\n", tr.best_epoch, tr.final_mw,
                tr.final_negativity.at(0).value_or(0.0));
}
