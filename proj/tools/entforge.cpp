// Command-line front end: train, montecarlo, sweep and measure experiments.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "entforge/experiments.hpp"

namespace {

struct Overrides {
    std::string spec_file;
    std::string preset;
    std::optional<int> qubits;
    std::optional<std::string> topology;
    std::optional<std::string> activation;
    std::optional<double> t_osc, t_int;
    std::optional<double> dephase_p, damping_gamma;
    bool noiseless = false;
    std::optional<int> depth;
    std::optional<int> params_per_block;
    std::optional<int> epochs;
    std::optional<double> lr;
    std::optional<int> seeds;
    std::optional<int> samples;
    std::optional<int> gates;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> gradient;
    std::optional<int> negativity_every;
    bool no_early_stop = false;
    std::vector<std::string> bipartitions;
    std::vector<double> ratios;
    std::vector<double> params;
    std::optional<std::string> out;
};

void add_options(CLI::App *app, Overrides &o) {
    app->add_option("--spec", o.spec_file, "JSON experiment spec; flags override its fields")->check(CLI::ExistingFile);
    app->add_option("--preset", o.preset, "Named preset (see `entforge presets`)");
    app->add_option("--qubits", o.qubits, "Number of qubits");
    app->add_option("--topology", o.topology, "Topology name, JSON file, or inline pairs like 0-1,1-2");
    app->add_option("--activation", o.activation, "linear | sin | bm");
    app->add_option("--t-osc", o.t_osc, "Memristor oscillation period");
    app->add_option("--t-int", o.t_int, "Memristor integration window");
    app->add_option("--dephase-p", o.dephase_p, "Dephasing probability after RY");
    app->add_option("--damping-gamma", o.damping_gamma, "Amplitude damping rate at block output");
    app->add_flag("--noiseless", o.noiseless, "Drop any noise inherited from a preset or spec");
    app->add_option("--depth", o.depth, "Topology repetitions")->check(CLI::Range(1, 2));
    app->add_option("--params-per-block", o.params_per_block, "1 shared or 2 independent angles per block")
        ->check(CLI::Range(1, 2));
    app->add_option("--epochs", o.epochs, "Maximum training epochs");
    app->add_option("--lr", o.lr, "Adam learning rate");
    app->add_option("--seeds", o.seeds, "Seeds per training (train, sweep)");
    app->add_option("--samples", o.samples, "Monte Carlo sample count");
    app->add_option("--gates", o.gates, "Gates per random topology (0: one per qubit)");
    app->add_option("--seed", o.seed, "Base seed");
    app->add_option("--gradient", o.gradient, "adjoint | parameter_shift | finite_difference");
    app->add_option("--negativity-every", o.negativity_every, "Epoch stride for negativity logging");
    app->add_flag("--no-early-stop", o.no_early_stop, "Always run the full epoch budget");
    app->add_option("--bipartition", o.bipartitions, "Tracked side B, e.g. \"[0,1,2]\" (repeatable)");
    app->add_option("--ratios", o.ratios, "Sweep t_osc values (t_int = 1)")->delimiter(',');
    app->add_option("--params", o.params, "Raw parameters for measure")->delimiter(',');
    app->add_option("--out", o.out, "Output directory");
}

entforge::ExperimentSpec build_spec(entforge::ExperimentKind kind, const Overrides &o) {
    using namespace entforge;
    ExperimentSpec s;
    if (!o.spec_file.empty()) s = load_spec(o.spec_file);
    if (!o.preset.empty()) s = preset(o.preset);
    s.kind = kind;
    if (o.qubits) s.num_qubits = *o.qubits;
    if (o.topology) s.topology = *o.topology;
    if (o.activation || o.t_osc || o.t_int) {
        MemristorParams mp = s.activation.memristor.value_or(MemristorParams{});
        if (o.t_osc) mp.t_osc = *o.t_osc;
        if (o.t_int) mp.t_int = *o.t_int;
        s.activation = Activation::from_name(o.activation.value_or(s.activation.name()), mp);
    }
    if (o.noiseless) s.noise.reset();
    if (o.dephase_p || o.damping_gamma) {
        NoiseModel m = s.noise.value_or(NoiseModel::disabled());
        if (o.dephase_p) {
            m.dephase_p = *o.dephase_p;
            m.dephasing_enabled = true;
        }
        if (o.damping_gamma) {
            m.damping_gamma = *o.damping_gamma;
            m.damping_enabled = true;
        }
        s.noise = m;
    }
    if (o.depth) s.depth = *o.depth;
    if (o.params_per_block) s.params_per_block = *o.params_per_block;
    if (o.epochs) s.train.max_epochs = *o.epochs;
    if (o.lr) s.train.learning_rate = *o.lr;
    if (o.seeds) s.seeds = *o.seeds;
    if (o.samples) s.samples = *o.samples;
    if (o.gates) s.gates = *o.gates;
    if (o.seed) s.train.seed = *o.seed;
    if (o.gradient) s.train.gradient_mode = gradient_mode_from_string(*o.gradient);
    if (o.negativity_every) s.train.negativity_every = *o.negativity_every;
    if (o.no_early_stop) s.train.early_stopping = false;
    if (!o.bipartitions.empty()) {
        s.bipartitions.clear();
        for (const auto &b : o.bipartitions) s.bipartitions.push_back(Bipartition::parse(b));
    }
    if (!o.ratios.empty()) s.ratios = o.ratios;
    if (!o.params.empty()) s.params = o.params;
    if (o.out) s.out_dir = *o.out;
    return s;
}

void report(const entforge::ExperimentSpec &spec, const entforge::ExperimentResult &res) {
    const auto &j = res.summary;
    switch (spec.kind) {
    case entforge::ExperimentKind::train: {
        const auto &b = j["best"];
        std::cout << "best seed " << j["best_seed"] << ": loss " << b["final_loss"] << ", mw " << b["final_mw"]
                  << ", stop epoch " << b["stop_epoch"] << "\n";
        for (const auto &[k, v] : b["final_negativity"].items()) std::cout << "  negativity " << k << " = " << v << "\n";
        break;
    }
    case entforge::ExperimentKind::montecarlo: {
        const auto &t = j["threshold"];
        std::cout << "fraction above " << t["threshold"] << ": " << t["fraction_above"]
                  << ", below-threshold all flagged: " << t["below_all_have_flag"] << "\n";
        break;
    }
    case entforge::ExperimentKind::sweep:
        for (const auto &r : j["rows"])
            std::cout << "t_osc " << r["t_osc"] << " t_int " << r["t_int"] << ": mean loss " << r["mean_final_loss"]
                      << ", variance " << r["variance"] << "\n";
        break;
    case entforge::ExperimentKind::measure:
        std::cout << "mw " << j["mw"] << "\n";
        for (const auto &[k, v] : j["negativity"].items())
            std::cout << "  negativity " << k << " = " << v << " (bound " << j["negativity_upper_bound"][k] << ")\n";
        break;
    }
    if (spec.out_dir.empty()) {
        std::cout << res.files.at("summary.json");
    } else {
        std::cout << "wrote";
        for (const auto &[name, _] : res.files) std::cout << " " << name;
        std::cout << " to " << spec.out_dir << "\n";
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"entforge: train entangling networks of memristor-style two-qubit blocks"};
    app.require_subcommand(1);

    struct Command {
        entforge::ExperimentKind kind;
        CLI::App *app;
        Overrides opts;
    };
    std::vector<Command> commands;
    commands.reserve(4);
    for (auto [name, kind, help] : {
             std::tuple{"train", entforge::ExperimentKind::train, "Train one topology over one or more seeds"},
             std::tuple{"montecarlo", entforge::ExperimentKind::montecarlo, "Train over random topologies"},
             std::tuple{"sweep", entforge::ExperimentKind::sweep, "Sweep memristor t_osc with t_int = 1"},
             std::tuple{"measure", entforge::ExperimentKind::measure, "Evaluate MW and negativity of one circuit"},
         }) {
        commands.push_back({kind, app.add_subcommand(name, help), {}});
    }
    for (auto &c : commands) add_options(c.app, c.opts);

    std::string run_file;
    auto *run = app.add_subcommand("run", "Run a JSON spec file as-is");
    run->add_option("spec", run_file, "Spec file")->required()->check(CLI::ExistingFile);
    auto *presets = app.add_subcommand("presets", "List presets, or print one as a JSON spec");
    std::string preset_name;
    presets->add_option("name", preset_name, "Preset to print");

    CLI11_PARSE(app, argc, argv);

    try {
        if (presets->parsed()) {
            if (preset_name.empty()) {
                for (const auto &n : entforge::preset_names()) std::cout << n << "\n";
            } else {
                std::cout << entforge::preset(preset_name).to_json().dump(2) << "\n";
            }
            return 0;
        }
        entforge::ExperimentSpec spec;
        if (run->parsed()) {
            spec = entforge::load_spec(run_file);
        } else {
            for (auto &c : commands)
                if (c.app->parsed()) spec = build_spec(c.kind, c.opts);
        }
        const auto res = entforge::run_experiment(spec);
        report(spec, res);
    } catch (const entforge::ConfigError &e) {
        std::cerr << "entforge: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "entforge: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
