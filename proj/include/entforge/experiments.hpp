#pragma once

// Experiment drivers: Monte Carlo over random topologies, threshold analysis,
// memristor parameter sweeps, named presets and the file-writing runner.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "entforge/circuit.hpp"
#include "entforge/measures.hpp"
#include "entforge/parallel.hpp"
#include "entforge/topology.hpp"
#include "entforge/train.hpp"

namespace entforge {

using nlohmann::json;

enum class ExperimentKind { train, montecarlo, sweep, measure };

inline std::string to_string(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::train: return "train";
    case ExperimentKind::montecarlo: return "montecarlo";
    case ExperimentKind::sweep: return "sweep";
    case ExperimentKind::measure: return "measure";
    }
    return "?";
}

inline ExperimentKind experiment_kind_from_string(const std::string &s) {
    if (s == "train") return ExperimentKind::train;
    if (s == "montecarlo") return ExperimentKind::montecarlo;
    if (s == "sweep") return ExperimentKind::sweep;
    if (s == "measure") return ExperimentKind::measure;
    throw ConfigError("unknown experiment kind '" + s + "' (expected train | montecarlo | sweep | measure)");
}

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::train;
    std::string preset;
    int num_qubits = 5;
    /// Named topology, inline "0-1,1-2" text, or a path to a topology JSON file.
    std::string topology = "sc+1";
    int depth = 1;
    int params_per_block = 1;
    Activation activation = Activation::sine();
    std::optional<NoiseModel> noise;
    TrainConfig train;
    /// train: seed count; sweep: seeds per ratio.
    int seeds = 1;
    int samples = 1000;
    /// Gates per random topology; 0 means num_qubits.
    int gates = 0;
    double threshold = 0.8;
    std::vector<Bipartition> bipartitions;
    std::vector<double> ratios{0.2, 0.5, 0.8, 1.1, 1.4};
    /// measure: explicit raw parameters; empty means drawn from the seed.
    std::vector<double> params;
    std::string out_dir;

    void validate() const;
    json to_json() const;
};

/// Resolution order: named topology, existing JSON file, inline pair text.
inline Topology resolve_topology(const std::string &ref, int num_qubits, std::uint64_t seed = 0) {
    if (is_named_topology(ref)) return named_topology(ref, num_qubits, seed);
    if (std::filesystem::is_regular_file(ref)) {
        std::ifstream in(ref);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::parse_error &e) {
            throw ConfigError("topology file '" + ref + "': " + e.what());
        }
        Topology t = topology_from_json(j);
        if (t.num_qubits != num_qubits)
            throw ConfigError("topology file '" + ref + "' is for " + std::to_string(t.num_qubits) +
                              " qubits, experiment has " + std::to_string(num_qubits));
        return t;
    }
    if (ref.find('-') != std::string::npos) return parse_topology_text(ref, num_qubits);
    throw ConfigError("topology '" + ref + "' is neither a known name, a file, nor an A-B pair list");
}

inline void ExperimentSpec::validate() const {
    if (num_qubits < 2 || num_qubits > kMaxQubits)
        throw ConfigError("num_qubits " + std::to_string(num_qubits) + " unsupported");
    activation.validate();
    if (noise) noise->validate();
    train.validate();
    if (depth < 1 || depth > 2) throw ConfigError("depth must be 1 or 2");
    if (params_per_block < 1 || params_per_block > 2) throw ConfigError("params_per_block must be 1 or 2");
    if (seeds < 1) throw ConfigError("seeds must be >= 1");
    if (kind == ExperimentKind::montecarlo && samples < 1) throw ConfigError("samples must be >= 1 for montecarlo");
    if (gates < 0) throw ConfigError("gates must be >= 0");
    if (kind == ExperimentKind::sweep) {
        if (ratios.empty()) throw ConfigError("sweep needs at least one ratio");
        for (double r : ratios)
            if (!(r > 0.0)) throw ConfigError("sweep ratios must be positive");
    }
    if (kind != ExperimentKind::montecarlo) resolve_topology(topology, num_qubits, train.seed).validate();
    for (const auto &b : bipartitions) b.validate(num_qubits);
}

inline json noise_to_json(const std::optional<NoiseModel> &noise) {
    if (!noise) return nullptr;
    return {{"dephase_p", noise->dephase_p},
            {"damping_gamma", noise->damping_gamma},
            {"dephasing", noise->dephasing_enabled},
            {"damping", noise->damping_enabled}};
}

inline json ExperimentSpec::to_json() const {
    json j;
    j["kind"] = to_string(kind);
    if (!preset.empty()) j["preset"] = preset;
    j["num_qubits"] = num_qubits;
    j["topology"] = topology;
    j["depth"] = depth;
    j["params_per_block"] = params_per_block;
    j["activation"] = activation.name();
    if (activation.memristor) {
        j["t_osc"] = activation.memristor->t_osc;
        j["t_int"] = activation.memristor->t_int;
    }
    j["noise"] = noise_to_json(noise);
    j["seed"] = train.seed;
    j["train"] = {{"learning_rate", train.learning_rate},
                  {"adam_beta1", train.adam_beta1},
                  {"adam_beta2", train.adam_beta2},
                  {"adam_eps", train.adam_eps},
                  {"max_epochs", train.max_epochs},
                  {"early_stopping", train.early_stopping},
                  {"early_stop_patience", train.early_stop_patience},
                  {"early_stop_min_delta", train.early_stop_min_delta},
                  {"gradient_mode", to_string(train.gradient_mode)},
                  {"fd_step", train.fd_step},
                  {"negativity_every", train.negativity_every}};
    j["seeds"] = seeds;
    j["samples"] = samples;
    j["gates"] = gates;
    j["threshold"] = threshold;
    j["bipartitions"] = json::array();
    for (const auto &b : bipartitions) j["bipartitions"].push_back(b.to_string());
    j["ratios"] = ratios;
    if (!params.empty()) j["params"] = params;
    if (!out_dir.empty()) j["out"] = out_dir;
    return j;
}

// ---------------------------------------------------------------------------
// Presets

inline std::vector<Bipartition> halves_5q() { return {Bipartition{0, 1, 2}, Bipartition{2, 3, 4}}; }

/// Memristor setting used by the presets; the library default is degenerate.
inline MemristorParams preset_memristor() { return {4.0, 1.0}; }

inline std::vector<std::string> preset_names() {
    return {"fig_sc_low_noise_5q",      "fig_sc_plus1_low_noise_5q", "fig_sc_plus1_full_noise_5q",
            "fig_sc_plus2_full_noise_5q", "fig_10q_u_5_9",           "fig_10q_u_0_3",
            "fig_10q_w_0_3",            "fig_10q_sc_plus1_damping",  "fig_11q_sc_plus1",
            "fig_20q_sc_plus1",         "mc_rn_5q",                  "mc_rn_low_noise_5q",
            "sweep_init_5q"};
}

inline ExperimentSpec preset(const std::string &name) {
    ExperimentSpec s;
    s.preset = name;
    s.params_per_block = 2;
    const Activation bm = Activation::bm(preset_memristor());
    const auto nisq = NoiseModel::dephasing_and_damping(0.01, 0.01);
    if (name == "fig_sc_low_noise_5q" || name == "fig_sc_plus1_low_noise_5q") {
        s.topology = name == "fig_sc_low_noise_5q" ? "sc" : "sc+1";
        s.activation = bm;
        s.noise = NoiseModel::damping_only(0.01);
        s.seeds = 20;
        s.bipartitions = halves_5q();
    } else if (name == "fig_sc_plus1_full_noise_5q") {
        s.topology = "sc+1";
        s.activation = bm;
        s.noise = nisq;
        s.seeds = 20;
        s.bipartitions = halves_5q();
    } else if (name == "fig_sc_plus2_full_noise_5q") {
        s.topology = "sc+2";
        s.activation = Activation::sine();
        s.noise = nisq;
        s.seeds = 20;
        s.bipartitions = halves_5q();
    } else if (name == "fig_10q_u_5_9" || name == "fig_10q_u_0_3" || name == "fig_10q_w_0_3") {
        s.num_qubits = 10;
        s.topology = name.substr(8);
        s.activation = Activation::sine();
        s.noise = nisq;
        s.bipartitions = {name == "fig_10q_u_5_9" ? Bipartition{0, 1, 2, 3, 4} : Bipartition{0, 1, 2, 3}};
    } else if (name == "fig_10q_sc_plus1_damping") {
        s.num_qubits = 10;
        s.topology = "sc+1";
        s.activation = bm;
        s.noise = NoiseModel::damping_only(0.01);
        s.bipartitions = {Bipartition{0, 1, 2, 3, 4}};
    } else if (name == "fig_11q_sc_plus1") {
        s.num_qubits = 11;
        s.topology = "sc+1";
        s.activation = Activation::sine();
    } else if (name == "fig_20q_sc_plus1") {
        s.num_qubits = 20;
        s.topology = "sc+1";
        s.activation = Activation::sine();
    } else if (name == "mc_rn_5q" || name == "mc_rn_low_noise_5q") {
        s.kind = ExperimentKind::montecarlo;
        s.topology = "rn";
        s.activation = bm;
        s.train.max_epochs = 500;
        if (name == "mc_rn_low_noise_5q") {
            s.samples = 10;
            s.noise = NoiseModel::damping_only(0.001);
        }
    } else if (name == "sweep_init_5q") {
        s.kind = ExperimentKind::sweep;
        s.topology = "sc";
        s.activation = bm;
        s.seeds = 20;
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    return s;
}

// ---------------------------------------------------------------------------
// Spec files

namespace detail {

template <class T>
T field(const json &j, const std::string &path) {
    try {
        return j.get<T>();
    } catch (const json::exception &e) {
        throw ConfigError("spec field '" + path + "': " + e.what());
    }
}

inline void reject_unknown(const json &obj, std::initializer_list<const char *> known, const std::string &prefix) {
    for (const auto &[key, _] : obj.items()) {
        if (std::none_of(known.begin(), known.end(), [&](const char *k) { return key == k; }))
            throw ConfigError("spec field '" + prefix + key + "': unknown field");
    }
}

inline Bipartition bipartition_from_json(const json &j, const std::string &path) {
    try {
        if (j.is_string()) return Bipartition::parse(j.get<std::string>());
        return Bipartition(field<std::vector<int>>(j, path));
    } catch (const ConfigError &e) {
        throw ConfigError("spec field '" + path + "': " + e.what());
    } catch (const std::logic_error &e) {
        throw ConfigError("spec field '" + path + "': " + e.what());
    }
}

}  // namespace detail

/// Fields absent from `j` keep their value from `base` (or the preset named in j).
inline ExperimentSpec spec_from_json(const json &j, ExperimentSpec base = {}) {
    using detail::field;
    if (!j.is_object()) throw ConfigError("spec: top level must be a JSON object");
    detail::reject_unknown(j,
                           {"kind", "preset", "num_qubits", "topology", "depth", "params_per_block", "activation",
                            "t_osc", "t_int", "noise", "seed", "train", "seeds", "samples", "gates", "threshold",
                            "bipartitions", "ratios", "params", "out"},
                           "");
    ExperimentSpec s = std::move(base);
    if (j.contains("preset")) {
        const auto name = field<std::string>(j["preset"], "preset");
        try {
            s = preset(name);
        } catch (const ConfigError &e) {
            throw ConfigError(std::string("spec field 'preset': ") + e.what());
        }
    }
    try {
        if (j.contains("kind")) s.kind = experiment_kind_from_string(field<std::string>(j["kind"], "kind"));
    } catch (const ConfigError &e) {
        throw ConfigError(std::string("spec field 'kind': ") + e.what());
    }
    if (j.contains("num_qubits")) s.num_qubits = field<int>(j["num_qubits"], "num_qubits");
    if (j.contains("topology")) {
        const json &t = j["topology"];
        if (t.is_object()) {
            try {
                const Topology topo = topology_from_json(t);
                s.topology = topo.to_text();
                if (!j.contains("num_qubits")) s.num_qubits = topo.num_qubits;
            } catch (const ConfigError &e) {
                throw ConfigError(std::string("spec field 'topology': ") + e.what());
            }
        } else {
            s.topology = field<std::string>(t, "topology");
        }
    }
    if (j.contains("depth")) s.depth = field<int>(j["depth"], "depth");
    if (j.contains("params_per_block")) s.params_per_block = field<int>(j["params_per_block"], "params_per_block");
    if (j.contains("activation") || j.contains("t_osc") || j.contains("t_int")) {
        const std::string name =
            j.contains("activation") ? field<std::string>(j["activation"], "activation") : s.activation.name();
        MemristorParams mp = s.activation.memristor.value_or(MemristorParams{});
        if (j.contains("t_osc")) mp.t_osc = field<double>(j["t_osc"], "t_osc");
        if (j.contains("t_int")) mp.t_int = field<double>(j["t_int"], "t_int");
        try {
            s.activation = Activation::from_name(name, mp);
            s.activation.validate();
        } catch (const ConfigError &e) {
            throw ConfigError(std::string("spec field 'activation': ") + e.what());
        }
    }
    if (j.contains("noise")) {
        const json &n = j["noise"];
        if (n.is_null()) {
            s.noise.reset();
        } else {
            if (!n.is_object()) throw ConfigError("spec field 'noise': expected an object or null");
            detail::reject_unknown(n, {"dephase_p", "damping_gamma", "dephasing", "damping"}, "noise.");
            // A given probability enables its channel unless the boolean says otherwise.
            NoiseModel m = NoiseModel::disabled();
            if (n.contains("dephase_p")) {
                m.dephase_p = field<double>(n["dephase_p"], "noise.dephase_p");
                m.dephasing_enabled = true;
            }
            if (n.contains("damping_gamma")) {
                m.damping_gamma = field<double>(n["damping_gamma"], "noise.damping_gamma");
                m.damping_enabled = true;
            }
            if (n.contains("dephasing")) m.dephasing_enabled = field<bool>(n["dephasing"], "noise.dephasing");
            if (n.contains("damping")) m.damping_enabled = field<bool>(n["damping"], "noise.damping");
            try {
                m.validate();
            } catch (const ConfigError &e) {
                throw ConfigError(std::string("spec field 'noise': ") + e.what());
            }
            s.noise = m;
        }
    }
    if (j.contains("seed")) s.train.seed = field<std::uint64_t>(j["seed"], "seed");
    if (j.contains("train")) {
        const json &t = j["train"];
        if (!t.is_object()) throw ConfigError("spec field 'train': expected an object");
        detail::reject_unknown(t,
                               {"learning_rate", "adam_beta1", "adam_beta2", "adam_eps", "max_epochs",
                                "early_stopping", "early_stop_patience", "early_stop_min_delta", "gradient_mode",
                                "fd_step", "negativity_every"},
                               "train.");
        auto &c = s.train;
        if (t.contains("learning_rate")) c.learning_rate = field<double>(t["learning_rate"], "train.learning_rate");
        if (t.contains("adam_beta1")) c.adam_beta1 = field<double>(t["adam_beta1"], "train.adam_beta1");
        if (t.contains("adam_beta2")) c.adam_beta2 = field<double>(t["adam_beta2"], "train.adam_beta2");
        if (t.contains("adam_eps")) c.adam_eps = field<double>(t["adam_eps"], "train.adam_eps");
        if (t.contains("max_epochs")) c.max_epochs = field<int>(t["max_epochs"], "train.max_epochs");
        if (t.contains("early_stopping")) c.early_stopping = field<bool>(t["early_stopping"], "train.early_stopping");
        if (t.contains("early_stop_patience"))
            c.early_stop_patience = field<int>(t["early_stop_patience"], "train.early_stop_patience");
        if (t.contains("early_stop_min_delta"))
            c.early_stop_min_delta = field<double>(t["early_stop_min_delta"], "train.early_stop_min_delta");
        if (t.contains("gradient_mode")) {
            try {
                c.gradient_mode = gradient_mode_from_string(field<std::string>(t["gradient_mode"], "train.gradient_mode"));
            } catch (const ConfigError &e) {
                throw ConfigError(std::string("spec field 'train.gradient_mode': ") + e.what());
            }
        }
        if (t.contains("fd_step")) c.fd_step = field<double>(t["fd_step"], "train.fd_step");
        if (t.contains("negativity_every")) c.negativity_every = field<int>(t["negativity_every"], "train.negativity_every");
    }
    if (j.contains("seeds")) s.seeds = field<int>(j["seeds"], "seeds");
    if (j.contains("samples")) s.samples = field<int>(j["samples"], "samples");
    if (j.contains("gates")) s.gates = field<int>(j["gates"], "gates");
    if (j.contains("threshold")) s.threshold = field<double>(j["threshold"], "threshold");
    if (j.contains("bipartitions")) {
        const json &b = j["bipartitions"];
        if (!b.is_array()) throw ConfigError("spec field 'bipartitions': expected an array");
        s.bipartitions.clear();
        for (std::size_t i = 0; i < b.size(); ++i)
            s.bipartitions.push_back(detail::bipartition_from_json(b[i], "bipartitions[" + std::to_string(i) + "]"));
    }
    if (j.contains("ratios")) s.ratios = field<std::vector<double>>(j["ratios"], "ratios");
    if (j.contains("params")) s.params = field<std::vector<double>>(j["params"], "params");
    if (j.contains("out")) s.out_dir = field<std::string>(j["out"], "out");
    return s;
}

inline ExperimentSpec parse_spec(const std::string &text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception &e) {
        throw ConfigError(std::string("spec: ") + e.what());
    }
    return spec_from_json(j);
}

inline ExperimentSpec load_spec(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open spec file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_spec(ss.str());
    } catch (const ConfigError &e) {
        throw ConfigError(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Monte Carlo

struct MonteCarloRecord {
    std::size_t sample = 0;
    std::uint64_t seed = 0;
    Topology topology;
    double final_loss = 1.0;
    double final_mw = 0.0;
    StructureFlags flags;
};

struct MonteCarloConfig {
    int samples = 1000;
    int num_qubits = 5;
    /// 0 means num_qubits gates per topology.
    int gates = 0;
    int depth = 1;
    int params_per_block = 1;
    Activation activation = Activation::sine();
    std::optional<NoiseModel> noise;
    TrainConfig train = [] {
        TrainConfig c;
        c.max_epochs = 500;
        return c;
    }();
    std::uint64_t master_seed = 0;
};

/// Sample i draws its topology and its initial parameters from master_seed + i.
inline std::vector<MonteCarloRecord> monte_carlo(const MonteCarloConfig &cfg) {
    if (cfg.samples < 1) throw ConfigError("monte_carlo needs at least one sample");
    cfg.train.validate();
    const int gates = cfg.gates > 0 ? cfg.gates : cfg.num_qubits;
    return parallel_map<MonteCarloRecord>(static_cast<std::size_t>(cfg.samples), [&](std::size_t i) {
        const std::uint64_t seed = cfg.master_seed + i;
        Circuit c{random_topology(cfg.num_qubits, gates, seed), cfg.depth, cfg.activation, cfg.params_per_block};
        TrainConfig tc = cfg.train;
        tc.seed = seed;
        const TrainingTrace tr = train(c, tc, cfg.noise, {});
        MonteCarloRecord r;
        r.sample = i;
        r.seed = seed;
        r.flags = structure_flags(c.topology);
        r.topology = std::move(c.topology);
        r.final_loss = tr.final_loss;
        r.final_mw = tr.final_mw;
        return r;
    });
}

struct ThresholdSummary {
    double threshold = 0.8;
    double fraction_above = 0.0;
    double fraction_below = 0.0;
    std::size_t count_above = 0;
    std::size_t count_below = 0;
    /// Vacuously true when nothing falls below.
    bool below_all_have_flag = true;
};

/// Above means final MW strictly greater than the threshold.
inline ThresholdSummary threshold_analysis(const std::vector<MonteCarloRecord> &records, double threshold = 0.8) {
    if (records.empty()) throw ConfigError("threshold_analysis: no records");
    ThresholdSummary s;
    s.threshold = threshold;
    for (const auto &r : records) {
        if (r.final_mw > threshold) {
            ++s.count_above;
        } else {
            ++s.count_below;
            if (!r.flags.has_descending_nonneighbor) s.below_all_have_flag = false;
        }
    }
    const double n = static_cast<double>(records.size());
    s.fraction_above = static_cast<double>(s.count_above) / n;
    s.fraction_below = static_cast<double>(s.count_below) / n;
    return s;
}

struct HistogramBin {
    double lo = 0.0, hi = 0.0;
    std::size_t count = 0;
};

/// Uniform bins over [0, 1]; values are clamped, 1 lands in the last bin.
inline std::vector<HistogramBin> histogram(const std::vector<double> &values, int bins = 20) {
    if (bins < 1) throw ConfigError("histogram needs at least one bin");
    std::vector<HistogramBin> h(static_cast<std::size_t>(bins));
    for (int b = 0; b < bins; ++b) h[b] = {double(b) / bins, double(b + 1) / bins, 0};
    for (double v : values) {
        const double c = std::clamp(v, 0.0, 1.0);
        const int b = std::min(bins - 1, static_cast<int>(c * bins));
        ++h[static_cast<std::size_t>(b)].count;
    }
    return h;
}

inline std::vector<HistogramBin> loss_histogram(const std::vector<MonteCarloRecord> &records, int bins = 20) {
    std::vector<double> losses;
    losses.reserve(records.size());
    for (const auto &r : records) losses.push_back(r.final_loss);
    return histogram(losses, bins);
}

// ---------------------------------------------------------------------------
// Sweep

struct SweepRow {
    double t_osc = 0.0, t_int = 1.0;
    double mean_final_loss = 0.0;
    /// Population variance over seeds.
    double variance = 0.0;
    std::vector<double> final_losses;
};

/// Each ratio r runs the template with memristor (t_osc = r, t_int = 1) for
/// seeds cfg.seed .. cfg.seed + k - 1. All (ratio, seed) cells run in parallel.
inline std::vector<SweepRow> sweep_memristor_params(const std::vector<double> &ratios, const Circuit &circuit_template,
                                                    int k_seeds, const std::optional<NoiseModel> &noise,
                                                    const TrainConfig &cfg = {}) {
    if (k_seeds < 1) throw ConfigError("sweep needs k_seeds >= 1");
    for (double r : ratios)
        if (!(r > 0.0)) throw ConfigError("sweep ratios must be positive");
    const std::size_t k = static_cast<std::size_t>(k_seeds);
    const auto losses = parallel_map<double>(ratios.size() * k, [&](std::size_t job) {
        Circuit c = circuit_template;
        c.activation = Activation::bm(ratios[job / k], 1.0);
        TrainConfig tc = cfg;
        tc.seed = cfg.seed + job % k;
        return train(c, tc, noise, {}).final_loss;
    });
    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        SweepRow row;
        row.t_osc = ratios[i];
        row.final_losses.assign(losses.begin() + i * k, losses.begin() + (i + 1) * k);
        const auto [m, sd] = detail::mean_std(row.final_losses);
        row.mean_final_loss = m;
        row.variance = sd * sd;
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Output

namespace detail {

inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string column_name(const Bipartition &b) {
    std::string s = "neg";
    for (int q : b.side_b()) s += "_" + std::to_string(q);
    return s;
}

inline void write_text(const std::filesystem::path &p, const std::string &text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + p.string() + "'");
    out << text;
}

inline json optional_number(const std::optional<double> &x) { return x ? json(*x) : json(nullptr); }

}  // namespace detail

/// epoch,loss,mw,neg_<b>...; negativity cells are empty on epochs that were not logged.
inline std::string trace_csv(const TrainingTrace &t) {
    std::string s = "epoch,loss,mw";
    for (const auto &b : t.bipartitions) s += "," + detail::column_name(b);
    s += '\n';
    for (const auto &e : t.epochs) {
        s += std::to_string(e.epoch) + "," + detail::fmt(e.loss) + "," + detail::fmt(e.mw);
        for (std::size_t b = 0; b < t.bipartitions.size(); ++b) {
            s += ',';
            if (b < e.negativity.size() && e.negativity[b]) s += detail::fmt(*e.negativity[b]);
        }
        s += '\n';
    }
    return s;
}

inline std::string curve_csv(const std::vector<CurvePoint> &curve, const std::vector<Bipartition> &parts) {
    std::string s = "epoch,loss_mean,loss_std,mw_mean,mw_std";
    for (const auto &b : parts) s += "," + detail::column_name(b) + "_mean," + detail::column_name(b) + "_std";
    s += '\n';
    for (const auto &p : curve) {
        s += std::to_string(p.epoch) + "," + detail::fmt(p.loss_mean) + "," + detail::fmt(p.loss_std) + "," +
             detail::fmt(p.mw_mean) + "," + detail::fmt(p.mw_std);
        for (std::size_t b = 0; b < parts.size(); ++b) {
            s += ',';
            if (p.neg_mean[b]) s += detail::fmt(*p.neg_mean[b]);
            s += ',';
            if (p.neg_std[b]) s += detail::fmt(*p.neg_std[b]);
        }
        s += '\n';
    }
    return s;
}

inline std::string records_csv(const std::vector<MonteCarloRecord> &records) {
    std::string s = "sample,seed,topology,final_loss,final_mw,has_descending_nonneighbor\n";
    for (const auto &r : records)
        s += std::to_string(r.sample) + "," + std::to_string(r.seed) + "," + r.topology.to_text() + "," +
             detail::fmt(r.final_loss) + "," + detail::fmt(r.final_mw) + "," +
             (r.flags.has_descending_nonneighbor ? "1" : "0") + "\n";
    return s;
}

inline std::string histogram_csv(const std::vector<HistogramBin> &h) {
    std::string s = "bin_lo,bin_hi,count\n";
    for (const auto &b : h) s += detail::fmt(b.lo) + "," + detail::fmt(b.hi) + "," + std::to_string(b.count) + "\n";
    return s;
}

inline std::string sweep_csv(const std::vector<SweepRow> &rows) {
    std::string s = "t_osc,t_int,mean_final_loss,variance\n";
    for (const auto &r : rows)
        s += detail::fmt(r.t_osc) + "," + detail::fmt(r.t_int) + "," + detail::fmt(r.mean_final_loss) + "," +
             detail::fmt(r.variance) + "\n";
    return s;
}

inline json trace_summary(const TrainingTrace &t) {
    json j;
    j["num_params"] = t.initial_params.size();
    j["final_loss"] = t.final_loss;
    j["final_mw"] = t.final_mw;
    j["best_epoch"] = t.best_epoch;
    j["stop_epoch"] = t.stop_epoch;
    j["stopped_early"] = t.stopped_early;
    j["final_negativity"] = json::object();
    for (std::size_t b = 0; b < t.bipartitions.size(); ++b)
        j["final_negativity"][t.bipartitions[b].to_string()] = detail::optional_number(t.final_negativity[b]);
    j["final_params"] = t.final_params;
    return j;
}

/// In-memory products of one experiment; `files` maps file name to content.
struct ExperimentResult {
    json summary;
    std::map<std::string, std::string> files;
};

inline Circuit circuit_for(const ExperimentSpec &s) {
    return Circuit{resolve_topology(s.topology, s.num_qubits, s.train.seed), s.depth, s.activation,
                   s.params_per_block};
}

inline ExperimentResult execute_experiment(const ExperimentSpec &spec) {
    spec.validate();
    ExperimentResult res;
    json &sum = res.summary;
    sum["spec"] = spec.to_json();

    switch (spec.kind) {
    case ExperimentKind::train: {
        const Circuit c = circuit_for(spec);
        sum["topology"] = c.topology.to_json();
        std::vector<TrainingTrace> runs;
        if (spec.seeds == 1) {
            runs.push_back(train(c, spec.train, spec.noise, spec.bipartitions));
        } else {
            SeedStats st = multi_seed_stats(c, spec.train, spec.noise, spec.seeds, spec.bipartitions);
            res.files["curve.csv"] = curve_csv(st.curve, spec.bipartitions);
            runs = std::move(st.runs);
        }
        std::size_t best = 0;
        sum["runs"] = json::array();
        for (std::size_t i = 0; i < runs.size(); ++i) {
            json r = trace_summary(runs[i]);
            r["seed"] = spec.train.seed + i;
            sum["runs"].push_back(std::move(r));
            if (runs[i].final_loss < runs[best].final_loss) best = i;
            if (runs.size() > 1) res.files["trace_seed" + std::to_string(spec.train.seed + i) + ".csv"] = trace_csv(runs[i]);
        }
        sum["best_seed"] = spec.train.seed + best;
        sum["best"] = trace_summary(runs[best]);
        res.files["trace.csv"] = trace_csv(runs[best]);
        break;
    }
    case ExperimentKind::montecarlo: {
        MonteCarloConfig mc;
        mc.samples = spec.samples;
        mc.num_qubits = spec.num_qubits;
        mc.gates = spec.gates;
        mc.depth = spec.depth;
        mc.params_per_block = spec.params_per_block;
        mc.activation = spec.activation;
        mc.noise = spec.noise;
        mc.train = spec.train;
        mc.master_seed = spec.train.seed;
        const auto records = monte_carlo(mc);
        const auto th = threshold_analysis(records, spec.threshold);
        sum["threshold"] = {{"threshold", th.threshold},
                            {"fraction_above", th.fraction_above},
                            {"fraction_below", th.fraction_below},
                            {"count_above", th.count_above},
                            {"count_below", th.count_below},
                            {"below_all_have_flag", th.below_all_have_flag}};
        res.files["records.csv"] = records_csv(records);
        res.files["histogram.csv"] = histogram_csv(loss_histogram(records));
        break;
    }
    case ExperimentKind::sweep: {
        const Circuit c = circuit_for(spec);
        const auto rows = sweep_memristor_params(spec.ratios, c, spec.seeds, spec.noise, spec.train);
        sum["rows"] = json::array();
        for (const auto &r : rows)
            sum["rows"].push_back({{"t_osc", r.t_osc},
                                   {"t_int", r.t_int},
                                   {"mean_final_loss", r.mean_final_loss},
                                   {"variance", r.variance},
                                   {"final_losses", r.final_losses}});
        res.files["records.csv"] = sweep_csv(rows);
        break;
    }
    case ExperimentKind::measure: {
        const Circuit c = circuit_for(spec);
        const std::vector<double> p = spec.params.empty() ? initial_parameters(c.num_params(), spec.train.seed) : spec.params;
        c.check_params(p);
        const State s = forward(c, p, spec.noise);
        sum["topology"] = c.topology.to_json();
        sum["params"] = p;
        sum["mw"] = meyer_wallach(s);
        sum["loss"] = 1.0 - sum["mw"].get<double>();
        sum["negativity"] = json::object();
        sum["negativity_upper_bound"] = json::object();
        for (const auto &b : spec.bipartitions) {
            if (std::holds_alternative<StateVector>(s) && c.num_qubits() > kMaxNegativityQubits)
                sum["negativity"][b.to_string()] = nullptr;
            else
                sum["negativity"][b.to_string()] = negativity(s, b);
            sum["negativity_upper_bound"][b.to_string()] = negativity_upper_bound(c.num_qubits(), b);
        }
        break;
    }
    }
    res.files["summary.json"] = sum.dump(2) + "\n";
    return res;
}

/// Executes the spec and writes its files into spec.out_dir (created if needed).
inline ExperimentResult run_experiment(const ExperimentSpec &spec) {
    ExperimentResult res = execute_experiment(spec);
    if (!spec.out_dir.empty()) {
        const std::filesystem::path dir(spec.out_dir);
        std::filesystem::create_directories(dir);
        for (const auto &[name, text] : res.files) detail::write_text(dir / name, text);
    }
    return res;
}

}  // namespace entforge
