#pragma once

// Where each two-qubit block acts. A topology is an ordered list of ordered
// wire pairs (A, B); A carries the RY rotation and the CRX control, so pair
// order matters everywhere.

#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "entforge/random.hpp"
#include "entforge/types.hpp"

namespace entforge {

using WirePair = std::pair<int, int>;

struct Topology {
    std::string name;
    int num_qubits = 0;
    std::vector<WirePair> pairs;

    void validate() const {
        if (num_qubits < 2 || num_qubits > kMaxQubits)
            throw ConfigError("topology '" + name + "': qubit count " + std::to_string(num_qubits) + " unsupported");
        if (pairs.empty()) throw ConfigError("topology '" + name + "' has no pairs");
        for (const auto &[a, b] : pairs) {
            if (a < 0 || b < 0 || a >= num_qubits || b >= num_qubits)
                throw ConfigError("topology '" + name + "': pair " + std::to_string(a) + "-" + std::to_string(b) +
                                  " out of range for " + std::to_string(num_qubits) + " qubits");
            if (a == b) throw ConfigError("topology '" + name + "': pair with identical wires " + std::to_string(a));
        }
    }

    /// "0-1,1-2,2-3"
    std::string to_text() const {
        std::string s;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(pairs[i].first) + "-" + std::to_string(pairs[i].second);
        }
        return s;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["name"] = name;
        j["num_qubits"] = num_qubits;
        j["pairs"] = nlohmann::json::array();
        for (const auto &[a, b] : pairs) j["pairs"].push_back({a, b});
        return j;
    }

    friend bool operator==(const Topology &, const Topology &) = default;
};

/// Parses "0-1,1-2,..."; num_qubits is taken from the argument.
inline Topology parse_topology_text(const std::string &text, int num_qubits, std::string name = "inline") {
    Topology t{std::move(name), num_qubits, {}};
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto dash = item.find('-');
        if (dash == std::string::npos || dash == 0 || dash + 1 == item.size())
            throw ConfigError("topology text: malformed pair '" + item + "' (expected A-B)");
        try {
            std::size_t used_a = 0, used_b = 0;
            const std::string sa = item.substr(0, dash), sb = item.substr(dash + 1);
            const int a = std::stoi(sa, &used_a);
            const int b = std::stoi(sb, &used_b);
            if (used_a != sa.size() || used_b != sb.size()) throw std::invalid_argument(item);
            t.pairs.emplace_back(a, b);
        } catch (const std::logic_error &) {
            throw ConfigError("topology text: malformed pair '" + item + "'");
        }
    }
    t.validate();
    return t;
}

inline Topology topology_from_json(const nlohmann::json &j) {
    Topology t;
    try {
        t.name = j.value("name", std::string("json"));
        t.num_qubits = j.at("num_qubits").get<int>();
        for (const auto &p : j.at("pairs")) {
            if (!p.is_array() || p.size() != 2) throw ConfigError("topology json: each pair must be [A, B]");
            t.pairs.emplace_back(p[0].get<int>(), p[1].get<int>());
        }
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("topology json: ") + e.what());
    }
    t.validate();
    return t;
}

/// (0,1), (1,2), ..., (n-2, n-1)
inline Topology staircase(int n) {
    if (n < 2) throw ConfigError("staircase needs n >= 2");
    Topology t{"sc", n, {}};
    for (int i = 0; i + 1 < n; ++i) t.pairs.emplace_back(i, i + 1);
    t.validate();
    return t;
}

/// staircase followed by the closing pair (n-1, 0).
inline Topology staircase_plus_1(int n) {
    if (n < 3) throw ConfigError("staircase_plus_1 needs n >= 3");
    Topology t = staircase(n);
    t.name = "sc+1";
    t.pairs.emplace_back(n - 1, 0);
    return t;
}

/// staircase followed by the mirrored closing pair (0, n-1).
inline Topology staircase_plus_1_mirrored(int n) {
    if (n < 3) throw ConfigError("staircase_plus_1_mirrored needs n >= 3");
    Topology t = staircase(n);
    t.name = "w_sc+1";
    t.pairs.emplace_back(0, n - 1);
    return t;
}

/// staircase_plus_1 followed by (3, 1).
inline Topology staircase_plus_2(int n) {
    if (n < 5) throw ConfigError("staircase_plus_2 needs n >= 5");
    Topology t = staircase_plus_1(n);
    t.name = "sc+2";
    t.pairs.emplace_back(3, 1);
    return t;
}

/// The three 10-qubit networks of the topology study: "u_5_9", "u_0_3", "w_0_3".
inline Topology named_10q(const std::string &variant) {
    Topology t = staircase_plus_1(10);
    if (variant == "u_5_9") {
        t.pairs.insert(t.pairs.end(), {{8, 1}, {7, 2}, {6, 3}, {5, 4}});
    } else if (variant == "u_0_3" || variant == "w_0_3") {
        t.pairs.insert(t.pairs.end(), {{8, 1}, {7, 2}, {6, 3}, {4, 1}, {5, 2}});
        if (variant == "w_0_3") t.pairs.insert(t.pairs.end(), {{9, 1}, {8, 0}});
    } else {
        throw ConfigError("unknown 10-qubit variant '" + variant + "' (expected u_5_9 | u_0_3 | w_0_3)");
    }
    t.name = variant;
    return t;
}

/// num_gates ordered pairs of distinct wires, each drawn uniformly.
inline Topology random_topology(int n, int num_gates, std::uint64_t seed) {
    if (n < 2) throw ConfigError("random_topology needs n >= 2");
    if (num_gates < 1) throw ConfigError("random_topology needs at least one gate");
    Rng rng(seed);
    Topology t{"rn", n, {}};
    t.pairs.reserve(static_cast<std::size_t>(num_gates));
    for (int g = 0; g < num_gates; ++g) {
        const int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
        if (b >= a) ++b;
        t.pairs.emplace_back(a, b);
    }
    t.validate();
    return t;
}

struct StructureFlags {
    /// Some pair (A, B) has A > B and |A - B| > 1.
    bool has_descending_nonneighbor = false;
};

inline StructureFlags structure_flags(const Topology &t) {
    StructureFlags f;
    for (const auto &[a, b] : t.pairs)
        if (a > b && a - b > 1) f.has_descending_nonneighbor = true;
    return f;
}

/// Resolves a topology name: sc, sc+1, sc+2, w_sc+1, u_5_9, u_0_3, w_0_3,
/// or rn (random, n gates, seeded).
inline bool is_named_topology(const std::string &name) {
    return name == "sc" || name == "sc+1" || name == "sc+2" || name == "w_sc+1" || name == "u_5_9" ||
           name == "u_0_3" || name == "w_0_3" || name == "rn";
}

inline Topology named_topology(const std::string &name, int n, std::uint64_t seed = 0) {
    if (name == "sc") return staircase(n);
    if (name == "sc+1") return staircase_plus_1(n);
    if (name == "sc+2") return staircase_plus_2(n);
    if (name == "w_sc+1") return staircase_plus_1_mirrored(n);
    if (name == "rn") return random_topology(n, n, seed);
    if (name == "u_5_9" || name == "u_0_3" || name == "w_0_3") {
        if (n != 10) throw ConfigError("topology '" + name + "' is defined for 10 qubits only");
        return named_10q(name);
    }
    throw ConfigError("unknown topology '" + name + "'");
}

}  // namespace entforge
