#pragma once

// Reparameterizations theta -> gate angle applied before a parameter enters a
// gate, and the memristor response function behind the "bm" activation.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "entforge/types.hpp"

namespace entforge {

enum class ActivationKind { linear, sine, memristor };

struct MemristorParams {
    double t_osc = 1.0;
    double t_int = 1.0;
};

struct Activation {
    ActivationKind kind = ActivationKind::linear;
    std::optional<MemristorParams> memristor;

    static Activation linear() { return {ActivationKind::linear, std::nullopt}; }
    static Activation sine() { return {ActivationKind::sine, std::nullopt}; }
    static Activation bm(MemristorParams p = {}) { return {ActivationKind::memristor, p}; }
    static Activation bm(double t_osc, double t_int) { return bm(MemristorParams{t_osc, t_int}); }

    void validate() const {
        if ((kind == ActivationKind::memristor) != memristor.has_value())
            throw ConfigError("memristor parameters present iff activation is 'bm'");
        if (memristor && !(memristor->t_osc > 0.0 && memristor->t_int > 0.0))
            throw ConfigError("t_osc and t_int must be strictly positive");
    }

    /// Config spelling: "linear" | "sin" | "bm".
    std::string name() const {
        switch (kind) {
        case ActivationKind::linear: return "linear";
        case ActivationKind::sine: return "sin";
        case ActivationKind::memristor: return "bm";
        }
        return "?";
    }

    static Activation from_name(const std::string &name, std::optional<MemristorParams> p = std::nullopt) {
        if (name == "linear") return linear();
        if (name == "sin" || name == "sine") return sine();
        if (name == "bm" || name == "memristor") return bm(p.value_or(MemristorParams{}));
        throw ConfigError("unknown activation '" + name + "' (expected linear | sin | bm)");
    }
};

/// R(t) = T_osc / (4 pi T_int) * [sin((2 pi t - 2 pi T_int) / T_osc) - sin(2 pi t / T_osc)]
inline double response(double t, double t_osc, double t_int) {
    if (!(t_osc > 0.0 && t_int > 0.0)) throw ConfigError("response: periods must be strictly positive");
    const double w = 2.0 * kPi / t_osc;
    return t_osc / (t_int * 4.0 * kPi) * (std::sin(w * t - w * t_int) - std::sin(w * t));
}

inline double response_derivative(double t, double t_osc, double t_int) {
    const double w = 2.0 * kPi / t_osc;
    return t_osc / (t_int * 4.0 * kPi) * w * (std::cos(w * t - w * t_int) - std::cos(w * t));
}

/// 2 asin(sqrt(1 - R)) with R clamped to [0, 1].
inline double reflectivity_to_angle(double r) {
    const double rc = std::clamp(r, 0.0, 1.0);
    return 2.0 * std::asin(std::sqrt(1.0 - rc));
}

inline double activate(double theta, const Activation &act) {
    switch (act.kind) {
    case ActivationKind::linear: return theta;
    case ActivationKind::sine: return std::sin(theta);
    case ActivationKind::memristor: {
        const auto &p = act.memristor.value();
        return reflectivity_to_angle(response(theta, p.t_osc, p.t_int));
    }
    }
    return theta;
}

/// R within this distance of 0 or 1 counts as clamped.
inline constexpr double kClampEps = 1e-12;

/// d activate / d theta. For the memristor the derivative is taken as 0 where
/// R is clamped and at R in {0, 1}, where d angle / dR is unbounded.
inline double activate_derivative(double theta, const Activation &act) {
    switch (act.kind) {
    case ActivationKind::linear: return 1.0;
    case ActivationKind::sine: return std::cos(theta);
    case ActivationKind::memristor: {
        const auto &p = act.memristor.value();
        const double r = response(theta, p.t_osc, p.t_int);
        if (r <= kClampEps || r >= 1.0 - kClampEps) return 0.0;
        // d/dR 2 asin(sqrt(1-R)) = -1 / sqrt(R (1-R))
        return -response_derivative(theta, p.t_osc, p.t_int) / std::sqrt(r * (1.0 - r));
    }
    }
    return 0.0;
}

}  // namespace entforge
