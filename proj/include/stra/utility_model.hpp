#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>

namespace stra {

/// Utility u = x * (1 + d)^-eta: polynomial falloff in distance.
struct PowerLaw {
    double eta = 1.0;
};

/// Utility u = x * exp(-alpha * d): exponential falloff in distance.
struct ExponentialDecay {
    double alpha = 1.0;
};

using UtilityModel = std::variant<PowerLaw, ExponentialDecay>;

/// Multiplier applied to the intrinsic intensity at distance d; lies in
/// (0, 1] and is nonincreasing in d.
inline double decay_factor(const UtilityModel& m, double d) {
    if (!(d >= 0.0)) throw std::domain_error("decay_factor: d must be >= 0");
    return std::visit(
        [d](const auto& model) {
            using M = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<M, PowerLaw>)
                return std::pow(1.0 + d, -model.eta);
            else
                return std::exp(-model.alpha * d);
        },
        m);
}

/// Realized utility of serving a request of intensity x at distance d.
inline double utility(const UtilityModel& m, double x, double d) {
    if (!(x >= 0.0)) throw std::domain_error("utility: x must be >= 0");
    return x * decay_factor(m, d);
}

inline void validate(const UtilityModel& m) {
    std::visit(
        [](const auto& model) {
            using M = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<M, PowerLaw>) {
                if (!(model.eta >= 0.0))
                    throw std::invalid_argument("PowerLaw: eta must be >= 0");
            } else {
                if (!(model.alpha >= 0.0))
                    throw std::invalid_argument("ExponentialDecay: alpha must be >= 0");
            }
        },
        m);
}

inline std::string name(const UtilityModel& m) {
    return std::holds_alternative<PowerLaw>(m) ? "power_law" : "exponential_decay";
}

}  // namespace stra
