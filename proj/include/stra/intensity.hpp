#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>

namespace stra {

/// Request intensity X ~ Exponential(rate).
struct ExponentialIntensity {
    double rate = 1.0;
};

/// Request intensity X ~ Uniform(0, beta).
struct UniformIntensity {
    double beta = 1.0;
};

using IntensityModel = std::variant<ExponentialIntensity, UniformIntensity>;

inline void validate(const IntensityModel& m) {
    std::visit(
        [](const auto& model) {
            using M = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<M, ExponentialIntensity>) {
                if (!(model.rate > 0.0))
                    throw std::invalid_argument("ExponentialIntensity: rate must be > 0");
            } else {
                if (!(model.beta > 0.0))
                    throw std::invalid_argument("UniformIntensity: beta must be > 0");
            }
        },
        m);
}

inline double intensity_cdf(const IntensityModel& m, double x) {
    if (x <= 0.0) return 0.0;
    return std::visit(
        [x](const auto& model) {
            using M = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<M, ExponentialIntensity>)
                return -std::expm1(-model.rate * x);
            else
                return x >= model.beta ? 1.0 : x / model.beta;
        },
        m);
}

inline double intensity_pdf(const IntensityModel& m, double x) {
    if (x < 0.0) return 0.0;
    return std::visit(
        [x](const auto& model) {
            using M = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<M, ExponentialIntensity>)
                return model.rate * std::exp(-model.rate * x);
            else
                return x > model.beta ? 0.0 : 1.0 / model.beta;
        },
        m);
}

/// Inverse CDF; u in [0, 1).
inline double intensity_quantile(const IntensityModel& m, double u) {
    if (!(u >= 0.0 && u < 1.0))
        throw std::domain_error("intensity_quantile: u must be in [0, 1)");
    return std::visit(
        [u](const auto& model) {
            using M = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<M, ExponentialIntensity>)
                return -std::log1p(-u) / model.rate;
            else
                return model.beta * u;
        },
        m);
}

inline double intensity_mean(const IntensityModel& m) {
    return std::visit(
        [](const auto& model) {
            using M = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<M, ExponentialIntensity>)
                return 1.0 / model.rate;
            else
                return model.beta / 2.0;
        },
        m);
}

/// Effective upper edge of the support: exact for Uniform, the 1 - 1e-10
/// quantile for Exponential (tail mass beyond it is negligible for
/// quadrature and tabulation).
inline double intensity_support_hi(const IntensityModel& m) {
    return std::visit(
        [](const auto& model) {
            using M = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<M, ExponentialIntensity>)
                return -std::log(1e-10) / model.rate;
            else
                return model.beta;
        },
        m);
}

inline std::string name(const IntensityModel& m) {
    return std::holds_alternative<ExponentialIntensity>(m) ? "exponential" : "uniform";
}

}  // namespace stra
