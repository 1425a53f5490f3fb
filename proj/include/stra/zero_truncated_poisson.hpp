#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "stra/random.hpp"

namespace stra {

namespace detail {
inline void check_zt_lambda(double lam) {
    if (!(lam > 0.0))
        throw std::domain_error("zero-truncated Poisson: lambda must be > 0");
    if (lam > 700.0)
        throw std::domain_error(
            "zero-truncated Poisson: lambda too large for stable evaluation");
}
}  // namespace detail

/// P[K = k | K >= 1] for K ~ Poisson(lam), evaluated in log space.
inline double zt_poisson_pmf(double lam, std::int64_t k) {
    detail::check_zt_lambda(lam);
    if (k < 1) throw std::domain_error("zt_poisson_pmf: k must be >= 1");
    const double log_p = k * std::log(lam) - lam - std::lgamma(double(k) + 1.0);
    return std::exp(log_p) / -std::expm1(-lam);
}

inline double zt_poisson_mean(double lam) {
    detail::check_zt_lambda(lam);
    return lam / -std::expm1(-lam);
}

/// Inverse-CDF draw: walk the pmf from k = 1 with the term recurrence
/// t_{k+1} = t_k * lam / (k+1).
inline std::int64_t zt_poisson_sample(double lam, Rng& rng) {
    detail::check_zt_lambda(lam);
    const double target = rng.uniform01() * -std::expm1(-lam);
    double term = std::exp(std::log(lam) - lam);  // untruncated pmf at k = 1
    double cum = term;
    std::int64_t k = 1;
    const std::int64_t cap =
        static_cast<std::int64_t>(lam + 12.0 * std::sqrt(lam) + 50.0);
    while (cum <= target && k < cap) {
        ++k;
        term *= lam / double(k);
        cum += term;
    }
    return k;
}

}  // namespace stra
