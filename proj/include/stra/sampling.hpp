#pragma once

#include <cmath>

#include "stra/random.hpp"
#include "stra/scenario.hpp"

namespace stra {

/// One service request: intrinsic intensity x at polar position (d, theta),
/// yielding utility z if served.
struct ServiceRequest {
    double x = 0.0;
    double d = 0.0;
    double theta = 0.0;
    double z = 0.0;
};

/// Draws position first (distance, then angle), then intensity, and derives
/// the utility. Fixed draw order keeps streams reproducible.
inline ServiceRequest sample_request(const Scenario& s, Rng& rng) {
    ServiceRequest req;
    req.d = s.sample_distance(rng.uniform01());
    req.theta = 2.0 * M_PI * rng.uniform01();
    req.x = intensity_quantile(s.intensity_model, rng.uniform01());
    req.z = utility(s.utility_model, req.x, req.d);
    return req;
}

}  // namespace stra
