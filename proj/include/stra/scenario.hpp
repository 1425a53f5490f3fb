#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "stra/intensity.hpp"
#include "stra/monotone_cubic.hpp"
#include "stra/quadrature.hpp"
#include "stra/utility_model.hpp"

namespace stra {

/// Problem instance: requests arrive over a disk of radius R as a Poisson
/// process with spatial rate lambda (per unit area per unit time), observed
/// in T periods of length tau; N interchangeable resources may be allocated,
/// at most one per period. An optional radial profile g(r) modulates the
/// spatial density (g == 1 recovers the homogeneous case).
struct Scenario {
    double R = 1.0;
    double lambda = 10.0;
    double tau = 1.0;
    int T = 30;
    int N = 10;
    UtilityModel utility_model = PowerLaw{1.0};
    IntensityModel intensity_model = ExponentialIntensity{1.0};
    std::function<double(double)> radial_profile;  // empty => homogeneous

    /// Checks parameters and precomputes the profile distance tables.
    /// Must be called before use whenever radial_profile is set.
    void validate() {
        if (!(R > 0.0)) throw std::invalid_argument("Scenario: R must be > 0");
        if (!(lambda > 0.0)) throw std::invalid_argument("Scenario: lambda must be > 0");
        if (!(tau > 0.0)) throw std::invalid_argument("Scenario: tau must be > 0");
        if (T < 1) throw std::invalid_argument("Scenario: T must be >= 1");
        if (N < 1) throw std::invalid_argument("Scenario: N must be >= 1");
        if (N > T)
            throw std::invalid_argument(
                "Scenario: N must be <= T (one allocation per period)");
        stra::validate(utility_model);
        stra::validate(intensity_model);
        if (radial_profile) prepare_profile();
    }

    bool homogeneous() const { return !radial_profile; }

    /// Expected number of arrivals per period.
    double arrivals_per_period() const {
        if (homogeneous()) return tau * lambda * M_PI * R * R;
        require_prepared();
        return tau * lambda * 2.0 * M_PI * profile_->mass;
    }

    /// CDF of the distance D from the center to a uniformly chosen arrival.
    double distance_cdf(double d) const {
        if (d <= 0.0) return 0.0;
        if (d >= R) return 1.0;
        if (homogeneous()) return d * d / (R * R);
        require_prepared();
        return profile_->cdf(d);
    }

    double distance_pdf(double d) const {
        if (d < 0.0 || d > R) return 0.0;
        if (homogeneous()) return 2.0 * d / (R * R);
        require_prepared();
        return d * profile_->g(d) / profile_->mass;
    }

    /// Inverse-CDF draw of the distance; u in [0, 1).
    double sample_distance(double u) const {
        if (!(u >= 0.0 && u < 1.0))
            throw std::domain_error("sample_distance: u must be in [0, 1)");
        if (homogeneous()) return R * std::sqrt(u);
        require_prepared();
        // bisect the tabulated CDF interpolant
        double lo = 0.0, hi = R;
        for (int it = 0; it < 200 && hi - lo > 1e-13 * R; ++it) {
            const double mid = 0.5 * (lo + hi);
            (profile_->cdf(mid) < u ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

private:
    struct ProfileTables {
        std::function<double(double)> g;
        double mass = 0.0;  // integral of r * g(r) over [0, R]
        MonotoneCubic cdf;
    };

    void prepare_profile() {
        auto tab = std::make_shared<ProfileTables>();
        tab->g = radial_profile;
        const auto& g = tab->g;
        for (double r = 0.0; r <= R; r += R / 16.0)
            if (!(g(r) >= 0.0))
                throw std::invalid_argument("Scenario: radial profile must be >= 0");
        tab->mass = integrate([&](double r) { return r * g(r); }, 0.0, R);
        if (!(tab->mass > 0.0))
            throw std::invalid_argument("Scenario: radial profile has zero mass");

        const int grid = 513;
        std::vector<double> ds(grid), Fs(grid);
        for (int i = 0; i < grid; ++i) {
            ds[i] = R * i / (grid - 1);
            Fs[i] = i == 0 ? 0.0
                           : Fs[i - 1] + integrate([&](double r) { return r * g(r); },
                                                   ds[i - 1], ds[i]) /
                                             tab->mass;
        }
        Fs[grid - 1] = 1.0;
        tab->cdf = MonotoneCubic(ds, Fs);
        profile_ = std::move(tab);
    }

    void require_prepared() const {
        if (!profile_)
            throw std::logic_error(
                "Scenario: call validate() before using a radial profile");
    }

    std::shared_ptr<const ProfileTables> profile_;
};

}  // namespace stra
