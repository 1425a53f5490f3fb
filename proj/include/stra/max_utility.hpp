#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "stra/quadrature.hpp"
#include "stra/utility_distribution.hpp"
#include "stra/zero_truncated_poisson.hpp"

namespace stra {

/// Distribution of the slot maximum Z~ = max of K i.i.d. per-request
/// utilities, K zero-truncated Poisson(lam). pdf is the truncated-Poisson
/// mixture collapsed to lam * f_Z(z) * e^{lam (F_Z(z) - 1)} / (1 - e^{-lam});
/// the cdf is the geometric-series sum (e^{lam F_Z(z)} - 1)/(e^{lam} - 1),
/// cross-checked against the pdf at construction.
class MaxUtilityDistribution {
public:
    MaxUtilityDistribution(double lambda_slot, UtilityDistribution base,
                           double quad_tol = 1e-8)
        : lam_(lambda_slot), base_(std::move(base)), quad_tol_(quad_tol) {
        detail::check_zt_lambda(lam_);
        verify_cdf_matches_pdf();
        mean_ = partial_mean_at_least(0.0);
    }

    double cdf(double z) const {
        const double F = base_.cdf(z);
        // equals expm1(lam*F)/expm1(lam), arranged to avoid large exponentials
        return std::exp(lam_ * (F - 1.0)) * std::expm1(-lam_ * F) /
               std::expm1(-lam_);
    }

    double pdf(double z) const {
        const double F = base_.cdf(z);
        return lam_ * base_.pdf(z) * std::exp(lam_ * (F - 1.0)) / -std::expm1(-lam_);
    }

    double prob_at_least(double z) const { return 1.0 - cdf(z); }

    /// Truncated first moment over [z, upper support edge].
    double partial_mean_at_least(double z) const {
        const double lo = std::max(z, 0.0);
        const double hi = base_.z_hi();
        if (lo >= hi) return 0.0;
        return integrate([&](double t) { return t * pdf(t); }, lo, hi, quad_tol_);
    }

    double mean() const { return mean_; }
    double lambda_slot() const { return lam_; }
    double z_hi() const { return base_.z_hi(); }
    const UtilityDistribution& base() const { return base_; }

private:
    void verify_cdf_matches_pdf() {
        // the closed cdf must be the antiderivative of the mixture pdf
        const int segments = 16;
        const double hi = base_.z_hi();
        double acc = 0.0;
        for (int i = 1; i <= segments; ++i) {
            const double a = hi * (i - 1) / segments;
            const double b = hi * i / segments;
            acc += integrate([&](double t) { return pdf(t); }, a, b, quad_tol_);
            const double err = std::fabs(acc - cdf(b));
            if (err > 1e-6)
                throw std::runtime_error(
                    "MaxUtilityDistribution: cdf/pdf mismatch of " +
                    std::to_string(err) + " at z = " + std::to_string(b));
        }
    }

    double lam_;
    UtilityDistribution base_;
    double quad_tol_;
    double mean_ = 0.0;
};

}  // namespace stra
