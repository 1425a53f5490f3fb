#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "stra/experiment.hpp"
#include "stra/max_utility.hpp"
#include "stra/sampling.hpp"
#include "stra/simulator.hpp"
#include "stra/threshold_table.hpp"
#include "stra/utility_distribution.hpp"

namespace stra {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    bool all_pass() const {
        return std::all_of(checks.begin(), checks.end(),
                           [](const CheckResult& c) { return c.pass; });
    }
};

inline void print_report(const ValidationReport& rep, std::ostream& os) {
    int passed = 0;
    for (const auto& c : rep.checks) {
        os << (c.pass ? "[PASS] " : "[FAIL] ") << c.name;
        if (!c.detail.empty()) os << ": " << c.detail;
        os << '\n';
        passed += c.pass ? 1 : 0;
    }
    os << passed << "/" << rep.checks.size() << " checks passed\n";
}

namespace detail {

inline void run_check(ValidationReport& rep, const std::string& name,
                      const std::function<std::pair<bool, std::string>()>& fn) {
    CheckResult c;
    c.name = name;
    try {
        auto [ok, detail] = fn();
        c.pass = ok;
        c.detail = std::move(detail);
    } catch (const std::exception& ex) {
        c.pass = false;
        c.detail = std::string("exception: ") + ex.what();
    }
    rep.checks.push_back(std::move(c));
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace detail

/// End-to-end consistency checks for one configuration: arrival-rate
/// normalization, closed-form-vs-numeric agreement for all four model pairs,
/// sampling fidelity, slot-maximum normalization, and the policy-value /
/// simulation cross-check.
inline ValidationReport validate_experiment(const ExperimentConfig& cfg) {
    ValidationReport rep;
    using detail::fmt;
    using detail::run_check;

    run_check(rep, "arrival-rate normalization", [&] {
        Scenario s = cfg.to_scenario();
        const double direct = s.arrivals_per_period();
        Scenario via_profile = s;
        via_profile.radial_profile = [](double) { return 1.0; };
        via_profile.validate();
        const double quad = via_profile.arrivals_per_period();
        const bool ok = std::fabs(direct - quad) <= 1e-6 * std::max(1.0, direct);
        return std::pair{ok, "per-slot arrivals = " + fmt(direct) +
                                 " (profile quadrature " + fmt(quad) + ")"};
    });

    const std::vector<std::pair<UtilityModel, IntensityModel>> pairs = {
        {PowerLaw{cfg.eta}, ExponentialIntensity{cfg.mu}},
        {PowerLaw{cfg.eta}, UniformIntensity{cfg.beta}},
        {ExponentialDecay{cfg.alpha}, ExponentialIntensity{cfg.mu}},
        {ExponentialDecay{cfg.alpha}, UniformIntensity{cfg.beta}},
    };
    for (const auto& [um, im] : pairs) {
        run_check(rep, "closed form " + name(um) + "/" + name(im), [&, um = um,
                                                                    im = im] {
            Scenario s = cfg.to_scenario();
            s.utility_model = um;
            s.intensity_model = im;
            s.validate();
            UtilityDistribution dist(s);
            double dev = 0.0;
            for (int i = 1; i <= 64; ++i) {
                const double z = dist.z_hi() * i / 64.0;
                dev = std::max(dev,
                               std::fabs(dist.cdf_closed(z) - dist.cdf_numeric(z)));
            }
            const bool closed = dist.provenance() == Provenance::closed_form;
            std::string detail = "sup cdf deviation " + fmt(dev) + ", " +
                                 to_string(dist.provenance()) + " route adopted";
            // exponential-intensity forms must hold; bounded-intensity forms
            // may fail the probe as long as the demotion machinery catches it
            bool ok;
            if (std::holds_alternative<ExponentialIntensity>(im))
                ok = closed && dev <= 1e-4;
            else
                ok = (dev <= 1e-4 && closed) ||
                     (dev > 1e-4 && !closed && !dist.diagnostic().empty());
            return std::pair{ok, std::move(detail)};
        });
    }

    run_check(rep, "sampling fidelity (KS, 1e5 draws)", [&] {
        Scenario s = cfg.to_scenario();
        UtilityDistribution dist(s);
        Rng rng(cfg.seed ^ 0x5eedu);
        std::vector<double> zs(100000);
        for (auto& z : zs) z = sample_request(s, rng).z;
        std::sort(zs.begin(), zs.end());
        double d = 0.0;
        const double n = double(zs.size());
        for (std::size_t i = 0; i < zs.size(); ++i) {
            const double F = dist.cdf(zs[i]);
            d = std::max({d, std::fabs(F - i / n), std::fabs(F - (i + 1) / n)});
        }
        return std::pair{d <= 0.01, "KS distance " + fmt(d)};
    });

    run_check(rep, "slot-maximum normalization", [&] {
        Scenario s = cfg.to_scenario();
        MaxUtilityDistribution mx(s.arrivals_per_period(), UtilityDistribution(s));
        const double total = integrate([&](double z) { return mx.pdf(z); }, 0.0,
                                       mx.z_hi(), 1e-8);
        const double top = mx.cdf(mx.z_hi());
        const bool ok = std::fabs(total - 1.0) <= 1e-6 && std::fabs(top - 1.0) <= 1e-6;
        return std::pair{ok, "pdf mass " + fmt(total) + ", cdf at upper support " +
                                 fmt(top)};
    });

    run_check(rep, "policy value vs simulation", [&] {
        Scenario s = cfg.to_scenario();
        MaxUtilityDistribution mx(s.arrivals_per_period(), UtilityDistribution(s));
        const auto tab = compute_thresholds(s.T, s.N, mx);
        const auto st =
            summarize(monte_carlo_totals(s, tab, cfg.reps, cfg.seed, cfg.jobs,
                                         cfg.random_p)
                          .optimal);
        const double gap = std::fabs(st.mean - tab.ev[s.T][s.N]);
        const bool ok = gap <= 3.0 * st.std_error;
        return std::pair{ok, "simulated mean " + fmt(st.mean) + " vs value " +
                                 fmt(tab.ev[s.T][s.N]) + " (3 SE = " +
                                 fmt(3.0 * st.std_error) + ")"};
    });

    return rep;
}

/// Structural invariants of an exported threshold table; needs no
/// distribution (uses ev[1][1] as the implied per-slot mean).
inline ValidationReport validate_table(const ThresholdTable& tab) {
    ValidationReport rep;
    using detail::fmt;
    using detail::run_check;

    run_check(rep, "diagonal thresholds are zero", [&] {
        for (int n = 1; n <= tab.N; ++n)
            if (tab.rho[n][n] != 0.0)
                return std::pair{false, "rho[" + std::to_string(n) + "][" +
                                            std::to_string(n) + "] = " +
                                            fmt(tab.rho[n][n])};
        return std::pair{true, std::string{}};
    });

    run_check(rep, "thresholds are nonnegative", [&] {
        for (int t = 1; t <= tab.T; ++t)
            for (int n = 1; n <= std::min(t, tab.N); ++n)
                if (tab.rho[t][n] < 0.0)
                    return std::pair{false, "rho[" + std::to_string(t) + "][" +
                                                std::to_string(n) + "] = " +
                                                fmt(tab.rho[t][n])};
        return std::pair{true, std::string{}};
    });

    run_check(rep, "diagonal values are multiples of the slot mean", [&] {
        const double ez = tab.ev[1][1];
        for (int n = 1; n <= tab.N; ++n) {
            const double want = n * ez;
            if (std::fabs(tab.ev[n][n] - want) > 1e-9 * std::max(1.0, want))
                return std::pair{false, "ev[" + std::to_string(n) + "][" +
                                            std::to_string(n) + "] = " +
                                            fmt(tab.ev[n][n]) + ", expected " +
                                            fmt(want)};
        }
        return std::pair{true, std::string{}};
    });

    run_check(rep, "thresholds rise with remaining periods", [&] {
        for (int n = 1; n <= tab.N; ++n)
            for (int t = n + 1; t <= tab.T; ++t)
                if (tab.rho[t][n] < tab.rho[t - 1][n] - 1e-9)
                    return std::pair{false, "rho falls from t=" +
                                                std::to_string(t - 1) + " to t=" +
                                                std::to_string(t) + " at n=" +
                                                std::to_string(n)};
        return std::pair{true, std::string{}};
    });

    run_check(rep, "thresholds fall with available resources", [&] {
        for (int t = 2; t <= tab.T; ++t)
            for (int n = 2; n <= std::min(t, tab.N); ++n)
                if (tab.rho[t][n] > tab.rho[t][n - 1] + 1e-9)
                    return std::pair{false, "rho rises from n=" +
                                                std::to_string(n - 1) + " to n=" +
                                                std::to_string(n) + " at t=" +
                                                std::to_string(t)};
        return std::pair{true, std::string{}};
    });

    run_check(rep, "values rise with periods and resources", [&] {
        for (int t = 1; t <= tab.T; ++t)
            for (int n = 1; n <= std::min(t, tab.N); ++n) {
                if (tab.ev[t][n] < tab.ev[t - 1][n] - 1e-9 && n <= t - 1)
                    return std::pair{false, "ev falls in t at t=" +
                                                std::to_string(t) + " n=" +
                                                std::to_string(n)};
                if (tab.ev[t][n] < tab.ev[t][n - 1] - 1e-9)
                    return std::pair{false, "ev falls in n at t=" +
                                                std::to_string(t) + " n=" +
                                                std::to_string(n)};
            }
        return std::pair{true, std::string{}};
    });

    return rep;
}

inline ValidationReport validate_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        ValidationReport rep;
        rep.checks.push_back({"table file readable", false, "cannot open " + path});
        return rep;
    }
    try {
        const ThresholdTable tab = read_thresholds_csv(in);
        auto rep = validate_table(tab);
        rep.checks.insert(rep.checks.begin(),
                          {"table file readable", true,
                           path + " (T=" + std::to_string(tab.T) +
                               ", N=" + std::to_string(tab.N) + ")"});
        return rep;
    } catch (const std::exception& ex) {
        ValidationReport rep;
        rep.checks.push_back({"table file readable", false, ex.what()});
        return rep;
    }
}

}  // namespace stra
