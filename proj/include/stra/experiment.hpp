#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stra/scenario.hpp"

namespace stra {

enum class SweepAxis { none, lambda, mu_inverse };

inline const char* to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::lambda: return "lambda";
        case SweepAxis::mu_inverse: return "mu_inverse";
        default: return "none";
    }
}

inline SweepAxis sweep_axis_from_string(const std::string& s) {
    if (s == "none") return SweepAxis::none;
    if (s == "lambda") return SweepAxis::lambda;
    if (s == "mu_inverse") return SweepAxis::mu_inverse;
    throw std::invalid_argument("sweep: expected none, lambda or mu_inverse, got '" +
                                s + "'");
}

/// Full description of one experiment run, file- and flag-configurable.
struct ExperimentConfig {
    double R = 1.0;
    double lambda = 10.0;
    double tau = 1.0;
    int T = 30;
    int N = 10;

    std::string utility = "power_law";  // or exponential_decay
    double eta = 1.5;
    double alpha = 1.0;

    std::string intensity = "exponential";  // or uniform
    double mu = 1.0;
    double beta = 1.0;

    SweepAxis sweep = SweepAxis::none;
    std::vector<double> sweep_values;  // empty => axis default grid

    long reps = 1000;
    std::uint64_t seed = 12345;
    int jobs = 1;
    double random_p = 0.5;
    std::string out;  // empty => per-command default filename

    /// Collects every field violation into one message.
    void validate() const {
        std::vector<std::string> errs;
        auto require = [&](bool ok, const std::string& msg) {
            if (!ok) errs.push_back(msg);
        };
        require(R > 0.0, "R: must be > 0");
        require(lambda > 0.0, "lambda: must be > 0");
        require(tau > 0.0, "tau: must be > 0");
        require(T >= 1, "T: must be >= 1");
        require(N >= 1, "N: must be >= 1");
        require(N <= T, "N: must be <= T");
        require(utility == "power_law" || utility == "exponential_decay",
                "utility: must be power_law or exponential_decay");
        require(eta >= 0.0, "eta: must be >= 0");
        require(alpha >= 0.0, "alpha: must be >= 0");
        require(intensity == "exponential" || intensity == "uniform",
                "intensity: must be exponential or uniform");
        require(mu > 0.0, "mu: must be > 0");
        require(beta > 0.0, "beta: must be > 0");
        require(reps >= 1, "reps: must be >= 1");
        require(jobs >= 1, "jobs: must be >= 1");
        require(random_p >= 0.0 && random_p <= 1.0, "random-p: must be in [0, 1]");
        for (double v : sweep_values)
            require(v > 0.0, "sweep-values: entries must be > 0");
        if (sweep == SweepAxis::mu_inverse)
            require(intensity == "exponential",
                    "sweep: mu_inverse requires exponential intensity");
        if (!errs.empty()) {
            std::ostringstream os;
            os << "invalid configuration:";
            for (const auto& e : errs) os << "\n  " << e;
            throw std::invalid_argument(os.str());
        }
    }

    Scenario to_scenario() const {
        Scenario s;
        s.R = R;
        s.lambda = lambda;
        s.tau = tau;
        s.T = T;
        s.N = N;
        if (utility == "power_law")
            s.utility_model = PowerLaw{eta};
        else
            s.utility_model = ExponentialDecay{alpha};
        if (intensity == "exponential")
            s.intensity_model = ExponentialIntensity{mu};
        else
            s.intensity_model = UniformIntensity{beta};
        s.validate();
        return s;
    }

    /// Grid actually swept: configured values, or the axis default.
    std::vector<double> sweep_grid() const {
        if (sweep == SweepAxis::none) return {};
        if (!sweep_values.empty()) return sweep_values;
        if (sweep == SweepAxis::lambda) return {2.0, 4.0, 6.0, 8.0, 10.0};
        return {0.5, 1.0, 1.5, 2.0};  // mean intensity 1/mu
    }

    /// Copy with one sweep point applied.
    ExperimentConfig at_sweep_point(double value) const {
        ExperimentConfig c = *this;
        if (sweep == SweepAxis::lambda)
            c.lambda = value;
        else if (sweep == SweepAxis::mu_inverse)
            c.mu = 1.0 / value;
        c.sweep = SweepAxis::none;
        c.sweep_values.clear();
        return c;
    }
};

/// Key=value dump readable back through the command-line config loader.
inline std::string emit_config_ini(const ExperimentConfig& c) {
    std::ostringstream os;
    os.precision(17);
    os << "R=" << c.R << "\n";
    os << "lambda=" << c.lambda << "\n";
    os << "tau=" << c.tau << "\n";
    os << "T=" << c.T << "\n";
    os << "N=" << c.N << "\n";
    os << "utility=" << c.utility << "\n";
    os << "eta=" << c.eta << "\n";
    os << "alpha=" << c.alpha << "\n";
    os << "intensity=" << c.intensity << "\n";
    os << "mu=" << c.mu << "\n";
    os << "beta=" << c.beta << "\n";
    os << "sweep=" << to_string(c.sweep) << "\n";
    if (!c.sweep_values.empty()) {
        os << "sweep-values=\"";
        for (std::size_t i = 0; i < c.sweep_values.size(); ++i)
            os << (i ? "," : "") << c.sweep_values[i];
        os << "\"\n";
    }
    os << "reps=" << c.reps << "\n";
    os << "seed=" << c.seed << "\n";
    os << "jobs=" << c.jobs << "\n";
    os << "random-p=" << c.random_p << "\n";
    if (!c.out.empty()) os << "out=" << c.out << "\n";
    return os.str();
}

inline std::vector<double> parse_value_list(const std::string& text) {
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size())
            throw std::invalid_argument("sweep-values: bad number '" + item + "'");
        vals.push_back(v);
    }
    return vals;
}

}  // namespace stra
