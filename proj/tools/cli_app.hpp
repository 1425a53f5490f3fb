#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stra/csv.hpp"
#include "stra/experiment.hpp"
#include "stra/max_utility.hpp"
#include "stra/simulator.hpp"
#include "stra/threshold_table.hpp"
#include "stra/utility_distribution.hpp"
#include "stra/validation.hpp"

namespace stra::cli {

struct Options {
    ExperimentConfig cfg;
    std::string sweep_str = "none";
    std::string sweep_values_str;
    std::string table_path;
};

/// Relative output paths land in $STRA_OUT_DIR when it is set.
inline std::string resolve_out(const std::string& path) {
    if (path.empty() || path.front() == '/') return path;
    const char* dir = std::getenv("STRA_OUT_DIR");
    if (dir == nullptr || *dir == '\0') return path;
    std::string d(dir);
    if (d.back() != '/') d.push_back('/');
    return d + path;
}

class CliApp {
  public:
    CliApp() : app_("threshold policies for sequential spatial resource allocation",
                    "stra") {
        app_.require_subcommand(1);
        // options and --config live on the root app (config files are only
        // processed there); fallthrough lets them follow the subcommand name
        add_experiment_options(&app_);

        thresholds_ = app_.add_subcommand(
            "thresholds", "compute and export the optimal threshold table");
        thresholds_->fallthrough();

        compare_ = app_.add_subcommand(
            "compare", "simulate optimal, ideal, myopic and random policies");
        compare_->fallthrough();

        validate_ = app_.add_subcommand(
            "validate", "run internal consistency checks, or audit a saved table");
        validate_->fallthrough();
        validate_->add_option("--table", o_.table_path,
                              "threshold CSV to audit instead of running checks");
    }

    /// Full run: parse + dispatch. Returns the process exit code.
    int run(int argc, const char* const* argv, std::ostream& out = std::cout,
            std::ostream& err = std::cerr) {
        try {
            app_.parse(argc, argv);
        } catch (const CLI::CallForHelp& e) {
            app_.exit(e, out, err);
            return 0;
        } catch (const CLI::CallForAllHelp& e) {
            app_.exit(e, out, err);
            return 0;
        } catch (const CLI::ParseError& e) {
            app_.exit(e, out, err);
            return 2;
        }
        try {
            finalize_config();
        } catch (const std::invalid_argument& ex) {
            err << ex.what() << "\n";
            return 2;
        }
        try {
            if (app_.got_subcommand(thresholds_)) return cmd_thresholds(out, err);
            if (app_.got_subcommand(compare_)) return cmd_compare(out, err);
            return cmd_validate(out, err);
        } catch (const std::exception& ex) {
            err << "error: " << ex.what() << "\n";
            return 1;
        }
    }

    /// Parse-only hook for tests; args in natural order, no dispatch.
    void parse_for_test(std::vector<std::string> args) {
        std::reverse(args.begin(), args.end());
        app_.parse(args);
        finalize_config();
    }

    const Options& options() const { return o_; }

  private:
    void add_experiment_options(CLI::App* sub) {
        sub->set_config("--config", "", "read options from a key=value file");
        auto& c = o_.cfg;
        sub->add_option("--R", c.R, "service region radius")->capture_default_str();
        sub->add_option("--lambda", c.lambda, "arrival rate per unit area per unit time")
            ->capture_default_str();
        sub->add_option("--tau", c.tau, "period length")->capture_default_str();
        sub->add_option("--T", c.T, "number of periods")->capture_default_str();
        sub->add_option("--N", c.N, "number of resources")->capture_default_str();
        sub->add_option("--utility", c.utility,
                        "distance decay model: power_law or exponential_decay")
            ->capture_default_str();
        sub->add_option("--eta", c.eta, "power-law decay exponent")
            ->capture_default_str();
        sub->add_option("--alpha", c.alpha, "exponential decay rate")
            ->capture_default_str();
        sub->add_option("--intensity", c.intensity,
                        "request intensity law: exponential or uniform")
            ->capture_default_str();
        sub->add_option("--mu", c.mu, "exponential intensity rate")
            ->capture_default_str();
        sub->add_option("--beta", c.beta, "uniform intensity upper bound")
            ->capture_default_str();
        sub->add_option("--sweep", o_.sweep_str, "parameter sweep axis")
            ->check(CLI::IsMember({"none", "lambda", "mu_inverse"}))
            ->capture_default_str();
        sub->add_option("--sweep-values", o_.sweep_values_str,
                        "comma-separated sweep grid (default grid if omitted)");
        sub->add_option("--reps", c.reps, "simulation replications per point")
            ->capture_default_str();
        sub->add_option("--seed", c.seed, "master random seed")->capture_default_str();
        sub->add_option("--jobs", c.jobs, "worker threads (results are identical)")
            ->capture_default_str();
        sub->add_option("--random-p", c.random_p,
                        "allocation probability of the coin-flip baseline")
            ->capture_default_str();
        sub->add_option("--out", c.out, "output CSV path (default per command)");
    }

    void finalize_config() {
        o_.cfg.sweep = sweep_axis_from_string(o_.sweep_str);
        o_.cfg.sweep_values = parse_value_list(o_.sweep_values_str);
        o_.cfg.validate();
    }

    int cmd_thresholds(std::ostream& out, std::ostream& err) {
        const Scenario s = o_.cfg.to_scenario();
        const UtilityDistribution dist(s);
        const MaxUtilityDistribution mx(s.arrivals_per_period(), dist);
        const ThresholdTable tab = compute_thresholds(s.T, s.N, mx);

        const std::string path =
            resolve_out(o_.cfg.out.empty() ? "thresholds.csv" : o_.cfg.out);
        std::ofstream f(path);
        if (!f) {
            err << "error: cannot write " << path << "\n";
            return 1;
        }
        write_thresholds_csv(tab, f);

        out << "per-slot arrivals: " << s.arrivals_per_period()
            << ", E[slot maximum]: " << mx.mean() << " ("
            << to_string(dist.provenance()) << " route)\n";
        out << "thresholds rho[t][n], t = periods remaining, n = resources left\n";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%4s", "t");
        out << buf;
        for (int n = 1; n <= tab.N; ++n) {
            std::snprintf(buf, sizeof buf, " %10s",
                          ("n=" + std::to_string(n)).c_str());
            out << buf;
        }
        out << '\n';
        for (int t = 1; t <= tab.T; ++t) {
            std::snprintf(buf, sizeof buf, "%4d", t);
            out << buf;
            for (int n = 1; n <= std::min(t, tab.N); ++n) {
                std::snprintf(buf, sizeof buf, " %10.6g", tab.rho[t][n]);
                out << buf;
            }
            out << '\n';
        }
        out << "expected total utility at T=" << tab.T << ", N=" << tab.N << ": "
            << tab.ev[tab.T][tab.N] << '\n';
        out << "written: " << path << '\n';
        return 0;
    }

    int cmd_compare(std::ostream& out, std::ostream& err) {
        const std::string path =
            resolve_out(o_.cfg.out.empty() ? "compare.csv" : o_.cfg.out);
        std::ofstream f(path);
        if (!f) {
            err << "error: cannot write " << path << "\n";
            return 1;
        }
        f << "sweep_param,sweep_value,policy,mean_utility,stderr,reps\n";

        const auto run_point = [&](const ExperimentConfig& pc,
                                   const std::string& param, double value) {
            const Scenario s = pc.to_scenario();
            const MaxUtilityDistribution mx(s.arrivals_per_period(),
                                            UtilityDistribution(s));
            const ThresholdTable tab = compute_thresholds(s.T, s.N, mx);
            const MonteCarloSummary sum =
                monte_carlo(s, tab, pc.reps, pc.seed, pc.jobs, pc.random_p);

            const auto row = [&](const std::string& policy, const PolicyStats& st) {
                f << param << ',' << csv_num(value) << ',' << policy << ','
                  << csv_num(st.mean) << ',' << csv_num(st.std_error) << ','
                  << sum.reps << '\n';
            };
            row("ideal", sum.ideal);
            row("optimal", sum.optimal);
            row("myopic", sum.myopic);
            row("random", sum.random);

            out << param << "=" << value << ": ideal " << sum.ideal.mean
                << ", optimal " << sum.optimal.mean << ", myopic "
                << sum.myopic.mean << ", random " << sum.random.mean << " ("
                << sum.reps << " reps)\n";
        };

        const auto grid = o_.cfg.sweep_grid();
        if (grid.empty()) {
            run_point(o_.cfg, "none", 0.0);
        } else {
            for (double v : grid)
                run_point(o_.cfg.at_sweep_point(v), to_string(o_.cfg.sweep), v);
        }
        out << "written: " << path << '\n';
        return 0;
    }

    int cmd_validate(std::ostream& out, std::ostream&) {
        const ValidationReport rep =
            o_.table_path.empty() ? validate_experiment(o_.cfg)
                                  : validate_table_file(resolve_out(o_.table_path));
        print_report(rep, out);
        return rep.all_pass() ? 0 : 1;
    }

    CLI::App app_;
    Options o_;
    CLI::App* thresholds_ = nullptr;
    CLI::App* compare_ = nullptr;
    CLI::App* validate_ = nullptr;
};

}  // namespace stra::cli
