#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "stra/max_utility.hpp"
#include "stra/sampling.hpp"
#include "stra/threshold_table.hpp"

using Catch::Approx;

namespace {

// ---- independent oracles, written before the engine ----------------------

using Atoms = std::vector<std::pair<double, double>>;  // (value, probability)

/// Discrete slot-maximum stub; >= semantics on both tail quantities.
struct DiscreteSlotDist {
    Atoms atoms;
    double mean() const {
        double m = 0.0;
        for (auto [v, p] : atoms) m += v * p;
        return m;
    }
    double prob_at_least(double z) const {
        double m = 0.0;
        for (auto [v, p] : atoms)
            if (v >= z) m += p;
        return m;
    }
    double partial_mean_at_least(double z) const {
        double m = 0.0;
        for (auto [v, p] : atoms)
            if (v >= z) m += v * p;
        return m;
    }
};

/// Optimal expected value by per-outcome maximization over every future —
/// no thresholds involved. Deferring when resources equal remaining periods
/// strands a resource, hence the min().
double oracle_value(int t, int n, const Atoms& atoms) {
    if (t <= 0 || n <= 0) return 0.0;
    n = std::min(n, t);
    double v = 0.0;
    for (auto [z, p] : atoms)
        v += p * std::max(z + oracle_value(t - 1, n - 1, atoms),
                          oracle_value(t - 1, std::min(n, t - 1), atoms));
    return v;
}

/// Expected value of an arbitrary fixed threshold policy, allocate-on-tie.
double policy_value(int t, int n, const Atoms& atoms,
                    const std::vector<std::vector<double>>& thr) {
    if (t <= 0 || n <= 0) return 0.0;
    n = std::min(n, t);
    double v = 0.0;
    for (auto [z, p] : atoms) {
        const bool take = t == n || z >= thr[t][n];
        v += p * (take ? z + policy_value(t - 1, n - 1, atoms, thr)
                       : policy_value(t - 1, n, atoms, thr));
    }
    return v;
}

/// A stub that violates basic distribution coherence; the engine must refuse
/// to build a table from it rather than emit garbage thresholds.
struct BrokenDist {
    double mean() const { return 1.0; }
    double prob_at_least(double) const { return 0.5; }
    double partial_mean_at_least(double z) const { return -z; }
};

stra::MaxUtilityDistribution default_max_dist(double quad_tol = 1e-8) {
    stra::Scenario s;
    s.utility_model = stra::PowerLaw{1.5};
    s.intensity_model = stra::ExponentialIntensity{1.0};
    s.validate();
    return stra::MaxUtilityDistribution(s.arrivals_per_period(),
                                        stra::UtilityDistribution(s), quad_tol);
}

}  // namespace

TEST_CASE("tail_value identities on a discrete stub") {
    DiscreteSlotDist d{{{1.0, 0.5}, {2.0, 0.5}}};
    CHECK(stra::tail_value(d, 0.0, 0.0, 0.0) == 1.5);       // full expectation
    CHECK(stra::tail_value(d, 3.0, 0.0, 7.0) == 7.0);       // never allocate
    CHECK(stra::tail_value(d, 2.0, 10.0, 20.0) == 16.0);    // 0.5*(2+10)+0.5*20
    // atom exactly on the threshold goes to the allocate branch
    CHECK(stra::tail_value(d, 1.0, 0.0, 99.0) == 1.5);
    CHECK_THROWS_AS(stra::tail_value(d, -0.5, 0.0, 0.0), std::domain_error);
}

TEST_CASE("tail_value tail integral matches Monte Carlo at the median") {
    auto mx = default_max_dist();
    const double med = [&] {
        double lo = 0.0, hi = mx.z_hi();
        for (int i = 0; i < 100; ++i) {
            const double mid = 0.5 * (lo + hi);
            (mx.cdf(mid) < 0.5 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }();

    stra::Scenario s = mx.base().scenario();
    stra::Rng rng(31);
    const int slots = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < slots; ++i) {
        const auto k = stra::zt_poisson_sample(mx.lambda_slot(), rng);
        double best = 0.0;
        for (std::int64_t j = 0; j < k; ++j)
            best = std::max(best, stra::sample_request(s, rng).z);
        const double contrib = best >= med ? best : 0.0;
        sum += contrib;
        sumsq += contrib * contrib;
    }
    const double mc = sum / slots;
    const double se = std::sqrt((sumsq / slots - mc * mc) / slots);
    CHECK(std::fabs(stra::tail_value(mx, med, 0.0, 0.0) - mc) <= 3.0 * se);
}

TEST_CASE("two-point stub reproduces the hand-enumerated table") {
    DiscreteSlotDist d{{{1.0, 0.5}, {2.0, 0.5}}};
    const auto tab = stra::compute_thresholds(3, 1, d);

    // every value dyadic, so equality is exact
    CHECK(tab.rho[1][1] == 0.0);
    CHECK(tab.ev[1][1] == 1.5);
    CHECK(tab.rho[2][1] == 1.5);
    CHECK(tab.ev[2][1] == 1.75);
    CHECK(tab.rho[3][1] == 1.75);
    CHECK(tab.ev[3][1] == 1.875);

    CHECK(tab.ev[3][1] == oracle_value(3, 1, d.atoms));
}

TEST_CASE("engine value equals per-outcome optimum on all small instances") {
    const std::vector<Atoms> atom_sets = {
        {{1.0, 0.5}, {2.0, 0.5}},
        {{0.5, 0.25}, {1.0, 0.5}, {2.0, 0.25}},
        {{0.25, 0.5}, {3.0, 0.5}},
        {{1.0, 0.125}, {1.5, 0.375}, {4.0, 0.5}},
    };
    for (const auto& atoms : atom_sets) {
        DiscreteSlotDist d{atoms};
        for (int T = 1; T <= 4; ++T)
            for (int N = 1; N <= std::min(T, 2); ++N) {
                const auto tab = stra::compute_thresholds(T, N, d);
                INFO("atoms=" << atoms.size() << " T=" << T << " N=" << N);
                CHECK(tab.ev[T][N] == oracle_value(T, N, atoms));
            }
    }
}

TEST_CASE("no fixed threshold vector beats the computed one") {
    const Atoms atoms = {{0.5, 0.25}, {1.0, 0.5}, {2.0, 0.25}};
    DiscreteSlotDist d{atoms};
    const int T = 4, N = 2;
    const auto tab = stra::compute_thresholds(T, N, d);

    // candidate thresholds per cell: allocate-always, cut at each upper atom,
    // or never allocate
    std::vector<double> candidates = {0.0, 1.0, 2.0, 3.0};
    std::vector<std::pair<int, int>> cells;
    for (int t = 1; t <= T; ++t)
        for (int n = 1; n <= std::min(t, N); ++n)
            if (n < t) cells.push_back({t, n});

    std::vector<std::vector<double>> thr(T + 1, std::vector<double>(N + 1, 0.0));
    const auto engine_value = policy_value(T, N, atoms, [&] {
        auto e = thr;
        for (auto [t, n] : cells) e[t][n] = tab.rho[t][n];
        return e;
    }());
    CHECK(engine_value == tab.ev[T][N]);

    double best = -1.0;
    const std::size_t combos =
        static_cast<std::size_t>(std::pow(candidates.size(), cells.size()));
    for (std::size_t mask = 0; mask < combos; ++mask) {
        std::size_t m = mask;
        for (auto [t, n] : cells) {
            thr[t][n] = candidates[m % candidates.size()];
            m /= candidates.size();
        }
        best = std::max(best, policy_value(T, N, atoms, thr));
    }
    CHECK(best == tab.ev[T][N]);  // optimum attained, never exceeded
}

TEST_CASE("boundary rows and monotonicity on the continuous distribution") {
    auto mx = default_max_dist();
    const int T = 12, N = 5;
    const auto tab = stra::compute_thresholds(T, N, mx);

    for (int n = 1; n <= N; ++n) {
        CHECK(tab.rho[n][n] == 0.0);
        CHECK(tab.ev[n][n] == Approx(n * mx.mean()).epsilon(1e-12));
    }
    for (int t = 0; t <= T; ++t) CHECK(tab.ev[t][0] == 0.0);

    for (int n = 1; n <= N; ++n)
        for (int t = n + 1; t <= T; ++t) {
            CHECK(tab.rho[t][n] >= tab.rho[t - 1][n] - 1e-9);   // up in t
            CHECK(tab.ev[t][n] >= tab.ev[t - 1][n] - 1e-9);
        }
    for (int t = 2; t <= T; ++t)
        for (int n = 2; n <= std::min(t, N); ++n) {
            CHECK(tab.rho[t][n] <= tab.rho[t][n - 1] + 1e-9);   // down in n
            CHECK(tab.ev[t][n] >= tab.ev[t][n - 1] - 1e-9);
        }
}

TEST_CASE("first nontrivial thresholds match their defining integrals") {
    auto mx = default_max_dist();
    const auto tab = stra::compute_thresholds(5, 2, mx);

    CHECK(tab.rho[2][1] == Approx(mx.mean()).epsilon(1e-12));
    const double rho2 = tab.rho[2][1];
    const double expected_rho3 =
        mx.partial_mean_at_least(rho2) + rho2 * (1.0 - mx.prob_at_least(rho2));
    CHECK(tab.rho[3][1] == Approx(expected_rho3).epsilon(1e-6));

    // stored interior cells satisfy their own recursion exactly
    for (int t = 2; t <= 5; ++t)
        for (int n = 1; n <= std::min(t - 1, 2); ++n)
            CHECK(tab.ev[t][n] ==
                  Approx(stra::tail_value(mx, tab.rho[t][n], tab.ev[t - 1][n - 1],
                                          tab.ev[t - 1][n]))
                      .margin(1e-15));
}

TEST_CASE("halving the quadrature tolerance leaves the table unchanged") {
    const auto coarse = stra::compute_thresholds(10, 4, default_max_dist(1e-8));
    const auto fine = stra::compute_thresholds(10, 4, default_max_dist(5e-9));
    for (int t = 1; t <= 10; ++t)
        for (int n = 1; n <= std::min(t, 4); ++n) {
            CHECK(fine.ev[t][n] == Approx(coarse.ev[t][n]).epsilon(1e-6));
            CHECK(fine.rho[t][n] == Approx(coarse.rho[t][n]).margin(1e-6));
        }
}

TEST_CASE("incoherent distributions are rejected, not propagated") {
    CHECK_THROWS_AS(stra::compute_thresholds(4, 2, BrokenDist{}),
                    std::runtime_error);
    DiscreteSlotDist d{{{1.0, 1.0}}};
    CHECK_THROWS_AS(stra::compute_thresholds(2, 3, d), std::invalid_argument);
    CHECK_THROWS_AS(stra::compute_thresholds(0, 0, d), std::invalid_argument);
}

TEST_CASE("decide applies thresholds with allocate-on-tie and forced endgame") {
    DiscreteSlotDist d{{{1.0, 0.5}, {2.0, 0.5}}};
    const auto tab = stra::compute_thresholds(3, 1, d);

    CHECK(stra::decide(tab, 1, 1, 0.0) == stra::Decision::allocate);  // t == n
    CHECK(stra::decide(tab, 2, 1, 1.5) == stra::Decision::allocate);  // tie
    CHECK(stra::decide(tab, 2, 1, 1.49) == stra::Decision::defer);
    CHECK(stra::decide(tab, 3, 1, 1.75) == stra::Decision::allocate);
    CHECK(stra::decide(tab, 3, 1, 1.6) == stra::Decision::defer);

    CHECK_THROWS_AS(stra::decide(tab, 1, 2, 1.0), std::domain_error);
    CHECK_THROWS_AS(stra::decide(tab, 4, 1, 1.0), std::domain_error);
    CHECK_THROWS_AS(stra::decide(tab, 2, 0, 1.0), std::domain_error);
}

TEST_CASE("threshold csv round-trips bit-exactly") {
    auto mx = default_max_dist();
    const auto tab = stra::compute_thresholds(7, 3, mx);

    std::stringstream ss;
    stra::write_thresholds_csv(tab, ss);
    const auto back = stra::read_thresholds_csv(ss);

    CHECK(back.T == tab.T);
    CHECK(back.N == tab.N);
    for (int t = 1; t <= tab.T; ++t)
        for (int n = 1; n <= std::min(t, tab.N); ++n) {
            CHECK(back.rho[t][n] == tab.rho[t][n]);
            CHECK(back.ev[t][n] == tab.ev[t][n]);
        }
}

TEST_CASE("threshold csv reader rejects malformed input") {
    auto parse = [](const std::string& text) {
        std::istringstream is(text);
        return stra::read_thresholds_csv(is);
    };
    CHECK_THROWS_AS(parse("wrong,header\n1,1,0,1\n"), std::runtime_error);
    CHECK_THROWS_AS(parse("t,n,rho,ev\n"), std::runtime_error);              // empty
    CHECK_THROWS_AS(parse("t,n,rho,ev\n1,1,abc,1\n"), std::runtime_error);   // junk
    CHECK_THROWS_AS(parse("t,n,rho,ev\n1,2,0,1\n"), std::runtime_error);     // n > t
    CHECK_THROWS_AS(parse("t,n,rho,ev\n2,1,0.5,1\n"), std::runtime_error);   // missing (1,1) and (2,2)
    CHECK_THROWS_AS(parse("t,n,rho,ev\n1,1,0,1\n1,1,0,1\n"), std::runtime_error);
}
