#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "stra/max_utility.hpp"
#include "stra/simulator.hpp"

using Catch::Approx;

namespace {

/// Episode with one handcrafted request per slot (z = x at d = 0).
std::vector<stra::SlotBatch> make_episode(const std::vector<double>& zs) {
    std::vector<stra::SlotBatch> ep;
    for (std::size_t j = 0; j < zs.size(); ++j) {
        stra::SlotBatch b;
        b.slot_index = static_cast<int>(j) + 1;
        b.requests.push_back({zs[j], 0.0, 0.0, zs[j]});
        b.max_request = 0;
        ep.push_back(std::move(b));
    }
    return ep;
}

stra::Scenario default_scenario(int T, int N) {
    stra::Scenario s;
    s.T = T;
    s.N = N;
    s.utility_model = stra::PowerLaw{1.5};
    s.intensity_model = stra::ExponentialIntensity{1.0};
    s.validate();
    return s;
}

stra::ThresholdTable default_table(const stra::Scenario& s) {
    stra::MaxUtilityDistribution mx(s.arrivals_per_period(),
                                    stra::UtilityDistribution(s));
    return stra::compute_thresholds(s.T, s.N, mx);
}

}  // namespace

TEST_CASE("max request picks the first of tied utilities") {
    std::vector<stra::ServiceRequest> reqs = {
        {1.0, 0.0, 0.0, 1.0}, {5.0, 0.0, 0.0, 5.0}, {5.0, 0.0, 0.0, 5.0}};
    CHECK(stra::find_max_request(reqs) == 1);
    reqs[0].z = 9.0;
    CHECK(stra::find_max_request(reqs) == 0);
}

TEST_CASE("episode generation honours the arrival law") {
    // vanishing rate: exactly one request per slot
    stra::Scenario tiny = default_scenario(5, 2);
    tiny.lambda = 1e-8 / M_PI;
    tiny.validate();
    stra::Rng r1(5);
    for (const auto& b : stra::generate_episode(tiny, r1))
        CHECK(b.requests.size() == 1);

    // defaults: mean batch size matches the zero-truncated Poisson mean
    stra::Scenario s = default_scenario(30, 10);
    const double lam = s.arrivals_per_period();
    stra::Rng r2(77);
    double sum = 0.0, sumsq = 0.0;
    int slots = 0;
    for (int e = 0; e < 400; ++e)
        for (const auto& b : stra::generate_episode(s, r2)) {
            const double k = static_cast<double>(b.requests.size());
            CHECK(k >= 1);
            sum += k;
            sumsq += k * k;
            ++slots;
        }
    const double mean = sum / slots;
    const double se = std::sqrt((sumsq / slots - mean * mean) / slots);
    CHECK(std::fabs(mean - stra::zt_poisson_mean(lam)) <= 3.0 * se);

    // reproducibility
    stra::Rng a(123), b(123);
    const auto ea = stra::generate_episode(s, a);
    const auto eb = stra::generate_episode(s, b);
    REQUIRE(ea.size() == eb.size());
    for (std::size_t j = 0; j < ea.size(); ++j) {
        CHECK(ea[j].requests.size() == eb[j].requests.size());
        CHECK(ea[j].max_z() == eb[j].max_z());
    }
}

TEST_CASE("ideal takes the largest slot maxima") {
    const auto ep = make_episode({3.0, 1.0, 2.0});
    CHECK(stra::run_ideal(ep, 1).total == 3.0);
    CHECK(stra::run_ideal(ep, 2).total == 5.0);
    CHECK(stra::run_ideal(ep, 3).total == 6.0);
    CHECK_THROWS_AS(stra::run_ideal(ep, 4), std::invalid_argument);
}

TEST_CASE("myopic spends resources on the first slots") {
    const auto ep = make_episode({1.0, 5.0, 9.0});
    CHECK(stra::run_myopic(ep, 2).total == 6.0);
    const auto r = stra::run_myopic(ep, 1);
    CHECK(r.total == 1.0);
    CHECK(r.allocations.size() == 1);
    CHECK(r.allocations[0].slot == 1);
}

TEST_CASE("random policy calibration points") {
    const auto ep = make_episode({1.0, 2.0, 4.0, 8.0});
    stra::Rng coin(55);
    CHECK(stra::run_random(ep, 4, 0.0, coin).total == 0.0);
    // p = 1 always fires: equal to myopic for any N
    stra::Rng coin2(55);
    CHECK(stra::run_random(ep, 2, 1.0, coin2).total ==
          stra::run_myopic(ep, 2).total);
    CHECK_THROWS_AS(stra::run_random(ep, 1, 1.5, coin), std::domain_error);
}

TEST_CASE("random policy expectation at p = 0.5 with N = T") {
    stra::Scenario s = default_scenario(10, 10);
    stra::MaxUtilityDistribution mx(s.arrivals_per_period(),
                                    stra::UtilityDistribution(s));
    const auto tab = stra::compute_thresholds(10, 10, mx);
    const auto tot = stra::monte_carlo_totals(s, tab, 4000, 99, 4, 0.5);
    const auto st = stra::summarize(tot.random);
    // allocations ~ Binomial(T, 1/2) independent of the maxima
    CHECK(std::fabs(st.mean - 0.5 * 10 * mx.mean()) <= 3.0 * st.std_error);
}

TEST_CASE("optimal walk follows the thresholds") {
    // handcrafted two-period table with a single resource
    stra::ThresholdTable tab;
    tab.T = 2;
    tab.N = 1;
    tab.rho.assign(3, std::vector<double>(2, 0.0));
    tab.ev.assign(3, std::vector<double>(2, 0.0));
    tab.rho[2][1] = 1.5;

    // below threshold in slot 1: forced to take slot 2 whatever it holds
    auto r = stra::run_optimal(tab, make_episode({1.0, 0.2}));
    CHECK(r.total == 0.2);
    REQUIRE(r.allocations.size() == 1);
    CHECK(r.allocations[0].slot == 2);

    // at/above threshold in slot 1: taken immediately
    r = stra::run_optimal(tab, make_episode({1.5, 9.0}));
    CHECK(r.total == 1.5);
    CHECK(r.allocations[0].slot == 1);

    CHECK_THROWS_AS(stra::run_optimal(tab, make_episode({1, 2, 3})),
                    std::invalid_argument);
    stra::ThresholdTable wide = tab;
    wide.N = 3;
    CHECK_THROWS_AS(stra::run_optimal(wide, make_episode({1, 2})),
                    std::invalid_argument);
}

TEST_CASE("optimal policy exhausts every resource") {
    stra::Scenario s = default_scenario(12, 4);
    const auto tab = default_table(s);
    stra::Rng rng(7);
    for (int e = 0; e < 50; ++e) {
        const auto ep = stra::generate_episode(s, rng);
        const auto r = stra::run_optimal(tab, ep);
        CHECK(r.resources_used() == 4);
        // N = T forces allocation in every slot
        const auto full = stra::run_ideal(ep, 4);
        CHECK(full.total >= r.total);
    }

    stra::Scenario sat = default_scenario(5, 5);
    const auto tab5 = default_table(sat);
    const auto ep = stra::generate_episode(sat, rng);
    double whole = 0.0;
    for (const auto& b : ep) whole += b.max_z();
    CHECK(stra::run_optimal(tab5, ep).total == Approx(whole));
    CHECK(stra::run_ideal(ep, 5).total == Approx(whole));
    CHECK(stra::run_myopic(ep, 5).total == Approx(whole));
}

TEST_CASE("per-episode dominance under common random numbers") {
    stra::Scenario s = default_scenario(15, 5);
    const auto tab = default_table(s);
    const auto tot = stra::monte_carlo_totals(s, tab, 300, 2718, 3);
    for (std::size_t i = 0; i < tot.optimal.size(); ++i) {
        CHECK(tot.ideal[i] >= tot.optimal[i] - 1e-12);
        CHECK(tot.ideal[i] >= tot.myopic[i] - 1e-12);
        CHECK(tot.optimal[i] >= 0.0);
        CHECK(tot.random[i] >= 0.0);
    }
}

TEST_CASE("policy mean matches the dynamic-programming value") {
    stra::Scenario s = default_scenario(10, 3);
    stra::MaxUtilityDistribution mx(s.arrivals_per_period(),
                                    stra::UtilityDistribution(s));
    const auto tab = stra::compute_thresholds(s.T, s.N, mx);
    const auto tot = stra::monte_carlo_totals(s, tab, 10000, 424242, 4);
    const auto st = stra::summarize(tot.optimal);
    CHECK(std::fabs(st.mean - tab.ev[10][3]) <= 3.0 * st.std_error);

    // myopic mean is N * E[max] by i.i.d. slots
    const auto sm = stra::summarize(tot.myopic);
    CHECK(std::fabs(sm.mean - 3.0 * mx.mean()) <= 3.0 * sm.std_error);
}

TEST_CASE("worker count cannot change the results") {
    stra::Scenario s = default_scenario(8, 3);
    const auto tab = default_table(s);
    const auto one = stra::monte_carlo_totals(s, tab, 501, 31337, 1);
    const auto four = stra::monte_carlo_totals(s, tab, 501, 31337, 4);
    const auto eight = stra::monte_carlo_totals(s, tab, 501, 31337, 8);
    CHECK(one.optimal == four.optimal);
    CHECK(one.ideal == four.ideal);
    CHECK(one.myopic == four.myopic);
    CHECK(one.random == four.random);
    CHECK(one.optimal == eight.optimal);
    CHECK(one.random == eight.random);

    const auto other = stra::monte_carlo_totals(s, tab, 501, 31338, 4);
    CHECK(one.optimal != other.optimal);

    // summary is a pure function of the totals
    const auto s1 = stra::monte_carlo(s, tab, 501, 31337, 1);
    const auto s4 = stra::monte_carlo(s, tab, 501, 31337, 4);
    CHECK(s1.optimal.mean == s4.optimal.mean);
    CHECK(s1.optimal.std_error == s4.optimal.std_error);
    CHECK(s1.random.mean == s4.random.mean);
}

TEST_CASE("episode trace exports per-slot decisions") {
    const auto ep = make_episode({3.0, 1.0, 2.0});
    stra::ThresholdTable tab;
    tab.T = 3;
    tab.N = 1;
    tab.rho.assign(4, std::vector<double>(2, 0.0));
    tab.ev.assign(4, std::vector<double>(2, 0.0));
    tab.rho[3][1] = 2.5;
    tab.rho[2][1] = 1.5;

    stra::Rng coin(1);
    const auto res_opt = stra::run_optimal(tab, ep);
    const auto res_ideal = stra::run_ideal(ep, 1);
    const auto res_myopic = stra::run_myopic(ep, 1);
    const auto res_random = stra::run_random(ep, 1, 0.0, coin);

    std::ostringstream os;
    stra::write_episode_trace_csv(os, ep, res_ideal, res_opt, res_myopic,
                                  res_random);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "slot,K,z_max,ideal,optimal,myopic,random");
    std::getline(is, line);
    CHECK(line == "1,1,3,1,1,1,0");  // z=3 clears rho[3][1]=2.5; all but random take it
    std::getline(is, line);
    CHECK(line == "2,1,1,0,0,0,0");
    std::getline(is, line);
    CHECK(line == "3,1,2,0,0,0,0");
}
