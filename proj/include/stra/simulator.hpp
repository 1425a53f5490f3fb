#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "stra/random.hpp"
#include "stra/sampling.hpp"
#include "stra/scenario.hpp"
#include "stra/threshold_table.hpp"
#include "stra/zero_truncated_poisson.hpp"

namespace stra {

/// All requests of one allocation period plus the argmax candidate.
struct SlotBatch {
    int slot_index = 0;  // 1-based
    std::vector<ServiceRequest> requests;
    std::size_t max_request = 0;
    double max_z() const { return requests[max_request].z; }
};

/// Lowest index attaining the maximum utility.
inline std::size_t find_max_request(const std::vector<ServiceRequest>& requests) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < requests.size(); ++i)
        if (requests[i].z > requests[best].z) best = i;
    return best;
}

struct Allocation {
    int slot = 0;
    double z = 0.0;
    int n_remaining_at_decision = 0;
};

struct EpisodeResult {
    double total = 0.0;
    std::vector<Allocation> allocations;
    int resources_used() const { return static_cast<int>(allocations.size()); }
};

/// One horizon's worth of request batches; slot counts are zero-truncated
/// Poisson, request draws i.i.d. from the scenario's laws.
inline std::vector<SlotBatch> generate_episode(const Scenario& s, Rng& rng) {
    const double lam = s.arrivals_per_period();
    std::vector<SlotBatch> episode;
    episode.reserve(s.T);
    for (int j = 1; j <= s.T; ++j) {
        SlotBatch b;
        b.slot_index = j;
        const auto k = zt_poisson_sample(lam, rng);
        b.requests.reserve(static_cast<std::size_t>(k));
        for (std::int64_t i = 0; i < k; ++i)
            b.requests.push_back(sample_request(s, rng));
        b.max_request = find_max_request(b.requests);
        episode.push_back(std::move(b));
    }
    return episode;
}

namespace detail {
inline void record(EpisodeResult& r, const SlotBatch& b, int n_remaining) {
    r.total += b.max_z();
    r.allocations.push_back({b.slot_index, b.max_z(), n_remaining});
}
}  // namespace detail

/// Threshold policy walk; forced allocations when periods run down to the
/// resource count guarantee all N resources are spent.
inline EpisodeResult run_optimal(const ThresholdTable& tab,
                                 const std::vector<SlotBatch>& episode) {
    const int L = static_cast<int>(episode.size());
    if (L > tab.T)
        throw std::invalid_argument("run_optimal: episode longer than table horizon");
    if (tab.N > L)
        throw std::invalid_argument("run_optimal: more resources than periods");
    EpisodeResult r;
    int n = tab.N;
    for (int j = 0; j < L && n > 0; ++j) {
        const int t_remaining = L - j;
        const SlotBatch& b = episode[j];
        if (decide(tab, t_remaining, n, b.max_z()) == Decision::allocate) {
            detail::record(r, b, n);
            --n;
        }
    }
    return r;
}

/// Hindsight upper bound: the N largest slot maxima.
inline EpisodeResult run_ideal(const std::vector<SlotBatch>& episode, int N) {
    const int L = static_cast<int>(episode.size());
    if (N > L) throw std::invalid_argument("run_ideal: more resources than periods");
    std::vector<int> order(L);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return episode[a].max_z() > episode[b].max_z();
    });
    order.resize(N);
    std::sort(order.begin(), order.end());
    EpisodeResult r;
    int n = N;
    for (int j : order) detail::record(r, episode[j], n--);
    return r;
}

/// Spends a resource on every slot maximum until none remain.
inline EpisodeResult run_myopic(const std::vector<SlotBatch>& episode, int N) {
    if (N > static_cast<int>(episode.size()))
        throw std::invalid_argument("run_myopic: more resources than periods");
    EpisodeResult r;
    int n = N;
    for (const SlotBatch& b : episode) {
        if (n == 0) break;
        detail::record(r, b, n);
        --n;
    }
    return r;
}

/// Coin-flip policy: allocate with probability p while resources remain;
/// leftovers at the end of the horizon are lost.
inline EpisodeResult run_random(const std::vector<SlotBatch>& episode, int N,
                                double p, Rng& coin_rng) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error("run_random: p must be in [0, 1]");
    if (N > static_cast<int>(episode.size()))
        throw std::invalid_argument("run_random: more resources than periods");
    EpisodeResult r;
    int n = N;
    for (const SlotBatch& b : episode) {
        if (n == 0) break;
        if (coin_rng.uniform01() < p) {
            detail::record(r, b, n);
            --n;
        }
    }
    return r;
}

struct PolicyStats {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Per-replication episode totals, index-aligned across policies (common
/// random numbers).
struct MonteCarloTotals {
    std::vector<double> ideal, optimal, myopic, random;
};

struct MonteCarloSummary {
    long reps = 0;
    double random_p = 0.5;
    PolicyStats ideal, optimal, myopic, random;
};

namespace detail {

inline double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 32) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

inline double pairwise_sqdev(const double* x, std::size_t n, double mean) {
    if (n <= 32) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += (x[i] - mean) * (x[i] - mean);
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sqdev(x, h, mean) + pairwise_sqdev(x + h, n - h, mean);
}

}  // namespace detail

/// Order-independent mean and standard error (pairwise reduction), so
/// summaries do not depend on how replications were scheduled.
inline PolicyStats summarize(const std::vector<double>& totals) {
    PolicyStats st;
    const std::size_t n = totals.size();
    if (n == 0) return st;
    st.mean = detail::pairwise_sum(totals.data(), n) / double(n);
    if (n > 1)
        st.std_error = std::sqrt(detail::pairwise_sqdev(totals.data(), n, st.mean) /
                                 (double(n - 1) * double(n)));
    return st;
}

/// Runs `reps` independent episodes, evaluating all four policies on each
/// (common random numbers). Replication i derives its own seeds, so results
/// are identical for any worker count.
inline MonteCarloTotals monte_carlo_totals(const Scenario& s,
                                           const ThresholdTable& tab, long reps,
                                           std::uint64_t seed, int jobs = 1,
                                           double random_p = 0.5) {
    if (reps < 1) throw std::invalid_argument("monte_carlo: reps must be >= 1");
    if (!(random_p >= 0.0 && random_p <= 1.0))
        throw std::domain_error("monte_carlo: random_p must be in [0, 1]");
    MonteCarloTotals tot;
    tot.ideal.resize(reps);
    tot.optimal.resize(reps);
    tot.myopic.resize(reps);
    tot.random.resize(reps);

    auto worker = [&](long lo, long hi) {
        for (long i = lo; i < hi; ++i) {
            Rng ep_rng(derive_seed(seed, static_cast<std::uint64_t>(i), 0));
            Rng coin_rng(derive_seed(seed, static_cast<std::uint64_t>(i), 1));
            const auto episode = generate_episode(s, ep_rng);
            tot.optimal[i] = run_optimal(tab, episode).total;
            tot.ideal[i] = run_ideal(episode, tab.N).total;
            tot.myopic[i] = run_myopic(episode, tab.N).total;
            tot.random[i] = run_random(episode, tab.N, random_p, coin_rng).total;
        }
    };

    jobs = std::clamp<long>(jobs, 1, reps);
    if (jobs == 1) {
        worker(0, reps);
        return tot;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(jobs);
    const long base = reps / jobs, rem = reps % jobs;
    long lo = 0;
    for (long w = 0; w < jobs; ++w) {
        const long len = base + (w < rem ? 1 : 0);
        pool.emplace_back([&, w, lo, len] {
            try {
                worker(lo, lo + len);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
        lo += len;
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return tot;
}

inline MonteCarloSummary monte_carlo(const Scenario& s, const ThresholdTable& tab,
                                     long reps, std::uint64_t seed, int jobs = 1,
                                     double random_p = 0.5) {
    const auto tot = monte_carlo_totals(s, tab, reps, seed, jobs, random_p);
    MonteCarloSummary sum;
    sum.reps = reps;
    sum.random_p = random_p;
    sum.ideal = summarize(tot.ideal);
    sum.optimal = summarize(tot.optimal);
    sum.myopic = summarize(tot.myopic);
    sum.random = summarize(tot.random);
    return sum;
}

/// Debug dump: one row per slot with each policy's take/skip decision.
inline void write_episode_trace_csv(std::ostream& os,
                                    const std::vector<SlotBatch>& episode,
                                    const EpisodeResult& ideal,
                                    const EpisodeResult& optimal,
                                    const EpisodeResult& myopic,
                                    const EpisodeResult& random) {
    auto taken = [](const EpisodeResult& r) {
        std::vector<int> slots;
        for (const auto& a : r.allocations) slots.push_back(a.slot);
        return slots;
    };
    const auto ti = taken(ideal), to = taken(optimal), tm = taken(myopic),
               tr = taken(random);
    auto has = [](const std::vector<int>& v, int slot) {
        return std::find(v.begin(), v.end(), slot) != v.end() ? 1 : 0;
    };
    os << "slot,K,z_max,ideal,optimal,myopic,random\n";
    for (const SlotBatch& b : episode)
        os << b.slot_index << ',' << b.requests.size() << ',' << csv_num(b.max_z())
           << ',' << has(ti, b.slot_index) << ',' << has(to, b.slot_index) << ','
           << has(tm, b.slot_index) << ',' << has(tr, b.slot_index) << '\n';
}

}  // namespace stra
