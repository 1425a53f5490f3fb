#pragma once

#include <cmath>
#include <concepts>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stra/csv.hpp"

namespace stra {

/// Anything the backward recursion needs from the slot-maximum law. Satisfied
/// by MaxUtilityDistribution and by discrete test stubs; the ">= z" reading of
/// both tail quantities matches the allocate-on-tie rule, so atoms sitting
/// exactly on a threshold are handled consistently.
template <class D>
concept SlotMaxDistribution = requires(const D& d, double z) {
    { d.mean() } -> std::convertible_to<double>;
    { d.prob_at_least(z) } -> std::convertible_to<double>;
    { d.partial_mean_at_least(z) } -> std::convertible_to<double>;
};

/// One-step expectation: allocate on z >= rho (collect z plus the
/// continuation with one fewer resource), otherwise keep all resources.
template <SlotMaxDistribution D>
double tail_value(const D& dist, double rho, double continuation_hit,
                  double continuation_miss) {
    if (!(rho >= 0.0)) throw std::domain_error("tail_value: rho must be >= 0");
    const double p = dist.prob_at_least(rho);
    return dist.partial_mean_at_least(rho) + continuation_hit * p +
           continuation_miss * (1.0 - p);
}

/// Allocation thresholds rho[t][n] and value function ev[t][n] for t periods
/// remaining and n resources left. Valid cells: ev for 0 <= n <= min(t, N),
/// rho for 1 <= n <= min(t, N); unused cells stay zero.
struct ThresholdTable {
    int T = 0;
    int N = 0;
    std::vector<std::vector<double>> rho;
    std::vector<std::vector<double>> ev;
};

/// Backward recursion over the horizon. Boundaries: no resources -> 0,
/// as many resources as periods -> forced allocation every slot, worth
/// n * E[max]. Interior thresholds are continuation-value differences.
template <SlotMaxDistribution D>
ThresholdTable compute_thresholds(int T, int N, const D& dist) {
    if (N < 1 || T < N)
        throw std::invalid_argument("compute_thresholds: need 1 <= N <= T");
    ThresholdTable tab;
    tab.T = T;
    tab.N = N;
    tab.rho.assign(T + 1, std::vector<double>(N + 1, 0.0));
    tab.ev.assign(T + 1, std::vector<double>(N + 1, 0.0));

    const double ez = dist.mean();
    for (int t = 1; t <= T; ++t) {
        for (int n = 1; n <= std::min(t, N); ++n) {
            if (n == t) {
                tab.rho[t][n] = 0.0;
                tab.ev[t][n] = n * ez;
                continue;
            }
            double r = tab.ev[t - 1][n] - tab.ev[t - 1][n - 1];
            if (r < 0.0) {
                if (r < -1e-9)
                    throw std::runtime_error(
                        "compute_thresholds: threshold " + std::to_string(r) +
                        " at t=" + std::to_string(t) + " n=" + std::to_string(n) +
                        " is negative beyond quadrature noise");
                r = 0.0;
            }
            tab.rho[t][n] = r;
            tab.ev[t][n] = tail_value(dist, r, tab.ev[t - 1][n - 1], tab.ev[t - 1][n]);
        }
    }
    return tab;
}

enum class Decision { allocate, defer };

/// Threshold rule: allocate iff the slot maximum reaches rho[t][n]; ties
/// allocate, and t == n forces allocation.
inline Decision decide(const ThresholdTable& tab, int t_remaining, int n_available,
                       double z) {
    if (n_available < 1 || n_available > tab.N)
        throw std::domain_error("decide: n_available out of range");
    if (t_remaining > tab.T || n_available > t_remaining)
        throw std::domain_error("decide: need n_available <= t_remaining <= T");
    if (t_remaining == n_available) return Decision::allocate;
    return z >= tab.rho[t_remaining][n_available] ? Decision::allocate
                                                  : Decision::defer;
}

inline void write_thresholds_csv(const ThresholdTable& tab, std::ostream& os) {
    os << "t,n,rho,ev\n";
    for (int t = 1; t <= tab.T; ++t)
        for (int n = 1; n <= std::min(t, tab.N); ++n)
            os << t << ',' << n << ',' << csv_num(tab.rho[t][n]) << ','
               << csv_num(tab.ev[t][n]) << '\n';
}

/// Rebuilds a table from its CSV dump; every cell of the valid triangle must
/// be present exactly once.
inline ThresholdTable read_thresholds_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "t,n,rho,ev")
        throw std::runtime_error("threshold csv: bad or missing header");
    std::map<std::pair<int, int>, std::pair<double, double>> cells;
    int maxT = 0, maxN = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        int t = 0, n = 0;
        double rho = 0.0, ev = 0.0;
        if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &t, &n, &rho, &ev) != 4)
            throw std::runtime_error("threshold csv: unparseable row: " + line);
        if (t < 1 || n < 1 || n > t)
            throw std::runtime_error("threshold csv: cell outside valid triangle: " +
                                     line);
        if (!cells.emplace(std::pair{t, n}, std::pair{rho, ev}).second)
            throw std::runtime_error("threshold csv: duplicate cell: " + line);
        maxT = std::max(maxT, t);
        maxN = std::max(maxN, n);
    }
    if (maxT == 0) throw std::runtime_error("threshold csv: no rows");
    ThresholdTable tab;
    tab.T = maxT;
    tab.N = maxN;
    tab.rho.assign(maxT + 1, std::vector<double>(maxN + 1, 0.0));
    tab.ev.assign(maxT + 1, std::vector<double>(maxN + 1, 0.0));
    for (int t = 1; t <= maxT; ++t)
        for (int n = 1; n <= std::min(t, maxN); ++n) {
            const auto it = cells.find({t, n});
            if (it == cells.end())
                throw std::runtime_error("threshold csv: missing cell t=" +
                                         std::to_string(t) + " n=" + std::to_string(n));
            tab.rho[t][n] = it->second.first;
            tab.ev[t][n] = it->second.second;
        }
    return tab;
}

}  // namespace stra
