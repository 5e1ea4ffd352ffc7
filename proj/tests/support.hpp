#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <random>
#include <vector>

#include "fitchain.hpp"

namespace testing_support {

using namespace fitchain;

inline ExactLayout four_branch_layout()
{
    ExactLayout l;
    l.k = 4;
    l.lengths = {6, 2, 3, 4, 6};
    l.weights.assign(4, Rational(1, 4));
    return l;
}

inline FitParams four_branch(double eps) { return validate_params(make_params(to_float(four_branch_layout()), eps)); }

inline ExactLayout five_state_layout()
{
    ExactLayout l;
    l.k = 2;
    l.lengths = {2, 1, 2};
    l.weights.assign(2, Rational(1, 2));
    return l;
}

inline FitParams five_state(double eps, bool limit = false)
{
    return validate_params(make_params(to_float(five_state_layout()), eps, limit));
}

inline ExactFitParams five_state_exact(Rational eps) { return validate_params(make_params(five_state_layout(), eps)); }

/// Random valid layout: k in [2, max_k], trunk <= max_trunk, rational weights with small denominators,
/// first branch at least `min_l1` long (rejection sampling).
inline ExactLayout random_layout(std::mt19937_64& rng, int max_k, int max_trunk, int min_l1 = 1);

inline ExactLayout random_layout_once(std::mt19937_64& rng, int max_k, int max_trunk)
{
    std::uniform_int_distribution<int> k_dist(2, max_k);
    ExactLayout l;
    for (;;) {
        l.k = k_dist(rng);
        if (l.k <= max_trunk) break;
    }
    // choose k distinct lengths in [1, trunk]
    std::uniform_int_distribution<int> trunk_dist(l.k, max_trunk);
    const int trunk = trunk_dist(rng);
    std::vector<int> pool(static_cast<std::size_t>(trunk));
    for (int i = 0; i < trunk; ++i) pool[static_cast<std::size_t>(i)] = i + 1;
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<int> chosen(pool.begin(), pool.begin() + l.k);
    std::sort(chosen.begin(), chosen.end());
    l.lengths.push_back(std::max(trunk, chosen.back()));
    l.lengths.insert(l.lengths.end(), chosen.begin(), chosen.end());

    std::uniform_int_distribution<int> w_dist(1, 9);
    Rational total = 0;
    std::vector<Rational> raw;
    for (int i = 0; i < l.k; ++i) {
        raw.emplace_back(w_dist(rng));
        total += raw.back();
    }
    for (auto& w : raw) l.weights.push_back(w / total);
    return l;
}

inline ExactLayout random_layout(std::mt19937_64& rng, int max_k, int max_trunk, int min_l1)
{
    for (;;) {
        ExactLayout l = random_layout_once(rng, max_k, max_trunk);
        if (l.lengths[1] >= min_l1) return l;
    }
}

/// BFS distance from every state to the fruit along positive entries.
inline std::vector<std::size_t> graph_distance_to_fruit(const TransitionMatrix& m)
{
    const std::size_t n = m.dimension();
    std::vector<std::vector<std::size_t>> into(n);
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& e : m.row(i))
            if (e.probability > 0) into[e.column].push_back(i);
    std::vector<std::size_t> dist(n, n + 1);
    std::queue<std::size_t> q;
    dist[n - 1] = 0;
    q.push(n - 1);
    while (!q.empty()) {
        const auto v = q.front();
        q.pop();
        for (auto u : into[v])
            if (dist[u] > n) {
                dist[u] = dist[v] + 1;
                q.push(u);
            }
    }
    return dist;
}

/// States reachable from `from` along positive entries (or against them when `reverse`).
inline std::vector<bool> reachable(const TransitionMatrix& m, std::size_t from, bool reverse)
{
    const std::size_t n = m.dimension();
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& e : m.row(i)) {
            if (e.probability <= 0) continue;
            if (reverse) adj[e.column].push_back(i);
            else adj[i].push_back(e.column);
        }
    std::vector<bool> seen(n, false);
    std::queue<std::size_t> q;
    q.push(from);
    seen[from] = true;
    while (!q.empty()) {
        const auto v = q.front();
        q.pop();
        for (auto w : adj[v])
            if (!seen[w]) {
                seen[w] = true;
                q.push(w);
            }
    }
    return seen;
}

inline bool strongly_connected(const TransitionMatrix& m)
{
    const std::size_t z = m.dimension() - 1;
    for (bool r : {false, true})
        for (bool s : reachable(m, z, r))
            if (!s) return false;
    return true;
}

inline double logistic(double c) { return 1.0 / (1.0 + std::exp(c)); }

/// Logistic profile sampled on [-8, 8] with step 1/4.
inline ProfileSpec logistic_table()
{
    std::vector<ProfileSample> s;
    for (int i = -32; i <= 32; ++i) s.push_back({i / 4.0, logistic(i / 4.0)});
    return ProfileSpec(std::move(s));
}

} // namespace testing_support
