#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "fitchain/error.hpp"
#include "fitchain/mixing.hpp"
#include "fitchain/parallel.hpp"
#include "fitchain/params.hpp"
#include "fitchain/profile.hpp"

namespace fitchain {

/// Poisson(t) probabilities on [left, right]; tail_mass is what lies outside.
struct PoissonTruncation {
    double t = 0.0;
    std::int64_t left = 0;
    std::int64_t right = 0;
    std::vector<double> weights;
    double tail_mass = 0.0;

    double weight(std::int64_t j) const
    {
        if (j < left || j > right) return 0.0;
        return weights[static_cast<std::size_t>(j - left)];
    }
};

/// Every truncation window covers at least mode +- 7 sqrt(t).
inline constexpr double kPoissonMinHalfWidth = 7.0;

/// Weights by recurrence outward from the mode, normalized over the range where terms are
/// still above 1e-20 of the peak, then trimmed to the smallest window with tail <= tol.
inline PoissonTruncation poisson_weights(double t, double tol)
{
    if (!(t > 0.0) || !std::isfinite(t))
        throw Error(ErrorCode::InvalidArgument, "Poisson time must be positive");
    if (!(tol > 0.0 && tol < 1.0))
        throw Error(ErrorCode::InvalidArgument, "tolerance must lie in (0, 1)");

    const auto mode = static_cast<std::int64_t>(std::floor(t));
    constexpr double cutoff = 1e-20;

    std::vector<double> up{1.0};
    for (std::int64_t j = mode; up.back() > cutoff; ++j) up.push_back(up.back() * t / static_cast<double>(j + 1));
    std::vector<double> down;
    double w = 1.0;
    for (std::int64_t j = mode; j > 0 && w > cutoff; --j) {
        w *= static_cast<double>(j) / t;
        down.push_back(w);
    }
    const std::int64_t full_left = mode - static_cast<std::int64_t>(down.size());
    std::vector<double> full(down.rbegin(), down.rend());
    full.insert(full.end(), up.begin(), up.end());

    const double floor = 1e-15 * static_cast<double>(full.size());
    if (tol < floor) {
        char message[128];
        std::snprintf(message, sizeof message, "tolerance %.3g is below the rounding floor %.3g", tol, floor);
        throw Error(ErrorCode::ToleranceUnreachable, message);
    }

    // summing smallest-first keeps the normalizer accurate
    std::vector<double> sorted = full;
    std::sort(sorted.begin(), sorted.end());
    double total = 0.0;
    for (double v : sorted) total += v;
    for (double& v : full) v /= total;

    std::size_t lo = 0, hi = full.size() - 1;
    double dropped_left = 0.0, dropped_right = 0.0;
    while (lo < hi && dropped_left + full[lo] <= tol / 2) dropped_left += full[lo++];
    while (hi > lo && dropped_right + full[hi] <= tol / 2) dropped_right += full[hi--];

    const double half = kPoissonMinHalfWidth * std::sqrt(t);
    const auto want_left = static_cast<std::int64_t>(std::floor(t - half));
    const auto want_right = static_cast<std::int64_t>(std::ceil(t + half));
    while (lo > 0 && full_left + static_cast<std::int64_t>(lo) > want_left) dropped_left -= full[--lo];
    while (hi + 1 < full.size() && full_left + static_cast<std::int64_t>(hi) < want_right) dropped_right -= full[++hi];

    PoissonTruncation out;
    out.t = t;
    out.left = full_left + static_cast<std::int64_t>(lo);
    out.right = full_left + static_cast<std::int64_t>(hi);
    out.weights.assign(full.begin() + static_cast<std::ptrdiff_t>(lo), full.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    out.tail_mass = std::max(0.0, dropped_left + dropped_right);
    return out;
}

namespace detail {

/// Continuous-time laws at every requested time from one start, sharing a single propagation.
inline std::vector<DistVector> uniformized_laws(const TransitionMatrix& matrix, std::size_t start,
                                                const std::vector<PoissonTruncation>& windows)
{
    const std::size_t dim = matrix.dimension();
    std::int64_t last = 0;
    for (const auto& w : windows) last = std::max(last, w.right);
    std::vector<DistVector> laws(windows.size(), DistVector(dim, 0.0));
    DistVector current = point_mass(dim, start);
    DistVector next(dim);
    for (std::int64_t j = 0; j <= last; ++j) {
        for (std::size_t i = 0; i < windows.size(); ++i) {
            const double w = windows[i].weight(j);
            if (w == 0.0) continue;
            auto& law = laws[i];
            for (std::size_t s = 0; s < dim; ++s) law[s] += w * current[s];
        }
        if (j < last) {
            propagate_step(matrix, current, next);
            current.swap(next);
        }
    }
    return laws;
}

} // namespace detail

struct CtOptions {
    WorstStartMode mode = WorstStartMode::RootStart;
    std::size_t state_cap = kDefaultExactStateCap;
    unsigned threads = 0;
};

/// Rate-1 continuous-time distance to stationarity at each of `times`.
inline std::vector<double> ct_distances(const FitParams& params, const std::vector<double>& times, double tol,
                                        const CtOptions& options = {})
{
    const StateSpace space = enumerate_states(params);
    if (options.mode == WorstStartMode::Exact && space.size() > options.state_cap)
        throw Error(ErrorCode::StateSpaceTooLarge, std::to_string(space.size()) + " states exceed the exact-mode cap of " +
                                                       std::to_string(options.state_cap));
    const TransitionMatrix matrix = build_transition_matrix(params, space);
    const DistVector pi = reference_law(params, matrix);

    std::vector<PoissonTruncation> windows;
    windows.reserve(times.size());
    for (double t : times) windows.push_back(poisson_weights(t, tol));

    const std::size_t starts = options.mode == WorstStartMode::Exact ? space.size() : 1;
    std::vector<std::vector<double>> per_start(starts);
    auto work = [&](std::size_t s, std::size_t) {
        const auto laws = detail::uniformized_laws(matrix, s, windows);
        per_start[s].resize(laws.size());
        for (std::size_t i = 0; i < laws.size(); ++i) per_start[s][i] = tv_distance(laws[i], pi);
    };
    run_rounds(starts, 1, starts > 1 ? resolve_threads(options.threads) : 1u, work, [](std::size_t) {});

    std::vector<double> out(times.size(), 0.0);
    for (const auto& row : per_start)
        for (std::size_t i = 0; i < row.size(); ++i) out[i] = std::max(out[i], row[i]);
    return out;
}

inline double ct_distance(const FitParams& params, double t, double tol, WorstStartMode mode = WorstStartMode::RootStart)
{
    CtOptions options;
    options.mode = mode;
    return ct_distances(params, {t}, tol, options).front();
}

struct CtProfileOptions {
    ProfileChainOptions chain;
    double tol = 1e-10;
};

struct CtProfileResult {
    std::vector<double> c;
    std::vector<double> distances;
    double u_n = 0.0;  // sqrt(w_n sqrt(t_n))
    ProfileChain chain;
    std::vector<std::string> flags;
};

/// Continuous-time distance at t_n + c w_n for each c, on the chain built for floor(t_n).
inline CtProfileResult ct_profile_eval(const ProfileSpec& p, double t_n, double w_n, int n, const std::vector<double>& cs,
                                       const CtProfileOptions& options = {})
{
    if (!(t_n >= 1.0) || !(w_n > 0.0))
        throw Error(ErrorCode::InvalidArgument, "t_n must be >= 1 and w_n positive");
    CtProfileResult out;
    out.c = cs;
    out.u_n = std::sqrt(w_n * std::sqrt(t_n));
    out.chain = build_profile_chain(p, static_cast<std::int64_t>(std::floor(t_n)), w_n, n, options.chain);
    out.flags = out.chain.flags;
    if (w_n < 2.0 * std::sqrt(t_n)) out.flags.push_back("window_below_diffusive_scale");

    std::vector<double> times;
    for (double c : cs) {
        const double t = t_n + c * w_n;
        if (!(t > 0.0))
            throw Error(ErrorCode::InvalidArgument, "t_n + c w_n must be positive");
        times.push_back(t);
    }
    out.distances = ct_distances(out.chain.params, times, options.tol);
    return out;
}

} // namespace fitchain
