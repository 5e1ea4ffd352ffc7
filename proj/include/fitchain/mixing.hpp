#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "fitchain/error.hpp"
#include "fitchain/parallel.hpp"
#include "fitchain/params.hpp"
#include "fitchain/profile.hpp"
#include "fitchain/state_space.hpp"
#include "fitchain/transition.hpp"

namespace fitchain {

/// Probability vector indexed by canonical state order.
using DistVector = std::vector<double>;

inline DistVector point_mass(std::size_t dimension, std::size_t at)
{
    DistVector d(dimension, 0.0);
    d.at(at) = 1.0;
    return d;
}

/// out = dist * P
inline void propagate_step(const TransitionMatrix& matrix, const DistVector& dist, DistVector& out)
{
    std::fill(out.begin(), out.end(), 0.0);
    const std::size_t n = matrix.dimension();
    for (std::size_t i = 0; i < n; ++i) {
        const double mass = dist[i];
        if (mass == 0.0) continue;
        for (const auto& e : matrix.row(i)) out[e.column] += mass * e.probability;
    }
}

inline DistVector propagate(const TransitionMatrix& matrix, DistVector dist, std::int64_t steps)
{
    if (dist.size() != matrix.dimension())
        throw Error(ErrorCode::DimensionMismatch, "distribution has " + std::to_string(dist.size()) +
                                                      " entries, matrix has dimension " +
                                                      std::to_string(matrix.dimension()));
    if (steps < 0)
        throw Error(ErrorCode::InvalidArgument, "step count must be non-negative");
    DistVector next(dist.size());
    for (std::int64_t s = 0; s < steps; ++s) {
        propagate_step(matrix, dist, next);
        dist.swap(next);
    }
    return dist;
}

/// Half the L1 distance; equals the largest event-probability gap.
inline double tv_distance(const DistVector& mu, const DistVector& nu)
{
    if (mu.size() != nu.size())
        throw Error(ErrorCode::DimensionMismatch, "distributions differ in dimension");
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) s += std::abs(mu[i] - nu[i]);
    return std::clamp(0.5 * s, 0.0, 1.0);
}

inline double stationary_residual(const TransitionMatrix& matrix, const DistVector& pi)
{
    DistVector next(pi.size());
    propagate_step(matrix, pi, next);
    double r = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) r += std::abs(next[i] - pi[i]);
    return r;
}

inline constexpr double kStationaryResidualTolerance = 1e-12;

namespace detail {

inline void clean_distribution(DistVector& pi)
{
    double total = 0.0;
    for (double& v : pi) {
        if (v < 0.0) v = 0.0;
        total += v;
    }
    for (double& v : pi) v /= total;
}

inline bool solve_balance_lu(const TransitionMatrix& matrix, std::size_t anchor, DistVector& pi)
{
    const auto n = static_cast<Eigen::Index>(matrix.dimension());
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(matrix.nonzeros() + 2 * matrix.dimension());
    const auto norm = static_cast<Eigen::Index>(anchor);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (const auto& e : matrix.row(static_cast<std::size_t>(i))) {
            const auto j = static_cast<Eigen::Index>(e.column);
            if (j != norm) triplets.emplace_back(j, i, e.probability);
        }
        if (i != norm) triplets.emplace_back(i, i, -1.0);
    }
    // pin pi(anchor) = 1 and normalize afterwards; a dense all-ones row would wreck the sparsity
    triplets.emplace_back(norm, norm, 1.0);
    Eigen::SparseMatrix<double> a(n, n);
    a.setFromTriplets(triplets.begin(), triplets.end());
    a.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) return false;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(norm) = 1.0;
    Eigen::VectorXd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !x.allFinite()) return false;
    pi.assign(x.data(), x.data() + n);
    clean_distribution(pi);
    return true;
}

inline bool solve_balance_power(const TransitionMatrix& matrix, std::size_t start, std::int64_t cap, DistVector& pi)
{
    DistVector current = point_mass(matrix.dimension(), start);
    DistVector next(current.size());
    for (std::int64_t it = 0; it < cap; ++it) {
        propagate_step(matrix, current, next);
        double change = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) change += std::abs(next[i] - current[i]);
        current.swap(next);
        if (change <= 1e-14) {
            pi = std::move(current);
            clean_distribution(pi);
            return true;
        }
    }
    return false;
}

} // namespace detail

/// Stationary distribution by sparse LU on the balance equations (fruit equation replaced by
/// pi(z) = 1, then rescaled), falling back to power iteration from the fruit.
inline DistVector stationary(const FitParams& params, const TransitionMatrix& matrix)
{
    if (!(params.epsilon > 0.0))
        throw Error(ErrorCode::NotIrreducible, "epsilon = 0: the chain absorbs at the fruit");
    const std::size_t z = matrix.dimension() - 1;
    DistVector pi;
    if (detail::solve_balance_lu(matrix, z, pi) && stationary_residual(matrix, pi) <= kStationaryResidualTolerance)
        return pi;

    const double raw_cap = 10.0 * params.trunk_length() / params.epsilon;
    const auto cap = static_cast<std::int64_t>(std::min(raw_cap, 1e8));
    if (detail::solve_balance_power(matrix, z, cap, pi) && stationary_residual(matrix, pi) <= kStationaryResidualTolerance)
        return pi;
    throw Error(ErrorCode::SolveFailed, "stationary distribution did not reach residual 1e-12");
}

inline DistVector stationary(const FitParams& params)
{
    return stationary(params, build_transition_matrix(params));
}

/// The law distances are measured against: pi, or the point mass at the fruit in limit mode.
inline DistVector reference_law(const FitParams& params, const TransitionMatrix& matrix)
{
    if (params.limit_mode && params.epsilon == 0.0) return point_mass(matrix.dimension(), matrix.dimension() - 1);
    return stationary(params, matrix);
}

enum class WorstStartMode { Exact, RootStart };

inline constexpr std::size_t kDefaultExactStateCap = 2000;

/// Distances closer than this to the maximum count as ties; the lowest canonical index wins.
inline constexpr double kArgmaxTieTolerance = 1e-14;

struct CurveOptions {
    std::size_t state_cap = kDefaultExactStateCap;
    unsigned threads = 0;
};

struct MixingCurve {
    std::vector<std::int64_t> times;
    std::vector<double> distances;
    std::vector<double> reference;  // F(t)
    std::vector<StateLabel> worst_start;

    double max_gap() const
    {
        double g = 0.0;
        for (std::size_t i = 0; i < distances.size(); ++i) g = std::max(g, std::abs(distances[i] - reference[i]));
        return g;
    }
};

/// l0 + lk + ceil(20 / max(eps, 1e-6)), clipped to `cap`.
inline std::int64_t default_horizon(const FitParams& params, std::int64_t cap = std::numeric_limits<std::int64_t>::max())
{
    const double eps = std::max(params.epsilon, 1e-6);
    const std::int64_t h = params.trunk_length() + params.branch_length(params.k) +
                           static_cast<std::int64_t>(std::ceil(20.0 / eps));
    return std::min(h, cap);
}

/// Worst-case (Exact) or root-start TV distance to stationarity for t = 0..t_max,
/// alongside the deterministic-limit curve F.
inline MixingCurve distance_curve(const FitParams& params, std::int64_t t_max, WorstStartMode mode,
                                  const CurveOptions& options = {})
{
    if (t_max < 0)
        throw Error(ErrorCode::InvalidArgument, "t_max must be non-negative");
    const StateSpace space = enumerate_states(params);
    if (mode == WorstStartMode::Exact && space.size() > options.state_cap)
        throw Error(ErrorCode::StateSpaceTooLarge, std::to_string(space.size()) + " states exceed the exact-mode cap of " +
                                                       std::to_string(options.state_cap));
    const TransitionMatrix matrix = build_transition_matrix(params, space);
    const DistVector pi = reference_law(params, matrix);
    const auto fgF = fgF_from_params<double>(params);

    const std::size_t steps = static_cast<std::size_t>(t_max) + 1;
    MixingCurve curve;
    curve.times.resize(steps);
    curve.distances.resize(steps);
    curve.reference.resize(steps);
    curve.worst_start.resize(steps, StateLabel::trunk(0));
    for (std::size_t t = 0; t < steps; ++t) {
        curve.times[t] = static_cast<std::int64_t>(t);
        curve.reference[t] = fgF.F(static_cast<std::int64_t>(t));
    }

    const std::size_t starts = mode == WorstStartMode::Exact ? space.size() : 1;
    std::vector<DistVector> current(starts), next(starts, DistVector(space.size()));
    for (std::size_t s = 0; s < starts; ++s) current[s] = point_mass(space.size(), s);
    std::vector<double> per_start(starts);

    auto work = [&](std::size_t s, std::size_t t) {
        if (t > 0) {
            propagate_step(matrix, current[s], next[s]);
            current[s].swap(next[s]);
        }
        per_start[s] = tv_distance(current[s], pi);
    };
    auto reduce = [&](std::size_t t) {
        double best = per_start[0];
        for (double d : per_start) best = std::max(best, d);
        std::size_t arg = 0;
        while (per_start[arg] < best - kArgmaxTieTolerance) ++arg;
        curve.distances[t] = best;
        curve.worst_start[t] = space[arg];
    };
    const unsigned threads = starts >= 64 ? resolve_threads(options.threads) : 1u;
    run_rounds(starts, steps, threads, work, reduce);
    return curve;
}

/// Largest increase between consecutive samples (<= 0 for a weakly decreasing curve).
inline double max_increase(const std::vector<double>& values)
{
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < values.size(); ++i) worst = std::max(worst, values[i] - values[i - 1]);
    return values.size() < 2 ? 0.0 : worst;
}

struct HittingDistribution {
    StateLabel start;
    std::vector<double> pmf;  // pmf[t] = P(T_z = t), t = 0..horizon
    double tail_mass = 0.0;   // P(T_z > horizon)
};

/// First-arrival law at the fruit, obtained by making the fruit absorbing and propagating.
inline HittingDistribution hitting_distribution(const FitParams& params, const StateLabel& start, std::int64_t horizon)
{
    if (horizon < 1)
        throw Error(ErrorCode::InvalidArgument, "horizon must be at least 1");
    const StateSpace space = enumerate_states(params);
    const std::size_t from = space.index(start);
    const TransitionMatrix matrix = build_transition_matrix(params, space);
    const std::size_t z = space.fruit();

    HittingDistribution out;
    out.start = start;
    out.pmf.assign(static_cast<std::size_t>(horizon) + 1, 0.0);
    if (from == z) {
        out.pmf[0] = 1.0;
        return out;
    }
    DistVector current = point_mass(space.size(), from);
    DistVector next(space.size());
    for (std::int64_t t = 1; t <= horizon; ++t) {
        propagate_step(matrix, current, next);
        out.pmf[static_cast<std::size_t>(t)] = next[z];
        next[z] = 0.0;
        current.swap(next);
    }
    double remaining = 0.0;
    for (double v : current) remaining += v;
    out.tail_mass = remaining;
    return out;
}

/// Mean return time to the fruit: 1 + sum_{t>=1} P_z(T_z^+ > t), where the survival
/// masses come from pushing the fruit row's off-fruit part through the absorbed chain.
inline double return_time_mean(const FitParams& params)
{
    if (!(params.epsilon > 0.0))
        throw Error(ErrorCode::NotIrreducible, "epsilon = 0: the fruit is absorbing");
    const StateSpace space = enumerate_states(params);
    const TransitionMatrix matrix = build_transition_matrix(params, space);
    const std::size_t z = space.fruit();

    DistVector current(space.size(), 0.0);
    for (const auto& e : matrix.row(z))
        if (e.column != z) current[e.column] = e.probability;
    DistVector next(space.size());

    double expectation = 1.0;
    const std::int64_t cap = 100'000'000 / static_cast<std::int64_t>(std::max<std::size_t>(matrix.nonzeros(), 1)) + 100'000;
    for (std::int64_t t = 1; t < cap; ++t) {
        double survival = 0.0;
        for (std::size_t i = 0; i < z; ++i) survival += current[i];
        expectation += survival;
        if (survival <= 1e-18 * expectation) return expectation;
        propagate_step(matrix, current, next);
        next[z] = 0.0;
        current.swap(next);
    }
    throw Error(ErrorCode::SolveFailed, "return-time series did not converge");
}

} // namespace fitchain
