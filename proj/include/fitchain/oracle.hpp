#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fitchain/error.hpp"
#include "fitchain/params.hpp"
#include "fitchain/rational.hpp"
#include "fitchain/state_space.hpp"

namespace fitchain::oracle {

inline constexpr std::size_t kMaxStates = 30;
inline constexpr std::int64_t kMaxSteps = 200;
inline constexpr std::size_t kMaxSubsetDimension = 16;

using ExactVector = std::vector<Rational>;
using ExactMatrix = std::vector<std::vector<Rational>>;

/// Dense kernel written pair by pair from the neighbour relation of the tree, independent of
/// the sparse builder: each ordered pair of labels is classified and priced on its own.
inline ExactMatrix dense_kernel(const ExactFitParams& p, const StateSpace& space)
{
    const std::size_t n = space.size();
    const Rational eps = p.epsilon;
    const Rational eta = Rational(1) - eps;
    const int l0 = p.trunk_length();
    using Kind = StateLabel::Kind;

    // position of a state along its own root-to-fruit path (fruit of branch i sits at l0 + l_i)
    auto tip = [&](int i) { return l0 + p.branch_length(i) - 1; };

    ExactMatrix P(n, ExactVector(n, Rational(0)));
    for (std::size_t a = 0; a < n; ++a) {
        const StateLabel s = space[a];
        for (std::size_t b = 0; b < n; ++b) {
            const StateLabel u = space[b];
            Rational v = 0;
            if (s.kind == Kind::Trunk && u.kind == Kind::Trunk) {
                if (u.level == s.level + 1) v = eta;
                else if (u.level == s.level - 1) v = eps;
                else if (a == b && s.level == 0) v = eps;
            } else if (s.kind == Kind::Trunk && u.kind == Kind::Branch) {
                if (s.level == l0 && u.level == l0 + 1) v = eta * p.weight(u.branch);
            } else if (s.kind == Kind::Branch && u.kind == Kind::Trunk) {
                if (u.level == l0 && s.level == l0 + 1) v = eps;
            } else if (s.kind == Kind::Branch && u.kind == Kind::Branch) {
                if (s.branch == u.branch && u.level == s.level + 1) v = eta;
                else if (s.branch == u.branch && u.level == s.level - 1) v = eps;
            } else if (s.kind == Kind::Fruit && u.kind == Kind::Fruit) {
                v = eta;
            } else if (s.kind == Kind::Branch && u.kind == Kind::Fruit) {
                if (s.level == tip(s.branch)) v = eta;
            } else if (s.kind == Kind::Fruit && u.kind == Kind::Branch) {
                if (u.level == tip(u.branch)) v = eps * p.weight(u.branch);
            } else if (s.kind == Kind::Trunk && u.kind == Kind::Fruit) {
                if (s.level == l0)
                    for (int i = 1; i <= p.k; ++i)
                        if (p.branch_length(i) == 1) v += eta * p.weight(i);
            } else if (s.kind == Kind::Fruit && u.kind == Kind::Trunk) {
                if (u.level == l0)
                    for (int i = 1; i <= p.k; ++i)
                        if (p.branch_length(i) == 1) v += eps * p.weight(i);
            }
            P[a][b] = v;
        }
    }
    return P;
}

/// Solves A x = rhs exactly by Gaussian elimination with the first non-zero pivot.
inline ExactVector solve(ExactMatrix A, ExactVector rhs)
{
    const std::size_t n = A.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && A[pivot][col] == 0) ++pivot;
        if (pivot == n)
            throw Error(ErrorCode::SolveFailed, "singular system in exact solve");
        std::swap(A[pivot], A[col]);
        std::swap(rhs[pivot], rhs[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || A[r][col] == 0) continue;
            const Rational f = A[r][col] / A[col][col];
            for (std::size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    for (std::size_t i = 0; i < n; ++i) rhs[i] /= A[i][i];
    return rhs;
}

inline void check_size(std::size_t states)
{
    if (states > kMaxStates)
        throw Error(ErrorCode::TooLarge, std::to_string(states) + " states exceed the oracle limit of " +
                                             std::to_string(kMaxStates));
}

/// Exact stationary law; in limit mode (epsilon = 0) the point mass at the fruit.
inline ExactVector stationary(const ExactFitParams& p, const ExactMatrix& P)
{
    const std::size_t n = P.size();
    if (p.epsilon == 0) {
        ExactVector pi(n, Rational(0));
        pi[n - 1] = 1;
        return pi;
    }
    ExactMatrix A(n, ExactVector(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) A[j][i] = P[i][j] - (i == j ? 1 : 0);
    for (std::size_t j = 0; j < n; ++j) A[n - 1][j] = 1;
    ExactVector rhs(n, Rational(0));
    rhs[n - 1] = 1;
    return solve(std::move(A), std::move(rhs));
}

inline ExactVector step(const ExactMatrix& P, const ExactVector& mu)
{
    const std::size_t n = P.size();
    ExactVector out(n, Rational(0));
    for (std::size_t i = 0; i < n; ++i) {
        if (mu[i] == 0) continue;
        for (std::size_t j = 0; j < n; ++j)
            if (P[i][j] != 0) out[j] += mu[i] * P[i][j];
    }
    return out;
}

inline Rational half_l1(const ExactVector& mu, const ExactVector& nu)
{
    if (mu.size() != nu.size())
        throw Error(ErrorCode::DimensionMismatch, "distributions differ in dimension");
    Rational s = 0;
    for (std::size_t i = 0; i < mu.size(); ++i) s += abs(Rational(mu[i] - nu[i]));
    return s / 2;
}

/// max over all events A of |mu(A) - nu(A)|, by scanning every subset.
inline Rational exact_tv_by_subsets(const ExactVector& mu, const ExactVector& nu)
{
    if (mu.size() != nu.size())
        throw Error(ErrorCode::DimensionMismatch, "distributions differ in dimension");
    if (mu.size() > kMaxSubsetDimension)
        throw Error(ErrorCode::TooLarge, "subset scan limited to dimension 16");
    const std::size_t n = mu.size();
    ExactVector diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = mu[i] - nu[i];
    Rational best = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        Rational gap = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) gap += diff[i];
        gap = abs(gap);
        if (gap > best) best = gap;
    }
    return best;
}

struct ExactCurve {
    std::vector<std::int64_t> times;
    std::vector<Rational> distances;
    std::vector<StateLabel> worst_start;  // lowest canonical index attaining the maximum
    ExactVector stationary;

    std::vector<double> as_doubles() const
    {
        std::vector<double> out;
        for (const auto& d : distances) out.push_back(as_double(d));
        return out;
    }
};

/// Worst-case distance to stationarity for t = 0..t_max in exact arithmetic.
inline ExactCurve exact_curve(const ExactFitParams& params, std::int64_t t_max)
{
    const ExactFitParams p = validate_params(params);
    const StateSpace space = enumerate_states(p);
    check_size(space.size());
    if (t_max < 0 || t_max > kMaxSteps)
        throw Error(ErrorCode::TooLarge, "t_max must lie in [0, 200]");
    const ExactMatrix P = dense_kernel(p, space);

    ExactCurve out;
    out.stationary = stationary(p, P);
    const std::size_t n = space.size();
    std::vector<ExactVector> laws(n, ExactVector(n, Rational(0)));
    for (std::size_t s = 0; s < n; ++s) laws[s][s] = 1;
    for (std::int64_t t = 0; t <= t_max; ++t) {
        if (t > 0)
            for (auto& law : laws) law = step(P, law);
        Rational best = -1;
        std::size_t arg = 0;
        for (std::size_t s = 0; s < n; ++s) {
            const Rational d = half_l1(laws[s], out.stationary);
            if (d > best) {
                best = d;
                arg = s;
            }
        }
        out.times.push_back(t);
        out.distances.push_back(best);
        out.worst_start.push_back(space[arg]);
    }
    return out;
}

/// E_z[T_z^+] from the exact expected hitting times h(x) = 1 + sum_y P(x, y) h(y), h(z) = 0.
inline Rational exact_return_time(const ExactFitParams& params)
{
    const ExactFitParams p = validate_params(params);
    if (p.epsilon == 0)
        throw Error(ErrorCode::NotIrreducible, "epsilon = 0: the fruit is absorbing");
    const StateSpace space = enumerate_states(p);
    check_size(space.size());
    const ExactMatrix P = dense_kernel(p, space);
    const std::size_t z = space.fruit();

    // unknowns h(0..z-1)
    ExactMatrix A(z, ExactVector(z, Rational(0)));
    ExactVector rhs(z, Rational(1));
    for (std::size_t i = 0; i < z; ++i) {
        A[i][i] = 1;
        for (std::size_t j = 0; j < z; ++j) A[i][j] -= P[i][j];
    }
    const ExactVector h = solve(std::move(A), std::move(rhs));
    Rational mean = 1;
    for (std::size_t j = 0; j < z; ++j) mean += P[z][j] * h[j];
    return mean;
}

} // namespace fitchain::oracle
