#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

#include "fitchain/error.hpp"
#include "fitchain/mixing.hpp"
#include "fitchain/params.hpp"
#include "fitchain/profile.hpp"
#include "fitchain/rational.hpp"

namespace fitchain {

namespace detail {

inline BigInt big_pow(std::int64_t base, unsigned exponent)
{
    BigInt b = base;
    return boost::multiprecision::pow(b, exponent);
}

/// Largest m with m^r <= n^i, i.e. floor(n^(i/r)).
inline std::int64_t floor_rational_power(std::int64_t n, unsigned i, unsigned r)
{
    const BigInt target = big_pow(n, i);
    auto m = static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(n), static_cast<double>(i) / r)));
    m = std::max<std::int64_t>(m, 0);
    while (m > 0 && big_pow(m, r) > target) --m;
    while (big_pow(m + 1, r) <= target) ++m;
    return m;
}

/// Smallest m with (m 2^(q-1))^q >= n, i.e. ceil(n^(1/q) 2^(1-q)).
inline std::int64_t ceil_scaled_root(std::int64_t n, unsigned q)
{
    const BigInt target = n;
    const std::int64_t scale = std::int64_t{1} << (q - 1);
    auto m = static_cast<std::int64_t>(std::ceil(std::pow(static_cast<double>(n), 1.0 / q) / static_cast<double>(scale)));
    m = std::max<std::int64_t>(m, 1);
    while (m > 1 && big_pow((m - 1) * scale, q) >= target) --m;
    while (big_pow(m * scale, q) < target) ++m;
    return m;
}

inline int floor_log_log(std::int64_t n)
{
    return static_cast<int>(std::floor(std::log(std::log(static_cast<double>(n)))));
}

/// 2^-n, floored at 2^-40.
inline Rational gallery_epsilon(std::int64_t n)
{
    return pow2(-static_cast<int>(std::min<std::int64_t>(n, 40)));
}

} // namespace detail

struct GalleryParams {
    ExactFitParams exact;
    FitParams params;
    std::vector<std::string> flags;
    std::vector<std::int64_t> m;  // nested windows only: increments m_1..m_{k/2}
    int covered = 0;              // nested windows only: last index with m_i defined directly
};

namespace detail {

inline GalleryParams finish_gallery(ExactLayout layout, std::int64_t n, std::vector<std::string> flags)
{
    GalleryParams out;
    out.exact = validate_params(make_params(std::move(layout), gallery_epsilon(n)));
    out.params = validate_params(to_float(out.exact));
    out.flags = std::move(flags);
    if (n > 40) out.flags.push_back("epsilon_floor");
    return out;
}

} // namespace detail

/// Trunk n, k = floor(ln ln n) (or the override) branches of length floor(n^(i/(k+1))), equal weights.
/// Colliding lengths at small n are bumped to the next free integer and flagged.
inline GalleryParams uncountable_windows_params(std::int64_t n, std::optional<int> k_override = std::nullopt)
{
    if (n < 8)
        throw Error(ErrorCode::InvalidArgument, "n must be >= 8");
    const int k = k_override ? *k_override : detail::floor_log_log(n);
    if (k < 2)
        throw Error(ErrorCode::KTooSmall, "k = " + std::to_string(k) + " < 2 (floor(ln ln n) needs n >= 1619)");
    if (n > 1'000'000'000)
        throw Error(ErrorCode::InvalidArgument, "n too large");

    ExactLayout layout;
    layout.k = k;
    layout.lengths.push_back(static_cast<int>(n));
    std::vector<std::string> flags;
    for (int i = 1; i <= k; ++i) {
        auto li = static_cast<int>(detail::floor_rational_power(n, static_cast<unsigned>(i), static_cast<unsigned>(k + 1)));
        if (i > 1 && li <= layout.lengths.back()) {
            li = layout.lengths.back() + 1;
            if (flags.empty()) flags.push_back("repaired_lengths");
        }
        layout.lengths.push_back(std::max(li, 1));
        layout.weights.emplace_back(1, k);
    }
    return detail::finish_gallery(std::move(layout), n, std::move(flags));
}

/// Trunk 2n, k = 2^(L+1) equal-weight branches whose lengths n -+ (m_1 + ... + m_i) sit
/// symmetrically around n. m_i = ceil(n^(1/q) 2^(1-q)) for L 2^(1-q) <= i <= L 2^(2-q), 2 <= q <= L;
/// shared endpoints take the smaller q, and indices past the last covered one reuse its m.
inline GalleryParams nested_windows_params(std::int64_t n)
{
    if (n < 8)
        throw Error(ErrorCode::InvalidArgument, "n must be >= 8");
    if (n > 100'000'000)
        throw Error(ErrorCode::InvalidArgument, "n too large");
    const int L = detail::floor_log_log(n);
    if (L < 2)
        throw Error(ErrorCode::LTooSmall, "L = floor(ln ln n) = " + std::to_string(L) + " < 2");
    const int k = 1 << (L + 1);
    const int half = k / 2;

    std::vector<std::int64_t> m(static_cast<std::size_t>(half) + 1, 0);  // 1-based
    std::vector<std::string> flags;
    bool overlap = false;
    int covered = 0;
    for (int q = L; q >= 2; --q) {  // larger q first so smaller q overwrites shared endpoints
        const double lo = std::ldexp(static_cast<double>(L), 1 - q);
        const double hi = std::ldexp(static_cast<double>(L), 2 - q);
        const std::int64_t mq = detail::ceil_scaled_root(n, static_cast<unsigned>(q));
        for (int i = std::max(1, static_cast<int>(std::ceil(lo))); i <= std::min(half, static_cast<int>(std::floor(hi))); ++i) {
            if (m[static_cast<std::size_t>(i)] != 0) overlap = true;
            m[static_cast<std::size_t>(i)] = mq;
            covered = std::max(covered, i);
        }
    }
    for (int i = 1; i <= half; ++i) {
        if (m[static_cast<std::size_t>(i)] == 0 && i < covered)
            throw Error(ErrorCode::SolveFailed, "increment m_" + std::to_string(i) + " left undefined");
    }
    if (overlap) flags.push_back("range_overlap_smaller_q");
    if (covered < half) {
        flags.push_back("extended_m_beyond_" + std::to_string(covered));
        for (int i = covered + 1; i <= half; ++i) m[static_cast<std::size_t>(i)] = m[static_cast<std::size_t>(covered)];
    }

    ExactLayout layout;
    layout.k = k;
    layout.lengths.assign(static_cast<std::size_t>(k) + 1, 0);
    layout.lengths[0] = static_cast<int>(2 * n);
    std::int64_t sum = 0;
    for (int i = 1; i <= half; ++i) {
        sum += m[static_cast<std::size_t>(i)];
        if (sum >= n)
            throw Error(ErrorCode::InvalidArgument, "increments exhaust n; branch lengths would not be positive");
        layout.lengths[static_cast<std::size_t>(half + i)] = static_cast<int>(n + sum);
        layout.lengths[static_cast<std::size_t>(half + 1 - i)] = static_cast<int>(n - sum);
    }
    layout.weights.assign(static_cast<std::size_t>(k), Rational(1, k));

    GalleryParams out = detail::finish_gallery(std::move(layout), n, std::move(flags));
    out.m.assign(m.begin() + 1, m.end());
    out.covered = covered;
    return out;
}

/// Stern's diatomic sequence.
inline std::int64_t fusc(std::int64_t m)
{
    std::int64_t a = 1, b = 0;  // fusc(m) = a fusc(x) + b fusc(x + 1) along the reduction
    while (m > 0) {
        if (m % 2 == 0) {
            a += b;
        } else {
            b += a;
        }
        m /= 2;
    }
    return b;
}

/// m-th positive rational in Calkin-Wilf order, m >= 1: 1, 1/2, 2, 1/3, 3/2, ...
inline Rational calkin_wilf(std::int64_t m)
{
    return Rational(BigInt(fusc(m)), BigInt(fusc(m + 1)));
}

/// Bijection N -> Q: 0, 1, -1, 1/2, -1/2, 2, -2, ...
inline Rational rational_at(std::int64_t index)
{
    if (index == 0) return Rational(0);
    const std::int64_t m = (index + 1) / 2;
    const Rational r = calkin_wilf(m);
    return index % 2 == 1 ? r : Rational(-r);
}

/// Inverse Cantor pairing: j -> (a, b) with j = (a+b)(a+b+1)/2 + b.
inline std::pair<std::int64_t, std::int64_t> cantor_unpair(std::int64_t j)
{
    auto w = static_cast<std::int64_t>((std::sqrt(8.0 * static_cast<double>(j) + 1.0) - 1.0) / 2.0);
    while (w * (w + 1) / 2 > j) --w;
    while ((w + 1) * (w + 2) / 2 <= j) ++w;
    const std::int64_t b = j - w * (w + 1) / 2;
    return {w - b, b};
}

struct DenseMember {
    int k = 1;
    std::vector<Rational> breakpoints;  // q_0 < q_1 < ... < q_k
    ProfileSpec profile;

    friend bool operator==(const DenseMember&, const DenseMember&) = default;
};

/// The index-th piecewise-affine profile: 1 before q_0, 1 - i/k at q_i, affine in between, 0 from q_k.
/// index + 1 = 2^a (2b + 1) selects k = a + 1 and the b-th (k+1)-tuple of naturals (iterated Cantor
/// unpairing); the first entry gives q_0 through a fixed enumeration of Q, the others the gaps
/// q_i - q_{i-1} through the Calkin-Wilf enumeration of the positive rationals.
inline DenseMember dense_family(std::int64_t index)
{
    if (index < 0)
        throw Error(ErrorCode::InvalidArgument, "index must be >= 0");
    std::int64_t rest = index + 1;
    int a = 0;
    while (rest % 2 == 0) {
        rest /= 2;
        ++a;
    }
    const std::int64_t b = (rest - 1) / 2;

    DenseMember out;
    out.k = a + 1;
    std::vector<std::int64_t> tuple;
    std::int64_t j = b;
    for (int i = 0; i < out.k; ++i) {
        const auto [head, tail] = cantor_unpair(j);
        tuple.push_back(head);
        j = tail;
    }
    tuple.push_back(j);

    Rational q = rational_at(tuple[0]);
    out.breakpoints.push_back(q);
    for (int i = 1; i <= out.k; ++i) {
        q += calkin_wilf(tuple[static_cast<std::size_t>(i)] + 1);
        out.breakpoints.push_back(q);
    }
    std::vector<ProfileSample> samples;
    for (int i = 0; i <= out.k; ++i)
        samples.push_back({as_double(out.breakpoints[static_cast<std::size_t>(i)]),
                           1.0 - static_cast<double>(i) / static_cast<double>(out.k)});
    out.profile = ProfileSpec(std::move(samples));
    return out;
}

/// Anti-diagonal enumeration of pairs of positive integers: 1 -> (1,1), 2 -> (1,2), 3 -> (2,1), 4 -> (1,3), ...
inline std::pair<std::int64_t, std::int64_t> interleave(std::int64_t step)
{
    if (step < 1)
        throw Error(ErrorCode::InvalidArgument, "step must be >= 1");
    const auto [a, b] = cantor_unpair(step - 1);  // a + b = diagonal - 1
    return {b + 1, a + 1};
}

struct Prediction {
    std::int64_t time;
    double value;
    std::string provenance;
};

struct Measurement {
    std::int64_t time;
    double distance;
};

struct GridPoint {
    double scale;  // alpha, q, or w_n
    double c;
    std::int64_t time;
};

struct GalleryReport {
    std::string name;
    ExactFitParams params;
    std::vector<GridPoint> grid;
    std::vector<Prediction> predicted;
    std::vector<Measurement> measured;
    double max_gap = 0.0;  // against the finite-n ground truth
    std::vector<std::string> flags;
};

namespace detail {

inline std::vector<double> root_curve(const FitParams& params, std::int64_t t_max)
{
    return distance_curve(params, t_max, WorstStartMode::RootStart).distances;
}

} // namespace detail

/// Distance at floor(n + c n^alpha) against the finite-n value F(t) and the limit (1 or 1 - alpha).
inline GalleryReport verify_uncountable(std::int64_t n, std::optional<int> k_override, const std::vector<double>& alphas,
                                        const std::vector<double>& cs)
{
    const GalleryParams g = uncountable_windows_params(n, k_override);
    const auto F = fgF_from_params(g.params);
    GalleryReport r;
    r.name = "uncountable";
    r.params = g.exact;
    r.flags = g.flags;
    std::int64_t t_max = 0;
    for (double alpha : alphas)
        for (double c : cs) {
            const auto t = static_cast<std::int64_t>(std::floor(static_cast<double>(n) + c * std::pow(static_cast<double>(n), alpha)));
            if (t < 0)
                throw Error(ErrorCode::InvalidArgument, "grid point before time 0");
            r.grid.push_back({alpha, c, t});
            t_max = std::max(t_max, t);
        }
    const auto d = detail::root_curve(g.params, t_max);
    for (const auto& gp : r.grid) {
        const double truth = F.F(gp.time);
        r.predicted.push_back({gp.time, truth, "finite_n_F"});
        r.predicted.push_back({gp.time, gp.c <= 0 ? 1.0 : 1.0 - gp.scale, "limit"});
        const double measured = d[static_cast<std::size_t>(gp.time)];
        r.measured.push_back({gp.time, measured});
        r.max_gap = std::max(r.max_gap, std::abs(measured - truth));
    }
    return r;
}

/// Limit of 2^q (d(floor(3n + c n^(1/q))) - 1/2), reading the undefined x in the statement as c.
inline double nested_limit(double c)
{
    if (c <= -1.0) return 2.0;
    if (c < 0.0) return 1.0 - c;
    if (c == 0.0) return 0.0;
    if (c < 1.0) return -1.0 - c;
    return -2.0;
}

/// Rescaled distance 2^q (d - 1/2) at floor(3n + c n^(1/q)) against its finite-n and limiting values.
inline GalleryReport verify_nested(std::int64_t n, const std::vector<int>& qs, const std::vector<double>& cs)
{
    const GalleryParams g = nested_windows_params(n);
    const auto F = fgF_from_params(g.params);
    GalleryReport r;
    r.name = "nested";
    r.params = g.exact;
    r.flags = g.flags;
    r.flags.push_back("limit_reads_x_as_c");
    std::int64_t t_max = 0;
    for (int q : qs) {
        if (q < 2)
            throw Error(ErrorCode::InvalidArgument, "q must be >= 2");
        for (double c : cs) {
            const auto t = static_cast<std::int64_t>(
                std::floor(3.0 * static_cast<double>(n) + c * std::pow(static_cast<double>(n), 1.0 / q)));
            r.grid.push_back({static_cast<double>(q), c, t});
            t_max = std::max(t_max, t);
        }
    }
    const auto d = detail::root_curve(g.params, t_max);
    for (const auto& gp : r.grid) {
        const double scale = std::ldexp(1.0, static_cast<int>(gp.scale));
        const double truth = scale * (F.F(gp.time) - 0.5);
        const double measured = scale * (d[static_cast<std::size_t>(gp.time)] - 0.5);
        r.predicted.push_back({gp.time, truth, "finite_n_F_rescaled"});
        r.predicted.push_back({gp.time, nested_limit(gp.c), "limit_x_as_c"});
        r.measured.push_back({gp.time, measured});
        r.max_gap = std::max(r.max_gap, std::abs(measured - truth));
    }
    return r;
}

/// Realizes dense_family(index) at t_n = n, w_n = ceil(sqrt n) and compares d with a(c) on the window grid.
inline GalleryReport verify_dense(std::int64_t index, int n, const ProfileChainOptions& options = {})
{
    if (n < 4)
        throw Error(ErrorCode::InvalidArgument, "n must be >= 4");
    const DenseMember member = dense_family(index);
    const std::int64_t t_n = n;
    auto w = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    while ((w - 1) * (w - 1) >= n) --w;
    while (w * w < n) ++w;
    const ProfileChain chain = build_profile_chain(member.profile, t_n, static_cast<double>(w), n, options);

    GalleryReport r;
    r.name = "dense";
    r.params = chain.exact;
    r.flags = chain.flags;
    r.flags.push_back("index_" + std::to_string(index) + "_k_" + std::to_string(member.k));
    const auto lo = static_cast<std::int64_t>(std::floor(static_cast<double>(t_n) - chain.v_n)) + 1;
    const auto hi = static_cast<std::int64_t>(std::ceil(static_cast<double>(t_n) + chain.v_n)) - 1;
    const auto d = detail::root_curve(chain.params, hi);
    for (std::int64_t t = std::max<std::int64_t>(lo, 0); t <= hi; ++t) {
        const double c = static_cast<double>(t - t_n) / static_cast<double>(w);
        const double target = member.profile(c);
        r.grid.push_back({static_cast<double>(w), c, t});
        r.predicted.push_back({t, target, "profile"});
        r.measured.push_back({t, d[static_cast<std::size_t>(t)]});
        r.max_gap = std::max(r.max_gap, std::abs(d[static_cast<std::size_t>(t)] - target));
    }
    return r;
}

} // namespace fitchain
