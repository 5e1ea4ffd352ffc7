#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fitchain/error.hpp"
#include "fitchain/params.hpp"
#include "fitchain/rational.hpp"

namespace fitchain {

template <class Real>
struct Breakpoint {
    std::int64_t t;
    Real value;

    friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

/// Weakly decreasing step function on the naturals, stored as its jumps.
/// The value is 1 before the first breakpoint; each breakpoint gives the value
/// on [t, next t), and the last value holds forever after.
template <class Real>
class BasicStepProfile {
public:
    BasicStepProfile() = default;

    static BasicStepProfile from_breakpoints(std::vector<Breakpoint<Real>> breakpoints)
    {
        Real previous = 1;
        std::int64_t previous_t = -1;
        for (const auto& b : breakpoints) {
            if (b.t <= previous_t)
                throw Error(ErrorCode::InvalidProfile, "breakpoint times must be strictly increasing");
            if (b.value < 0 || !(b.value < previous))
                throw Error(ErrorCode::InvalidProfile, "breakpoint values must strictly decrease from 1 and stay >= 0");
            previous = b.value;
            previous_t = b.t;
        }
        BasicStepProfile f;
        f.breakpoints_ = std::move(breakpoints);
        return f;
    }

    /// Values f(0), f(1), ..., f(T); the last one extends to infinity.
    static BasicStepProfile from_values(const std::vector<Real>& values)
    {
        std::vector<Breakpoint<Real>> bps;
        Real current = 1;
        for (std::size_t t = 0; t < values.size(); ++t) {
            if (values[t] > current || values[t] < 0)
                throw Error(ErrorCode::InvalidProfile, "values must be weakly decreasing in [0, 1]");
            if (values[t] < current) {
                bps.push_back({static_cast<std::int64_t>(t), values[t]});
                current = values[t];
            }
        }
        BasicStepProfile f;
        f.breakpoints_ = std::move(bps);
        return f;
    }

    /// Adopts breakpoints already known to be well formed.
    static BasicStepProfile unchecked(std::vector<Breakpoint<Real>> breakpoints)
    {
        BasicStepProfile f;
        f.breakpoints_ = std::move(breakpoints);
        return f;
    }

    const std::vector<Breakpoint<Real>>& breakpoints() const { return breakpoints_; }

    Real operator()(std::int64_t t) const
    {
        auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t,
                                   [](std::int64_t x, const Breakpoint<Real>& b) { return x < b.t; });
        if (it == breakpoints_.begin()) return Real(1);
        return std::prev(it)->value;
    }

    friend bool operator==(const BasicStepProfile&, const BasicStepProfile&) = default;

private:
    std::vector<Breakpoint<Real>> breakpoints_;
};

using StepProfile = BasicStepProfile<double>;
using ExactStepProfile = BasicStepProfile<Rational>;

/// Deterministic-limit quantities of a layout: g puts mass rho_i at t_i = l0 + l_i,
/// G is its cumulative sum and F = 1 - G.
template <class Real>
struct FgF {
    std::vector<std::int64_t> jump_times;
    std::vector<Real> masses;
    BasicStepProfile<Real> F;

    Real g(std::int64_t t) const
    {
        for (std::size_t i = 0; i < jump_times.size(); ++i)
            if (jump_times[i] == t) return masses[i];
        return Real(0);
    }

    Real G(double x) const
    {
        if (x < 0) return Real(0);
        return Real(1) - F(static_cast<std::int64_t>(std::floor(x)));
    }
};

template <class Real>
FgF<Real> fgF_from_params(const BasicLayout<Real>& params)
{
    FgF<Real> out;
    const std::int64_t l0 = params.trunk_length();
    Real cumulative = 0;
    std::vector<Breakpoint<Real>> bps;
    for (int i = 1; i <= params.k; ++i) {
        const std::int64_t ti = l0 + params.branch_length(i);
        out.jump_times.push_back(ti);
        out.masses.push_back(params.weight(i));
        cumulative += params.weight(i);
        bps.push_back({ti, i == params.k ? Real(0) : Real(1) - cumulative});
    }
    out.F = BasicStepProfile<Real>::unchecked(std::move(bps));
    return out;
}

struct ProfileStats {
    std::int64_t L;  // last time with value 1
    std::int64_t M;  // last time with positive value
    std::int64_t W;  // M - L
};

/// L, M, W of a class-A profile (weakly decreasing, image strictly containing {0, 1}).
template <class Real>
ProfileStats profile_stats(const BasicStepProfile<Real>& f)
{
    const auto& bps = f.breakpoints();
    if (bps.empty() || bps.front().t == 0)
        throw Error(ErrorCode::NotClassA, "profile never takes the value 1");
    if (bps.back().value != 0)
        throw Error(ErrorCode::NotClassA, "profile never reaches 0");
    if (bps.size() < 2)
        throw Error(ErrorCode::NotClassA, "profile has no value strictly between 0 and 1");
    const std::int64_t L = bps.front().t - 1;
    const std::int64_t M = bps.back().t - 1;
    return {L, M, M - L};
}

template <class Real>
bool is_class_b(const BasicStepProfile<Real>& f)
{
    try {
        const auto s = profile_stats(f);
        return s.W <= s.L;
    } catch (const Error&) {
        return false;
    }
}

/// Inverse of the forward map: l0 = L(f), t_i the first time f takes its i-th value,
/// l_i = t_i - l0 and rho_i the size of the i-th drop. The tuple is returned as computed;
/// at the class-B boundary W = L it has l_k = l0 + 1 and fails validate_layout.
template <class Real>
BasicLayout<Real> params_from_step(const BasicStepProfile<Real>& f)
{
    const auto stats = profile_stats(f);
    if (stats.W > stats.L)
        throw Error(ErrorCode::NotClassB,
                    "W = " + std::to_string(stats.W) + " exceeds L = " + std::to_string(stats.L));
    const auto& bps = f.breakpoints();
    BasicLayout<Real> out;
    out.k = static_cast<int>(bps.size());
    out.lengths.push_back(static_cast<int>(stats.L));
    Real previous = 1;
    for (const auto& b : bps) {
        out.lengths.push_back(static_cast<int>(b.t - stats.L));
        out.weights.push_back(previous - b.value);
        previous = b.value;
    }
    return out;
}

struct ProfileSample {
    double c;
    double p;

    friend bool operator==(const ProfileSample&, const ProfileSample&) = default;
};

/// Target profile as a breakpoint table with monotone piecewise-linear interpolation.
/// Left of the table the profile is 1, right of it 0.
class ProfileSpec {
public:
    ProfileSpec() = default;

    explicit ProfileSpec(std::vector<ProfileSample> samples) : samples_(std::move(samples))
    {
        if (samples_.empty())
            throw Error(ErrorCode::InvalidProfile, "profile table is empty");
        for (std::size_t i = 0; i < samples_.size(); ++i) {
            const auto& s = samples_[i];
            if (!std::isfinite(s.c) || !(s.p >= 0.0 && s.p <= 1.0))
                throw Error(ErrorCode::InvalidProfile, "profile values must lie in [0, 1]");
            if (i > 0 && !(s.c > samples_[i - 1].c))
                throw Error(ErrorCode::InvalidProfile, "profile abscissae must be strictly increasing");
            if (i > 0 && s.p > samples_[i - 1].p)
                throw Error(ErrorCode::InvalidProfile, "profile values must be weakly decreasing");
        }
    }

    const std::vector<ProfileSample>& samples() const { return samples_; }

    double operator()(double c) const
    {
        if (c < samples_.front().c) return 1.0;
        if (c > samples_.back().c) return 0.0;
        auto it = std::upper_bound(samples_.begin(), samples_.end(), c,
                                   [](double x, const ProfileSample& s) { return x < s.c; });
        const auto& lo = *std::prev(it);
        if (it == samples_.end()) return lo.p;
        const double u = (c - lo.c) / (it->c - lo.c);
        return lo.p + u * (it->p - lo.p);
    }

    friend bool operator==(const ProfileSpec&, const ProfileSpec&) = default;

private:
    std::vector<ProfileSample> samples_;
};

inline constexpr std::int64_t kQuantizationScale = 1'000'000'000'000;  // 12 decimal digits

/// Rounds a value in [0, 1] to 12 decimals, exactly representable as a rational.
inline Rational quantize_value(double v)
{
    v = std::clamp(v, 0.0, 1.0);
    const auto q = static_cast<std::int64_t>(std::llround(v * static_cast<double>(kQuantizationScale)));
    return Rational(q, kQuantizationScale);
}

struct WindowStep {
    ExactStepProfile profile;
    bool synthetic_midpoint = false;
};

/// Step function that is 1 up to t_n - v_n, samples p((t - t_n)/w_n) strictly inside
/// (t_n - v_n, t_n + v_n) and is 0 from t_n + v_n on. When the samples carry no value
/// strictly between 0 and 1, a single value 1/2 is placed where the drop happens.
inline WindowStep window_step_function(const ProfileSpec& p, std::int64_t t_n, double w_n, double v_n)
{
    if (!(w_n > 0.0) || !(v_n > 0.0) || t_n <= 0)
        throw Error(ErrorCode::InvalidArgument, "window parameters must be positive");
    if (v_n > static_cast<double>(t_n) / 3.0)
        throw Error(ErrorCode::WindowTooWide,
                    "v_n = " + std::to_string(v_n) + " exceeds t_n/3 = " + std::to_string(t_n / 3.0));

    const double left = static_cast<double>(t_n) - v_n;
    const double right = static_cast<double>(t_n) + v_n;
    const auto first = static_cast<std::int64_t>(std::floor(left)) + 1;  // first t with t > left
    const auto last = static_cast<std::int64_t>(std::ceil(right)) - 1;   // last t with t < right

    std::vector<Breakpoint<Rational>> bps;
    Rational current = 1;
    for (std::int64_t t = first; t <= last; ++t) {
        const Rational v = quantize_value(p(static_cast<double>(t - t_n) / w_n));
        if (v < current) {
            bps.push_back({t, v});
            current = v;
        }
    }
    if (current > 0) bps.push_back({last + 1, Rational(0)});

    WindowStep out;
    if (bps.size() == 1) {
        // no interior value: 1 up to the drop, then 1/2 for one step, then 0
        const std::int64_t drop = bps.front().t;
        bps = {{drop, Rational(1, 2)}, {drop + 1, Rational(0)}};
        out.synthetic_midpoint = true;
    }
    out.profile = ExactStepProfile::from_breakpoints(std::move(bps));
    return out;
}

inline constexpr double kDefaultWindowExponent = 1.0 / 8.0;

struct ProfileChainOptions {
    std::optional<double> eps_override;
    double exponent = kDefaultWindowExponent;  // v_n = w_n (t_n / w_n)^exponent
    bool limit_mode = false;
};

struct ProfileChain {
    ExactFitParams exact;
    FitParams params;
    ExactStepProfile target;
    double v_n = 0.0;
    std::vector<std::string> flags;
};

/// Default drift for index n: max(e^-n, 2^-40), as an exact dyadic rational.
inline Rational default_profile_epsilon(int n)
{
    const double e = std::exp(-static_cast<double>(n));
    const double floor = std::ldexp(1.0, -40);
    if (e > floor) return rational_from_double_exact(e);
    return pow2(-40);
}

/// Realizes the windowed target f_n as a FIT chain.
inline ProfileChain build_profile_chain(const ProfileSpec& p, std::int64_t t_n, double w_n, int n,
                                        const ProfileChainOptions& options = {})
{
    if (!(options.exponent > 0.0 && options.exponent < 1.0))
        throw Error(ErrorCode::InvalidArgument, "window exponent must lie in (0, 1)");
    if (!(w_n > 0.0) || t_n <= 0)
        throw Error(ErrorCode::InvalidArgument, "t_n and w_n must be positive");

    ProfileChain out;
    if (w_n > static_cast<double>(t_n) / 10.0) out.flags.push_back("window_regime_loose");
    out.v_n = w_n * std::pow(static_cast<double>(t_n) / w_n, options.exponent);

    auto window = window_step_function(p, t_n, w_n, out.v_n);
    if (window.synthetic_midpoint) out.flags.push_back("synthetic_midpoint");
    out.target = std::move(window.profile);

    Rational eps = options.eps_override ? rational_from_double_decimal(*options.eps_override)
                                        : default_profile_epsilon(n);
    out.exact = validate_params(make_params(params_from_step(out.target), eps, options.limit_mode));
    out.params = validate_params(to_float(out.exact));
    return out;
}

} // namespace fitchain
