#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fitchain/error.hpp"
#include "fitchain/rational.hpp"

namespace fitchain {

/// Branch layout (k, lengths, weights): the tree shape without the drift parameter.
/// `lengths` holds (l0, l1, ..., lk) with l0 the trunk; `weights` holds (rho1, ..., rhok).
template <class Real>
struct BasicLayout {
    int k = 0;
    std::vector<int> lengths;
    std::vector<Real> weights;

    int trunk_length() const { return lengths.at(0); }
    int branch_length(int i) const { return lengths.at(static_cast<std::size_t>(i)); }
    const Real& weight(int i) const { return weights.at(static_cast<std::size_t>(i - 1)); }
};

/// A complete FIT chain description: layout plus backward-drift rate epsilon.
/// Epsilon may be 0 only in limit mode, where the chain absorbs at the fruit.
template <class Real>
struct BasicFitParams : BasicLayout<Real> {
    Real epsilon{};
    bool limit_mode = false;

    Real eta() const { return Real(1) - epsilon; }
};

using Layout = BasicLayout<double>;
using ExactLayout = BasicLayout<Rational>;
using FitParams = BasicFitParams<double>;
using ExactFitParams = BasicFitParams<Rational>;

inline constexpr double kFloatWeightTolerance = 1e-12;

namespace detail {

template <class Real>
void validate_shape(const BasicLayout<Real>& p)
{
    if (p.k < 2)
        throw Error(ErrorCode::BranchCountTooSmall, "k = " + std::to_string(p.k) + ", need k >= 2");
    if (p.lengths.size() != static_cast<std::size_t>(p.k) + 1)
        throw Error(ErrorCode::LengthsNotStrictlyIncreasing,
                    "expected " + std::to_string(p.k + 1) + " lengths (l0..lk), got " +
                        std::to_string(p.lengths.size()));
    if (p.lengths[1] < 1)
        throw Error(ErrorCode::LengthsNotStrictlyIncreasing, "l1 must be >= 1");
    for (int i = 2; i <= p.k; ++i) {
        if (p.lengths[static_cast<std::size_t>(i)] <= p.lengths[static_cast<std::size_t>(i - 1)])
            throw Error(ErrorCode::LengthsNotStrictlyIncreasing,
                        "l" + std::to_string(i) + " <= l" + std::to_string(i - 1));
    }
    if (p.lengths[0] < p.lengths[static_cast<std::size_t>(p.k)])
        throw Error(ErrorCode::TrunkNotMaximal,
                    "l0 = " + std::to_string(p.lengths[0]) + " < lk = " +
                        std::to_string(p.lengths[static_cast<std::size_t>(p.k)]));
}

} // namespace detail

/// Checks a layout against the parameter-set constraints. Float weights within
/// 1e-12 of summing to one are renormalized; rational weights must sum to one exactly.
template <class Real>
BasicLayout<Real> validate_layout(BasicLayout<Real> p)
{
    detail::validate_shape(p);
    if (p.weights.size() != static_cast<std::size_t>(p.k))
        throw Error(ErrorCode::WeightsInvalid,
                    "expected " + std::to_string(p.k) + " weights, got " + std::to_string(p.weights.size()));
    Real total = 0;
    for (const auto& w : p.weights) {
        if (!(w > 0))
            throw Error(ErrorCode::WeightsInvalid, "weights must be strictly positive");
        total += w;
    }
    if constexpr (std::is_floating_point_v<Real>) {
        if (!std::isfinite(total) || std::abs(total - 1.0) > kFloatWeightTolerance)
            throw Error(ErrorCode::WeightsInvalid, "weights sum to " + std::to_string(total) + ", not 1");
        if (total != 1.0)
            for (auto& w : p.weights) w /= total;
    } else {
        if (total != 1)
            throw Error(ErrorCode::WeightsInvalid, "weights sum to " + to_string(total) + ", not exactly 1");
    }
    return p;
}

template <class Real>
BasicFitParams<Real> validate_params(BasicFitParams<Real> p)
{
    BasicLayout<Real>& layout = p;
    layout = validate_layout(layout);
    if constexpr (std::is_floating_point_v<Real>) {
        if (!std::isfinite(p.epsilon))
            throw Error(ErrorCode::EpsilonOutOfRange, "epsilon is not finite");
    }
    const Real half = Real(1) / Real(2);
    if (p.epsilon < 0 || !(p.epsilon < half))
        throw Error(ErrorCode::EpsilonOutOfRange, "epsilon must lie in [0, 1/2)");
    if (p.epsilon == 0 && !p.limit_mode)
        throw Error(ErrorCode::EpsilonOutOfRange, "epsilon = 0 requires limit mode");
    return p;
}

/// Rational weights whose float-origin sum is within 1e-12 of one are rescaled exactly.
inline ExactLayout renormalize_float_origin(ExactLayout p)
{
    Rational total = 0;
    for (const auto& w : p.weights) total += w;
    if (total != 1 && total > 0 && std::abs(as_double(Rational(total - 1))) <= kFloatWeightTolerance)
        for (auto& w : p.weights) w /= total;
    return p;
}

template <class Real>
BasicFitParams<Real> make_params(BasicLayout<Real> layout, Real epsilon, bool limit_mode = false)
{
    BasicFitParams<Real> p;
    static_cast<BasicLayout<Real>&>(p) = std::move(layout);
    p.epsilon = std::move(epsilon);
    p.limit_mode = limit_mode;
    return p;
}

inline FitParams to_float(const ExactFitParams& exact)
{
    FitParams p;
    p.k = exact.k;
    p.lengths = exact.lengths;
    p.weights.reserve(exact.weights.size());
    for (const auto& w : exact.weights) p.weights.push_back(as_double(w));
    p.epsilon = as_double(exact.epsilon);
    p.limit_mode = exact.limit_mode;
    return p;
}

inline Layout to_float(const ExactLayout& exact)
{
    Layout p;
    p.k = exact.k;
    p.lengths = exact.lengths;
    for (const auto& w : exact.weights) p.weights.push_back(as_double(w));
    return p;
}

/// Exact counterpart of float params, reading each value through its shortest decimal form.
inline ExactFitParams to_exact(const FitParams& p)
{
    ExactFitParams exact;
    exact.k = p.k;
    exact.lengths = p.lengths;
    for (double w : p.weights) exact.weights.push_back(rational_from_double_decimal(w));
    ExactLayout& layout = exact;
    layout = renormalize_float_origin(layout);
    exact.epsilon = rational_from_double_decimal(p.epsilon);
    exact.limit_mode = p.limit_mode;
    return exact;
}

} // namespace fitchain
