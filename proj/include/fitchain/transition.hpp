#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "fitchain/params.hpp"
#include "fitchain/state_space.hpp"

namespace fitchain {

template <class Real>
struct TransitionEntry {
    std::size_t column;
    Real probability;
};

/// Row-major sparse stochastic matrix (CSR). Rows follow the canonical state order.
template <class Real>
class BasicTransitionMatrix {
public:
    using Entry = TransitionEntry<Real>;

    BasicTransitionMatrix() = default;

    explicit BasicTransitionMatrix(const std::vector<std::vector<Entry>>& rows)
    {
        offsets_.reserve(rows.size() + 1);
        offsets_.push_back(0);
        for (const auto& row : rows) {
            entries_.insert(entries_.end(), row.begin(), row.end());
            offsets_.push_back(entries_.size());
        }
    }

    std::size_t dimension() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t nonzeros() const { return entries_.size(); }

    std::span<const Entry> row(std::size_t i) const
    {
        return {entries_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }

    Real at(std::size_t i, std::size_t j) const
    {
        for (const auto& e : row(i))
            if (e.column == j) return e.probability;
        return Real(0);
    }

    Real row_sum(std::size_t i) const
    {
        Real s = 0;
        for (const auto& e : row(i)) s += e.probability;
        return s;
    }

private:
    std::vector<std::size_t> offsets_;
    std::vector<Entry> entries_;
};

using TransitionMatrix = BasicTransitionMatrix<double>;

/// Materializes the FIT transition kernel. Entries that evaluate to zero (limit mode) are omitted.
template <class Real>
BasicTransitionMatrix<Real> build_transition_matrix(const BasicFitParams<Real>& params, const StateSpace& space)
{
    using Entry = TransitionEntry<Real>;
    const Real eps = params.epsilon;
    const Real eta = params.eta();
    const int l0 = params.trunk_length();
    const int k = params.k;
    const std::size_t z = space.fruit();
    const std::size_t top = space.trunk_top();

    std::vector<std::vector<Entry>> rows(space.size());
    auto add = [&](std::size_t from, std::size_t to, const Real& p) {
        if (p == 0) return;
        rows[from].push_back(Entry{to, p});
    };

    add(0, 0, eps);
    for (int j = 0; j < l0; ++j) {
        const auto lo = static_cast<std::size_t>(j);
        add(lo, lo + 1, eta);
        add(lo + 1, lo, eps);
    }
    add(z, z, eta);

    for (int i = 1; i <= k; ++i) {
        const int li = params.branch_length(i);
        const Real& rho = params.weight(i);
        if (li >= 2) {
            const std::size_t first = space.branch_entry(i);
            const std::size_t last = space.branch_exit(i);
            add(top, first, eta * rho);
            add(first, top, eps);
            for (std::size_t s = first; s < last; ++s) {
                add(s, s + 1, eta);
                add(s + 1, s, eps);
            }
            add(last, z, eta);
            add(z, last, eps * rho);
        } else {
            add(top, z, eta * rho);
            add(z, top, eps * rho);
        }
    }

    for (auto& row : rows)
        std::sort(row.begin(), row.end(), [](const Entry& a, const Entry& b) { return a.column < b.column; });
    return BasicTransitionMatrix<Real>(rows);
}

template <class Real>
BasicTransitionMatrix<Real> build_transition_matrix(const BasicFitParams<Real>& params)
{
    return build_transition_matrix(params, enumerate_states(params));
}

} // namespace fitchain
