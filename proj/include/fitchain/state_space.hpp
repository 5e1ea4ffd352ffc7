#pragma once

#include <charconv>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fitchain/error.hpp"
#include "fitchain/params.hpp"

namespace fitchain {

/// Trunk(j) is x_j, Branch(i, j) is y_j^i (j counts steps from the root), Fruit is z.
struct StateLabel {
    enum class Kind : std::uint8_t { Trunk, Branch, Fruit };

    Kind kind = Kind::Trunk;
    int branch = 0;
    int level = 0;

    static constexpr StateLabel trunk(int j) { return {Kind::Trunk, 0, j}; }
    static constexpr StateLabel on_branch(int i, int j) { return {Kind::Branch, i, j}; }
    static constexpr StateLabel fruit() { return {Kind::Fruit, 0, 0}; }

    bool is_root() const { return kind == Kind::Trunk && level == 0; }

    friend constexpr auto operator<=>(const StateLabel&, const StateLabel&) = default;
};

/// "x3", "y7^2", "z".
inline std::string to_string(const StateLabel& s)
{
    switch (s.kind) {
    case StateLabel::Kind::Trunk: return "x" + std::to_string(s.level);
    case StateLabel::Kind::Branch: return "y" + std::to_string(s.level) + "^" + std::to_string(s.branch);
    case StateLabel::Kind::Fruit: return "z";
    }
    return "?";
}

/// Accepts the forms produced by to_string, plus "root" for x0 and "fruit" for z.
inline StateLabel parse_state_label(std::string_view text)
{
    auto fail = [&] { return Error(ErrorCode::UnknownState, "cannot parse state label '" + std::string(text) + "'"); };
    auto parse_int = [&](std::string_view s) {
        int value = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
            throw fail();
        return value;
    };
    if (text == "z" || text == "fruit")
        return StateLabel::fruit();
    if (text == "root")
        return StateLabel::trunk(0);
    if (text.size() >= 2 && text[0] == 'x')
        return StateLabel::trunk(parse_int(text.substr(1)));
    if (text.size() >= 4 && text[0] == 'y') {
        const auto caret = text.find('^');
        if (caret == std::string_view::npos)
            throw fail();
        const int j = parse_int(text.substr(1, caret - 1));
        const int i = parse_int(text.substr(caret + 1));
        return StateLabel::on_branch(i, j);
    }
    throw fail();
}

/// Canonical enumeration: trunk x0..x_l0, then branch 1..k each by ascending level, then the fruit.
class StateSpace {
public:
    StateSpace() = default;

    explicit StateSpace(std::vector<int> lengths) : lengths_(std::move(lengths))
    {
        const int l0 = lengths_.at(0);
        const int k = static_cast<int>(lengths_.size()) - 1;
        states_.reserve(count(lengths_));
        for (int j = 0; j <= l0; ++j) states_.push_back(StateLabel::trunk(j));
        branch_offset_.assign(static_cast<std::size_t>(k) + 1, 0);
        for (int i = 1; i <= k; ++i) {
            branch_offset_[static_cast<std::size_t>(i)] = states_.size();
            for (int j = l0 + 1; j <= l0 + lengths_[static_cast<std::size_t>(i)] - 1; ++j)
                states_.push_back(StateLabel::on_branch(i, j));
        }
        states_.push_back(StateLabel::fruit());
    }

    /// (l0 + 1) + sum_i (l_i - 1) + 1
    static std::size_t count(const std::vector<int>& lengths)
    {
        std::size_t n = static_cast<std::size_t>(lengths.at(0)) + 2;
        for (std::size_t i = 1; i < lengths.size(); ++i) n += static_cast<std::size_t>(lengths[i] - 1);
        return n;
    }

    std::size_t size() const { return states_.size(); }
    const std::vector<StateLabel>& states() const { return states_; }
    const StateLabel& operator[](std::size_t index) const { return states_[index]; }

    int trunk_length() const { return lengths_.at(0); }
    int branches() const { return static_cast<int>(lengths_.size()) - 1; }
    int branch_length(int i) const { return lengths_.at(static_cast<std::size_t>(i)); }

    std::size_t root() const { return 0; }
    std::size_t trunk_top() const { return static_cast<std::size_t>(trunk_length()); }
    std::size_t fruit() const { return states_.size() - 1; }

    std::optional<std::size_t> find(const StateLabel& s) const
    {
        const int l0 = trunk_length();
        switch (s.kind) {
        case StateLabel::Kind::Trunk:
            if (s.branch == 0 && s.level >= 0 && s.level <= l0) return static_cast<std::size_t>(s.level);
            return std::nullopt;
        case StateLabel::Kind::Branch:
            if (s.branch < 1 || s.branch > branches()) return std::nullopt;
            if (s.level < l0 + 1 || s.level > l0 + branch_length(s.branch) - 1) return std::nullopt;
            return branch_offset_[static_cast<std::size_t>(s.branch)] + static_cast<std::size_t>(s.level - l0 - 1);
        case StateLabel::Kind::Fruit:
            if (s.branch != 0 || s.level != 0) return std::nullopt;
            return fruit();
        }
        return std::nullopt;
    }

    std::size_t index(const StateLabel& s) const
    {
        if (auto found = find(s)) return *found;
        throw Error(ErrorCode::UnknownState, "state " + to_string(s) + " is not in this chain");
    }

    /// Index of y^i_{l0+j'} for offset j' >= 1; only valid for branches with l_i >= 2.
    std::size_t branch_state(int i, int level) const { return index(StateLabel::on_branch(i, level)); }

    /// First branch state y^i_{l0+1}, or the fruit when l_i = 1.
    std::size_t branch_entry(int i) const
    {
        return branch_length(i) >= 2 ? branch_state(i, trunk_length() + 1) : fruit();
    }

    /// Last branch state y^i_{l0+l_i-1}, or the trunk top when l_i = 1.
    std::size_t branch_exit(int i) const
    {
        return branch_length(i) >= 2 ? branch_state(i, trunk_length() + branch_length(i) - 1) : trunk_top();
    }

private:
    std::vector<int> lengths_;
    std::vector<StateLabel> states_;
    std::vector<std::size_t> branch_offset_;
};

template <class Real>
StateSpace enumerate_states(const BasicLayout<Real>& params)
{
    return StateSpace(params.lengths);
}

} // namespace fitchain
