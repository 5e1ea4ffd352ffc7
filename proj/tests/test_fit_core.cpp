#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace fitchain;
using namespace testing_support;
using Catch::Approx;

namespace {

template <class F>
ErrorCode code_of(F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

Layout layout(int k, std::vector<int> lengths, std::vector<double> weights)
{
    Layout l;
    l.k = k;
    l.lengths = std::move(lengths);
    l.weights = std::move(weights);
    return l;
}

} // namespace

TEST_CASE("four-branch parameters validate")
{
    auto p = validate_params(make_params(layout(4, {6, 2, 3, 4, 6}, {0.25, 0.25, 0.25, 0.25}), 0.01));
    CHECK(p.k == 4);
    CHECK(p.eta() == Approx(0.99));
}

TEST_CASE("validation names the violated clause")
{
    CHECK(code_of([] { validate_params(make_params(layout(1, {3, 1}, {1.0}), 0.1)); }) ==
          ErrorCode::BranchCountTooSmall);
    CHECK(code_of([] { validate_params(make_params(layout(2, {2, 1, 2}, {0.5, 0.4}), 0.1)); }) ==
          ErrorCode::WeightsInvalid);
    CHECK(code_of([] { validate_params(make_params(layout(2, {3, 2, 2}, {0.5, 0.5}), 0.1)); }) ==
          ErrorCode::LengthsNotStrictlyIncreasing);
    CHECK(code_of([] { validate_params(make_params(layout(2, {2, 1, 3}, {0.5, 0.5}), 0.1)); }) ==
          ErrorCode::TrunkNotMaximal);
    CHECK(code_of([] { validate_params(make_params(layout(2, {2, 1, 2}, {0.5, 0.5}), 0.5)); }) ==
          ErrorCode::EpsilonOutOfRange);
    CHECK(code_of([] { validate_params(make_params(layout(2, {2, 1, 2}, {0.5, 0.5}), 0.0)); }) ==
          ErrorCode::EpsilonOutOfRange);
    CHECK(code_of([] { validate_params(make_params(layout(2, {2, 1, 2}, {1.5, -0.5}), 0.1)); }) ==
          ErrorCode::WeightsInvalid);
    CHECK_NOTHROW(validate_params(make_params(layout(2, {2, 1, 2}, {0.5, 0.5}), 0.0, true)));
}

TEST_CASE("float weights within 1e-12 of one are renormalized")
{
    auto p = validate_params(make_params(layout(3, {3, 1, 2, 3}, {0.1, 0.2, 0.7 + 5e-13}), 0.1));
    CHECK(p.weights[0] + p.weights[1] + p.weights[2] == Approx(1.0).margin(1e-15));
    CHECK_THROWS(validate_params(make_params(layout(3, {3, 1, 2, 3}, {0.1, 0.2, 0.7 + 1e-9}), 0.1)));
}

TEST_CASE("exact weights must sum to one exactly")
{
    ExactLayout l;
    l.k = 2;
    l.lengths = {2, 1, 2};
    l.weights = {Rational(1, 3), Rational(2, 3)};
    CHECK_NOTHROW(validate_layout(l));
    l.weights = {Rational(1, 3), Rational(1, 3)};
    CHECK_THROWS_AS(validate_layout(l), Error);
}

TEST_CASE("four-branch state space")
{
    const auto space = enumerate_states(four_branch(0.1));
    REQUIRE(space.size() == 19);
    CHECK(to_string(space[0]) == "x0");
    CHECK(to_string(space[6]) == "x6");
    CHECK(to_string(space[7]) == "y7^1");
    CHECK(to_string(space[8]) == "y7^2");
    CHECK(to_string(space[9]) == "y8^2");
    CHECK(to_string(space[17]) == "y11^4");
    CHECK(to_string(space[18]) == "z");
    for (std::size_t i = 0; i < space.size(); ++i) CHECK(space.index(space[i]) == i);
    CHECK_THROWS_AS(space.index(StateLabel::on_branch(1, 8)), Error);
}

TEST_CASE("five-state chain has no states on the length-one branch")
{
    const auto space = enumerate_states(five_state(0.1));
    REQUIRE(space.size() == 5);
    std::vector<std::string> names;
    for (const auto& s : space.states()) names.push_back(to_string(s));
    CHECK(names == std::vector<std::string>{"x0", "x1", "x2", "y3^2", "z"});
}

TEST_CASE("state labels parse back")
{
    for (const char* s : {"x0", "x12", "y7^3", "z"}) CHECK(to_string(parse_state_label(s)) == s);
    CHECK(parse_state_label("root") == StateLabel::trunk(0));
    CHECK(parse_state_label("fruit") == StateLabel::fruit());
    CHECK_THROWS_AS(parse_state_label("q3"), Error);
    CHECK_THROWS_AS(parse_state_label("y7"), Error);
}

TEST_CASE("five-state transition entries")
{
    const auto p = five_state(0.1);
    const auto m = build_transition_matrix(p);
    const std::size_t x0 = 0, x1 = 1, x2 = 2, y = 3, z = 4;
    CHECK(m.at(x2, z) == Approx(0.45));
    CHECK(m.at(x2, y) == Approx(0.45));
    CHECK(m.at(x2, x1) == Approx(0.1));
    CHECK(m.at(x0, x0) == Approx(0.1));
    CHECK(m.at(x0, x1) == Approx(0.9));
    CHECK(m.at(y, z) == Approx(0.9));
    CHECK(m.at(y, x2) == Approx(0.1));
    CHECK(m.at(z, z) == Approx(0.9));
    CHECK(m.at(z, y) == Approx(0.05));
    CHECK(m.at(z, x2) == Approx(0.05));
}

TEST_CASE("four-branch trunk top spreads over the branches")
{
    const auto p = four_branch(0.1);
    const auto space = enumerate_states(p);
    const auto m = build_transition_matrix(p, space);
    for (int i = 1; i <= 4; ++i) {
        const auto y = space.index(StateLabel::on_branch(i, 7));
        CHECK(m.at(space.trunk_top(), y) == Approx(0.9 * 0.25));
    }
    CHECK(m.row(space.trunk_top()).size() == 5);
    CHECK(m.row(space.fruit()).size() == 5);
}

TEST_CASE("exact matrix rows sum to one exactly")
{
    auto p = validate_params(make_params(four_branch_layout(), Rational(1, 7)));
    const auto m = build_transition_matrix(p);
    for (std::size_t i = 0; i < m.dimension(); ++i) CHECK(m.row_sum(i) == 1);
}

TEST_CASE("random parameters: stochastic, counted, strongly connected")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const auto l = random_layout(rng, 6, 15);
        std::uniform_real_distribution<double> eps_dist(1e-4, 0.49);
        const auto p = validate_params(make_params(to_float(l), eps_dist(rng)));
        const auto space = enumerate_states(p);
        std::size_t expected = static_cast<std::size_t>(p.lengths[0]) + 2;
        for (int i = 1; i <= p.k; ++i) expected += static_cast<std::size_t>(p.lengths[static_cast<std::size_t>(i)] - 1);
        REQUIRE(space.size() == expected);
        const auto m = build_transition_matrix(p, space);
        for (std::size_t i = 0; i < m.dimension(); ++i) {
            REQUIRE(m.row_sum(i) == Approx(1.0).margin(1e-12));
            const auto nnz = m.row(i).size();
            if (i == space.trunk_top() || i == space.fruit()) REQUIRE(nnz <= static_cast<std::size_t>(1 + p.k));
            else REQUIRE(nnz == 2);
        }
        REQUIRE(strongly_connected(m));
    }
}

TEST_CASE("limit mode drops the zero entries and absorbs at the fruit")
{
    const auto m = build_transition_matrix(five_state(0.0, true));
    CHECK(m.row(4).size() == 1);
    CHECK(m.at(4, 4) == 1.0);
    CHECK(m.at(0, 1) == 1.0);
}

TEST_CASE("float/exact conversions")
{
    auto p = four_branch(0.01);
    auto e = to_exact(p);
    CHECK(e.epsilon == Rational(1, 100));
    CHECK(e.weights[0] == Rational(1, 4));
    CHECK(rational_from_double_exact(0.1) != Rational(1, 10));
    CHECK(rational_from_double_decimal(0.1) == Rational(1, 10));
    CHECK(parse_rational("3/7") == Rational(3, 7));
    CHECK(parse_rational("-1.25e-2") == Rational(-1, 80));
    CHECK(parse_rational("12") == Rational(12));
    CHECK_THROWS_AS(parse_rational("1/0"), Error);
    CHECK_THROWS_AS(parse_rational("abc"), Error);
    CHECK(to_string(Rational(6, 8)) == "3/4");
}

TEST_CASE("leading zeros are decimal, not octal")
{
    CHECK(parse_rational("0.25") == Rational(1, 4));
    CHECK(parse_rational("010/08") == Rational(5, 4));
    CHECK(parse_rational("-007") == Rational(-7));
}
