#include <catch_amalgamated.hpp>

#include <sstream>

#include "support.hpp"

using namespace testing_support;
using Catch::Approx;
namespace fio = fitchain::io;

namespace {

ErrorCode code_of(const std::string& text)
{
    try {
        fio::parse_params_text(text);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error for " << text);
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST_CASE("params JSON with plain numbers")
{
    const auto doc = fio::parse_params_text(
        R"({"k": 4, "lengths": [6, 2, 3, 4, 6], "weights": [0.25, 0.25, 0.25, 0.25], "epsilon": 0.001})");
    CHECK(doc.exact.epsilon == Rational(1, 1000));
    CHECK(doc.exact.weights[0] == Rational(1, 4));
    CHECK(doc.params.epsilon == 0.001);
    CHECK_FALSE(doc.params.limit_mode);
}

TEST_CASE("params JSON with rational strings")
{
    const auto doc = fio::parse_params_text(
        R"({"k": 2, "lengths": [2, 1, 2], "weights": ["1/3", "2/3"], "epsilon": "1/7"})");
    CHECK(doc.exact.weights[1] == Rational(2, 3));
    CHECK(doc.exact.epsilon == Rational(1, 7));
    CHECK(doc.params.weights[0] == Approx(1.0 / 3));
}

TEST_CASE("float weights off by rounding are renormalized")
{
    const auto doc = fio::parse_params_text(
        R"({"k": 3, "lengths": [3, 1, 2, 3], "weights": [0.3333333333333333, 0.3333333333333333, 0.3333333333333333], "epsilon": 0.01})");
    Rational total = 0;
    for (const auto& w : doc.exact.weights) total += w;
    CHECK(total == 1);
}

TEST_CASE("emitted params revalidate unchanged")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const ExactFitParams p = validate_params(make_params(random_layout(rng, 6, 12), Rational(1, 3 + trial)));
        const auto text = fio::params_to_json(p).dump();
        const auto back = fio::parse_params_text(text);
        REQUIRE(back.exact.lengths == p.lengths);
        REQUIRE(back.exact.weights == p.weights);
        REQUIRE(back.exact.epsilon == p.epsilon);
        REQUIRE(fio::params_to_json(back.exact).dump() == text);
    }
}

TEST_CASE("params JSON error codes")
{
    CHECK(code_of("not json") == ErrorCode::ParseError);
    CHECK(code_of("[1, 2]") == ErrorCode::ParseError);
    CHECK(code_of(R"({"k": 2, "lengths": [2, 1, 2], "weights": [0.5, 0.5]})") == ErrorCode::ParseError);
    CHECK(code_of(R"({"k": "two", "lengths": [2, 1, 2], "weights": [0.5, 0.5], "epsilon": 0.1})") ==
          ErrorCode::ParseError);
    CHECK(code_of(R"({"k": 1, "lengths": [2, 1], "weights": [1], "epsilon": 0.1})") == ErrorCode::BranchCountTooSmall);
    CHECK(code_of(R"({"k": 2, "lengths": [2, 2, 2], "weights": [0.5, 0.5], "epsilon": 0.1})") ==
          ErrorCode::LengthsNotStrictlyIncreasing);
    CHECK(code_of(R"({"k": 2, "lengths": [1, 1, 2], "weights": [0.5, 0.5], "epsilon": 0.1})") ==
          ErrorCode::TrunkNotMaximal);
    CHECK(code_of(R"({"k": 2, "lengths": [2, 1, 2], "weights": [0.5, 0.4], "epsilon": 0.1})") ==
          ErrorCode::WeightsInvalid);
    CHECK(code_of(R"({"k": 2, "lengths": [2, 1, 2], "weights": [0.5, 0.5], "epsilon": 0.5})") ==
          ErrorCode::EpsilonOutOfRange);
}

TEST_CASE("sample parameter files load")
{
    const auto fig = fio::load_params(std::string(FITCHAIN_DATA_DIR) + "/four_branch.json");
    CHECK(fig.exact.lengths == std::vector<int>{6, 2, 3, 4, 6});
    const auto small = fio::load_params(std::string(FITCHAIN_DATA_DIR) + "/five_state.json");
    CHECK(enumerate_states(small.params).size() == 5);
    CHECK_THROWS_AS(fio::load_params(std::string(FITCHAIN_DATA_DIR) + "/missing.json"), Error);
}

TEST_CASE("curve CSV layout")
{
    MixingCurve curve;
    curve.times = {0, 1};
    curve.distances = {1.0, 0.25};
    curve.reference = {1.0, 0.5};
    curve.worst_start = {StateLabel::trunk(0), StateLabel::fruit()};
    std::ostringstream exact, root;
    fio::write_curve_csv(exact, curve, WorstStartMode::Exact);
    fio::write_curve_csv(root, curve, WorstStartMode::RootStart);
    CHECK(exact.str() == "t,d,F,gap,worst_state\n0,1,1,0,x0\n1,0.25,0.5,0.25,z\n");
    CHECK(root.str() == "t,d,F,gap,worst_state\n0,1,1,0,x0\n1,0.25,0.5,0.25,x0\n");
}

TEST_CASE("continuous-time CSV layout")
{
    std::ostringstream out;
    fio::write_ct_csv(out, {1.5}, {0.1}, 1e-10);
    CHECK(out.str() == "t_real,d_ct,tol\n1.5,0.10000000000000001,1e-10\n");
}

TEST_CASE("profile CSV reader")
{
    std::istringstream with_header("c,p\n-1,1\n0,0.5\r\n1,0\n\n");
    const auto p = fio::read_profile_csv(with_header);
    CHECK(p.samples().size() == 3);
    CHECK(p(0.5) == Approx(0.25));

    std::istringstream bare("-2,0.9\n2,0.1\n");
    CHECK(fio::read_profile_csv(bare).samples().size() == 2);

    std::istringstream bad_row("c,p\n0,0.5\nx,y\n");
    CHECK_THROWS_AS(fio::read_profile_csv(bad_row), Error);
    std::istringstream rising("0,0.2\n1,0.7\n");
    try {
        fio::read_profile_csv(rising);
        FAIL("expected InvalidProfile");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidProfile);
    }
}

TEST_CASE("logistic sample table")
{
    const auto p = fio::load_profile(std::string(FITCHAIN_DATA_DIR) + "/logistic.csv");
    CHECK(p.samples().size() == 65);
    CHECK(p(0.0) == Approx(0.5).margin(1e-12));
    for (const auto& s : p.samples()) CHECK(s.p == Approx(logistic(s.c)).margin(1e-15));
}

TEST_CASE("report JSON carries every field")
{
    const auto r = verify_uncountable(2000, 4, {0.5}, {0.0});
    const auto doc = fio::report_to_json(r);
    for (const char* key : {"name", "params", "grid", "predicted", "measured", "max_gap", "flags"})
        CHECK(doc.contains(key));
    CHECK(doc["params"]["epsilon"].get<std::string>() == "1/1099511627776");
    CHECK(fio::error_to_json("ParseError", "x").dump() == R"({"error":"ParseError","message":"x"})");
}
