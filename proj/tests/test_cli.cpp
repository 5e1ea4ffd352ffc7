#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_app.hpp"
#include "support.hpp"

using namespace testing_support;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome call(std::vector<std::string> args)
{
    args.insert(args.begin(), "fitchain");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = fitchain::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(FITCHAIN_DATA_DIR) + "/" + name; }

fs::path scratch()
{
    const fs::path dir = fs::temp_directory_path() / "fitchain_cli_test";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) { return fitchain::io::read_file(p.string()); }

std::vector<std::vector<std::string>> csv_rows(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

TEST_CASE("validate accepts the four-branch sample file")
{
    const auto r = call({"validate", data("four_branch.json")});
    CHECK(r.code == 0);
    const auto doc = fitchain::io::Json::parse(r.out);
    CHECK(doc["states"] == 19);
    CHECK(r.err.empty());
}

TEST_CASE("curve with t_max = 0 is a single row")
{
    const auto r = call({"curve", data("four_branch.json"), "--t-max", "0"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"t", "d", "F", "gap", "worst_state"});
    CHECK(rows[1][0] == "0");
}

TEST_CASE("rejected input exits with 2 and a JSON error")
{
    const fs::path bad = scratch() / "bad.json";
    std::ofstream(bad) << R"({"k": 2, "lengths": [1, 1, 2], "weights": [0.5, 0.5], "epsilon": 0.1})";
    const auto r = call({"validate", bad.string()});
    CHECK(r.code == 2);
    const auto err = fitchain::io::Json::parse(r.err);
    CHECK(err["error"] == "TrunkNotMaximal");

    CHECK(call({"curve", data("four_branch.json"), "--mode", "sideways"}).code == 2);
    CHECK(call({"nonsense"}).code == 2);
    CHECK(call({}).code == 2);
    CHECK(call({"hitting", data("four_branch.json"), "--start", "q"}).code == 2);
}

TEST_CASE("runtime failures exit with 1")
{
    // 4000 + 8 branches of about 2000 states: beyond the exact-mode cap
    const auto params = scratch() / "nested.json";
    const auto g = nested_windows_params(2000);
    std::ofstream(params) << fitchain::io::params_to_json(g.exact).dump();
    const auto r = call({"curve", params.string(), "--t-max", "1", "--mode", "exact"});
    CHECK(r.code == 1);
    CHECK(fitchain::io::Json::parse(r.err)["error"] == "StateSpaceTooLarge");
    CHECK(call({"oracle", params.string()}).code == 1);
}

TEST_CASE("help exits cleanly")
{
    const auto r = call({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("fit-profile") != std::string::npos);
}

TEST_CASE("fit-profile output drives a curve that tracks F")
{
    const fs::path params = scratch() / "fitted.json";
    const auto fit = call({"fit-profile", data("logistic.csv"), "--t-n", "64", "--w-n", "8", "--n", "8", "--out",
                           params.string()});
    REQUIRE(fit.code == 0);

    const auto doc = fitchain::io::load_params(params.string());
    // emitted parameters survive validation unchanged
    CHECK(fitchain::io::params_to_json(doc.exact).dump(2) + "\n" == slurp(params));

    auto sup_gap = [](const fs::path& file) {
        const auto r = call({"curve", file.string(), "--t-max", "160", "--mode", "exact"});
        REQUIRE(r.code == 0);
        double gap = 0;
        const auto rows = csv_rows(r.out);
        for (std::size_t i = 1; i < rows.size(); ++i) gap = std::max(gap, std::strtod(rows[i][3].c_str(), nullptr));
        return gap;
    };
    // gap / eps measured at 18.1 for this chain (it grows with the trunk); 20 is the frozen bound
    const double gap = sup_gap(params);
    CHECK(gap <= 20 * doc.params.epsilon);

    const fs::path finer = scratch() / "fitted_finer.json";
    REQUIRE(call({"fit-profile", data("logistic.csv"), "--t-n", "64", "--w-n", "8", "--n", "8", "--eps", "1e-5",
                  "--out", finer.string()})
                .code == 0);
    const double ratio = (gap / doc.params.epsilon) / (sup_gap(finer) / 1e-5);
    CHECK(ratio == Catch::Approx(1.0).margin(0.05));
}

TEST_CASE("identical inputs give byte-identical outputs")
{
    const std::vector<std::vector<std::string>> runs = {
        {"curve", data("four_branch.json"), "--t-max", "40", "--mode", "exact"},
        {"hitting", data("four_branch.json"), "--horizon", "30"},
        {"ct-curve", data("five_state.json"), "--times", "0.5,2,7.25", "--mode", "exact"},
        {"oracle", data("five_state.json"), "--t-max", "10"},
        {"gallery", "dense", "--index", "3", "--n", "64"},
        {"--threads", "2", "curve", data("five_state.json"), "--t-max", "20"},
    };
    for (const auto& args : runs) {
        const auto a = call(args);
        const auto b = call(args);
        REQUIRE(a.code == 0);
        CHECK(a.out == b.out);
        CHECK_FALSE(a.out.empty());
    }
}

TEST_CASE("thread count does not change results")
{
    const auto one = call({"--threads", "1", "curve", data("four_branch.json"), "--t-max", "30"});
    const auto four = call({"--threads", "4", "curve", data("four_branch.json"), "--t-max", "30"});
    CHECK(one.out == four.out);
}

TEST_CASE("oracle and float curve agree on the sample chain")
{
    const auto exact = fitchain::io::Json::parse(call({"oracle", data("five_state.json"), "--t-max", "30"}).out);
    const auto rows = csv_rows(call({"curve", data("five_state.json"), "--t-max", "30"}).out);
    REQUIRE(exact["curve"].size() == 31);
    for (std::size_t t = 0; t <= 30; ++t) {
        const double d = exact["curve"][t]["d_float"].get<double>();
        CHECK(std::abs(d - std::strtod(rows[t + 1][1].c_str(), nullptr)) <= 1e-10);
        CHECK(exact["curve"][t]["worst_state"].get<std::string>() == rows[t + 1][4]);
    }
}

TEST_CASE("gallery output goes to --out after the family name")
{
    const fs::path out = scratch() / "uncountable.json";
    const auto r = call({"gallery", "uncountable", "--n", "2000", "--k", "4", "--out", out.string()});
    REQUIRE(r.code == 0);
    const auto doc = fitchain::io::Json::parse(slurp(out));
    CHECK(doc["name"] == "uncountable");
    CHECK(doc["measured"].size() == 12);
    CHECK(call({"gallery", "uncountable", "--n", "100"}).code == 2);  // k too small for the window grid
}

TEST_CASE("hitting CSV sums to one with the survival column")
{
    const auto rows = csv_rows(call({"hitting", data("four_branch.json"), "--horizon", "400"}).out);
    double total = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) total += std::strtod(rows[i][1].c_str(), nullptr);
    CHECK(total + std::strtod(rows.back()[2].c_str(), nullptr) == Catch::Approx(1.0).margin(1e-12));
}
