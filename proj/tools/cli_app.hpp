#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fitchain.hpp"

namespace fitchain::cli {

namespace detail {

struct Sink {
    std::string path;
    std::ostream& fallback;

    void write(const std::string& text) const
    {
        if (path.empty() || path == "-") {
            fallback << text;
            return;
        }
        std::ofstream file(path, std::ios::binary);
        if (!file)
            throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
        file << text;
    }
};

inline std::string dump(const io::Json& doc) { return doc.dump(2) + "\n"; }

inline WorstStartMode parse_mode(const std::string& s)
{
    return s == "root" ? WorstStartMode::RootStart : WorstStartMode::Exact;
}

} // namespace detail

/// Runs one command line; 0 on success, 2 for rejected input, 1 when a computation fails.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Build FIT Markov chains from cutoff profiles and compute their mixing curves."};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Expand all subcommand help");

    unsigned threads = 0;
    std::uint64_t seed = 0;
    app.add_option("--threads", threads, "Worker threads (default: FITCHAIN_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Seed for any random draws (default 0)");

    std::string params_path, profile_path, out_path, mode = "exact", start = "x0";
    std::optional<std::int64_t> t_max, horizon;
    std::size_t state_cap = kDefaultExactStateCap;
    double tol = 1e-10;
    std::vector<double> times;

    auto* validate = app.add_subcommand("validate", "Check a parameter file and print it in exact form");
    validate->add_option("params", params_path, "Parameter JSON")->required();

    auto* curve = app.add_subcommand("curve", "Discrete-time distance curve as CSV (t,d,F,gap,worst_state)");
    curve->add_option("params", params_path, "Parameter JSON")->required();
    curve->add_option("--t-max", t_max, "Last time step (default: l0 + lk + 20/eps)")->check(CLI::NonNegativeNumber);
    curve->add_option("--mode", mode, "exact = worst start, root = start at x0")
        ->check(CLI::IsMember({"exact", "root"}));
    curve->add_option("--state-cap", state_cap, "Largest chain allowed in exact mode");
    curve->add_option("--out", out_path, "Output file (default stdout)");

    auto* hitting = app.add_subcommand("hitting", "Law of the first arrival at the fruit as CSV (t,p,survival)");
    hitting->add_option("params", params_path, "Parameter JSON")->required();
    hitting->add_option("--start", start, "Start state label (x3, y7^2, z)");
    hitting->add_option("--horizon", horizon, "Last time step (default: l0 + lk + 20/eps)")->check(CLI::PositiveNumber);
    hitting->add_option("--out", out_path, "Output file (default stdout)");

    std::int64_t t_n = 0;
    double w_n = 0.0;
    int n = 0;
    ProfileChainOptions chain_options;
    std::optional<double> eps;
    auto* fit = app.add_subcommand("fit-profile", "Build a chain whose distance curve follows a profile table");
    fit->add_option("profile", profile_path, "Profile CSV with columns c,p")->required();
    fit->add_option("--t-n", t_n, "Cutoff time")->required()->check(CLI::PositiveNumber);
    fit->add_option("--w-n", w_n, "Window width")->required()->check(CLI::PositiveNumber);
    fit->add_option("--n", n, "Chain index; sets eps = max(e^-n, 2^-40)")->required()->check(CLI::PositiveNumber);
    fit->add_option("--exponent", chain_options.exponent, "Support half-width v = w (t/w)^exponent")
        ->check(CLI::Range(0.0, 1.0));
    fit->add_option("--eps", eps, "Explicit drift instead of the n-based default");
    fit->add_flag("--limit", chain_options.limit_mode, "Allow eps = 0 (absorbing fruit)");
    fit->add_option("--out", out_path, "Parameter JSON output (default stdout)");

    auto* ct = app.add_subcommand("ct-curve", "Rate-1 continuous-time distances as CSV (t_real,d_ct,tol)");
    ct->add_option("params", params_path, "Parameter JSON")->required();
    ct->add_option("--times", times, "Comma-separated times")->required()->delimiter(',');
    ct->add_option("--tol", tol, "Poisson truncation tolerance")->check(CLI::Range(0.0, 1.0));
    ct->add_option("--mode", mode, "exact = worst start, root = start at x0")->check(CLI::IsMember({"exact", "root"}));
    ct->add_option("--state-cap", state_cap, "Largest chain allowed in exact mode");
    ct->add_option("--out", out_path, "Output file (default stdout)");

    auto* gallery = app.add_subcommand("gallery", "Verification reports for the example families (JSON)");
    gallery->require_subcommand(1);
    gallery->fallthrough();
    gallery->add_option("--out", out_path, "Output file (default stdout)");

    std::int64_t g_n = 2000;
    std::optional<int> g_k;
    std::vector<double> alphas{0.25, 0.5, 0.75}, cs{-1.0, 0.5, 1.0, 2.0};
    auto* uncountable = gallery->add_subcommand("uncountable", "Windows n^alpha for every alpha at once");
    uncountable->add_option("--n", g_n, "Chain index")->check(CLI::PositiveNumber);
    uncountable->add_option("--k", g_k, "Branch count override")->check(CLI::PositiveNumber);
    uncountable->add_option("--alpha", alphas, "Window exponents")->delimiter(',');
    uncountable->add_option("--c", cs, "Window positions")->delimiter(',');

    std::vector<int> qs{2};
    std::vector<double> nested_cs{-1.5, -0.5, 0.0, 0.5, 1.5};
    auto* nested = gallery->add_subcommand("nested", "Nested windows n^(1/q) around 3n");
    nested->add_option("--n", g_n, "Chain index")->check(CLI::PositiveNumber);
    nested->add_option("--q", qs, "Window levels (>= 2)")->delimiter(',');
    nested->add_option("--c", nested_cs, "Window positions")->delimiter(',');

    std::int64_t index = 0;
    int dense_n = 256;
    ProfileChainOptions dense_options;
    auto* dense = gallery->add_subcommand("dense", "One member of the dense profile family");
    dense->add_option("--index", index, "Family index")->check(CLI::NonNegativeNumber);
    dense->add_option("--n", dense_n, "Cutoff time and chain index")->check(CLI::Range(4, 1 << 20));
    dense->add_option("--exponent", dense_options.exponent, "Support half-width exponent")->check(CLI::Range(0.0, 1.0));

    std::int64_t oracle_t_max = 50;
    auto* oracle_cmd = app.add_subcommand("oracle", "Exact rational distance curve for a small chain (JSON)");
    oracle_cmd->add_option("params", params_path, "Parameter JSON")->required();
    oracle_cmd->add_option("--t-max", oracle_t_max, "Last time step (<= 200)")->check(CLI::Range(0, 200));
    oracle_cmd->add_option("--out", out_path, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        err << io::error_to_json("UsageError", e.what()).dump() << "\n";
        return 2;
    }

    const detail::Sink sink{out_path, out};
    try {
        if (threads > 0) setenv("FITCHAIN_THREADS", std::to_string(threads).c_str(), 1);

        if (*validate) {
            const auto doc = io::load_params(params_path);
            io::Json report = io::params_to_json(doc.exact);
            report["states"] = enumerate_states(doc.params).size();
            out << detail::dump(report);
        } else if (*curve) {
            const auto doc = io::load_params(params_path);
            CurveOptions options;
            options.state_cap = state_cap;
            options.threads = threads;
            const auto m = detail::parse_mode(mode);
            const auto result = distance_curve(doc.params, t_max.value_or(default_horizon(doc.params)), m, options);
            std::ostringstream csv;
            io::write_curve_csv(csv, result, m);
            sink.write(csv.str());
        } else if (*hitting) {
            const auto doc = io::load_params(params_path);
            const auto h = hitting_distribution(doc.params, parse_state_label(start),
                                                horizon.value_or(default_horizon(doc.params)));
            std::vector<double> survival(h.pmf.size());
            double tail = h.tail_mass;
            for (std::size_t t = h.pmf.size(); t-- > 0;) {
                survival[t] = tail;
                tail += h.pmf[t];
            }
            std::ostringstream csv;
            csv << "t,p,survival\n";
            for (std::size_t t = 0; t < h.pmf.size(); ++t)
                csv << t << ',' << io::format_real(h.pmf[t]) << ',' << io::format_real(survival[t]) << '\n';
            sink.write(csv.str());
        } else if (*fit) {
            chain_options.eps_override = eps;
            const auto chain = build_profile_chain(io::load_profile(profile_path), t_n, w_n, n, chain_options);
            const std::string params_text = detail::dump(io::params_to_json(chain.exact));
            if (out_path.empty() || out_path == "-") {
                out << params_text;
            } else {
                sink.write(params_text);
                io::Json summary;
                summary["out"] = out_path;
                summary["states"] = enumerate_states(chain.params).size();
                summary["v_n"] = chain.v_n;
                summary["flags"] = chain.flags;
                out << detail::dump(summary);
            }
        } else if (*ct) {
            const auto doc = io::load_params(params_path);
            CtOptions options;
            options.mode = detail::parse_mode(mode);
            options.state_cap = state_cap;
            options.threads = threads;
            const auto d = ct_distances(doc.params, times, tol, options);
            std::ostringstream csv;
            io::write_ct_csv(csv, times, d, tol);
            sink.write(csv.str());
        } else if (*gallery) {
            GalleryReport report;
            if (*uncountable) report = verify_uncountable(g_n, g_k, alphas, cs);
            else if (*nested) report = verify_nested(g_n, qs, nested_cs);
            else report = verify_dense(index, dense_n, dense_options);
            sink.write(detail::dump(io::report_to_json(report)));
        } else if (*oracle_cmd) {
            const auto doc = io::load_params(params_path);
            const auto c = oracle::exact_curve(doc.exact, oracle_t_max);
            io::Json report;
            report["params"] = io::params_to_json(doc.exact);
            io::Json rows = io::Json::array();
            for (std::size_t i = 0; i < c.times.size(); ++i)
                rows.push_back({{"t", c.times[i]},
                                {"d", to_string(c.distances[i])},
                                {"d_float", as_double(c.distances[i])},
                                {"worst_state", to_string(c.worst_start[i])}});
            report["curve"] = rows;
            io::Json pi = io::Json::array();
            for (const auto& x : c.stationary) pi.push_back(to_string(x));
            report["stationary"] = pi;
            sink.write(detail::dump(report));
        }
        return 0;
    } catch (const Error& e) {
        err << io::error_to_json(std::string(to_string(e.code())), e.what()).dump() << "\n";
        return is_validation_error(e.code()) ? 2 : 1;
    } catch (const std::exception& e) {
        err << io::error_to_json("RuntimeError", e.what()).dump() << "\n";
        return 1;
    }
}

} // namespace fitchain::cli
