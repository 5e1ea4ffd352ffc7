#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fitchain/error.hpp"
#include "fitchain/gallery.hpp"
#include "fitchain/mixing.hpp"
#include "fitchain/params.hpp"
#include "fitchain/profile.hpp"
#include "fitchain/rational.hpp"

namespace fitchain::io {

using Json = nlohmann::ordered_json;

/// 17 significant digits, enough to round-trip a double.
inline std::string format_real(double v)
{
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    return buffer;
}

struct ParamDocument {
    ExactFitParams exact;
    FitParams params;
};

namespace detail {

inline Rational json_rational(const Json& v, const char* field)
{
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_number()) return rational_from_double_decimal(v.get<double>());
    throw Error(ErrorCode::ParseError, std::string(field) + " must be a number or a rational string");
}

inline double json_double(const Json& v, const char* field)
{
    if (v.is_string()) return as_double(parse_rational(v.get<std::string>()));
    if (v.is_number()) return v.get<double>();
    throw Error(ErrorCode::ParseError, std::string(field) + " must be a number or a rational string");
}

} // namespace detail

/// {"k", "lengths", "weights", "epsilon", "limit_mode"}; numbers or "p/q" strings for weights and epsilon.
inline ParamDocument parse_params(const Json& doc)
{
    try {
        if (!doc.is_object())
            throw Error(ErrorCode::ParseError, "parameter document must be a JSON object");
        for (const char* key : {"k", "lengths", "weights", "epsilon"})
            if (!doc.contains(key))
                throw Error(ErrorCode::ParseError, std::string("missing field '") + key + "'");
        if (!doc["lengths"].is_array() || !doc["weights"].is_array())
            throw Error(ErrorCode::ParseError, "lengths and weights must be arrays");

        ParamDocument out;
        out.exact.k = out.params.k = doc["k"].get<int>();
        out.exact.lengths = out.params.lengths = doc["lengths"].get<std::vector<int>>();
        for (const auto& w : doc["weights"]) {
            out.exact.weights.push_back(detail::json_rational(w, "weights"));
            out.params.weights.push_back(detail::json_double(w, "weights"));
        }
        out.exact.epsilon = detail::json_rational(doc["epsilon"], "epsilon");
        out.params.epsilon = detail::json_double(doc["epsilon"], "epsilon");
        out.exact.limit_mode = out.params.limit_mode = doc.value("limit_mode", false);

        ExactLayout& layout = out.exact;
        layout = renormalize_float_origin(layout);
        out.exact = validate_params(out.exact);
        out.params = validate_params(out.params);
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

inline ParamDocument parse_params_text(std::string_view text)
{
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    return parse_params(doc);
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ParamDocument load_params(const std::string& path) { return parse_params_text(read_file(path)); }

/// Exact emission: every weight and epsilon as a "p/q" string.
inline Json params_to_json(const ExactFitParams& p)
{
    Json doc;
    doc["k"] = p.k;
    doc["lengths"] = p.lengths;
    Json weights = Json::array();
    for (const auto& w : p.weights) weights.push_back(to_string(w));
    doc["weights"] = weights;
    doc["epsilon"] = to_string(p.epsilon);
    doc["limit_mode"] = p.limit_mode;
    return doc;
}

inline void write_curve_csv(std::ostream& out, const MixingCurve& curve, WorstStartMode mode)
{
    out << "t,d,F,gap,worst_state\n";
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
        out << curve.times[i] << ',' << format_real(curve.distances[i]) << ',' << format_real(curve.reference[i]) << ','
            << format_real(std::abs(curve.distances[i] - curve.reference[i])) << ','
            << (mode == WorstStartMode::Exact ? to_string(curve.worst_start[i]) : std::string("x0")) << '\n';
    }
}

inline void write_ct_csv(std::ostream& out, const std::vector<double>& times, const std::vector<double>& distances, double tol)
{
    out << "t_real,d_ct,tol\n";
    for (std::size_t i = 0; i < times.size(); ++i)
        out << format_real(times[i]) << ',' << format_real(distances[i]) << ',' << format_real(tol) << '\n';
}

/// `c,p` rows; a non-numeric first line is taken as a header.
inline ProfileSpec read_profile_csv(std::istream& in)
{
    std::vector<ProfileSample> samples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 'c,p'");
        try {
            std::size_t used_c = 0, used_p = 0;
            const std::string cs = line.substr(0, comma), ps = line.substr(comma + 1);
            const double c = std::stod(cs, &used_c);
            const double p = std::stod(ps, &used_p);
            if (cs.find_first_not_of(" \t", used_c) != std::string::npos ||
                ps.find_first_not_of(" \t", used_p) != std::string::npos)
                throw std::invalid_argument("trailing text");
            samples.push_back({c, p});
        } catch (const std::logic_error&) {
            if (line_no == 1 && samples.empty()) continue;
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": cannot read '" + line + "'");
        }
    }
    return ProfileSpec(std::move(samples));
}

inline ProfileSpec load_profile(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
    return read_profile_csv(in);
}

inline Json report_to_json(const GalleryReport& r)
{
    Json doc;
    doc["name"] = r.name;
    doc["params"] = params_to_json(r.params);
    Json grid = Json::array();
    for (const auto& g : r.grid) grid.push_back({{"scale", g.scale}, {"c", g.c}, {"time", g.time}});
    doc["grid"] = grid;
    Json predicted = Json::array();
    for (const auto& p : r.predicted)
        predicted.push_back({{"time", p.time}, {"value", p.value}, {"provenance", p.provenance}});
    doc["predicted"] = predicted;
    Json measured = Json::array();
    for (const auto& m : r.measured) measured.push_back({{"time", m.time}, {"d", m.distance}});
    doc["measured"] = measured;
    doc["max_gap"] = r.max_gap;
    doc["flags"] = r.flags;
    return doc;
}

inline Json error_to_json(const std::string& code, const std::string& message)
{
    return Json{{"error", code}, {"message", message}};
}

} // namespace fitchain::io
