#pragma once

// Artifact serialization: report and table CSV text, configuration JSON, and
// an atomic file writer. Every emitter is deterministic byte for byte; reals
// are always decimal text, never binary floats.

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "finestruct/analysis.hpp"
#include "finestruct/equilibrium.hpp"
#include "finestruct/force.hpp"
#include "finestruct/precision.hpp"
#include "finestruct/real.hpp"
#include "finestruct/stirling.hpp"

namespace finestruct {

inline const char* to_string(SignPattern s) {
    switch (s) {
        case SignPattern::positive: return "positive";
        case SignPattern::negative: return "negative";
        case SignPattern::zero: return "zero";
        case SignPattern::mixed: return "mixed";
    }
    return "mixed";
}

namespace detail {

constexpr std::size_t kReportDigits = 25;

inline std::string csv_real(const Real& x) { return to_decimal(x, kReportDigits); }

}  // namespace detail

// Rows from one or more reports under a single header. Reals carry 25
// significant digits, verdicts are 1/0.
inline std::string report_csv(const std::vector<TheoremReport>& reports) {
    std::string out = "theorem,id,N,l,observed,predicted,ratio_or_slack,certified_digits,pass\n";
    for (const TheoremReport& rep : reports)
        for (const ReportRow& row : rep.rows) {
            out += rep.theorem;
            out += ',';
            out += row.id;
            out += ',';
            out += std::to_string(row.N);
            out += ',';
            out += std::to_string(row.l);
            out += ',';
            out += detail::csv_real(row.observed);
            out += ',';
            out += detail::csv_real(row.predicted);
            out += ',';
            out += detail::csv_real(row.ratio_or_slack);
            out += ',';
            out += std::to_string(row.certified_digits);
            out += ',';
            out += row.pass ? '1' : '0';
            out += '\n';
        }
    return out;
}

// Reference scale to plot kappa(N, l) against, depending on the force family:
// the expansion term for a constant force, the growth bound for linear and
// power forces, exact flatness for no force.
inline std::vector<Real> scale_predictions(const Configuration& config, int l_max) {
    if (l_max < 0)
        throw std::invalid_argument("scale_predictions: order must be non-negative");
    PrecisionScope scope(config.context.mantissa_bits);
    ForceEval feval(config.force);
    const Real& delta = config.base_gap;
    std::vector<Real> out;
    out.reserve(static_cast<std::size_t>(l_max) + 1);
    for (int l = 0; l <= l_max; ++l) {
        if (l == 0) {
            out.emplace_back(1);
            continue;
        }
        if (l == 1) {
            out.push_back(delta);
            continue;
        }
        switch (config.force.kind) {
            case ForceKind::zero:
                out.emplace_back(0);
                break;
            case ForceKind::constant:
                out.push_back(abs(to_real(series_coefficient(l - 1))) *
                              to_real(factorial_int(static_cast<unsigned>(l - 1))) * delta *
                              pow(feval.amplitude() * delta * delta, l - 1));
                break;
            case ForceKind::linear:
                out.push_back(to_real(factorial_int(static_cast<unsigned>(l))) * delta *
                              pow(2 * feval.amplitude() * delta, l));
                break;
            case ForceKind::power:
                out.push_back(
                    to_real(factorial_int(static_cast<unsigned>(l))) * delta *
                    pow(2 * feval.amplitude() *
                            to_real(factorial_int(static_cast<unsigned>(feval.exponent()))) *
                            exp(Real(6)) * delta,
                        l));
                break;
        }
    }
    return out;
}

inline std::string scale_csv(const ScaleProfile& profile, const std::vector<Real>& predictions) {
    if (predictions.size() != profile.kappa.size())
        throw std::invalid_argument("scale_csv: prediction column length mismatch");
    std::string out = "l,kappa,predicted,argmax,sign,certified\n";
    for (std::size_t l = 0; l < profile.kappa.size(); ++l) {
        out += std::to_string(l);
        out += ',';
        out += detail::csv_real(profile.kappa[l]);
        out += ',';
        out += detail::csv_real(predictions[l]);
        out += ',';
        out += std::to_string(profile.argmax[l]);
        out += ',';
        out += to_string(profile.signs[l]);
        out += ',';
        out += std::to_string(profile.certified[l]);
        out += '\n';
    }
    return out;
}

// Full difference table, one line per entry.
inline std::string table_csv(const DifferenceTable& table) {
    std::string out = "l,i,value,certified\n";
    for (std::size_t l = 0; l < table.orders.size(); ++l) {
        const Sequence<Real>& row = table.orders[l];
        for (long i = row.first_index(); i <= row.last_index(); ++i) {
            out += std::to_string(l);
            out += ',';
            out += std::to_string(i);
            out += ',';
            out += detail::csv_real(row.at(i));
            out += ',';
            out += std::to_string(table.certified[l]);
            out += '\n';
        }
    }
    return out;
}

// Exact generalized table dump over the full built box, lexicographic in
// (n, l, i).
inline std::string stirling_csv(const StirlingTable& table) {
    std::string out = "n,l,i,value\n";
    for (int n = 0; n <= table.n_max(); ++n)
        for (int l = 0; l <= table.l_max(); ++l)
            for (int i = 0; i <= table.i_max(); ++i) {
                out += std::to_string(n);
                out += ',';
                out += std::to_string(l);
                out += ',';
                out += std::to_string(i);
                out += ',';
                out += table.stirling_value(n, l, i).str();
                out += '\n';
            }
    return out;
}

namespace detail {

inline nlohmann::json force_to_json(const ForceModel& force) {
    nlohmann::json j;
    switch (force.kind) {
        case ForceKind::zero:
            j["kind"] = "zero";
            break;
        case ForceKind::constant:
            j["kind"] = "const";
            j["F"] = force.amplitude;
            break;
        case ForceKind::linear:
            j["kind"] = "linear";
            j["alpha"] = force.amplitude;
            break;
        case ForceKind::power:
            j["kind"] = "power";
            j["alpha"] = force.amplitude;
            j["n"] = force.exponent;
            break;
    }
    return j;
}

inline ForceModel force_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero")
        return zero_force();
    if (kind == "const")
        return constant_force(j.at("F").get<std::string>());
    if (kind == "linear")
        return linear_force(j.at("alpha").get<std::string>());
    if (kind == "power")
        return power_force(j.at("alpha").get<std::string>(), j.at("n").get<int>());
    throw std::invalid_argument("configuration JSON: unknown force kind '" + kind + "'");
}

}  // namespace detail

// JSON document {n, force, bits, tol, points} with every real as a decimal
// string sized so that re-reading at the same bit width is lossless.
inline std::string config_json(const Configuration& config) {
    const long bits = config.context.mantissa_bits;
    const std::size_t digits = round_trip_digits(bits);
    PrecisionScope scope(bits);
    nlohmann::json j;
    j["n"] = config.n_points;
    j["bits"] = bits;
    j["force"] = detail::force_to_json(config.force);
    j["tol"] = to_decimal(config.context.solver_tol, digits);
    nlohmann::json points = nlohmann::json::array();
    for (const Real& x : config.points)
        points.push_back(to_decimal(x, digits));
    j["points"] = std::move(points);
    return j.dump(2) + "\n";
}

// Rebuilds a Configuration from its JSON form. The context is derived from
// the stored bit width: l_max is the highest order those bits certify (floor
// 1), and a width below even the first-order requirement marks the context as
// a probe. Structural problems and residuals above the stored tolerance are
// input errors, not solver failures.
inline Configuration config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("configuration JSON: ") + e.what());
    }
    int n = 0;
    long bits = 0;
    ForceModel force;
    std::string tol_text;
    std::vector<std::string> point_text;
    try {
        n = j.at("n").get<int>();
        bits = j.at("bits").get<long>();
        force = detail::force_from_json(j.at("force"));
        tol_text = j.at("tol").get<std::string>();
        point_text = j.at("points").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("configuration JSON: ") + e.what());
    }
    if (n < 2)
        throw std::invalid_argument("configuration JSON: need n >= 2");
    if (bits < 2)
        throw std::invalid_argument("configuration JSON: need bits >= 2");
    if (point_text.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("configuration JSON: points length disagrees with n");

    PrecisionContext ctx;
    ctx.n_points = n;
    ctx.mantissa_bits = bits;
    ctx.probe = bits < sizing_bits(n, 1);
    ctx.l_max = 1;
    while (ctx.l_max + 1 <= n - 1 && sizing_bits(n, ctx.l_max + 1) <= bits)
        ++ctx.l_max;

    PrecisionScope scope(bits);
    ctx.solver_tol = Real(tol_text);
    if (!(ctx.solver_tol > 0))
        throw std::invalid_argument("configuration JSON: tolerance must be positive");
    std::vector<Real> points;
    points.reserve(point_text.size());
    for (const std::string& s : point_text)
        points.emplace_back(s);
    if (points.front() != 0 || points.back() != 1)
        throw std::invalid_argument("configuration JSON: endpoints must be 0 and 1");
    try {
        return detail::finish_configuration(std::move(points), force, ctx);
    } catch (const solve_error& e) {
        throw std::invalid_argument(std::string("configuration JSON: ") + e.what());
    }
}

// Writes through a sibling temp file and renames, so readers never observe a
// partial artifact.
inline void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("write_file_atomic: cannot open '" + tmp + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out)
            throw std::runtime_error("write_file_atomic: short write to '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("write_file_atomic: cannot rename into '" + path + "'");
    }
}

}  // namespace finestruct
