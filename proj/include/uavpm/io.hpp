#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include <uavpm/model.hpp>

// Scenario / Solution JSON ingestion and emission. Power-like fields accept
// either a plain number (linear SI units) or a tagged object such as
// {"value": 20, "unit": "dBm"}. Non-finite doubles serialize as the strings
// "inf", "-inf", "nan" so round-trips stay exact.
namespace uavpm {
namespace io {

using json = nlohmann::json;

inline json finite_or_string(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

inline double number_or_string(const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        throw std::invalid_argument("expected number, got string '" + s + "'");
    }
    return j.get<double>();
}

/// Power in watts from a plain number or a {"value", "unit"} object with
/// unit "W" or "dBm".
inline double parse_power(const json& j) {
    if (j.is_object()) {
        const std::string unit = j.at("unit").get<std::string>();
        const double value = j.at("value").get<double>();
        if (unit == "dBm") return dbm_to_watt(value);
        if (unit == "W") return value;
        throw std::invalid_argument("unknown power unit '" + unit + "'");
    }
    return number_or_string(j);
}

/// Noise density in W/Hz from a plain number or a tagged object with unit
/// "W_per_Hz" or "dBm_per_Hz".
inline double parse_noise_density(const json& j) {
    if (j.is_object()) {
        const std::string unit = j.at("unit").get<std::string>();
        const double value = j.at("value").get<double>();
        if (unit == "dBm_per_Hz") return dbm_to_watt(value);
        if (unit == "W_per_Hz") return value;
        throw std::invalid_argument("unknown noise density unit '" + unit + "'");
    }
    return number_or_string(j);
}

inline Scenario<double> scenario_from_json(const json& j) {
    Scenario<double> scn;
    scn.total_bandwidth = j.at("total_bandwidth_hz").get<double>();
    scn.noise_density = parse_noise_density(j.at("noise_density"));
    scn.ref_gain = j.at("ref_gain").get<double>();
    if (j.contains("antenna_const")) scn.antenna_const = j.at("antenna_const").get<double>();
    if (j.contains("pathloss_exp")) scn.pathloss_exp = j.at("pathloss_exp").get<double>();
    scn.h_min = j.at("h_min_m").get<double>();
    scn.h_max = j.at("h_max_m").get<double>();
    if (j.contains("theta_min_rad")) scn.theta_min = j.at("theta_min_rad").get<double>();
    scn.theta_max = j.at("theta_max_rad").get<double>();
    if (j.contains("theta_floor_rad")) scn.theta_floor = j.at("theta_floor_rad").get<double>();
    for (const auto& g : j.at("gts")) {
        GroundTerminal<double> gt;
        const auto& pos = g.at("position_m");
        gt.position = {pos.at(0).get<double>(), pos.at(1).get<double>()};
        gt.min_rate = g.at("min_rate_bps").get<double>();
        gt.max_power = parse_power(g.at("max_power"));
        scn.gts.push_back(gt);
    }
    scn.validate();
    return scn;
}

inline json scenario_to_json(const Scenario<double>& scn) {
    json j;
    j["total_bandwidth_hz"] = scn.total_bandwidth;
    j["noise_density"] = {{"value", watt_to_dbm(scn.noise_density)}, {"unit", "dBm_per_Hz"}};
    j["ref_gain"] = scn.ref_gain;
    j["antenna_const"] = scn.antenna_const;
    j["pathloss_exp"] = scn.pathloss_exp;
    j["h_min_m"] = scn.h_min;
    j["h_max_m"] = scn.h_max;
    j["theta_min_rad"] = scn.theta_min;
    j["theta_max_rad"] = scn.theta_max;
    j["theta_floor_rad"] = scn.theta_floor;
    j["gts"] = json::array();
    for (const auto& gt : scn.gts) {
        j["gts"].push_back({{"position_m", {gt.position.x(), gt.position.y()}},
                            {"min_rate_bps", gt.min_rate},
                            {"max_power", {{"value", watt_to_dbm(gt.max_power)}, {"unit", "dBm"}}}});
    }
    return j;
}

inline json solution_to_json(const Solution<double>& sol) {
    json j;
    j["status"] = to_string(sol.status);
    j["placement"] = {{"y_m", {sol.placement.y.x(), sol.placement.y.y()}},
                      {"height_m", sol.placement.height},
                      {"half_beamwidth_rad", sol.placement.half_beamwidth}};
    j["allocation"]["w_hz"] = json::array();
    for (Eigen::Index k = 0; k < sol.allocation.w.size(); ++k)
        j["allocation"]["w_hz"].push_back(sol.allocation.w[k]);
    j["powers_w"] = json::array();
    for (Eigen::Index k = 0; k < sol.powers.size(); ++k)
        j["powers_w"].push_back(finite_or_string(sol.powers[k]));
    j["sum_power_w"] = finite_or_string(sol.sum_power);
    j["sum_power_dbm"] = finite_or_string(sol.sum_power > 0 ? watt_to_dbm(sol.sum_power)
                                                            : -std::numeric_limits<double>::infinity());
    j["trace"] = json::array();
    for (const auto& rec : sol.trace)
        j["trace"].push_back(
            {{"iter", rec.iter}, {"block", to_string(rec.block)}, {"objective_w", rec.objective}});
    return j;
}

inline json load_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for reading");
    json j;
    f >> j;
    return j;
}

inline void save_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary); // binary: LF newlines everywhere
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace io
}  // namespace uavpm
