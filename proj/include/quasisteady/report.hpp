#ifndef QUASISTEADY_REPORT_HPP
#define QUASISTEADY_REPORT_HPP

#include <limits>
#include <optional>
#include <string>

#include <json.hpp>

#include "quasisteady/core.hpp"

namespace qs {

enum class Condition { E, LS, ALS_i, ALS_ii, ALS_iii };

inline std::string to_string(Condition c) {
    switch (c) {
        case Condition::E: return "E";
        case Condition::LS: return "LS";
        case Condition::ALS_i: return "ALS_i";
        case Condition::ALS_ii: return "ALS_ii";
        case Condition::ALS_iii: return "ALS_iii";
    }
    return "?";
}

// Parameter tuple at which a scan attained its minimum (or failed).
struct Witness {
    RVector zeta;
    double a_tilde = std::numeric_limits<double>::quiet_NaN();
    Complex nu{0.0, 0.0};
    bool nu_infinite = false;
    bool nu_used = false;
    double eta = std::numeric_limits<double>::quiet_NaN();

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["zeta"] = std::vector<double>(zeta.data(), zeta.data() + zeta.size());
        if (!std::isnan(a_tilde)) j["a_tilde"] = a_tilde;
        if (nu_used) {
            if (nu_infinite) j["nu"] = "infinity";
            else j["nu"] = {{"re", nu.real()}, {"im", nu.imag()}};
        }
        if (!std::isnan(eta)) j["eta"] = eta;
        return j;
    }
};

// Outcome of one grid scan. verdict == pass iff min_singular_value >= threshold.
struct VerificationReport {
    Condition condition = Condition::LS;
    nlohmann::json grid_description;
    double min_singular_value = std::numeric_limits<double>::infinity();
    Witness argmin_witness;
    double threshold = 0.0;
    std::optional<double> refinement_ratio;
    nlohmann::json extra;  // condition-specific diagnostics

    bool pass() const { return min_singular_value >= threshold; }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["condition"] = to_string(condition);
        j["grid"] = grid_description;
        j["min_singular_value"] = min_singular_value;
        j["witness"] = argmin_witness.to_json();
        j["verdict"] = pass() ? "pass" : "fail";
        j["threshold"] = threshold;
        if (refinement_ratio) j["refinement_ratio"] = *refinement_ratio;
        else j["refinement_ratio"] = nullptr;
        if (!extra.is_null()) j["extra"] = extra;
        return j;
    }
};

}  // namespace qs

#endif
