#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cbjj/scenario.hpp"

namespace cbjj {

/// Noise amplitude multiplier fitted against the JJ1 switching knee
/// (see `cbjj calibrate`). Used whenever a config leaves it unset.
inline constexpr double kDefaultCalibrationFactor = 1.0;

struct ConfigDocument {
    Scenario scenario;
    std::uint64_t seed = 0;
    std::int64_t n_runs = 1000;

    bool operator==(const ConfigDocument&) const = default;
};

/// Sectioned key = value text. Keys carry their units:
///
///   [junction]   I0_uA, R_ohm, C_fF                       (required)
///   [operating]  i_b, T_mK (required), seed
///   [simulation] dt, tau_max, phi_star, phase_min, phase_max, record_stride
///   [noise]      interpretation, kick, calibration_factor, gaussian
///   [drive]      type = none|cw|pulse, i_mw, f_GHz, photons, t_ph_ns, t_d_ns
///   [ensemble]   n_runs
///
/// '#' and ';' start comments. Unknown sections or keys are errors.
ConfigDocument parse_config(std::string_view text);
std::string serialize_config(const ConfigDocument& doc);
ConfigDocument load_config(const std::string& path);

/// Flat "section.key" -> value view of a document, e.g. for manifests.
std::map<std::string, std::string> config_entries(const ConfigDocument& doc);

/// Applies "section.key" = value patches and revalidates.
ConfigDocument apply_overrides(const ConfigDocument& doc,
                               const std::vector<std::pair<std::string, std::string>>& patches);

}  // namespace cbjj
