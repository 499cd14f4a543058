#include "cbjj/config.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "cbjj/csv.hpp"
#include "cbjj/error.hpp"

namespace cbjj {

namespace {

struct RawValue {
    std::string value;
    int line = 0;
};

using RawConfig = std::map<std::string, RawValue>;

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

const std::map<std::string, std::vector<std::string>>& known_keys()
{
    static const std::map<std::string, std::vector<std::string>> keys{
        {"junction", {"I0_uA", "R_ohm", "C_fF"}},
        {"operating", {"i_b", "T_mK", "seed"}},
        {"simulation", {"dt", "tau_max", "phi_star", "phase_min", "phase_max", "record_stride"}},
        {"noise", {"interpretation", "kick", "calibration_factor", "gaussian"}},
        {"drive", {"type", "i_mw", "f_GHz", "photons", "t_ph_ns", "t_d_ns"}},
        {"ensemble", {"n_runs"}},
    };
    return keys;
}

bool is_known(const std::string& section, const std::string& key)
{
    const auto it = known_keys().find(section);
    if (it == known_keys().end())
        return false;
    for (const auto& k : it->second)
        if (k == key)
            return true;
    return false;
}

RawConfig parse_raw(std::string_view text)
{
    RawConfig raw;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto c = line.find_first_of("#;"); c != std::string_view::npos)
            line = line.substr(0, c);
        line = trim(line);
        if (line.empty()) {
            if (end == text.size())
                break;
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("", line_no, "line " + std::to_string(line_no) + ": malformed section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!known_keys().contains(section))
                throw ConfigError(section, line_no,
                                  "line " + std::to_string(line_no) + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("", line_no, "line " + std::to_string(line_no) + ": expected key = value");
        if (section.empty())
            throw ConfigError("", line_no, "line " + std::to_string(line_no) + ": key outside of any section");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        const std::string full = section + "." + key;
        if (!is_known(section, key))
            throw ConfigError(full, line_no, "line " + std::to_string(line_no) + ": unknown key " + full);
        if (value.empty())
            throw ConfigError(full, line_no, "line " + std::to_string(line_no) + ": empty value for " + full);
        if (raw.contains(full))
            throw ConfigError(full, line_no, "line " + std::to_string(line_no) + ": duplicate key " + full);
        raw[full] = RawValue{value, line_no};
        if (end == text.size())
            break;
    }
    return raw;
}

class Reader {
public:
    explicit Reader(const RawConfig& raw) : raw_(raw) {}

    bool has(const std::string& key) const { return raw_.contains(key); }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const
    {
        const auto it = raw_.find(key);
        const int line = it == raw_.end() ? 0 : it->second.line;
        std::string msg = key + ": " + what;
        if (line > 0)
            msg = "line " + std::to_string(line) + ": " + msg;
        throw ConfigError(key, line, msg);
    }

    double number(const std::string& key, double fallback, bool required = false) const
    {
        const auto it = raw_.find(key);
        if (it == raw_.end()) {
            if (required)
                fail(key, "required key is missing");
            return fallback;
        }
        const std::string& v = it->second.value;
        if (v == "pi")
            return std::numbers::pi;
        double x = 0.0;
        try {
            x = parse_double(v);
        } catch (const Error&) {
            fail(key, "expected a number, got '" + v + "'");
        }
        if (!std::isfinite(x))
            fail(key, "value must be finite");
        return x;
    }

    std::int64_t integer(const std::string& key, std::int64_t fallback) const
    {
        const auto it = raw_.find(key);
        if (it == raw_.end())
            return fallback;
        const double x = number(key, 0.0);
        if (x != std::floor(x) || std::abs(x) > 9.0e15)
            fail(key, "expected an integer, got '" + it->second.value + "'");
        return static_cast<std::int64_t>(x);
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) const
    {
        const auto it = raw_.find(key);
        if (it == raw_.end())
            return fallback;
        const std::string& v = it->second.value;
        std::uint64_t out = 0;
        if (v.empty() || v.size() > 20)
            fail(key, "expected a non-negative integer, got '" + v + "'");
        for (char c : v) {
            if (c < '0' || c > '9')
                fail(key, "expected a non-negative integer, got '" + v + "'");
            const std::uint64_t digit = static_cast<std::uint64_t>(c - '0');
            if (out > (std::numeric_limits<std::uint64_t>::max() - digit) / 10)
                fail(key, "integer out of range");
            out = out * 10 + digit;
        }
        return out;
    }

    template <class T, class Parse>
    T word(const std::string& key, T fallback, Parse parse, const std::string& allowed) const
    {
        const auto it = raw_.find(key);
        if (it == raw_.end())
            return fallback;
        try {
            return parse(it->second.value);
        } catch (const Error&) {
            fail(key, "unknown value '" + it->second.value + "', allowed: " + allowed);
        }
    }

    void check(bool ok, const std::string& key, const std::string& range) const
    {
        if (!ok)
            fail(key, "value out of range, allowed " + range);
    }

private:
    const RawConfig& raw_;
};

ConfigDocument build(const RawConfig& raw)
{
    const Reader r(raw);
    ConfigDocument doc;
    Scenario& s = doc.scenario;

    const double I0_uA = r.number("junction.I0_uA", 0.0, true);
    r.check(I0_uA > 0.0, "junction.I0_uA", "(0, inf)");
    const double R_ohm = r.number("junction.R_ohm", 0.0, true);
    r.check(R_ohm > 0.0, "junction.R_ohm", "(0, inf)");
    const double C_fF = r.number("junction.C_fF", 0.0, true);
    r.check(C_fF > 0.0, "junction.C_fF", "(0, inf)");
    s.junction = JunctionParams{I0_uA * 1e-6, R_ohm, C_fF * 1e-15};

    s.op.i_b = r.number("operating.i_b", 0.0, true);
    r.check(s.op.i_b >= 0.0 && s.op.i_b < 1.0, "operating.i_b", "[0, 1)");
    const double T_mK = r.number("operating.T_mK", 0.0, true);
    r.check(T_mK >= 0.0, "operating.T_mK", "[0, inf)");
    s.op.T = T_mK * 1e-3;
    doc.seed = r.unsigned_integer("operating.seed", 0);

    SimConfig& sim = s.sim;
    sim.dt = r.number("simulation.dt", sim.dt);
    r.check(sim.dt > 0.0 && sim.dt <= 0.1, "simulation.dt", "(0, 0.1]");
    sim.tau_max = r.number("simulation.tau_max", sim.tau_max);
    r.check(sim.tau_max > 0.0, "simulation.tau_max", "(0, inf)");
    r.check(sim.tau_max / sim.dt < 9.0e15, "simulation.tau_max", "tau_max / dt < 9e15");
    sim.phi_star = r.number("simulation.phi_star", sim.phi_star);
    sim.phase_min = r.number("simulation.phase_min", sim.phase_min);
    sim.phase_max = r.number("simulation.phase_max", sim.phase_max);
    r.check(sim.phase_min <= sim.phase_max, "simulation.phase_max", "phase_max >= phase_min");
    r.check(sim.phase_max < sim.phi_star, "simulation.phi_star", "phi_star > phase_max");
    sim.record_stride = r.integer("simulation.record_stride", sim.record_stride);
    r.check(sim.record_stride >= 1, "simulation.record_stride", "[1, inf)");

    NoiseModel& noise = s.noise;
    noise.calibration_factor = kDefaultCalibrationFactor;
    noise.interpretation = r.word("noise.interpretation", noise.interpretation, parse_interpretation, "white, colored");
    noise.kick = r.word("noise.kick", noise.kick, parse_kick_mode, "velocity, force");
    noise.gaussian = r.word("noise.gaussian", noise.gaussian, parse_gaussian_method, "box-muller, polar");
    noise.calibration_factor = r.number("noise.calibration_factor", noise.calibration_factor);
    r.check(noise.calibration_factor > 0.0, "noise.calibration_factor", "(0, inf)");
    noise.T = s.op.T;

    DriveSpec& d = s.drive;
    d.kind = r.word("drive.type", d.kind, parse_drive_kind, "none, cw, pulse");
    d.i_mw = r.number("drive.i_mw", d.i_mw);
    r.check(d.i_mw >= 0.0, "drive.i_mw", "[0, inf)");
    if (r.has("drive.f_GHz")) {
        d.f_GHz = r.number("drive.f_GHz", 0.0);
        r.check(*d.f_GHz > 0.0, "drive.f_GHz", "(0, inf)");
    }
    d.photons = r.number("drive.photons", d.photons);
    r.check(d.photons >= 0.0, "drive.photons", "[0, inf)");
    d.t_ph_ns = r.number("drive.t_ph_ns", d.t_ph_ns);
    r.check(d.t_ph_ns > 0.0, "drive.t_ph_ns", "(0, inf)");
    d.t_d_ns = r.number("drive.t_d_ns", d.t_d_ns);
    r.check(d.t_d_ns >= 0.0, "drive.t_d_ns", "[0, inf)");

    doc.n_runs = r.integer("ensemble.n_runs", doc.n_runs);
    r.check(doc.n_runs >= 2, "ensemble.n_runs", "[2, inf)");

    try {
        validate(s);
    } catch (const Error& e) {
        throw ConfigError("", 0, e.what());
    }
    return doc;
}

RawConfig to_raw(const ConfigDocument& doc)
{
    RawConfig raw;
    for (auto& [k, v] : config_entries(doc))
        raw[k] = RawValue{v, 0};
    return raw;
}

}  // namespace

std::map<std::string, std::string> config_entries(const ConfigDocument& doc)
{
    const Scenario& s = doc.scenario;
    std::map<std::string, std::string> e;
    e["junction.I0_uA"] = format_double(s.junction.I0 * 1e6);
    e["junction.R_ohm"] = format_double(s.junction.R);
    e["junction.C_fF"] = format_double(s.junction.C * 1e15);
    e["operating.i_b"] = format_double(s.op.i_b);
    e["operating.T_mK"] = format_double(s.op.T * 1e3);
    e["operating.seed"] = std::to_string(doc.seed);
    e["simulation.dt"] = format_double(s.sim.dt);
    e["simulation.tau_max"] = format_double(s.sim.tau_max);
    e["simulation.phi_star"] = format_double(s.sim.phi_star);
    e["simulation.phase_min"] = format_double(s.sim.phase_min);
    e["simulation.phase_max"] = format_double(s.sim.phase_max);
    e["simulation.record_stride"] = std::to_string(s.sim.record_stride);
    e["noise.interpretation"] = std::string(to_string(s.noise.interpretation));
    e["noise.kick"] = std::string(to_string(s.noise.kick));
    e["noise.calibration_factor"] = format_double(s.noise.calibration_factor);
    e["noise.gaussian"] = std::string(to_string(s.noise.gaussian));
    e["drive.type"] = std::string(to_string(s.drive.kind));
    e["drive.i_mw"] = format_double(s.drive.i_mw);
    if (s.drive.f_GHz)
        e["drive.f_GHz"] = format_double(*s.drive.f_GHz);
    e["drive.photons"] = format_double(s.drive.photons);
    e["drive.t_ph_ns"] = format_double(s.drive.t_ph_ns);
    e["drive.t_d_ns"] = format_double(s.drive.t_d_ns);
    e["ensemble.n_runs"] = std::to_string(doc.n_runs);
    return e;
}

ConfigDocument parse_config(std::string_view text)
{
    return build(parse_raw(text));
}

std::string serialize_config(const ConfigDocument& doc)
{
    const auto entries = config_entries(doc);
    std::string out;
    for (const auto& [section, keys] : std::vector<std::pair<std::string, std::vector<std::string>>>(
             {{"junction", known_keys().at("junction")},
              {"operating", known_keys().at("operating")},
              {"simulation", known_keys().at("simulation")},
              {"noise", known_keys().at("noise")},
              {"drive", known_keys().at("drive")},
              {"ensemble", known_keys().at("ensemble")}})) {
        out += "[" + section + "]\n";
        for (const auto& key : keys) {
            const auto it = entries.find(section + "." + key);
            if (it != entries.end())
                out += key + " = " + it->second + "\n";
        }
        out += "\n";
    }
    return out;
}

ConfigDocument load_config(const std::string& path)
{
    std::string text;
    try {
        text = read_text(path);
    } catch (const Error& e) {
        throw ConfigError("", 0, e.what());
    }
    return parse_config(text);
}

ConfigDocument apply_overrides(const ConfigDocument& doc,
                               const std::vector<std::pair<std::string, std::string>>& patches)
{
    RawConfig raw = to_raw(doc);
    for (const auto& [key, value] : patches) {
        const auto dot = key.find('.');
        if (dot == std::string::npos || !is_known(key.substr(0, dot), key.substr(dot + 1)))
            throw ConfigError(key, 0, "unknown key " + key);
        raw[key] = RawValue{value, 0};
    }
    return build(raw);
}

}  // namespace cbjj
