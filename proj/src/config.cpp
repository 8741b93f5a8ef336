#include <algorithm>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wavetrack/harness.hpp"

namespace wavetrack {

using nlohmann::json;

namespace {

// Reads one JSON object; every key must be consumed or listed, otherwise the
// unknown key is reported with its full path.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    ~Section() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (const auto& [key, value] : node_.items()) {
            if (!seen_.count(key)) throw ConfigError(path_ + "." + key + ": unknown key");
        }
    }

    bool has(const std::string& key) const { return node_.contains(key); }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return node_.at(key);
    }

    std::string path(const std::string& key) const { return path_ + "." + key; }

    void number(const std::string& key, double& out) {
        if (!has(key)) return;
        const json& v = raw(key);
        if (!v.is_number()) throw ConfigError(path(key) + ": expected a number");
        out = v.get<double>();
    }

    void integer(const std::string& key, int& out) {
        if (!has(key)) return;
        const json& v = raw(key);
        if (!v.is_number_integer()) throw ConfigError(path(key) + ": expected an integer");
        out = v.get<int>();
    }

    void boolean(const std::string& key, bool& out) {
        if (!has(key)) return;
        const json& v = raw(key);
        if (!v.is_boolean()) throw ConfigError(path(key) + ": expected true or false");
        out = v.get<bool>();
    }

    void string(const std::string& key, std::string& out) {
        if (!has(key)) return;
        const json& v = raw(key);
        if (!v.is_string()) throw ConfigError(path(key) + ": expected a string");
        out = v.get<std::string>();
    }

    void numbers(const std::string& key, std::vector<double>& out) {
        if (!has(key)) return;
        const json& v = raw(key);
        if (!v.is_array()) throw ConfigError(path(key) + ": expected an array of numbers");
        out.clear();
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError(path(key) + ": expected an array of numbers");
            out.push_back(e.get<double>());
        }
    }

    void strings(const std::string& key, std::vector<std::string>& out) {
        if (!has(key)) return;
        const json& v = raw(key);
        if (!v.is_array()) throw ConfigError(path(key) + ": expected an array of strings");
        out.clear();
        for (const auto& e : v) {
            if (!e.is_string()) throw ConfigError(path(key) + ": expected an array of strings");
            out.push_back(e.get<std::string>());
        }
    }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_wave(Section s, WaveConfig& w) {
    s.string("preset", w.preset);
    if (s.has("components")) {
        const json& arr = s.raw("components");
        if (!arr.is_array()) throw ConfigError(s.path("components") + ": expected an array");
        w.components.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            Section c(arr[i], s.path("components") + "[" + std::to_string(i) + "]");
            double a = 0, k = 1, omega = 0, phi = 0;
            c.number("amplitude_m", a);
            c.number("wavenumber_rad_m", k);
            c.number("angular_frequency_rad_s", omega);
            c.number("phase_rad", phi);
            try {
                w.components.emplace_back(a, k, omega, phi);
            } catch (const InvalidArgument& e) {
                throw ConfigError(s.path("components") + "[" + std::to_string(i) + "]: " + e.what());
            }
        }
    }
    s.number("ascr_duration_s", w.sampling.duration);
    s.number("ascr_frame_rate_hz", w.sampling.frame_rate);
    if (s.has("omega_scales")) {
        const json& arr = s.raw("omega_scales");
        if (!arr.is_array()) throw ConfigError(s.path("omega_scales") + ": expected an array");
        w.omega_scales.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            Section c(arr[i], s.path("omega_scales") + "[" + std::to_string(i) + "]");
            OmegaScale o;
            c.number("ascr_rad_s", o.ascr);
            c.number("omega_scale", o.scale);
            w.omega_scales.push_back(o);
        }
    }
}

void read_geometry(Section s, LinkGeometry& g) {
    s.number("n_water", g.n_water);
    s.number("n_air", g.n_air);
    s.number("h_air_m", g.h_air);
    s.number("l_water_m", g.l_water);
    s.number("x0_m", g.x0);
    s.number("bs_to_pdarray_m", g.bs_to_pdarray);
    s.number("bs_to_mems_m", g.bs_to_mems);
    s.number("bs2_to_ccr_m", g.bs2_to_ccr);
    s.number("bs2_to_rxpd_m", g.bs2_to_rxpd);
    s.number("ccr_aperture_radius_m", g.ccr_aperture_radius);
}

void read_detector(Section s, DetectorParams& d) {
    s.number("beam_diameter_m", d.beam.diameter);
    s.number("pd_spacing_m", d.pd_spacing);
    s.number("pd_radius_m", d.pd_radius);
    s.number("rx_aperture_radius_m", d.rx_aperture_radius);
    s.number("noise_sigma", d.noise_sigma);
}

void read_tracker(Section s, ExperimentConfig& c) {
    s.boolean("enabled", c.tracking_enabled);
    s.number("threshold_a", c.tracker.threshold_a);
    s.number("threshold_b", c.tracker.threshold_b);
    s.number("step_rad", c.tracker.step);
    s.number("control_rate_hz", c.tracker.control_rate);
    s.number("max_tilt_rad", c.tracker.max_tilt);
    s.integer("dac_bits", c.tracker.dac_bits);
}

void read_link(Section s, LinkConfig& l) {
    if (s.has("snr_peak")) {
        double v = 0;
        s.number("snr_peak", v);
        l.snr_peak = v;
    }
    if (s.has("anchor")) {
        Section a(s.raw("anchor"), s.path("anchor"));
        a.string("modulation", l.anchor.modulation);
        a.number("symbol_rate_baud", l.anchor.symbol_rate);
        a.number("ber", l.anchor.ber);
        a.number("h_air_m", l.anchor.h_air);
    }
    s.number("system_bandwidth_hz", l.system_bandwidth);
    s.number("fec_limit", l.fec_limit);
    s.number("symbols_per_packet", l.symbols_per_packet);
    s.integer("packets_per_trial", l.packets_per_trial);
    s.number("packet_interval_s", l.packet_interval);
    s.integer("min_samples_per_packet", l.min_samples_per_packet);
    if (s.has("pam6_bits")) {
        std::string v;
        s.string("pam6_bits", v);
        if (v == "log2") l.pam6 = Pam6Mapping::Log2;
        else if (v == "2.5") l.pam6 = Pam6Mapping::FiveBitsPerTwoSymbols;
        else throw ConfigError(s.path("pam6_bits") + ": expected \"log2\" or \"2.5\"");
    }
}

void read_trial(Section s, TrialConfig& t) {
    s.number("start_window_s", t.start_window);
    s.number("settle_s", t.settle);
}

void read_sweep(Section s, SweepAxes& a) {
    s.strings("modulations", a.modulations);
    s.numbers("symbol_rates_baud", a.symbol_rates);
    s.numbers("ascr_rad_s", a.ascrs);
    s.numbers("h_air_m", a.h_airs);
}

json components_json(const std::vector<WaveComponentd>& comps) {
    json arr = json::array();
    for (const auto& c : comps) {
        arr.push_back({{"amplitude_m", c.amplitude},
                       {"wavenumber_rad_m", c.wavenumber},
                       {"angular_frequency_rad_s", c.angular_frequency},
                       {"phase_rad", c.phase}});
    }
    return arr;
}

}  // namespace

void ExperimentConfig::validate() const {
    auto wrap = [](const auto& fn) {
        try {
            fn();
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
    };
    wrap([&] { geometry.validate(); });
    wrap([&] { detector.validate(); });
    wrap([&] { tracker.validate(); });
    if (!seed) throw ConfigError("seed: required (set it in the config or pass --seed)");
    if (wave.components.empty()) {
        const auto names = wave_preset_names();
        if (std::find(names.begin(), names.end(), wave.preset) == names.end())
            throw ConfigError("wave.preset: unknown preset '" + wave.preset + "'");
    }
    if (!(wave.sampling.duration > 0) || !(wave.sampling.frame_rate > 0))
        throw ConfigError("wave.ascr_duration_s / ascr_frame_rate_hz: must be > 0");
    if (link.snr_peak && !(*link.snr_peak > 0)) throw ConfigError("link.snr_peak: must be > 0");
    if (!(link.system_bandwidth > 0)) throw ConfigError("link.system_bandwidth_hz: must be > 0");
    if (!(link.fec_limit > 0 && link.fec_limit < 0.5)) throw ConfigError("link.fec_limit: must be in (0, 0.5)");
    if (!(link.symbols_per_packet >= 1)) throw ConfigError("link.symbols_per_packet: must be >= 1");
    if (link.packets_per_trial < 1) throw ConfigError("link.packets_per_trial: must be >= 1");
    if (!(link.packet_interval >= 0)) throw ConfigError("link.packet_interval_s: must be >= 0");
    if (link.min_samples_per_packet < 1) throw ConfigError("link.min_samples_per_packet: must be >= 1");
    if (!(link.anchor.ber > 0 && link.anchor.ber < 0.5)) throw ConfigError("link.anchor.ber: must be in (0, 0.5)");
    if (!(link.anchor.symbol_rate > 0)) throw ConfigError("link.anchor.symbol_rate_baud: must be > 0");
    if (!(link.anchor.h_air > 0)) throw ConfigError("link.anchor.h_air_m: must be > 0");
    try {
        Modulation::from_name(link.anchor.modulation);
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("link.anchor.modulation: ") + e.what());
    }
    if (!(trial.start_window >= 0)) throw ConfigError("trial.start_window_s: must be >= 0");
    if (!(trial.settle >= 0)) throw ConfigError("trial.settle_s: must be >= 0");
    if (sweep.modulations.empty()) throw ConfigError("sweep.modulations: must not be empty");
    if (sweep.symbol_rates.empty()) throw ConfigError("sweep.symbol_rates_baud: must not be empty");
    if (sweep.ascrs.empty()) throw ConfigError("sweep.ascr_rad_s: must not be empty");
    if (sweep.h_airs.empty()) throw ConfigError("sweep.h_air_m: must not be empty");
    for (const auto& m : sweep.modulations) {
        try {
            Modulation::from_name(m);
        } catch (const InvalidArgument& e) {
            throw ConfigError(std::string("sweep.modulations: ") + e.what());
        }
    }
    for (double r : sweep.symbol_rates)
        if (!(r > 0)) throw ConfigError("sweep.symbol_rates_baud: values must be > 0");
    for (double a : sweep.ascrs)
        if (!(a >= 0)) throw ConfigError("sweep.ascr_rad_s: values must be >= 0");
    for (double h : sweep.h_airs)
        if (!(h > 0)) throw ConfigError("sweep.h_air_m: values must be > 0");
    if (threads < 0) throw ConfigError("threads: must be >= 0");
}

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    ExperimentConfig c;
    {
        Section s(root, "config");
        if (s.has("seed")) {
            const json& v = s.raw("seed");
            if (!v.is_number_unsigned()) throw ConfigError("config.seed: expected a non-negative integer");
            c.seed = v.get<std::uint64_t>();
        }
        s.string("output", c.output);
        s.integer("threads", c.threads);
        if (s.has("wave")) read_wave(Section(s.raw("wave"), "wave"), c.wave);
        if (s.has("geometry")) read_geometry(Section(s.raw("geometry"), "geometry"), c.geometry);
        if (s.has("detector")) read_detector(Section(s.raw("detector"), "detector"), c.detector);
        if (s.has("tracker")) read_tracker(Section(s.raw("tracker"), "tracker"), c);
        if (s.has("link")) read_link(Section(s.raw("link"), "link"), c.link);
        if (s.has("trial")) read_trial(Section(s.raw("trial"), "trial"), c.trial);
        if (s.has("sweep")) read_sweep(Section(s.raw("sweep"), "sweep"), c.sweep);
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& c) {
    json root;
    if (c.seed) root["seed"] = *c.seed;
    root["output"] = c.output;
    root["threads"] = c.threads;

    json wave = {{"preset", c.wave.preset},
                 {"ascr_duration_s", c.wave.sampling.duration},
                 {"ascr_frame_rate_hz", c.wave.sampling.frame_rate}};
    if (!c.wave.components.empty()) wave["components"] = components_json(c.wave.components);
    if (!c.wave.omega_scales.empty()) {
        json arr = json::array();
        for (const auto& o : c.wave.omega_scales) arr.push_back({{"ascr_rad_s", o.ascr}, {"omega_scale", o.scale}});
        wave["omega_scales"] = arr;
    }
    root["wave"] = wave;

    const auto& g = c.geometry;
    root["geometry"] = {{"n_water", g.n_water},
                        {"n_air", g.n_air},
                        {"h_air_m", g.h_air},
                        {"l_water_m", g.l_water},
                        {"x0_m", g.x0},
                        {"bs_to_pdarray_m", g.bs_to_pdarray},
                        {"bs_to_mems_m", g.bs_to_mems},
                        {"bs2_to_ccr_m", g.bs2_to_ccr},
                        {"bs2_to_rxpd_m", g.bs2_to_rxpd},
                        {"ccr_aperture_radius_m", g.ccr_aperture_radius}};
    const auto& d = c.detector;
    root["detector"] = {{"beam_diameter_m", d.beam.diameter},
                        {"pd_spacing_m", d.pd_spacing},
                        {"pd_radius_m", d.pd_radius},
                        {"rx_aperture_radius_m", d.rx_aperture_radius},
                        {"noise_sigma", d.noise_sigma}};
    const auto& t = c.tracker;
    root["tracker"] = {{"enabled", c.tracking_enabled},
                       {"threshold_a", t.threshold_a},
                       {"threshold_b", t.threshold_b},
                       {"step_rad", t.step},
                       {"control_rate_hz", t.control_rate},
                       {"max_tilt_rad", t.max_tilt},
                       {"dac_bits", t.dac_bits}};
    const auto& l = c.link;
    json link = {{"anchor",
                  {{"modulation", l.anchor.modulation},
                   {"symbol_rate_baud", l.anchor.symbol_rate},
                   {"ber", l.anchor.ber},
                   {"h_air_m", l.anchor.h_air}}},
                 {"system_bandwidth_hz", l.system_bandwidth},
                 {"fec_limit", l.fec_limit},
                 {"symbols_per_packet", l.symbols_per_packet},
                 {"packets_per_trial", l.packets_per_trial},
                 {"packet_interval_s", l.packet_interval},
                 {"min_samples_per_packet", l.min_samples_per_packet},
                 {"pam6_bits", l.pam6 == Pam6Mapping::Log2 ? "log2" : "2.5"}};
    if (l.snr_peak) link["snr_peak"] = *l.snr_peak;
    root["link"] = link;
    root["trial"] = {{"start_window_s", c.trial.start_window}, {"settle_s", c.trial.settle}};
    root["sweep"] = {{"modulations", c.sweep.modulations},
                     {"symbol_rates_baud", c.sweep.symbol_rates},
                     {"ascr_rad_s", c.sweep.ascrs},
                     {"h_air_m", c.sweep.h_airs}};
    return root.dump(2) + "\n";
}

}  // namespace wavetrack
