#include "wavetrack/wave.hpp"

namespace wavetrack {

namespace {

constexpr double kDefaultWaveAscr = 0.34;  // rad/s

}  // namespace

// Component sets follow the deep-water dispersion omega^2 = g kappa before
// calibration. "paper-wave" is then rescaled in omega only.
WaveModeld wave_preset_raw(const std::string& name) {
    WaveModeld m;
    m.label = name;
    if (name == "flat") return m;
    if (name == "mild") {
        m.components = {WaveComponentd(0.5e-3, 20.0, 14.0, 0.0)};
        return m;
    }
    if (name == "paper-wave") {
        m.components = {
            WaveComponentd(1.0e-3, 20.0, 14.0, 0.0),
            WaveComponentd(0.5e-3, 35.0, 18.5, 1.3),
            WaveComponentd(0.25e-3, 60.0, 24.3, 4.1),
        };
        return m;
    }
    throw InvalidArgument("unknown wave preset '" + name + "'");
}

WaveModeld wave_preset(const std::string& name) {
    WaveModeld m = wave_preset_raw(name);
    if (name == "paper-wave") m = calibrate_to_ascr(m, kDefaultWaveAscr, 0.0);
    return m;
}

std::vector<std::string> wave_preset_names() { return {"flat", "mild", "paper-wave"}; }

}  // namespace wavetrack
