#include "wavetrack/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "format.hpp"

namespace wavetrack {

using detail::format_double;

namespace {

WaveModeld base_wave(const ExperimentConfig& config) {
    if (!config.wave.components.empty()) {
        WaveModeld m;
        m.components = config.wave.components;
        m.label = "custom";
        return m;
    }
    return wave_preset_raw(config.wave.preset);
}

const OmegaScale* cached_scale(const ExperimentConfig& config, double ascr) {
    for (const auto& o : config.wave.omega_scales)
        if (std::abs(o.ascr - ascr) <= 1e-12 * std::max(1.0, ascr)) return &o;
    return nullptr;
}

double fit_omega_scale(const ExperimentConfig& config, double ascr) {
    const WaveModeld base = base_wave(config);
    if (base.flat()) throw CalibrationFailure("wave: a flat surface cannot reach ASCR " + format_double(ascr) + " rad/s");
    return ascr_scale_factor(base, ascr, config.geometry.x0, config.wave.sampling);
}

std::string describe(const Cell& c) {
    std::ostringstream os;
    os << "(modulation " << c.modulation << ", symbol rate " << format_double(c.symbol_rate) << " Bd, ASCR "
       << format_double(c.ascr) << " rad/s, h_air " << format_double(c.h_air) << " m, tracking "
       << (c.tracking ? "on" : "off") << ")";
    return os.str();
}

double population_std(double sum, double sum_sq, std::size_t n) {
    if (n == 0) return 0.0;
    const double mean = sum / static_cast<double>(n);
    return std::sqrt(std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean));
}

}  // namespace

WaveModeld resolve_wave(const ExperimentConfig& config, double ascr) {
    if (ascr == 0.0) {
        WaveModeld flat;
        flat.label = "flat";
        return flat;
    }
    const OmegaScale* cached = cached_scale(config, ascr);
    const double scale = cached ? cached->scale : fit_omega_scale(config, ascr);
    WaveModeld m = scale_frequencies(base_wave(config), scale);
    m.label = (config.wave.components.empty() ? config.wave.preset : std::string("custom")) + "@" +
              format_double(ascr);
    return m;
}

double resolve_snr_peak(const ExperimentConfig& config) {
    if (config.link.snr_peak) return *config.link.snr_peak;
    const LinkAnchor& anchor = config.link.anchor;
    const Modulation mod = Modulation::from_name(anchor.modulation, config.link.pam6);
    LinkGeometry geometry = config.geometry;
    geometry.h_air = anchor.h_air;
    // Static water with the mirror at its initial point, as seen by run_trial.
    const MirrorState rest(config.tracker.max_tilt, config.tracker.dac_bits);
    const SpotOffsetd offset = trace_beam(rest.tilt(), 0.0, 0.0, geometry);
    const double capture = capture_fraction(offset, config.detector.beam, config.detector.rx_aperture_radius);
    if (!(capture > 0)) throw CalibrationFailure("link anchor: zero capture on static water");
    const double ratio = anchor.symbol_rate / (2.0 * config.link.system_bandwidth);
    return snr_for_ber(anchor.ber, mod) * (1.0 + ratio * ratio) / (capture * capture);
}

RunResult run_trial(const ExperimentConfig& config, const Cell& cell, std::uint64_t seed, bool keep_trace) {
    config.validate();
    if (!(cell.symbol_rate > 0)) throw ConfigError("cell symbol rate must be > 0");
    if (!(cell.h_air > 0)) throw ConfigError("cell h_air must be > 0");
    if (!(cell.ascr >= 0)) throw ConfigError("cell ASCR must be >= 0");

    const Modulation mod = Modulation::from_name(cell.modulation, config.link.pam6);
    LinkGeometry geometry = config.geometry;
    geometry.h_air = cell.h_air;
    const WaveModeld wave = resolve_wave(config, cell.ascr);
    const LinkBudget budget{resolve_snr_peak(config), config.link.system_bandwidth};

    const RngStream root(seed);
    RngStream timing = root.split(1);
    RngStream noise = root.split(2);

    LoopOptions options;
    options.tracking_enabled = cell.tracking;
    options.start_time = config.trial.start_window > 0 ? timing.uniform(0.0, config.trial.start_window) : 0.0;
    const double packet_time = config.link.symbols_per_packet / cell.symbol_rate;
    const std::size_t packets = static_cast<std::size_t>(config.link.packets_per_trial);
    options.samples_per_tick = std::max(
        1, static_cast<int>(std::ceil(config.link.min_samples_per_packet / (config.tracker.control_rate * packet_time))));
    const double spacing = std::max(config.link.packet_interval, packet_time);
    const double duration = config.trial.settle + static_cast<double>(packets - 1) * spacing + packet_time;

    const double settle = config.trial.settle;
    auto in_packet = [=](double t) {
        if (t < settle) return false;
        const double since = t - settle;
        const auto idx = static_cast<std::size_t>(std::floor(since / spacing));
        return idx < packets && since - static_cast<double>(idx) * spacing < packet_time;
    };
    if (!keep_trace) options.oversample_when = in_packet;

    TraceLog trace = closed_loop_run(wave, geometry, config.detector, config.tracker, duration, noise, options);

    RunResult result;
    result.cell = cell;
    result.seed = seed;
    result.duration = duration;

    std::vector<std::vector<double>> windows(packets);
    double cap_sum = 0.0, cap_min = 1.0;
    double sx = 0.0, sxx = 0.0, sy = 0.0, syy = 0.0;
    std::size_t counted = 0, finite = 0;
    for (const auto& s : trace.samples) {
        if (s.control_tick) {
            result.mode_occupancy[static_cast<std::size_t>(s.mode)] += 1.0 / trace.control_rate;
        }
        if (!in_packet(s.t)) continue;
        windows[static_cast<std::size_t>(std::floor((s.t - settle) / spacing))].push_back(s.capture);
        cap_sum += s.capture;
        cap_min = std::min(cap_min, s.capture);
        ++counted;
        if (!s.beam_lost) {
            sx += s.offset.x();
            sxx += s.offset.x() * s.offset.x();
            sy += s.offset.y();
            syy += s.offset.y() * s.offset.y();
            ++finite;
        }
    }

    result.packets.reserve(packets);
    for (std::size_t i = 0; i < packets; ++i) {
        if (windows[i].empty())
            throw InvalidArgument("run_trial: packet " + std::to_string(i) + " has no capture samples");
        result.packets.push_back(packet_ber(windows[i], budget, cell.symbol_rate, mod, config.link.fec_limit));
    }
    result.link = aggregate(result.packets, cell.symbol_rate, mod);
    result.mean_capture = counted ? cap_sum / static_cast<double>(counted) : 0.0;
    result.min_capture = counted ? cap_min : 0.0;
    result.offset_std = {population_std(sx, sxx, finite), population_std(sy, syy, finite)};
    if (keep_trace) result.trace = std::move(trace);
    return result;
}

std::uint64_t cell_seed(std::uint64_t master, std::size_t i_mod, std::size_t i_rate, std::size_t i_ascr,
                        std::size_t i_h) {
    const std::uint64_t index = ((static_cast<std::uint64_t>(i_mod) * 1024 + i_rate) * 1024 + i_ascr) * 1024 + i_h;
    return master ^ mix64(index);
}

std::vector<RunResult> sweep(const ExperimentConfig& config, TrackingArms arms) {
    config.validate();
    ExperimentConfig cfg = config;
    for (double ascr : cfg.sweep.ascrs) {
        if (ascr > 0 && !cached_scale(cfg, ascr)) cfg.wave.omega_scales.push_back({ascr, fit_omega_scale(cfg, ascr)});
    }
    if (!cfg.link.snr_peak) cfg.link.snr_peak = resolve_snr_peak(cfg);

    std::vector<bool> arm_values;
    if (arms != TrackingArms::On) arm_values.push_back(false);
    if (arms != TrackingArms::Off) arm_values.push_back(true);

    struct Job {
        Cell cell;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    const auto& ax = cfg.sweep;
    for (std::size_t im = 0; im < ax.modulations.size(); ++im)
        for (std::size_t ir = 0; ir < ax.symbol_rates.size(); ++ir)
            for (std::size_t ia = 0; ia < ax.ascrs.size(); ++ia)
                for (std::size_t ih = 0; ih < ax.h_airs.size(); ++ih)
                    for (bool on : arm_values)
                        jobs.push_back({Cell{ax.modulations[im], ax.symbol_rates[ir], ax.ascrs[ia], ax.h_airs[ih], on},
                                        cell_seed(*cfg.seed, im, ir, ia, ih)});

    std::vector<RunResult> rows(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                rows[i] = run_trial(cfg, jobs[i].cell, jobs[i].seed);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n_threads =
        std::min<std::size_t>(jobs.size(), cfg.threads > 0 ? static_cast<std::size_t>(cfg.threads) : hw);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            throw std::runtime_error("sweep cell " + describe(jobs[i].cell) + " failed: " + e.what());
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<RunResult>& rows) {
    out << "# wavetrack " << kVersion << '\n';
    out << "modulation,symbol_rate_baud,ascr_rad_s,h_air_m,tracking,avg_ber,plr,throughput_bps,mean_capture,"
           "offset_std_x_m,offset_std_y_m,seed\n";
    for (const auto& r : rows) {
        out << r.cell.modulation << ',' << format_double(r.cell.symbol_rate) << ',' << format_double(r.cell.ascr)
            << ',' << format_double(r.cell.h_air) << ',' << (r.cell.tracking ? "on" : "off") << ','
            << format_double(r.link.avg_ber) << ',' << format_double(r.link.plr) << ','
            << format_double(r.link.throughput_bps) << ',' << format_double(r.mean_capture) << ','
            << format_double(r.offset_std[0]) << ',' << format_double(r.offset_std[1]) << ',' << r.seed << '\n';
    }
}

void write_run_result(std::ostream& out, const RunResult& r) {
    out << "modulation: " << r.cell.modulation << '\n'
        << "symbol_rate_baud: " << format_double(r.cell.symbol_rate) << '\n'
        << "ascr_rad_s: " << format_double(r.cell.ascr) << '\n'
        << "h_air_m: " << format_double(r.cell.h_air) << '\n'
        << "tracking: " << (r.cell.tracking ? "on" : "off") << '\n'
        << "seed: " << r.seed << '\n'
        << "packets: " << r.packets.size() << '\n'
        << "duration_s: " << format_double(r.duration) << '\n'
        << "avg_ber: " << format_double(r.link.avg_ber) << '\n'
        << "plr: " << format_double(r.link.plr) << '\n'
        << "throughput_bps: " << format_double(r.link.throughput_bps) << '\n'
        << "mean_capture: " << format_double(r.mean_capture) << '\n'
        << "min_capture: " << format_double(r.min_capture) << '\n'
        << "offset_std_x_m: " << format_double(r.offset_std[0]) << '\n'
        << "offset_std_y_m: " << format_double(r.offset_std[1]) << '\n'
        << "occupancy_idle_s: " << format_double(r.mode_occupancy[0]) << '\n'
        << "occupancy_tracking_s: " << format_double(r.mode_occupancy[1]) << '\n'
        << "occupancy_lost_s: " << format_double(r.mode_occupancy[2]) << '\n';
}

CalibrationReport calibrate(const ExperimentConfig& config) {
    config.validate();
    CalibrationReport report;
    report.config = config;
    ExperimentConfig& cfg = report.config;

    ExperimentConfig fit_link = config;
    fit_link.link.snr_peak.reset();
    const double snr_peak = resolve_snr_peak(fit_link);
    {
        std::ostringstream os;
        os << "link: snr_peak " << format_double(snr_peak) << " puts " << config.link.anchor.modulation << " at "
           << format_double(config.link.anchor.symbol_rate) << " Bd on static water (h_air "
           << format_double(config.link.anchor.h_air) << " m) at BER " << format_double(config.link.anchor.ber);
        if (config.link.snr_peak) os << " (was " << format_double(*config.link.snr_peak) << ")";
        report.lines.push_back(os.str());
    }
    cfg.link.snr_peak = snr_peak;

    cfg.wave.omega_scales.clear();
    for (double ascr : config.sweep.ascrs) {
        if (ascr == 0.0) continue;
        double scale = 0.0;
        try {
            scale = fit_omega_scale(config, ascr);
        } catch (const CalibrationFailure& e) {
            throw CalibrationFailure(std::string("wave calibration for ASCR ") + format_double(ascr) + " rad/s: " +
                                     e.what());
        }
        cfg.wave.omega_scales.push_back({ascr, scale});
        const double measured = ascr_estimate(resolve_wave(cfg, ascr), cfg.geometry.x0, cfg.wave.sampling);
        std::ostringstream os;
        os << "wave: omega scale " << format_double(scale) << " gives ASCR " << format_double(measured)
           << " rad/s (target " << format_double(ascr) << ")";
        if (const OmegaScale* old = cached_scale(config, ascr)) os << " (was " << format_double(old->scale) << ")";
        report.lines.push_back(os.str());
    }
    return report;
}

}  // namespace wavetrack
