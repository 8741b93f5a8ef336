// Minimal self-contained SVG line charts for sweep output.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "format.hpp"
#include "wavetrack/harness.hpp"

namespace wavetrack {

namespace {

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
    bool dashed = false;
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    std::vector<Series> series;
};

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

void write_chart(const std::filesystem::path& path, const Chart& chart) {
    constexpr double W = 640, H = 420, L = 70, R = 170, T = 40, B = 50;
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    auto ty = [&](double y) { return chart.log_y ? std::log10(std::max(y, 1e-12)) : y; };
    for (const auto& s : chart.series)
        for (auto [x, y] : s.points) {
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, ty(y));
            y_hi = std::max(y_hi, ty(y));
        }
    if (!std::isfinite(x_lo)) x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
    if (x_hi == x_lo) x_lo -= 0.5, x_hi += 0.5;
    if (!chart.log_y) y_lo = std::min(y_lo, 0.0);
    if (y_hi == y_lo) y_hi = y_lo + 1.0;
    if (chart.log_y) y_lo = std::floor(y_lo), y_hi = std::ceil(y_hi);

    auto px = [&](double x) { return L + (x - x_lo) / (x_hi - x_lo) * (W - L - R); };
    auto py = [&](double y) { return H - B - (ty(y) - y_lo) / (y_hi - y_lo) * (H - T - B); };

    std::ofstream out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << chart.title
        << "</text>\n";
    out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = x_lo + (x_hi - x_lo) * i / 4.0;
        const double yv = y_lo + (y_hi - y_lo) * i / 4.0;
        const double ypix = H - B - (H - T - B) * i / 4.0;
        out << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << num(xv)
            << "</text>\n";
        out << "<text x=\"" << L - 6 << "\" y=\"" << ypix + 4 << "\" text-anchor=\"end\">"
            << (chart.log_y ? "1e" + num(yv) : num(yv)) << "</text>\n";
        out << "<line x1=\"" << L << "\" y1=\"" << ypix << "\" x2=\"" << W - R << "\" y2=\"" << ypix
            << "\" stroke=\"#ddd\"/>\n";
    }
    out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << chart.x_label
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << (T + H - B) / 2 << ")\">" << chart.y_label << "</text>\n";

    for (std::size_t i = 0; i < chart.series.size(); ++i) {
        const auto& s = chart.series[i];
        const char* color = kColors[(i / 2) % std::size(kColors)];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\""
            << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
        for (auto [x, y] : s.points) out << px(x) << ',' << py(y) << ' ';
        out << "\"/>\n";
        for (auto [x, y] : s.points)
            out << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        const double ly = T + 16.0 * static_cast<double>(i);
        out << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 34 << "\" y2=\"" << ly
            << "\" stroke=\"" << color << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "")
            << "/>\n";
        out << "<text x=\"" << W - R + 40 << "\" y=\"" << ly + 4 << "\">" << s.name << "</text>\n";
    }
    out << "</svg>\n";
}

// One series per (modulation, tracking arm) over rows selected by `keep`, x from `xval`.
template <typename Keep, typename X, typename Y>
std::vector<Series> collect(const std::vector<RunResult>& rows, Keep keep, X xval, Y yval) {
    std::vector<Series> out;
    for (const auto& r : rows) {
        if (!keep(r)) continue;
        const std::string name = r.cell.modulation + (r.cell.tracking ? " w/ tracking" : " w/o tracking");
        auto it = std::find_if(out.begin(), out.end(), [&](const Series& s) { return s.name == name; });
        if (it == out.end()) {
            out.push_back({name, {}, !r.cell.tracking});
            it = out.end() - 1;
        }
        it->points.emplace_back(xval(r), yval(r));
    }
    for (auto& s : out) std::sort(s.points.begin(), s.points.end());
    return out;
}

}  // namespace

std::vector<std::filesystem::path> write_sweep_plots(const std::filesystem::path& dir,
                                                     const std::vector<RunResult>& rows) {
    std::vector<std::filesystem::path> written;
    if (rows.empty()) return written;
    std::filesystem::create_directories(dir);
    const double ascr0 = rows.front().cell.ascr;
    const double h0 = rows.front().cell.h_air;
    auto at_ascr_h = [&](const RunResult& r) { return r.cell.ascr == ascr0 && r.cell.h_air == h0; };
    auto rate_mbd = [](const RunResult& r) { return r.cell.symbol_rate / 1e6; };
    const std::string suffix = " (ASCR " + num(ascr0) + " rad/s, " + num(h0) + " m air path)";

    Chart ber{"Average BER vs symbol rate" + suffix, "symbol rate (MBd)", "average BER", true,
              collect(rows, at_ascr_h, rate_mbd, [](const RunResult& r) { return r.link.avg_ber; })};
    Chart plr{"Packet loss rate vs symbol rate" + suffix, "symbol rate (MBd)", "PLR", false,
              collect(rows, at_ascr_h, rate_mbd, [](const RunResult& r) { return r.link.plr; })};
    Chart thr{"Throughput vs symbol rate" + suffix, "symbol rate (MBd)", "throughput (Mb/s)", false,
              collect(rows, at_ascr_h, rate_mbd, [](const RunResult& r) { return r.link.throughput_bps / 1e6; })};
    for (const auto& [name, chart] : {std::pair{"ber_vs_symbol_rate.svg", &ber}, std::pair{"plr_vs_symbol_rate.svg", &plr},
                                      std::pair{"throughput_vs_symbol_rate.svg", &thr}}) {
        write_chart(dir / name, *chart);
        written.push_back(dir / name);
    }

    // PLR vs ASCR at the symbol rate closest to 600 MBd.
    double rate = rows.front().cell.symbol_rate;
    for (const auto& r : rows)
        if (std::abs(r.cell.symbol_rate - 600e6) < std::abs(rate - 600e6)) rate = r.cell.symbol_rate;
    auto at_rate_h = [&](const RunResult& r) { return r.cell.symbol_rate == rate && r.cell.h_air == h0; };
    Chart by_ascr{"Packet loss rate vs ASCR (" + num(rate / 1e6) + " MBd, " + num(h0) + " m air path)",
                  "ASCR (rad/s)", "PLR", false,
                  collect(rows, at_rate_h, [](const RunResult& r) { return r.cell.ascr; },
                          [](const RunResult& r) { return r.link.plr; })};
    write_chart(dir / "plr_vs_ascr.svg", by_ascr);
    written.push_back(dir / "plr_vs_ascr.svg");
    return written;
}

}  // namespace wavetrack
