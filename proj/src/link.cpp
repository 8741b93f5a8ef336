#include "wavetrack/link.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wavetrack/errors.hpp"

namespace wavetrack {

Modulation Modulation::ook() { return {2, 1.0}; }
Modulation Modulation::pam4() { return {4, 2.0}; }

Modulation Modulation::pam6(Pam6Mapping mapping) {
    return {6, mapping == Pam6Mapping::Log2 ? std::log2(6.0) : 2.5};
}

Modulation Modulation::from_name(const std::string& name, Pam6Mapping mapping) {
    if (name == "ook" || name == "pam2") return ook();
    if (name == "pam4") return pam4();
    if (name == "pam6") return pam6(mapping);
    throw InvalidArgument("unknown modulation '" + name + "' (expected ook, pam4 or pam6)");
}

std::string Modulation::name() const {
    return levels == 2 ? "ook" : "pam" + std::to_string(levels);
}

void LinkBudget::validate() const {
    if (!(snr_peak > 0)) throw InvalidArgument("link.snr_peak must be > 0");
    if (!(system_bandwidth > 0)) throw InvalidArgument("link.system_bandwidth must be > 0");
}

double effective_snr(double capture, const LinkBudget& budget, double symbol_rate) {
    if (!(capture >= 0 && capture <= 1)) throw InvalidArgument("effective_snr: capture must be in [0, 1]");
    if (!(symbol_rate > 0)) throw InvalidArgument("effective_snr: symbol_rate must be > 0");
    const double ratio = symbol_rate / (2.0 * budget.system_bandwidth);
    return budget.snr_peak * capture * capture / (1.0 + ratio * ratio);
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double ber_from_snr(double snr, const Modulation& mod) {
    if (!(snr >= 0)) throw InvalidArgument("ber_from_snr: snr must be >= 0");
    const double m = mod.levels;
    const double prefactor = 2.0 * (m - 1.0) / (m * std::log2(m));
    const double ber = prefactor * q_function(std::sqrt(3.0 * snr / (m * m - 1.0)));
    return std::clamp(ber, 0.0, 0.5);
}

double snr_for_ber(double ber, const Modulation& mod) {
    if (!(ber > 0 && ber < 0.5)) throw InvalidArgument("snr_for_ber: ber must be in (0, 0.5)");
    double lo = 0.0;
    double hi = 1.0;
    while (ber_from_snr(hi, mod) > ber) {
        hi *= 2.0;
        if (hi > 1e12) throw CalibrationFailure("snr_for_ber: target BER unreachable");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (ber_from_snr(mid, mod) > ber ? lo : hi) = mid;
    }
    return hi;
}

PacketResult packet_ber(std::span<const double> captures, const LinkBudget& budget, double symbol_rate,
                        const Modulation& mod, double fec_limit) {
    if (captures.empty()) throw InvalidArgument("packet_ber: empty packet window");
    double sum = 0.0;
    for (double c : captures) sum += ber_from_snr(effective_snr(c, budget, symbol_rate), mod);
    PacketResult r;
    r.ber = sum / static_cast<double>(captures.size());
    r.lost = r.ber > fec_limit;
    return r;
}

LinkSummary aggregate(std::span<const PacketResult> results, double symbol_rate, const Modulation& mod) {
    if (results.empty()) throw InvalidArgument("aggregate: no packets");
    // Summed in sorted order so the mean does not depend on packet order.
    std::vector<double> bers;
    bers.reserve(results.size());
    std::size_t lost = 0;
    for (const auto& r : results) {
        bers.push_back(r.ber);
        lost += r.lost ? 1 : 0;
    }
    std::sort(bers.begin(), bers.end());
    double ber_sum = 0.0;
    for (double b : bers) ber_sum += b;
    const auto n = static_cast<double>(results.size());
    LinkSummary s;
    s.avg_ber = ber_sum / n;
    s.plr = static_cast<double>(lost) / n;
    s.throughput_bps = symbol_rate * mod.bits_per_symbol * (1.0 - s.plr);
    return s;
}

}  // namespace wavetrack
