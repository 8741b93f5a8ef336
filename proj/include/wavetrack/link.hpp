#pragma once

// Capture fraction -> electrical SNR -> PAM-M BER -> packet loss against the
// SD-FEC limit -> PLR and throughput.

#include <span>
#include <string>
#include <vector>

#include "wavetrack/errors.hpp"

namespace wavetrack {

/// Bit mapping used for PAM6 throughput accounting.
enum class Pam6Mapping { Log2, FiveBitsPerTwoSymbols };

struct Modulation {
    int levels = 2;
    double bits_per_symbol = 1.0;

    static Modulation ook();
    static Modulation pam4();
    static Modulation pam6(Pam6Mapping mapping = Pam6Mapping::Log2);
    /// "ook", "pam2", "pam4", "pam6".
    static Modulation from_name(const std::string& name, Pam6Mapping mapping = Pam6Mapping::Log2);

    std::string name() const;
};

struct LinkBudget {
    double snr_peak = 100.0;         // linear SNR at full capture, low symbol rate
    double system_bandwidth = 1e9;   // Hz

    void validate() const;
};

struct PacketResult {
    double ber = 0.0;
    bool lost = false;
};

struct LinkSummary {
    double avg_ber = 0.0;
    double plr = 0.0;
    double throughput_bps = 0.0;
};

inline constexpr double kDefaultFecLimit = 2e-2;

/// snr_peak * capture^2 / (1 + (symbol_rate / (2 B))^2).
double effective_snr(double capture, const LinkBudget& budget, double symbol_rate);

/// Gaussian tail Q(x) = erfc(x / sqrt 2) / 2.
double q_function(double x);

/// 2(M-1)/(M log2 M) * Q(sqrt(3 snr / (M^2 - 1))), clamped to [0, 0.5].
double ber_from_snr(double snr, const Modulation& mod);

/// Smallest SNR with ber_from_snr(snr) <= ber (bisection). ber in (0, 0.5).
double snr_for_ber(double ber, const Modulation& mod);

/// Time-average BER over the capture samples of one packet; lost iff ber > fec_limit.
PacketResult packet_ber(std::span<const double> captures, const LinkBudget& budget, double symbol_rate,
                        const Modulation& mod, double fec_limit = kDefaultFecLimit);

/// Mean BER over all packets (lost included), PLR, symbol_rate * bits * (1 - plr).
LinkSummary aggregate(std::span<const PacketResult> results, double symbol_rate, const Modulation& mod);

}  // namespace wavetrack
