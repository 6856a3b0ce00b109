#pragma once

#include <array>
#include <string>
#include <vector>

#include "aol/rng.hpp"

namespace aol::channel {

inline constexpr int kCqiMin = 1;
inline constexpr int kCqiMax = 15;

// 4-bit CQI index -> spectral efficiency (bits/s/Hz). Entries ship as a
// documented data file so the transcription stays auditable; the builtin
// table is the same data compiled in.
class CqiTable {
  public:
    static CqiTable builtin();
    static CqiTable load_csv(const std::string& path);

    double efficiency(int cqi) const;           // throws std::domain_error
    const std::string& modulation(int cqi) const;

  private:
    std::array<double, kCqiMax> efficiency_{};
    std::array<std::string, kCqiMax> modulation_{};
    void validate() const;
};

struct TransmissionSpec {
    double payload_bits;
    double bandwidth_hz;
    int cqi;
};

// Time to deliver the payload: payload / (efficiency(cqi) * bandwidth).
double latency_s(const TransmissionSpec& spec, const CqiTable& table);

// Smallest menu bandwidth meeting the deadline; clamps to max(menu) when no
// element qualifies so low-CQI baselines still transmit.
double min_bandwidth_for_deadline(double payload_bits, int cqi,
                                  double deadline_s,
                                  const std::vector<double>& menu_hz,
                                  const CqiTable& table);

// Uniform over {1..15}; drawn once per episode and held constant.
int sample_cqi(Rng& rng);

}  // namespace aol::channel
