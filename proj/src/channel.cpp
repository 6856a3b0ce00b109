#include "aol/channel.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "aol/errors.hpp"

namespace aol::channel {
namespace {

struct Row {
    int cqi;
    const char* modulation;
    double efficiency;
};

// 3GPP TS 36.213 Table 7.2.3-1 (4-bit CQI).
constexpr Row kRows[] = {
    {1, "QPSK", 0.1523},  {2, "QPSK", 0.2344},   {3, "QPSK", 0.3770},
    {4, "QPSK", 0.6016},  {5, "QPSK", 0.8770},   {6, "QPSK", 1.1758},
    {7, "16QAM", 1.4766}, {8, "16QAM", 1.9141},  {9, "16QAM", 2.4063},
    {10, "64QAM", 2.7305}, {11, "64QAM", 3.3223}, {12, "64QAM", 3.9023},
    {13, "64QAM", 4.5234}, {14, "64QAM", 5.1152}, {15, "64QAM", 5.5547},
};

}  // namespace

CqiTable CqiTable::builtin() {
    CqiTable t;
    for (const Row& r : kRows) {
        t.efficiency_[r.cqi - 1] = r.efficiency;
        t.modulation_[r.cqi - 1] = r.modulation;
    }
    t.validate();
    return t;
}

CqiTable CqiTable::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("channel: cannot open CQI table file: " + path);
    CqiTable t;
    std::array<bool, kCqiMax> seen{};
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string idx_s, mod, eff_s;
        if (!std::getline(ss, idx_s, ',') || !std::getline(ss, mod, ',') ||
            !std::getline(ss, eff_s, ','))
            throw IoError("channel: malformed CQI table row: " + line);
        if (idx_s == "cqi") continue;  // header
        const int idx = std::atoi(idx_s.c_str());
        if (idx < kCqiMin || idx > kCqiMax)
            throw IoError("channel: CQI index out of range in table file");
        if (seen[idx - 1]) throw IoError("channel: duplicate CQI index");
        seen[idx - 1] = true;
        t.efficiency_[idx - 1] = std::strtod(eff_s.c_str(), nullptr);
        t.modulation_[idx - 1] = mod;
    }
    for (bool s : seen)
        if (!s) throw IoError("channel: CQI table file is missing rows");
    t.validate();
    return t;
}

void CqiTable::validate() const {
    double prev = 0.0;
    for (int i = 0; i < kCqiMax; ++i) {
        if (!(efficiency_[i] > prev))
            throw IoError("channel: CQI efficiencies must be positive and "
                          "strictly increasing");
        prev = efficiency_[i];
    }
}

double CqiTable::efficiency(int cqi) const {
    if (cqi < kCqiMin || cqi > kCqiMax)
        throw std::domain_error("channel: CQI index must be in 1..15");
    return efficiency_[cqi - 1];
}

const std::string& CqiTable::modulation(int cqi) const {
    if (cqi < kCqiMin || cqi > kCqiMax)
        throw std::domain_error("channel: CQI index must be in 1..15");
    return modulation_[cqi - 1];
}

double latency_s(const TransmissionSpec& spec, const CqiTable& table) {
    if (!(spec.payload_bits > 0.0))
        throw std::domain_error("channel: payload must be > 0");
    if (!(spec.bandwidth_hz > 0.0))
        throw std::domain_error("channel: bandwidth must be > 0");
    return spec.payload_bits / (table.efficiency(spec.cqi) * spec.bandwidth_hz);
}

double min_bandwidth_for_deadline(double payload_bits, int cqi,
                                  double deadline_s,
                                  const std::vector<double>& menu_hz,
                                  const CqiTable& table) {
    if (menu_hz.empty()) throw std::domain_error("channel: empty bandwidth menu");
    for (double b : menu_hz) {
        if (latency_s({payload_bits, b, cqi}, table) <= deadline_s) return b;
    }
    return menu_hz.back();
}

int sample_cqi(Rng& rng) {
    return kCqiMin + static_cast<int>(rng.uniform_int(kCqiMax));
}

}  // namespace aol::channel
