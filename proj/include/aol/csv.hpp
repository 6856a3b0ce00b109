#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "aol/learning.hpp"
#include "aol/loopsim.hpp"

namespace aol::csv {

// Shortest round-trip decimal form via std::to_chars: locale-free and
// byte-identical across machines.
std::string format(double v);
std::string format(std::int64_t v);

// Simple row writer; every cell goes through the deterministic formatter.
class Writer {
  public:
    explicit Writer(const std::string& path);
    void header(const std::vector<std::string>& names);
    void row(const std::vector<std::string>& cells);
    void close();

  private:
    std::ofstream out_;
    std::string path_;
};

// Per-actuation-step rows: t,x,x_dot,theta,theta_dot,u,dl_aol,ul_aol,
// dl_aoi,ul_aoi,stage_cost.
void write_steps(const std::string& path,
                 const std::vector<loopsim::StepRecord>& steps);

// Per-DL-decision rows: t,aol_bin,cqi,bandwidth,stage_cost_until_next_decision.
void write_decisions(const std::string& path,
                     const std::vector<loopsim::DecisionRecord>& decisions,
                     const learning::AgeBinning& binning);

}  // namespace aol::csv
