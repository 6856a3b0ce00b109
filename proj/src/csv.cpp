#include "aol/csv.hpp"

#include <charconv>

#include "aol/errors.hpp"

namespace aol::csv {

std::string format(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format(std::int64_t v) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

Writer::Writer(const std::string& path) : out_(path), path_(path) {
    if (!out_) throw IoError("csv: cannot open for writing: " + path);
}

void Writer::header(const std::vector<std::string>& names) { row(names); }

void Writer::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
}

void Writer::close() {
    out_.close();
    if (!out_) throw IoError("csv: write failed: " + path_);
}

void write_steps(const std::string& path,
                 const std::vector<loopsim::StepRecord>& steps) {
    Writer w(path);
    w.header({"t", "x", "x_dot", "theta", "theta_dot", "u", "dl_aol", "ul_aol",
              "dl_aoi", "ul_aoi", "stage_cost"});
    for (const auto& s : steps) {
        w.row({format(s.t), format(s.state.x), format(s.state.x_dot),
               format(s.state.theta), format(s.state.theta_dot), format(s.u),
               format(s.ages.dl_aol), format(s.ages.ul_aol),
               format(s.ages.dl_aoi), format(s.ages.ul_aoi),
               format(s.stage_cost)});
    }
    w.close();
}

void write_decisions(const std::string& path,
                     const std::vector<loopsim::DecisionRecord>& decisions,
                     const learning::AgeBinning& binning) {
    Writer w(path);
    w.header({"t", "aol_bin", "cqi", "bandwidth",
              "stage_cost_until_next_decision"});
    for (const auto& d : decisions) {
        w.row({format(d.t), format(std::int64_t{binning.bin(d.dl_aol)}),
               format(std::int64_t{d.cqi}), format(d.bandwidth_hz),
               format(d.stage_cost)});
    }
    w.close();
}

}  // namespace aol::csv
