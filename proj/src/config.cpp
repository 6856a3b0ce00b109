#include "aol/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "aol/csv.hpp"
#include "aol/errors.hpp"

namespace aol::config {
namespace {

using nlohmann::json;

json to_json(const ScenarioConfig& c) {
    json j;
    j["plant"] = {{"cart_mass", c.plant.cart_mass},
                  {"pole_mass", c.plant.pole_mass},
                  {"pole_length", c.plant.pole_length},
                  {"gravity", c.plant.gravity},
                  {"noise_sigma", c.plant.noise_sigma},
                  {"theta0_min", c.plant.theta0_min},
                  {"theta0_max", c.plant.theta0_max}};
    std::vector<double> q_diag(4);
    for (int i = 0; i < 4; ++i) q_diag[i] = c.weights.Q(i, i);
    j["weights"] = {{"q_diag", q_diag}, {"r", c.weights.R}};
    j["loop"] = {{"dt_in_sweep_ms", c.loop.dt_in_sweep_ms},
                 {"dt_out_ms", c.loop.dt_out_ms},
                 {"payload_bits", c.loop.payload_bits},
                 {"ul_bandwidth_khz", c.loop.ul_bandwidth_khz},
                 {"horizon_s", c.loop.horizon_s},
                 {"theta_limit", c.loop.theta_limit},
                 {"x_limit", c.loop.x_limit},
                 {"terminal_penalty", c.loop.terminal_penalty},
                 {"zero_latency", c.loop.zero_latency}};
    j["channel"] = {{"table_path", c.channel.table_path},
                    {"shared_cqi", c.channel.shared_cqi}};
    j["menu_khz"] = c.menu_khz;
    j["binning"] = {{"bin_width_ms", c.binning.bin_width_s * 1e3},
                    {"n_bins", c.binning.n_bins}};
    j["value_learning"] = {
        {"episodes", c.value_learning.episodes},
        {"gamma", c.value_learning.gamma},
        {"alpha0", c.value_learning.alpha0},
        {"alpha_kappa", c.value_learning.alpha_kappa},
        {"fixed_bandwidths_khz", c.value_learning.fixed_bandwidths_khz}};
    j["training"] = {{"episodes", c.training.episodes},
                     {"eps0", c.training.eps0},
                     {"eps_decay", c.training.eps_decay},
                     {"eps_floor", c.training.eps_floor},
                     {"alpha0", c.training.alpha0},
                     {"alpha_decay", c.training.alpha_decay},
                     {"alpha_floor", c.training.alpha_floor},
                     {"gamma", c.training.gamma},
                     {"sarsa", c.training.sarsa}};
    j["evaluation"] = {{"episodes", c.evaluation.episodes},
                       {"deadlines_ms", c.evaluation.deadlines_ms}};
    j["simulate"] = {{"episodes", c.simulate.episodes},
                     {"policy", c.simulate.policy},
                     {"fixed_deadline_ms", c.simulate.fixed_deadline_ms},
                     {"fixed_bandwidth_khz", c.simulate.fixed_bandwidth_khz},
                     {"dt_in_ms", c.simulate.dt_in_ms}};
    j["seed"] = c.seed;
    j["out_dir"] = c.out_dir;
    return j;
}

ScenarioConfig from_json(const json& j) {
    ScenarioConfig c;
    const json& p = j.at("plant");
    c.plant.cart_mass = p.at("cart_mass");
    c.plant.pole_mass = p.at("pole_mass");
    c.plant.pole_length = p.at("pole_length");
    c.plant.gravity = p.at("gravity");
    c.plant.noise_sigma = p.at("noise_sigma");
    c.plant.theta0_min = p.at("theta0_min");
    c.plant.theta0_max = p.at("theta0_max");

    const std::vector<double> q_diag = j.at("weights").at("q_diag");
    if (q_diag.size() != 4)
        throw ConfigError("config: weights.q_diag must have 4 entries");
    c.weights.Q = Eigen::Matrix4d::Zero();
    for (int i = 0; i < 4; ++i) c.weights.Q(i, i) = q_diag[i];
    c.weights.R = j.at("weights").at("r");

    const json& l = j.at("loop");
    c.loop.dt_in_sweep_ms = l.at("dt_in_sweep_ms").get<std::vector<double>>();
    c.loop.dt_out_ms = l.at("dt_out_ms");
    c.loop.payload_bits = l.at("payload_bits");
    c.loop.ul_bandwidth_khz = l.at("ul_bandwidth_khz");
    c.loop.horizon_s = l.at("horizon_s");
    c.loop.theta_limit = l.at("theta_limit");
    c.loop.x_limit = l.at("x_limit");
    c.loop.terminal_penalty = l.at("terminal_penalty");
    c.loop.zero_latency = l.at("zero_latency");

    c.channel.table_path = j.at("channel").at("table_path");
    c.channel.shared_cqi = j.at("channel").at("shared_cqi");
    c.menu_khz = j.at("menu_khz").get<std::vector<double>>();
    c.binning.bin_width_s = j.at("binning").at("bin_width_ms").get<double>() * 1e-3;
    c.binning.n_bins = j.at("binning").at("n_bins");

    const json& v = j.at("value_learning");
    c.value_learning.episodes = v.at("episodes");
    c.value_learning.gamma = v.at("gamma");
    c.value_learning.alpha0 = v.at("alpha0");
    c.value_learning.alpha_kappa = v.at("alpha_kappa");
    c.value_learning.fixed_bandwidths_khz =
        v.at("fixed_bandwidths_khz").get<std::vector<double>>();

    const json& t = j.at("training");
    c.training.episodes = t.at("episodes");
    c.training.eps0 = t.at("eps0");
    c.training.eps_decay = t.at("eps_decay");
    c.training.eps_floor = t.at("eps_floor");
    c.training.alpha0 = t.at("alpha0");
    c.training.alpha_decay = t.at("alpha_decay");
    c.training.alpha_floor = t.at("alpha_floor");
    c.training.gamma = t.at("gamma");
    c.training.sarsa = t.at("sarsa");

    c.evaluation.episodes = j.at("evaluation").at("episodes");
    c.evaluation.deadlines_ms =
        j.at("evaluation").at("deadlines_ms").get<std::vector<double>>();

    const json& s = j.at("simulate");
    c.simulate.episodes = s.at("episodes");
    c.simulate.policy = s.at("policy");
    c.simulate.fixed_deadline_ms = s.at("fixed_deadline_ms");
    c.simulate.fixed_bandwidth_khz = s.at("fixed_bandwidth_khz");
    c.simulate.dt_in_ms = s.at("dt_in_ms");

    c.seed = j.at("seed");
    c.out_dir = j.at("out_dir");
    return c;
}

bool type_compatible(const json& base, const json& user) {
    if (base.is_number() && user.is_number()) return true;
    if (base.is_boolean() && user.is_boolean()) return true;
    if (base.is_string() && user.is_string()) return true;
    if (base.is_array() && user.is_array()) return true;
    return false;
}

// Merge user keys into the defaults template; unknown keys or mismatched
// types are configuration errors.
void merge_strict(json& base, const json& user, const std::string& path) {
    if (!user.is_object())
        throw ConfigError("config: expected an object at '" +
                          (path.empty() ? "<root>" : path) + "'");
    for (const auto& [key, value] : user.items()) {
        const std::string here = path.empty() ? key : path + "." + key;
        if (!base.contains(key))
            throw ConfigError("config: unknown key '" + here + "'");
        if (base[key].is_object()) {
            merge_strict(base[key], value, here);
        } else if (type_compatible(base[key], value)) {
            base[key] = value;
        } else {
            throw ConfigError("config: wrong type for key '" + here + "'");
        }
    }
}

}  // namespace

ScenarioConfig ScenarioConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("config: cannot open: " + path);
    json user;
    try {
        user = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: parse error: ") + e.what());
    }
    json base = to_json(ScenarioConfig::defaults());
    merge_strict(base, user, "");
    ScenarioConfig c = from_json(base);
    c.validate();
    return c;
}

void ScenarioConfig::apply_override(const std::string& key_value) {
    const std::size_t eq = key_value.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override: expected KEY=VALUE, got '" + key_value +
                          "'");
    const std::string key = key_value.substr(0, eq);
    const std::string value = key_value.substr(eq + 1);

    json j = to_json(*this);
    json* node = &j;
    std::istringstream parts(key);
    std::string part;
    std::string here;
    while (std::getline(parts, part, '.')) {
        here = here.empty() ? part : here + "." + part;
        if (!node->is_object() || !node->contains(part))
            throw ConfigError("override: unknown key '" + here + "'");
        node = &(*node)[part];
    }
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value;  // bare strings allowed
    }
    if (node->is_object() || !type_compatible(*node, parsed))
        throw ConfigError("override: wrong type for key '" + key + "'");
    *node = parsed;
    ScenarioConfig next = from_json(j);
    next.validate();
    *this = next;
}

void ScenarioConfig::validate() const {
    plant.validate();
    weights.validate();
    binning.validate();
    training.validate();
    menu().validate();
    if (loop.dt_in_sweep_ms.empty())
        throw ConfigError("config: loop.dt_in_sweep_ms must be non-empty");
    for (double v : loop.dt_in_sweep_ms)
        loop_config(v);  // per-value loop invariants
    if (value_learning.episodes < 1 || evaluation.episodes < 1 ||
        simulate.episodes < 1)
        throw ConfigError("config: episode counts must be >= 1");
    if (value_learning.fixed_bandwidths_khz.empty())
        throw ConfigError(
            "config: value_learning.fixed_bandwidths_khz must be non-empty");
    if (simulate.policy != "fixed_deadline" &&
        simulate.policy != "fixed_bandwidth")
        throw ConfigError(
            "config: simulate.policy must be fixed_deadline or "
            "fixed_bandwidth");
    cqi_table();  // table file must load if configured
}

std::string ScenarioConfig::dump() const { return to_json(*this).dump(2); }

std::uint64_t ScenarioConfig::hash() const {
    const std::string s = to_json(*this).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

loopsim::LoopConfig ScenarioConfig::loop_config(double dt_in_ms) const {
    loopsim::LoopConfig lc;
    lc.dt_in = dt_in_ms * 1e-3;
    lc.dt_out = loop.dt_out_ms * 1e-3;
    lc.payload_bits = loop.payload_bits;
    lc.ul_bandwidth_hz = loop.ul_bandwidth_khz * 1e3;
    lc.horizon_s = loop.horizon_s;
    lc.theta_limit = loop.theta_limit;
    lc.x_limit = loop.x_limit;
    lc.terminal_penalty = loop.terminal_penalty;
    lc.zero_latency = loop.zero_latency;
    lc.validate(channel::kCqiMin, cqi_table());
    return lc;
}

alloc::BandwidthMenu ScenarioConfig::menu() const {
    alloc::BandwidthMenu m;
    for (double khz : menu_khz) m.values_hz.push_back(khz * 1e3);
    return m;
}

channel::CqiTable ScenarioConfig::cqi_table() const {
    return channel.table_path.empty()
               ? channel::CqiTable::builtin()
               : channel::CqiTable::load_csv(channel.table_path);
}

std::vector<double> ScenarioConfig::dt_in_sweep_s() const {
    std::vector<double> out;
    for (double ms : loop.dt_in_sweep_ms) out.push_back(ms * 1e-3);
    return out;
}

void write_manifest(const ScenarioConfig& cfg, const std::string& out_dir,
                    const std::vector<std::uint64_t>& seeds,
                    const std::string& command) {
    json j;
    j["command"] = command;
    j["config_hash"] = csv::format(static_cast<std::int64_t>(cfg.hash()));
    j["config"] = json::parse(cfg.dump());
    j["seeds"] = seeds;
    j["format_version"] = 1;
    std::ofstream out(out_dir + "/manifest.json");
    if (!out) throw IoError("manifest: cannot write to " + out_dir);
    out << j.dump(2) << "\n";
}

}  // namespace aol::config
