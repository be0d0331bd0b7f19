#include "qpfk/config.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "qpfk/error.hpp"
#include "qpfk/io.hpp"

namespace qpfk {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const std::set<std::string> kTopLevel{"d",      "N",       "alpha",    "omega",  "tau",       "K_max",
                                      "U_modes", "V_modes", "lambda0",  "tol",    "max_iter",  "m_list",
                                      "ramp",   "bisect",  "lindstedt", "initial_state", "seed"};

template <class T>
T get_as(const json& node, const std::string& field) {
    try {
        return node.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(field, "has the wrong type");
    }
}

double get_number(const json& obj, const std::string& key, const std::string& field, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(field, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(field, "must be finite");
    return x;
}

int get_int(const json& obj, const std::string& key, const std::string& field, int fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(field, "must be an integer");
    return v.get<int>();
}

std::vector<double> get_vector(const json& obj, const std::string& key, const std::string& field) {
    const auto& v = obj.at(key);
    if (!v.is_array()) throw ConfigError(field, "must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError(field, "must be an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

std::vector<ForceMode> parse_modes(const json& node, const std::string& field, int d, int n) {
    if (!node.is_array()) throw ConfigError(field, "must be a list of {k, re, im} entries");
    std::vector<ForceMode> modes;
    for (std::size_t i = 0; i < node.size(); ++i) {
        const auto& entry = node[i];
        const std::string where = field + "[" + std::to_string(i) + "]";
        if (!entry.is_object() || !entry.contains("k")) throw ConfigError(where, "needs a 'k' index");
        const auto k = get_as<std::vector<int>>(entry.at("k"), where + ".k");
        if (static_cast<int>(k.size()) != d) throw ConfigError(where + ".k", "must have d = " + std::to_string(d) + " entries");
        for (int ki : k) {
            if (std::abs(ki) >= n / 2) throw ConfigError(where + ".k", "lies outside the band |k_i| < N/2");
        }
        modes.push_back({k, cplx(get_number(entry, "re", where + ".re", 0.0), get_number(entry, "im", where + ".im", 0.0))});
    }
    return modes;
}

ordered_json modes_json(const std::vector<ForceMode>& modes) {
    ordered_json arr = ordered_json::array();
    for (const auto& m : modes) {
        ordered_json e;
        e["k"] = m.k;
        e["re"] = m.amplitude.real();
        e["im"] = m.amplitude.imag();
        arr.push_back(e);
    }
    return arr;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& err) {
        throw ConfigError("<document>", std::string("is not valid JSON: ") + err.what());
    }
    if (!root.is_object()) throw ConfigError("<document>", "must be a JSON object");
    for (const auto& [key, value] : root.items()) {
        if (!kTopLevel.count(key)) throw ConfigError(key, "is not a recognized field");
    }

    RunConfig c;
    c.d = get_int(root, "d", "d", 2);
    if (c.d < 2) throw ConfigError("d", "must be at least 2 (got " + std::to_string(c.d) + ")");
    c.N = get_int(root, "N", "N", 128);
    if (c.N < 4 || !is_power_of_two(c.N)) {
        throw ConfigError("N", "must be an even power of two >= 4 (got " + std::to_string(c.N) + ")");
    }
    if (!root.contains("alpha")) throw ConfigError("alpha", "is required");
    c.alpha = get_vector(root, "alpha", "alpha");
    if (static_cast<int>(c.alpha.size()) != c.d) {
        throw ConfigError("alpha", "must have d = " + std::to_string(c.d) + " components");
    }
    if (!root.contains("omega")) throw ConfigError("omega", "is required");
    c.omega = get_number(root, "omega", "omega", 0.0);
    c.tau = get_number(root, "tau", "tau", c.d + 2.0);
    if (!(c.tau > c.d)) throw ConfigError("tau", "must exceed d");
    c.K_max = get_int(root, "K_max", "K_max", c.N * c.d / 2);
    if (c.K_max < 1) throw ConfigError("K_max", "must be at least 1");

    c.force.alpha = c.alpha;
    if (root.contains("U_modes") && root.contains("V_modes")) {
        throw ConfigError("U_modes", "give either U_modes or V_modes, not both");
    }
    if (root.contains("U_modes")) c.force.u_modes = parse_modes(root.at("U_modes"), "U_modes", c.d, c.N);
    if (root.contains("V_modes")) c.force.v_modes = parse_modes(root.at("V_modes"), "V_modes", c.d, c.N);
    try {
        (void)build_force(c.force);
    } catch (const Error& err) {
        throw ConfigError(c.force.u_modes ? "U_modes" : "V_modes", err.what());
    }

    c.lambda0 = get_number(root, "lambda0", "lambda0", 0.0);
    c.tol = get_number(root, "tol", "tol", 1e-12);
    if (!(c.tol > 0.0)) throw ConfigError("tol", "must be positive");
    c.max_iter = get_int(root, "max_iter", "max_iter", 30);
    if (c.max_iter < 1) throw ConfigError("max_iter", "must be at least 1");
    if (root.contains("m_list")) {
        c.m_list = get_vector(root, "m_list", "m_list");
        if (c.m_list.empty()) throw ConfigError("m_list", "must not be empty");
    } else {
        c.m_list = {default_monitor_exponent(c.d, c.tau)};
    }

    if (root.contains("ramp")) {
        const auto& r = root.at("ramp");
        if (!r.is_object()) throw ConfigError("ramp", "must be an object");
        c.ramp.start = get_number(r, "start", "ramp.start", c.ramp.start);
        c.ramp.stop = get_number(r, "stop", "ramp.stop", c.ramp.stop);
        c.ramp.step = get_number(r, "step", "ramp.step", c.ramp.step);
        c.ramp.min_step = get_number(r, "min_step", "ramp.min_step", c.ramp.min_step);
        c.ramp.max_step = get_number(r, "max_step", "ramp.max_step", std::max(c.ramp.max_step, c.ramp.step));
    }
    if (!(c.ramp.step > 0.0)) throw ConfigError("ramp.step", "must be positive");
    if (!(c.ramp.min_step > 0.0)) throw ConfigError("ramp.min_step", "must be positive");
    if (!(c.ramp.max_step >= c.ramp.min_step)) throw ConfigError("ramp.max_step", "must be at least min_step");

    if (root.contains("bisect")) {
        const auto& b = root.at("bisect");
        if (!b.is_object()) throw ConfigError("bisect", "must be an object");
        if (b.contains("lower")) c.bisect.lower = get_number(b, "lower", "bisect.lower", 0.0);
        if (b.contains("upper")) c.bisect.upper = get_number(b, "upper", "bisect.upper", 0.0);
        c.bisect.width_tol = get_number(b, "width_tol", "bisect.width_tol", c.bisect.width_tol);
        if (!(c.bisect.width_tol > 0.0)) throw ConfigError("bisect.width_tol", "must be positive");
    }
    if (root.contains("lindstedt")) {
        const auto& l = root.at("lindstedt");
        if (!l.is_object()) throw ConfigError("lindstedt", "must be an object");
        c.lindstedt.order = get_int(l, "order", "lindstedt.order", c.lindstedt.order);
        if (c.lindstedt.order < 1) throw ConfigError("lindstedt.order", "must be at least 1");
        if (l.contains("epsilons")) c.lindstedt.epsilons = get_vector(l, "epsilons", "lindstedt.epsilons");
    }
    if (root.contains("initial_state")) c.initial_state = get_as<std::string>(root.at("initial_state"), "initial_state");
    if (root.contains("seed")) c.seed = get_as<std::uint64_t>(root.at("seed"), "seed");
    return c;
}

std::string dump_config(const RunConfig& c) {
    ordered_json j;
    j["d"] = c.d;
    j["N"] = c.N;
    j["alpha"] = c.alpha;
    j["omega"] = c.omega;
    j["tau"] = c.tau;
    j["K_max"] = c.K_max;
    if (c.force.u_modes) j["U_modes"] = modes_json(*c.force.u_modes);
    if (c.force.v_modes) j["V_modes"] = modes_json(*c.force.v_modes);
    j["lambda0"] = c.lambda0;
    j["tol"] = c.tol;
    j["max_iter"] = c.max_iter;
    j["m_list"] = c.m_list;
    j["ramp"] = {{"start", c.ramp.start},
                 {"stop", c.ramp.stop},
                 {"step", c.ramp.step},
                 {"min_step", c.ramp.min_step},
                 {"max_step", c.ramp.max_step}};
    ordered_json bisect;
    if (c.bisect.lower) bisect["lower"] = *c.bisect.lower;
    if (c.bisect.upper) bisect["upper"] = *c.bisect.upper;
    bisect["width_tol"] = c.bisect.width_tol;
    j["bisect"] = bisect;
    j["lindstedt"] = {{"order", c.lindstedt.order}, {"epsilons", c.lindstedt.epsilons}};
    if (c.initial_state) j["initial_state"] = *c.initial_state;
    j["seed"] = c.seed;
    return j.dump(2);
}

std::string config_hash(const RunConfig& config) { return io::fnv1a_hex(dump_config(config)); }

ForceModel force_of(const RunConfig& config) { return build_force(config.force); }

FrequencyData frequency_of(const RunConfig& config) {
    return diophantine_estimate(config.alpha, config.omega, config.tau, config.K_max);
}

ContinuationConfig continuation_of(const RunConfig& config) {
    ContinuationConfig cc;
    cc.base_force = force_of(config);
    cc.freq = frequency_of(config);
    cc.resolution = config.N;
    cc.solve.tol = config.tol;
    cc.solve.max_iter = config.max_iter;
    cc.m = config.monitor_m();
    cc.solve.m = cc.m;
    cc.initial_step = config.ramp.step;
    cc.min_step = config.ramp.min_step;
    cc.max_step = config.ramp.max_step;
    return cc;
}

}  // namespace qpfk
