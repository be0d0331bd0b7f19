#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qpfk/continuation.hpp"
#include "qpfk/model.hpp"

namespace qpfk {

struct RampSpec {
    double start = 0.0;
    double stop = 0.05;
    double step = 0.005;  // spacing of the recorded grid
    double min_step = 1e-4;
    double max_step = 0.05;
};

struct BisectSpec {
    std::optional<double> lower;
    std::optional<double> upper;
    double width_tol = 1e-3;
};

struct LindstedtSpec {
    int order = 5;
    std::vector<double> epsilons{1e-2, 5e-3, 2.5e-3};
};

struct RunConfig {
    int d = 2;
    int N = 128;
    std::vector<double> alpha;
    double omega = 0.0;
    double tau = 0.0;
    int K_max = 0;
    ForceSpec force;
    double lambda0 = 0.0;
    double tol = 1e-12;
    int max_iter = 30;
    std::vector<double> m_list;
    RampSpec ramp;
    BisectSpec bisect;
    LindstedtSpec lindstedt;
    std::optional<std::string> initial_state;  // coefficient dump used as the starting h
    std::uint64_t seed = 0;

    // Monitoring exponent: first entry of m_list.
    double monitor_m() const { return m_list.front(); }
};

// Parses and validates the JSON text of a run configuration; missing
// optional fields receive defaults (tau = d + 2, K_max = N d / 2,
// m_list = {default_monitor_exponent}). Throws ConfigError naming the field.
RunConfig parse_config(const std::string& text);
// Canonical JSON, with all defaults filled in.
std::string dump_config(const RunConfig& config);
// Hash of the canonical JSON.
std::string config_hash(const RunConfig& config);

ForceModel force_of(const RunConfig& config);
FrequencyData frequency_of(const RunConfig& config);
ContinuationConfig continuation_of(const RunConfig& config);

}  // namespace qpfk
