#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qpfk/cohomology.hpp"
#include "qpfk/model.hpp"
#include "qpfk/solver.hpp"

namespace qpfk {

// A one-parameter family: the force is base_force.scaled(param).
struct ContinuationConfig {
    ForceModel base_force;
    FrequencyData freq;
    int resolution = 128;
    SolveOptions solve;
    double m = 0.0;  // monitored Sobolev exponent
    double min_l_floor = 0.05;
    double sobolev_blowup = 1e6;
    // Norm growth per unit parameter at param 0, i.e. ||h^1||_{H^m} of the
    // first Lindstedt term of base_force. A converged point breaks down when
    // ||h||_{H^m} > sobolev_blowup * |param| * sobolev_reference. Computed on
    // first use when left empty.
    std::optional<double> sobolev_reference;
    double initial_step = 0.01;
    double min_step = 1e-4;
    double max_step = 0.05;
};

// Smallest integer exceeding d/2 + 2 tau.
double default_monitor_exponent(int dim, double tau);

// ||h^1||_{H^m} for the first-order Lindstedt term of the config's base force.
double linear_response_norm(const ContinuationConfig& config);

// H^m norm over the coefficients that stand above their own round-off level.
// Rounding in the right-hand side of a solve is amplified by 1/|d_k| at mode
// k, with d_k = 2(cos 2 pi k.theta - 1), so coefficients at or below
// 64 eps max|c| / |d_k| are treated as noise and skipped. Without this the
// norm at large m is dominated by band-edge rounding and grows with N.
double monitor_norm(const TorusFunction& h, const FrequencyData& freq, double m);

struct ContinuationRecord {
    double param = 0.0;
    bool attempted = true;
    bool converged = false;
    int iterations = 0;
    double lambda_star = 0.0;
    double residual = 0.0;
    double sobolev_m = 0.0;
    DecayFit decay;
    double min_l = 0.0;
    double wall_time = 0.0;  // seconds
    std::string failure;     // empty when converged
};

struct ContinuationRun {
    std::vector<ContinuationRecord> records;
    // Converged state at the last converged grid point.
    std::optional<SolverState> last_state;
    double last_param = 0.0;
};

// Walks the monotone grid, warm-starting every solve from the previous
// converged state. Grid points are approached in sub-steps that halve on
// failure (down to min_step) and double after three quick successes. After
// the first failed grid point the remaining ones are recorded as not attempted.
ContinuationRun continue_family(std::span<const double> param_grid, ContinuationConfig config);

struct BreakdownEstimate {
    double lower = 0.0;
    double upper = 0.0;
    double bracket_width = 0.0;
    int steps = 0;
};

// Bisects [lower, upper] (converges at lower, breaks down at upper) until
// the bracket is at most width_tol wide. `warm` is a converged state at
// lower; without it the family is continued from zero first.
BreakdownEstimate bisect_breakdown(double lower, double upper, ContinuationConfig config, double width_tol,
                                   std::optional<SolverState> warm = std::nullopt);

}  // namespace qpfk
