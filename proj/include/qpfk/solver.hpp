#pragma once

#include <string>
#include <vector>

#include "qpfk/cohomology.hpp"
#include "qpfk/error.hpp"
#include "qpfk/model.hpp"
#include "qpfk/torus_function.hpp"

namespace qpfk {

struct SolverState {
    TorusFunction h;  // normalized: mean(h) == 0
    double lambda = 0.0;
    EquilibriumError residual;
    int iteration = 0;
};

// Builds a state and evaluates its residual. `m` selects the Sobolev
// exponent reported alongside the sup norm.
SolverState make_state(TorusFunction h, double lambda, const ForceModel& force, const FrequencyData& freq,
                       double m = 0.0);

// Below this the conjugacy l = 1 + dalpha h is treated as vanishing.
inline constexpr double kDegeneracyFloor = 1e-12;

// Size of l = 1 + dalpha h and of the quantities the step divides by.
struct ConditionReport {
    double m = 0.0;
    double n_plus_sup = 0.0;   // ||l||
    double n_plus_hm = 0.0;
    double n_minus_sup = 0.0;  // ||1/l||
    double n_minus_hm = 0.0;
    double c_avg = 0.0;        // |<1 / (l . l o T_{-shift})>|
    double min_l = 0.0;
    double epsilon_sup = 0.0;  // filled in by aposteriori_report
    double epsilon_hm = 0.0;
    double nu_hat = 0.0;
    double tau = 0.0;
};

// l = 1 + dalpha h
TorusFunction conjugacy_derivative(const TorusFunction& h, const FrequencyData& freq);
// Throws DegenerateConjugacy when min l <= kDegeneracyFloor on the dealiasing grid.
ConditionReport condition_numbers(const TorusFunction& h, const FrequencyData& freq, double m);

struct StepInternals {
    TorusFunction e;
    TorusFunction l;
    TorusFunction f;
    TorusFunction b;
    TorusFunction w0;
    double w_bar = 0.0;
    TorusFunction w;
    TorusFunction beta_tilde;
    double beta_bar = 0.0;
    double removed_mean_b = 0.0;
    double removed_mean_a = 0.0;
};

struct StepOutput {
    TorusFunction delta_h;  // zero mean
    double delta_lambda = 0.0;
    StepInternals internals;
};

// Round-off control for the two cohomology solves of a step. With factor f
// and residual scale S (a bound on the terms that cancel in e), right-side
// coefficients of b below f eps S ||l|| and of the step-11 right side below
// f eps ||a|| are treated as zero. Near-resonant divisors would otherwise
// promote round-off to visible, physically meaningless Fourier content.
struct NoiseControl {
    double factor = 0.0;
    double scale = 0.0;
};

// Correction (delta_h, delta_lambda) for a given error e at fixed h. Linear in
// e when noise control is off.
StepOutput approximate_inverse(const TorusFunction& h, const TorusFunction& e, const FrequencyData& freq,
                               const NoiseControl& noise = {});
StepOutput quasi_newton_step(const SolverState& state, const ForceModel& force, const FrequencyData& freq,
                             const NoiseControl& noise = {});
// Bound on the size of the terms that cancel in the residual of a state.
double residual_scale(const SolverState& state, const ForceModel& force);

struct HistoryRecord {
    int iteration = 0;
    double sup_residual = 0.0;
    double hm_residual = 0.0;
    double lambda = 0.0;
    double delta_norm = 0.0;  // ||delta_h||_{H^0} of the step that produced this state
};

struct SolveOptions {
    double tol = 1e-12;
    int max_iter = 30;
    double m = 0.0;
    // Abort early once the residual exceeds this multiple of the initial one.
    double blowup_factor = 1e6;
    // Corrections keep only |k_i| < correction_fraction * N / 2. The residual
    // is still measured on the full band, so the outer modes act as a
    // truncation-error monitor instead of feeding near-resonant band-edge
    // modes back into the iteration.
    double correction_fraction = 0.5;
    // Cohomology right sides are cut at noise_factor * eps times the size of
    // the terms they are assembled from; see NoiseControl. Zero disables.
    double noise_factor = 10.0;
};

// Zeroes every coefficient with some |k_i| >= cutoff.
void restrict_band(TorusFunction& f, int cutoff);
int correction_cutoff(int resolution, double fraction);


struct SolveResult {
    SolverState state;
    std::vector<HistoryRecord> history;  // entry 0 is the initial state
};

// Thrown by solve; carries whatever history was recorded.
class SolveFailure : public Error {
  public:
    SolveFailure(ErrorKind kind, const std::string& what, std::vector<HistoryRecord> history, int iteration)
        : Error(kind, what), history_(std::move(history)), iteration_(iteration) {}
    const std::vector<HistoryRecord>& history() const noexcept { return history_; }
    int iteration() const noexcept { return iteration_; }

  private:
    std::vector<HistoryRecord> history_;
    int iteration_;
};

SolveResult solve(SolverState initial, const ForceModel& force, const FrequencyData& freq,
                  const SolveOptions& options = {});

enum class Verdict { certifiable_shape, flagged, degenerate };
const char* to_string(Verdict verdict);

struct APosterioriOptions {
    double epsilon_threshold = 1e-10;
    double min_l_warning = 0.05;
};

struct APosterioriReport {
    ConditionReport conditions;
    DecayFit decay;
    Verdict verdict = Verdict::degenerate;
    std::string reason;
};

// Condition numbers, residual and Fourier decay of a candidate solution. A
// certifiable-shape verdict only says the hypotheses look satisfied; it is
// not a proof.
APosterioriReport aposteriori_report(const SolverState& state, const ForceModel& force, const FrequencyData& freq,
                                     double m, const APosterioriOptions& options = {});

struct IdentityReport {
    double e_sup = 0.0;
    double l_sup = 0.0;
    // l (DE delta) - delta (DE l) + l (e + delta_lambda)
    double geometric = 0.0;
    // E[h + delta, lambda + delta_lambda] - e' delta / l - R
    double decomposition = 0.0;
    // l delta o T + l delta o T^-1 - delta (l o T + l o T^-1) + (e + delta_lambda) l
    double quasi_newton_equation = 0.0;
    // W - (delta o T^-1 l - delta l o T^-1)
    double w_identity = 0.0;
};

IdentityReport verify_identities(const TorusFunction& h, double lambda, const ForceModel& force,
                                 const FrequencyData& freq);

}  // namespace qpfk
