#include "qpfk/lindstedt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qpfk/error.hpp"
#include "qpfk/kernels.hpp"

namespace qpfk {

namespace {
constexpr double kNoiseFactor = 4.0;
}  // namespace

LindstedtSeries lindstedt_expand(const ForceModel& force, const FrequencyData& freq, int resolution, int order) {
    if (order < 1) throw Error(ErrorKind::invalid_argument, "Lindstedt order must be at least 1");
    const int dim = force.dim();
    const int fine = kDealiasFactor * resolution;
    const Grid grid(dim, fine);
    const auto terms = force.compose_terms();
    // Validates that every force mode fits the band.
    (void)force.as_function(resolution);

    LindstedtSeries series;
    series.order = order;
    std::vector<std::vector<double>> jets;  // h^1 .. h^{n-1} on the fine grid
    std::vector<double> values(grid.size());
    for (int n = 1; n <= order; ++n) {
        // eps^n coefficient of eps U(s + alpha H(eps)) is the eps^{n-1} coefficient of U(s + alpha H).
        kernels::compose_force_jet(default_exec(), grid, terms, jets, n - 1, values);
        TorusFunction remainder = analyze_to_band(values, dim, fine, resolution);
        const double lambda_n = -mean(remainder);

        TorusFunction rhs = remainder;
        rhs.add_constant(lambda_n);
        rhs *= -1.0;
        double value_scale = 0.0;
        for (double v : values) value_scale = std::max(value_scale, std::abs(v));
        CohomologyOptions options;
        options.reference_scale = sobolev_norm(remainder, 0.0);
        // Round-off of the collocated remainder must not be promoted by small divisors.
        options.noise_floor = kNoiseFactor * std::numeric_limits<double>::epsilon() * value_scale;
        TorusFunction h_n = solve_second_difference(rhs, freq, options).phi;

        jets.push_back(synthesize(h_n, fine));
        series.h_terms.push_back(std::move(h_n));
        series.lambda_terms.push_back(lambda_n);
        series.remainders.push_back(std::move(remainder));
    }
    return series;
}

std::pair<TorusFunction, double> lindstedt_eval(const LindstedtSeries& series, double epsilon) {
    if (series.h_terms.empty()) throw Error(ErrorKind::invalid_argument, "empty Lindstedt series");
    const auto& first = series.h_terms.front();
    TorusFunction h(first.dim(), first.resolution());
    double lambda = 0.0;
    double power = 1.0;
    for (int n = 0; n < series.order; ++n) {
        power *= epsilon;
        h += power * series.h_terms[n];
        lambda += power * series.lambda_terms[n];
    }
    return {std::move(h), lambda};
}

}  // namespace qpfk
