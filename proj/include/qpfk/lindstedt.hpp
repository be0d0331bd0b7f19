#pragma once

#include <utility>
#include <vector>

#include "qpfk/cohomology.hpp"
#include "qpfk/model.hpp"
#include "qpfk/torus_function.hpp"

namespace qpfk {

// h_eps = sum_{n >= 1} eps^n h^n, lambda_eps = sum eps^n lambda^n for the
// force eps U. Order zero vanishes identically.
struct LindstedtSeries {
    int order = 0;
    std::vector<TorusFunction> h_terms;  // h^1 .. h^order
    std::vector<double> lambda_terms;    // lambda^1 .. lambda^order
    std::vector<TorusFunction> remainders;  // R_1 .. R_order
};

LindstedtSeries lindstedt_expand(const ForceModel& force, const FrequencyData& freq, int resolution, int order);

std::pair<TorusFunction, double> lindstedt_eval(const LindstedtSeries& series, double epsilon);

}  // namespace qpfk
