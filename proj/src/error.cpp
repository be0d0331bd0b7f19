#include "qpfk/error.hpp"

#include <sstream>

namespace qpfk {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::symmetry_violation: return "symmetry_violation";
        case ErrorKind::unsupported_resolution: return "unsupported_resolution";
        case ErrorKind::resolution_mismatch: return "resolution_mismatch";
        case ErrorKind::solvability_violation: return "solvability_violation";
        case ErrorKind::small_divisor_breach: return "small_divisor_breach";
        case ErrorKind::near_resonance: return "near_resonance";
        case ErrorKind::degenerate_conjugacy: return "degenerate_conjugacy";
        case ErrorKind::divergence: return "divergence";
        case ErrorKind::bracket: return "bracket";
        case ErrorKind::seed_failure: return "seed_failure";
        case ErrorKind::invalid_argument: return "invalid_argument";
        case ErrorKind::config: return "config";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

namespace {

std::string describe_breach(const std::vector<int>& k, double divisor) {
    std::ostringstream os;
    os << "small divisor |exp(2 pi i k.shift) - 1| = " << divisor << " at k = (";
    for (std::size_t i = 0; i < k.size(); ++i) os << (i ? ", " : "") << k[i];
    os << ")";
    return os.str();
}

}  // namespace

SmallDivisorBreach::SmallDivisorBreach(std::vector<int> k, double divisor)
    : Error(ErrorKind::small_divisor_breach, describe_breach(k, divisor)), k_(std::move(k)), divisor_(divisor) {}

DegenerateConjugacy::DegenerateConjugacy(double min_l, int iteration)
    : Error(ErrorKind::degenerate_conjugacy,
            "hull function is not monotone: min(1 + dalpha h) = " + std::to_string(min_l) +
                (iteration >= 0 ? " at iteration " + std::to_string(iteration) : std::string{})),
      min_l_(min_l),
      iteration_(iteration) {}

}  // namespace qpfk
