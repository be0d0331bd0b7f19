#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qpfk/continuation.hpp"
#include "qpfk/solver.hpp"
#include "qpfk/torus_function.hpp"

namespace qpfk::io {

inline constexpr const char* kVersion = "0.3.0";

// Written at the top of every output file.
struct Provenance {
    std::string version = kVersion;
    std::string config_hash;
};

// FNV-1a 64, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

// Plain-text coefficient dump: '#' header lines ("# key = value"), then one
// "k1 ... kd re im" line per lattice index, sorted lexicographically by k.
// Reals use 17 significant digits.
void write_coefficients(std::ostream& out, const TorusFunction& f, const Provenance& provenance,
                        const std::map<std::string, std::string>& extra = {});

struct CoefficientDump {
    TorusFunction f;
    std::map<std::string, std::string> header;
};

CoefficientDump read_coefficients(std::istream& in);

std::string format_double(double x);

// Line-delimited records: a provenance object on the first line, then one
// object per record with a fixed key order.
void write_history_jsonl(std::ostream& out, const std::vector<HistoryRecord>& history, const Provenance& provenance);
void write_history_csv(std::ostream& out, const std::vector<HistoryRecord>& history, const Provenance& provenance);
void write_records_jsonl(std::ostream& out, const std::vector<ContinuationRecord>& records,
                         const Provenance& provenance);
void write_records_csv(std::ostream& out, const std::vector<ContinuationRecord>& records,
                       const Provenance& provenance);

std::string record_to_json_line(const ContinuationRecord& record);

}  // namespace qpfk::io
