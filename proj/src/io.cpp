#include "qpfk/io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "qpfk/error.hpp"

namespace qpfk::io {

namespace {

std::string json_number(double x) { return std::isfinite(x) ? format_double(x) : "null"; }

std::string json_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out + "\"";
}

std::string provenance_json(const Provenance& p) {
    return "{\"provenance\": {\"version\": " + json_string(p.version) +
           ", \"config_hash\": " + json_string(p.config_hash) + "}}";
}

const char* decay_status_name(DecayStatus s) {
    switch (s) {
        case DecayStatus::ok: return "ok";
        case DecayStatus::undefined: return "undefined";
        case DecayStatus::non_analytic: return "non_analytic";
    }
    return "undefined";
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_coefficients(std::ostream& out, const TorusFunction& f, const Provenance& provenance,
                        const std::map<std::string, std::string>& extra) {
    out << "# qpfk coefficient dump\n";
    out << "# version = " << provenance.version << "\n";
    out << "# config_hash = " << provenance.config_hash << "\n";
    out << "# dim = " << f.dim() << "\n";
    out << "# resolution = " << f.resolution() << "\n";
    for (const auto& [key, value] : extra) out << "# " << key << " = " << value << "\n";

    const Grid& grid = f.grid();
    const int n = grid.resolution();
    const int dim = grid.dim();
    std::vector<int> k(dim);
    std::string line;
    // Base-N digits in order, shifted by -N/2, enumerate k lexicographically.
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        std::size_t rest = idx;
        for (int axis = dim - 1; axis >= 0; --axis) {
            k[axis] = static_cast<int>(rest % n) - n / 2;
            rest /= n;
        }
        const cplx c = f.coeffs()[grid.flat_of(k)];
        line.clear();
        for (int axis = 0; axis < dim; ++axis) line += std::to_string(k[axis]) + " ";
        line += format_double(c.real()) + " " + format_double(c.imag()) + "\n";
        out << line;
    }
    if (!out) throw Error(ErrorKind::io, "failed writing coefficient dump");
}

CoefficientDump read_coefficients(std::istream& in) {
    CoefficientDump dump;
    std::vector<std::pair<std::vector<int>, cplx>> entries;
    std::string line;
    int dim = -1;
    int max_abs = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos) dump.header[trim(line.substr(1, eq - 1))] = trim(line.substr(eq + 1));
            continue;
        }
        std::istringstream ls(line);
        std::vector<std::string> tokens;
        for (std::string t; ls >> t;) tokens.push_back(t);
        if (tokens.size() < 4) throw Error(ErrorKind::io, "malformed coefficient line: " + line);
        const int d = static_cast<int>(tokens.size()) - 2;
        if (dim >= 0 && d != dim) throw Error(ErrorKind::io, "inconsistent dimension in coefficient dump");
        dim = d;
        std::vector<int> k(d);
        try {
            for (int i = 0; i < d; ++i) {
                k[i] = std::stoi(tokens[i]);
                max_abs = std::max(max_abs, std::abs(k[i]));
            }
            entries.emplace_back(std::move(k), cplx(std::stod(tokens[d]), std::stod(tokens[d + 1])));
        } catch (const std::logic_error&) {
            throw Error(ErrorKind::io, "malformed coefficient line: " + line);
        }
    }
    if (dim < 0) throw Error(ErrorKind::io, "coefficient dump has no records");

    int n = 2 * max_abs;
    if (auto it = dump.header.find("resolution"); it != dump.header.end()) n = std::stoi(it->second);
    if (n < 2 || !is_power_of_two(n)) throw Error(ErrorKind::io, "coefficient dump has unsupported resolution");
    dump.f = TorusFunction(dim, n);
    for (const auto& [k, c] : entries) {
        for (int ki : k) {
            if (ki < -n / 2 || ki >= n / 2) throw Error(ErrorKind::io, "coefficient index outside the resolution");
        }
        dump.f.coeffs()[dump.f.grid().flat_of(k)] = c;
    }
    return dump;
}

void write_history_jsonl(std::ostream& out, const std::vector<HistoryRecord>& history, const Provenance& provenance) {
    out << provenance_json(provenance) << "\n";
    for (const auto& h : history) {
        out << "{\"iteration\": " << h.iteration << ", \"sup_residual\": " << json_number(h.sup_residual)
            << ", \"Hm_residual\": " << json_number(h.hm_residual) << ", \"lambda\": " << json_number(h.lambda)
            << ", \"delta_norm\": " << json_number(h.delta_norm) << "}\n";
    }
    if (!out) throw Error(ErrorKind::io, "failed writing history");
}

void write_history_csv(std::ostream& out, const std::vector<HistoryRecord>& history, const Provenance& provenance) {
    out << "# version=" << provenance.version << " config_hash=" << provenance.config_hash << "\n";
    out << "iteration,sup_residual,Hm_residual,lambda,delta_norm\n";
    for (const auto& h : history) {
        out << h.iteration << "," << format_double(h.sup_residual) << "," << format_double(h.hm_residual) << ","
            << format_double(h.lambda) << "," << format_double(h.delta_norm) << "\n";
    }
    if (!out) throw Error(ErrorKind::io, "failed writing history");
}

std::string record_to_json_line(const ContinuationRecord& r) {
    std::ostringstream os;
    os << "{\"param\": " << json_number(r.param) << ", \"attempted\": " << (r.attempted ? "true" : "false")
       << ", \"converged\": " << (r.converged ? "true" : "false") << ", \"iterations\": " << r.iterations
       << ", \"lambda_star\": " << json_number(r.lambda_star) << ", \"residual\": " << json_number(r.residual)
       << ", \"sobolev_m\": " << json_number(r.sobolev_m)
       << ", \"decay_rate\": " << (r.decay.status == DecayStatus::undefined ? "null" : json_number(r.decay.rate))
       << ", \"decay_status\": " << json_string(decay_status_name(r.decay.status))
       << ", \"min_l\": " << json_number(r.min_l) << ", \"wall_time\": " << json_number(r.wall_time)
       << ", \"failure\": " << json_string(r.failure) << "}";
    return os.str();
}

void write_records_jsonl(std::ostream& out, const std::vector<ContinuationRecord>& records,
                         const Provenance& provenance) {
    out << provenance_json(provenance) << "\n";
    for (const auto& r : records) out << record_to_json_line(r) << "\n";
    if (!out) throw Error(ErrorKind::io, "failed writing records");
}

void write_records_csv(std::ostream& out, const std::vector<ContinuationRecord>& records,
                       const Provenance& provenance) {
    out << "# version=" << provenance.version << " config_hash=" << provenance.config_hash << "\n";
    out << "param,attempted,converged,iterations,lambda_star,residual,sobolev_m,decay_rate,decay_status,min_l,"
           "wall_time\n";
    for (const auto& r : records) {
        out << format_double(r.param) << "," << r.attempted << "," << r.converged << "," << r.iterations << ","
            << format_double(r.lambda_star) << "," << format_double(r.residual) << "," << format_double(r.sobolev_m)
            << "," << format_double(r.decay.rate) << "," << decay_status_name(r.decay.status) << ","
            << format_double(r.min_l) << "," << format_double(r.wall_time) << "\n";
    }
    if (!out) throw Error(ErrorKind::io, "failed writing records");
}

}  // namespace qpfk::io
