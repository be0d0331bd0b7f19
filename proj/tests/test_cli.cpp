#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("qpfk_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write(const fs::path& dir, const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

int run(std::vector<std::string> args) {
    args.insert(args.begin(), "qpfk");
    return qpfk::cli::run(args);
}

const char* kTrivial = R"({"d": 2, "N": 16, "alpha": [1, 1.4142135623730951], "omega": 0.6180339887498949})";

// Force 0.01 (cos 2 pi s_1 + cos 2 pi s_2) from a sine potential.
const char* kSmall = R"({"d": 2, "N": 64, "alpha": [1, 1.4142135623730951], "omega": 0.6180339887498949,
  "tol": 1e-11, "seed": 7,
  "V_modes": [{"k": [1, 0], "im": -0.0007957747154594767}, {"k": [-1, 0], "im": 0.0007957747154594767},
              {"k": [0, 1], "im": -0.0005626976975981914}, {"k": [0, -1], "im": 0.0005626976975981914}]})";

}  // namespace

TEST_CASE("solve on the trivial config") {
    const fs::path dir = scratch("trivial");
    const fs::path cfg = write(dir, "c.json", kTrivial);
    CHECK(run({"solve", "--config", cfg.string(), "--out", (dir / "out").string()}) == qpfk::cli::kSuccess);
    const std::string dump = slurp(dir / "out" / "state.dat");
    CHECK(dump.find("# lambda = 0\n") != std::string::npos);
    CHECK(dump.find("# config_hash = ") != std::string::npos);
    CHECK(fs::exists(dir / "out" / "history.jsonl"));
    CHECK(fs::exists(dir / "out" / "history.csv"));
}

TEST_CASE("exit codes") {
    const fs::path dir = scratch("codes");
    const fs::path odd = write(dir, "odd.json", R"({"d": 2, "N": 15, "alpha": [1, 1.4], "omega": 0.6})");
    CHECK(run({"solve", "--config", odd.string(), "--out", (dir / "o1").string()}) == qpfk::cli::kValidation);
    CHECK(run({"solve", "--config", (dir / "missing.json").string()}) == qpfk::cli::kIo);
    CHECK(run({"solve"}) == qpfk::cli::kValidation);
    CHECK(run({"frobnicate", "--config", odd.string()}) == qpfk::cli::kValidation);

    const fs::path big = write(dir, "big.json", R"({"d": 2, "N": 32, "alpha": [1, 1.4142135623730951],
        "omega": 0.6180339887498949, "max_iter": 5, "U_modes": [{"k": [1, 0], "re": 0.3}, {"k": [-1, 0], "re": 0.3}]})");
    CHECK(run({"solve", "--config", big.string(), "--out", (dir / "o2").string()}) == qpfk::cli::kNumerical);
    const auto failure = nlohmann::json::parse(slurp(dir / "o2" / "failure.json"));
    CHECK(failure.contains("kind"));
    CHECK(failure["provenance"].contains("config_hash"));
}

TEST_CASE("solve is deterministic and verify passes the identities") {
    const fs::path dir = scratch("determinism");
    const fs::path cfg = write(dir, "c.json", kSmall);
    for (const char* out : {"a", "b"}) {
        REQUIRE(run({"solve", "--config", cfg.string(), "--out", (dir / out).string(), "--threads", "2"}) == 0);
    }
    CHECK(slurp(dir / "a" / "state.dat") == slurp(dir / "b" / "state.dat"));

    REQUIRE(run({"verify", "--config", cfg.string(), "--out", (dir / "v").string(), "--state",
                 (dir / "a" / "state.dat").string()}) == 0);
    const auto report = nlohmann::json::parse(slurp(dir / "v" / "verify.json"));
    CHECK(report["identities"]["max"].get<double>() < 1e-10);
    CHECK(report["local_uniqueness_gap"].get<double>() < 1e-9);
}

TEST_CASE("lindstedt and continue subcommands write their tables") {
    const fs::path dir = scratch("tables");
    std::string text = kSmall;
    text.insert(text.size() - 1, R"(, "lindstedt": {"order": 3, "epsilons": [1, 0.5]},
        "ramp": {"start": 0, "stop": 1, "step": 0.5})");
    const fs::path cfg = write(dir, "c.json", text);
    CHECK(run({"lindstedt", "--config", cfg.string(), "--out", (dir / "l").string()}) == 0);
    CHECK(fs::exists(dir / "l" / "series" / "h_3.dat"));
    CHECK(slurp(dir / "l" / "lambda_table.csv").find("order,lambda") != std::string::npos);
    CHECK(slurp(dir / "l" / "scaling.csv").find("epsilon,residual_sup") != std::string::npos);

    CHECK(run({"continue", "--config", cfg.string(), "--out", (dir / "c").string()}) == 0);
    std::ifstream records(dir / "c" / "records.jsonl");
    std::string line;
    int lines = 0;
    while (std::getline(records, line)) ++lines;
    CHECK(lines == 4);  // provenance + three grid points
    CHECK(fs::exists(dir / "c" / "records.csv"));
    CHECK(fs::exists(dir / "c" / "last_state.dat"));
}
