#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aircomp/cli.hpp"
#include "aircomp/serialize.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace aircomp;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

CliRun invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return CliRun{code, out.str(), err.str()};
}

fs::path test_dir() {
    static const fs::path dir = [] {
        fs::path p = fs::temp_directory_path() / "aircomp_cli_tests";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

int count_data_rows(const std::string& csv) {
    int rows = 0;
    std::stringstream stream(csv);
    std::string line;
    bool header = true;
    while (std::getline(stream, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        ++rows;
    }
    return rows;
}

}  // namespace

TEST_CASE("sweep produces one row per (value, policy) and is byte-deterministic") {
    const fs::path out_a = test_dir() / "sweep_a.csv";
    const fs::path out_b = test_dir() / "sweep_b.csv";
    const std::vector<std::string> base = {
        "sweep",    "--var",      "M",
        "--values", "1,2,3,4,5,10,20",
        "--K",      "5",
        "--P",      "10",
        "--sigma2", "1",
        "--policies", "rno,fixed-rx,uniform-tx",
        "--trials", "20",
        "--seed",   "7"};

    std::vector<std::string> args_a = base;
    args_a.insert(args_a.end(), {"--out", out_a.string()});
    CHECK(invoke(args_a).code == kExitOk);
    const std::string csv_a = read_file(out_a);
    CHECK(count_data_rows(csv_a) == 21);
    CHECK(csv_a.rfind("sweep_var,value,policy,mean_cmse,stderr,trials,seed\n", 0) == 0);

    std::vector<std::string> args_b = base;
    args_b.insert(args_b.end(), {"--out", out_b.string()});
    CHECK(invoke(args_b).code == kExitOk);
    CHECK(read_file(out_b) == csv_a);
}

TEST_CASE("sweep over P supports the single-frequency oracle") {
    const CliRun run = invoke({"sweep", "--var", "P", "--values", "0.1,1,10", "--M", "1",
                               "--K", "20", "--policies", "rno,oracle1f", "--trials", "10",
                               "--seed", "3"});
    CHECK(run.code == kExitOk);
    CHECK(count_data_rows(run.out) == 6);
    CHECK(run.out.find("oracle1f") != std::string::npos);
}

TEST_CASE("sweep usage errors") {
    SUBCASE("non-positive sweep value") {
        const fs::path out = test_dir() / "never_written.csv";
        const CliRun run = invoke({"sweep", "--var", "M", "--values", "0", "--K", "5", "--P",
                                   "10", "--out", out.string()});
        CHECK(run.code == kExitUsage);
        CHECK_FALSE(fs::exists(out));
    }
    SUBCASE("sweep variable given twice") {
        const CliRun run = invoke({"sweep", "--var", "M", "--values", "1,2", "--M", "3",
                                   "--K", "5", "--P", "10"});
        CHECK(run.code == kExitUsage);
    }
    SUBCASE("oracle requires M = 1") {
        const CliRun run = invoke({"sweep", "--var", "M", "--values", "1,2", "--K", "5",
                                   "--P", "10", "--policies", "oracle1f"});
        CHECK(run.code == kExitUsage);
    }
    SUBCASE("unknown policy") {
        const CliRun run = invoke({"sweep", "--var", "M", "--values", "1", "--K", "5",
                                   "--P", "10", "--policies", "magic"});
        CHECK(run.code == kExitUsage);
    }
    SUBCASE("missing required flags") {
        CHECK(invoke({"sweep", "--var", "M", "--values", "1,2", "--P", "10"}).code ==
              kExitUsage);
    }
}

TEST_CASE("sweep reports I/O failures distinctly") {
    const CliRun run = invoke({"sweep", "--var", "M", "--values", "1", "--K", "2", "--P",
                               "10", "--trials", "4", "--out",
                               (test_dir() / "no_such_dir" / "out.csv").string()});
    CHECK(run.code == kExitIo);
}

TEST_CASE("sweep emits a plot script next to the CSV") {
    const fs::path out = test_dir() / "fig.csv";
    const CliRun run =
        invoke({"sweep", "--var", "M", "--values", "1,2", "--K", "3", "--P", "10",
                "--trials", "5", "--out", out.string(), "--emit-plot-script"});
    CHECK(run.code == kExitOk);
    CHECK(fs::exists(out.string() + ".plot.py"));
}

TEST_CASE("sweep JSON format") {
    const CliRun run = invoke({"sweep", "--var", "M", "--values", "1,2", "--K", "3", "--P",
                               "10", "--trials", "5", "--format", "json"});
    CHECK(run.code == kExitOk);
    const nlohmann::json j = nlohmann::json::parse(run.out);
    CHECK(j.at("sweep_var") == "M");
    CHECK(j.at("rows").size() == 2);
}

TEST_CASE("profile output shape and state dumps") {
    const fs::path out = test_dir() / "profile.csv";
    const fs::path trace = test_dir() / "trace.json";
    const fs::path state = test_dir() / "state.json";
    const CliRun run = invoke({"profile", "--K", "50", "--M", "5", "--sensors", "1,2",
                               "--seed", "3", "--out", out.string(), "--trace",
                               trace.string(), "--dump-state", state.string()});
    CHECK(run.code == kExitOk);
    const std::string csv = read_file(out);
    CHECK(count_data_rows(csv) == 10);
    CHECK(csv.find("# zero_power_fraction,") != std::string::npos);

    const nlohmann::json trace_json = nlohmann::json::parse(read_file(trace));
    CHECK(trace_json.contains("cmse"));
    CHECK(trace_json.contains("converged"));
    CHECK(trace_json.at("iterations_used").get<int>() >= 1);

    const nlohmann::json state_json = nlohmann::json::parse(read_file(state));
    CHECK(state_json.at("config").at("K") == 50);
    const auto channels = channel_matrix_from_json(state_json.at("channels"));
    CHECK(channels.sensors() == 50);
    CHECK(channels.frequencies() == 5);
}

TEST_CASE("profile usage errors") {
    CHECK(invoke({"profile", "--M", "5"}).code == kExitUsage);  // missing --K
    CHECK(invoke({"profile", "--K", "5", "--M", "5", "--sensors", "9"}).code == kExitUsage);
    CHECK(invoke({"profile", "--K", "5", "--M", "5", "--P", "-1"}).code == kExitUsage);
}

TEST_CASE("validate runs clean and fails under fault injection") {
    const CliRun ok = invoke({"validate", "--quick", "--seed", "5"});
    CHECK(ok.code == kExitOk);
    CHECK(ok.out.find("FAIL") == std::string::npos);
    CHECK(ok.out.find("all checks passed") != std::string::npos);

    const CliRun faulty =
        invoke({"validate", "--quick", "--seed", "5", "--inject-fault", "cno-noise"});
    CHECK(faulty.code == kExitValidation);
    CHECK(faulty.out.find("FAIL  cno-noise-identity") != std::string::npos);
}

TEST_CASE("top-level usage") {
    CHECK(invoke({}).code == kExitUsage);
    CHECK(invoke({"frobnicate"}).code == kExitUsage);
    CHECK(invoke({"--help"}).code == kExitOk);
}
