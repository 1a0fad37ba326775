#include "aircomp/cli.hpp"

#include "aircomp/baselines.hpp"
#include "aircomp/montecarlo.hpp"
#include "aircomp/serialize.hpp"
#include "aircomp/validate.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace aircomp {

namespace {

int default_threads() {
    if (const char* env = std::getenv("AIRCOMP_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    return 0;  // auto
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ','))
        if (!item.empty()) items.push_back(item);
    return items;
}

struct SweepArgs {
    std::string var;
    std::string values_text;
    int sensors = 0;
    int frequencies = 0;
    double power = 0.0;
    double noise_power = 1.0;
    std::string policies_text = "rno";
    int trials = 10000;
    std::uint64_t seed = 1;
    std::string out_path;
    std::string format = "csv";
    bool emit_plot_script = false;
    int threads = default_threads();
    int max_iters = 20;
    double cmse_tol = 1e-3;
    bool frequencies_given = false;
    bool power_given = false;
};

struct SweepRow {
    double value = 0.0;
    PolicyStats stats;
};

int write_plot_script(const std::string& csv_path, std::ostream& err) {
    const std::string script_path = csv_path + ".plot.py";
    std::ofstream script(script_path);
    if (!script) {
        err << "error: cannot write " << script_path << "\n";
        return kExitIo;
    }
    script << "#!/usr/bin/env python3\n"
              "import csv, collections\n"
              "import matplotlib.pyplot as plt\n\n"
              "rows = list(csv.DictReader(open('" << csv_path << "')))\n"
              "series = collections.defaultdict(list)\n"
              "for r in rows:\n"
              "    series[r['policy']].append((float(r['value']), float(r['mean_cmse'])))\n"
              "for policy, points in sorted(series.items()):\n"
              "    points.sort()\n"
              "    plt.plot([p[0] for p in points], [p[1] for p in points], marker='o', label=policy)\n"
              "plt.xlabel(rows[0]['sweep_var'] if rows else 'value')\n"
              "plt.ylabel('mean CMSE')\n"
              "plt.yscale('log')\n"
              "plt.legend()\n"
              "plt.grid(True, which='both', alpha=0.3)\n"
              "plt.savefig('" << csv_path << ".png', dpi=150)\n"
              "print('wrote " << csv_path << ".png')\n";
    return kExitOk;
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
    if (args.var != "M" && args.var != "P") {
        err << "error: --var must be M or P\n";
        return kExitUsage;
    }
    if (args.var == "M" && args.frequencies_given) {
        err << "error: --M conflicts with --var M (exactly one sweep variable)\n";
        return kExitUsage;
    }
    if (args.var == "P" && args.power_given) {
        err << "error: --P conflicts with --var P (exactly one sweep variable)\n";
        return kExitUsage;
    }
    if (args.var == "M" && !args.power_given) {
        err << "error: --P is required when sweeping M\n";
        return kExitUsage;
    }
    if (args.var == "P" && !args.frequencies_given) {
        err << "error: --M is required when sweeping P\n";
        return kExitUsage;
    }
    if (args.sensors < 1) {
        err << "error: --K must be >= 1\n";
        return kExitUsage;
    }
    if (args.trials < 1 || !(args.noise_power > 0.0)) {
        err << "error: --trials and --sigma2 must be positive\n";
        return kExitUsage;
    }

    std::vector<double> values;
    for (const std::string& item : split_list(args.values_text)) {
        char* end = nullptr;
        const double value = std::strtod(item.c_str(), &end);
        if (end == item.c_str() || *end != '\0' || !(value > 0.0)) {
            err << "error: invalid sweep value '" << item << "' (must be positive)\n";
            return kExitUsage;
        }
        if (args.var == "M" && value != std::floor(value)) {
            err << "error: M values must be integers, got '" << item << "'\n";
            return kExitUsage;
        }
        values.push_back(value);
    }
    if (values.empty()) {
        err << "error: --values is empty\n";
        return kExitUsage;
    }

    std::vector<Policy> policies;
    for (const std::string& name : split_list(args.policies_text)) {
        const auto policy = parse_policy(name);
        if (!policy) {
            err << "error: unknown policy '" << name
                << "' (expected rno, cno, fixed-rx, uniform-tx, oracle1f)\n";
            return kExitUsage;
        }
        policies.push_back(*policy);
    }
    if (policies.empty()) {
        err << "error: --policies is empty\n";
        return kExitUsage;
    }

    const bool wants_oracle =
        std::find(policies.begin(), policies.end(), Policy::SingleFreqOracle) != policies.end();
    if (wants_oracle) {
        const bool m_is_one =
            args.var == "M"
                ? std::all_of(values.begin(), values.end(), [](double v) { return v == 1.0; })
                : args.frequencies == 1;
        if (!m_is_one) {
            err << "error: policy oracle1f requires M = 1\n";
            return kExitUsage;
        }
    }
    if (args.format != "csv" && args.format != "json") {
        err << "error: --format must be csv or json\n";
        return kExitUsage;
    }
    if (args.emit_plot_script && (args.out_path.empty() || args.format != "csv")) {
        err << "error: --emit-plot-script requires --out with csv format\n";
        return kExitUsage;
    }

    std::vector<SweepRow> rows;
    for (double value : values) {
        TrialPlan plan;
        plan.config.sensors = args.sensors;
        plan.config.frequencies = args.var == "M" ? static_cast<int>(value) : args.frequencies;
        plan.config.power = args.var == "P" ? value : args.power;
        plan.config.noise_power = args.noise_power;
        plan.trials = args.trials;
        plan.seed = args.seed;
        plan.policies = policies;
        plan.threads = args.threads;
        plan.solver.max_iters = args.max_iters;
        plan.solver.cmse_tol = args.cmse_tol;
        const ExperimentResult result = run_plan(plan);
        for (const PolicyStats& stats : result.per_policy)
            rows.push_back(SweepRow{value, stats});
    }

    std::ostringstream body;
    if (args.format == "csv") {
        body << "sweep_var,value,policy,mean_cmse,stderr,trials,seed\n";
        for (const SweepRow& row : rows) {
            body << args.var << ',' << format_double(row.value) << ','
                 << policy_name(row.stats.policy) << ',' << format_double(row.stats.mean_cmse)
                 << ',' << format_double(row.stats.stderr_mean) << ',' << row.stats.trials << ','
                 << args.seed << '\n';
        }
    } else {
        nlohmann::json rows_json = nlohmann::json::array();
        for (const SweepRow& row : rows) {
            rows_json.push_back({{"sweep_var", args.var},
                                 {"value", row.value},
                                 {"policy", policy_name(row.stats.policy)},
                                 {"mean_cmse", row.stats.mean_cmse},
                                 {"stderr", row.stats.stderr_mean},
                                 {"trials", row.stats.trials},
                                 {"seed", args.seed}});
        }
        body << nlohmann::json{{"sweep_var", args.var}, {"rows", rows_json}}.dump(2) << '\n';
    }

    if (args.out_path.empty()) {
        out << body.str();
    } else {
        std::ofstream file(args.out_path);
        if (!file) {
            err << "error: cannot write " << args.out_path << "\n";
            return kExitIo;
        }
        file << body.str();
        if (!file.good()) {
            err << "error: write failed for " << args.out_path << "\n";
            return kExitIo;
        }
    }
    if (args.emit_plot_script) return write_plot_script(args.out_path, err);
    return kExitOk;
}

struct ProfileArgs {
    int sensors = 0;
    int frequencies = 0;
    double power = 10.0;
    double noise_power = 1.0;
    std::uint64_t seed = 1;
    std::string sensors_list;
    std::string out_path;
    std::string trace_path;
    std::string dump_state_path;
    int max_iters = 20;
    double cmse_tol = 1e-3;
};

int cmd_profile(const ProfileArgs& args, std::ostream& out, std::ostream& err) {
    if (args.sensors < 1 || args.frequencies < 1) {
        err << "error: --K and --M must be >= 1\n";
        return kExitUsage;
    }
    if (!(args.power > 0.0) || !(args.noise_power > 0.0)) {
        err << "error: --P and --sigma2 must be positive\n";
        return kExitUsage;
    }

    std::vector<int> selected;
    if (args.sensors_list.empty()) {
        for (int k = 1; k <= args.sensors; ++k) selected.push_back(k);
    } else {
        for (const std::string& item : split_list(args.sensors_list)) {
            const int k = std::atoi(item.c_str());
            if (k < 1 || k > args.sensors) {
                err << "error: --sensors entry '" << item << "' outside 1.." << args.sensors
                    << "\n";
                return kExitUsage;
            }
            selected.push_back(k);
        }
    }

    const SystemConfig cfg(args.sensors, args.frequencies, args.power, args.noise_power);
    SolverOptions opts;
    opts.max_iters = args.max_iters;
    opts.cmse_tol = args.cmse_tol;
    try {
        opts.validate();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    Rng rng = Rng::for_trial(args.seed, 0);
    const ChannelMatrix channels = draw_channels(cfg.sensors, cfg.frequencies, rng);
    const TxProfile profile = tx_profile(channels, cfg, opts);

    std::ostringstream body;
    body << "sensor,frequency,channel_mag,tx_mag,power\n";
    for (int k : selected) {
        for (int m = 0; m < cfg.frequencies; ++m) {
            body << k << ',' << (m + 1) << ',' << format_double(profile.channel_mag(k - 1, m))
                 << ',' << format_double(profile.tx_mag(k - 1, m)) << ','
                 << format_double(profile.power(k - 1, m)) << '\n';
        }
    }
    body << "# zero_power_fraction," << format_double(profile.zero_power_fraction) << '\n';

    if (args.out_path.empty()) {
        out << body.str();
    } else {
        std::ofstream file(args.out_path);
        if (!file) {
            err << "error: cannot write " << args.out_path << "\n";
            return kExitIo;
        }
        file << body.str();
        out << "zero_power_fraction " << format_double(profile.zero_power_fraction) << "\n";
    }

    if (!args.trace_path.empty()) {
        std::ofstream file(args.trace_path);
        if (!file) {
            err << "error: cannot write " << args.trace_path << "\n";
            return kExitIo;
        }
        file << to_json(profile.trace).dump(2) << '\n';
    }
    if (!args.dump_state_path.empty()) {
        std::ofstream file(args.dump_state_path);
        if (!file) {
            err << "error: cannot write " << args.dump_state_path << "\n";
            return kExitIo;
        }
        file << dump_state(cfg, channels, profile.trace.tx, profile.trace.rx).dump(2) << '\n';
    }
    return kExitOk;
}

int cmd_validate(const ValidateOptions& options, std::ostream& out) {
    const std::vector<CheckResult> results = run_validation(options);
    size_t failures = 0;
    size_t width = 0;
    for (const CheckResult& result : results) width = std::max(width, result.name.size());
    for (const CheckResult& result : results) {
        out << (result.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(static_cast<int>(width))
            << result.name << "  " << result.detail << "\n";
        if (!result.passed) ++failures;
    }
    out << (failures == 0 ? "all checks passed" : "checks failed") << " (" << results.size() - failures
        << "/" << results.size() << ")\n";
    return failures == 0 ? kExitOk : kExitValidation;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-frequency over-the-air computation experiments"};
    app.require_subcommand(1);

    SweepArgs sweep;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Monte-Carlo CMSE sweep over M or P, CSV/JSON output");
    sweep_cmd->add_option("--var", sweep.var, "Sweep variable: M or P")->required();
    sweep_cmd->add_option("--values", sweep.values_text, "Comma-separated sweep values")
        ->required();
    sweep_cmd->add_option("--K", sweep.sensors, "Number of sensors")->required();
    sweep_cmd->add_option("--M", sweep.frequencies, "Number of frequencies (fixed)")
        ->each([&sweep](const std::string&) { sweep.frequencies_given = true; });
    sweep_cmd->add_option("--P", sweep.power, "Per-sensor power budget (fixed)")
        ->each([&sweep](const std::string&) { sweep.power_given = true; });
    sweep_cmd->add_option("--sigma2", sweep.noise_power, "Noise power (default 1)");
    sweep_cmd->add_option("--policies", sweep.policies_text,
                          "Comma-separated policies (rno,cno,fixed-rx,uniform-tx,oracle1f)");
    sweep_cmd->add_option("--trials", sweep.trials, "Trials per sweep point (default 10000)");
    sweep_cmd->add_option("--seed", sweep.seed, "Base RNG seed (default 1)");
    sweep_cmd->add_option("--out", sweep.out_path, "Output file (default stdout)");
    sweep_cmd->add_option("--format", sweep.format, "csv or json (default csv)");
    sweep_cmd->add_flag("--emit-plot-script", sweep.emit_plot_script,
                        "Write a matplotlib script next to the CSV");
    sweep_cmd->add_option("--threads", sweep.threads,
                          "Worker threads (default: AIRCOMP_THREADS or hardware)");
    sweep_cmd->add_option("--iters", sweep.max_iters, "Max alternation sweeps (default 20)");
    sweep_cmd->add_option("--cmse-tol", sweep.cmse_tol,
                          "Convergence tolerance on CMSE change (default 1e-3)");

    ProfileArgs profile;
    CLI::App* profile_cmd = app.add_subcommand(
        "profile", "Per-sensor channel/Tx magnitude profile of one optimized draw");
    profile_cmd->add_option("--K", profile.sensors, "Number of sensors")->required();
    profile_cmd->add_option("--M", profile.frequencies, "Number of frequencies")->required();
    profile_cmd->add_option("--P", profile.power, "Per-sensor power budget (default 10)");
    profile_cmd->add_option("--sigma2", profile.noise_power, "Noise power (default 1)");
    profile_cmd->add_option("--seed", profile.seed, "Channel draw seed (default 1)");
    profile_cmd->add_option("--sensors", profile.sensors_list,
                            "1-based sensors to report (default: all)");
    profile_cmd->add_option("--out", profile.out_path, "Output CSV (default stdout)");
    profile_cmd->add_option("--trace", profile.trace_path, "Write solver trace JSON here");
    profile_cmd->add_option("--dump-state", profile.dump_state_path,
                            "Write channels and scaling factors JSON here");
    profile_cmd->add_option("--iters", profile.max_iters, "Max alternation sweeps (default 20)");
    profile_cmd->add_option("--cmse-tol", profile.cmse_tol,
                            "Convergence tolerance on CMSE change (default 1e-3)");

    ValidateOptions validate;
    CLI::App* validate_cmd =
        app.add_subcommand("validate", "Run the structural property suite");
    validate_cmd->add_option("--seed", validate.seed, "Suite seed (default 12345)");
    validate_cmd->add_flag("--quick", validate.quick, "Smaller instance counts");
    validate_cmd->add_option("--inject-fault", validate.inject_fault, "")->group("");

    std::vector<char*> argv;
    std::vector<std::string> storage;
    storage.reserve(args.size() + 1);
    storage.push_back("aircomp");
    for (const std::string& arg : args) storage.push_back(arg);
    for (std::string& arg : storage) argv.push_back(arg.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        std::ostringstream buffer;
        const int code = app.exit(e, buffer, buffer);
        (code == 0 ? out : err) << buffer.str();
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sweep_cmd->parsed()) return cmd_sweep(sweep, out, err);
        if (profile_cmd->parsed()) return cmd_profile(profile, out, err);
        if (validate_cmd->parsed()) return cmd_validate(validate, out);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}

}  // namespace aircomp
