#include "aircomp/serialize.hpp"

#include <cstdio>

namespace aircomp {

using nlohmann::json;

std::string format_double(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

json to_json(const SystemConfig& cfg) {
    return json{{"K", cfg.sensors},
                {"M", cfg.frequencies},
                {"P", cfg.power},
                {"sigma2", cfg.noise_power}};
}

SystemConfig system_config_from_json(const json& j) {
    return SystemConfig(j.at("K").get<int>(), j.at("M").get<int>(), j.at("P").get<double>(),
                        j.at("sigma2").get<double>());
}

namespace {

json complex_matrix_to_json(const Eigen::MatrixXcd& mat) {
    json rows = json::array();
    for (Eigen::Index k = 0; k < mat.rows(); ++k) {
        json row = json::array();
        for (Eigen::Index m = 0; m < mat.cols(); ++m)
            row.push_back(json::array({mat(k, m).real(), mat(k, m).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

json to_json(const ChannelMatrix& channels) {
    return json{{"K", channels.sensors()},
                {"M", channels.frequencies()},
                {"entries", complex_matrix_to_json(channels.coefficients)}};
}

ChannelMatrix channel_matrix_from_json(const json& j) {
    const int k_count = j.at("K").get<int>();
    const int m_count = j.at("M").get<int>();
    const json& entries = j.at("entries");
    Eigen::MatrixXcd coeffs(k_count, m_count);
    for (int k = 0; k < k_count; ++k)
        for (int m = 0; m < m_count; ++m) {
            const json& cell = entries.at(k).at(m);
            coeffs(k, m) = Complex(cell.at(0).get<double>(), cell.at(1).get<double>());
        }
    return ChannelMatrix(std::move(coeffs));
}

json to_json(const TxScalings& tx) {
    return json{{"K", tx.sensors()},
                {"M", tx.frequencies()},
                {"entries", complex_matrix_to_json(tx.factors)}};
}

json to_json(const RxScaling& rx) {
    json blocks = json::array();
    for (int m = 0; m < rx.frequencies(); ++m) {
        const Eigen::Vector2d g = rx.block(m);
        blocks.push_back(json::array({g(0), g(1)}));
    }
    return json{{"M", rx.frequencies()}, {"blocks", blocks}};
}

namespace {

json trace_to_json(const std::vector<double>& history, int iterations_used, bool converged) {
    return json{{"cmse", history},
                {"iterations_used", iterations_used},
                {"converged", converged}};
}

}  // namespace

json to_json(const SolveTrace& trace) {
    return trace_to_json(trace.cmse_history, trace.iterations_used, trace.converged);
}

json to_json(const ReducedSolveTrace& trace) {
    return trace_to_json(trace.cmse_history, trace.iterations_used, trace.converged);
}

json to_json(const ExperimentResult& result) {
    json per_policy = json::array();
    for (const PolicyStats& stats : result.per_policy) {
        per_policy.push_back(json{{"policy", policy_name(stats.policy)},
                                  {"mean_cmse", stats.mean_cmse},
                                  {"stderr", stats.stderr_mean},
                                  {"trials", stats.trials},
                                  {"non_converged", stats.non_converged}});
    }
    return json{{"mean_cmse", result.mean_cmse},
                {"stderr", result.stderr_mean},
                {"trials", result.trials},
                {"seed", result.seed},
                {"config", to_json(result.config)},
                {"per_policy", std::move(per_policy)}};
}

json dump_state(const SystemConfig& cfg, const ChannelMatrix& channels, const TxScalings& tx,
                const RxScaling& rx) {
    return json{{"config", to_json(cfg)},
                {"channels", to_json(channels)},
                {"tx", to_json(tx)},
                {"rx", to_json(rx)}};
}

}  // namespace aircomp
