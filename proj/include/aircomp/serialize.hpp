#pragma once

#include "aircomp/montecarlo.hpp"
#include "aircomp/solver.hpp"
#include "aircomp/types.hpp"

#include <json.hpp>

#include <string>

namespace aircomp {

/// Shortest round-trippable decimal form of a double (CSV cells, JSON-free paths).
std::string format_double(double value);

// JSON conventions: complex numbers as [re, im] pairs; matrices row-major
// with sensors on the outer axis and frequencies inner.

nlohmann::json to_json(const SystemConfig& cfg);
SystemConfig system_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ChannelMatrix& channels);
ChannelMatrix channel_matrix_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TxScalings& tx);
nlohmann::json to_json(const RxScaling& rx);

nlohmann::json to_json(const SolveTrace& trace);
nlohmann::json to_json(const ReducedSolveTrace& trace);

nlohmann::json to_json(const ExperimentResult& result);

/// Full operating-point dump used by the CLI --dump-state flag.
nlohmann::json dump_state(const SystemConfig& cfg, const ChannelMatrix& channels,
                          const TxScalings& tx, const RxScaling& rx);

}  // namespace aircomp
