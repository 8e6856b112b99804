#pragma once

#include <iosfwd>

#include <nlohmann/json_fwd.hpp>

#include "chainpay/analysis.hpp"
#include "chainpay/attacks.hpp"
#include "chainpay/properties.hpp"
#include "chainpay/simulator.hpp"

namespace chainpay {

// Machine-readable report shapes. Rationals are always serialized as
// canonical "p/q" strings so consumers never see rounded values.

/// {"property", "params", "verdict", "witness" (nullable {k,t,n,p}),
///  "margin", "bounds"}
nlohmann::json to_json(const CheckReport& report);

/// {"kind", "k", "t", "n"|"p", "gain", "ratio" (nullable)}
nlohmann::json to_json(const AttackResult& result);

/// {"horizon", "forced_zero", "free_parameters", "equalities"} plus the
/// theorem name and its verification flag.
nlohmann::json to_json(const ImpossibilityReport& report);
nlohmann::json to_json(const WtaStructureReport& report);

/// {"config_digest", "mechanism", "runs", "completion_rate", "mean_rounds",
///  "t_histogram", "mean_total_payout", "mean_leaf_reward"}
nlohmann::json to_json(const BatchStats& stats);

/// Header "delta,epsilon,gamma,inside,witness_property,witness_t,witness_n";
/// witness fields stay empty for inside cells.
void write_region_csv(std::ostream& out, const std::vector<RegionCell>& cells);

/// Header "run,completed,rounds,t,total_payout,leaf_reward,tree_size".
void write_per_run_csv(std::ostream& out, const BatchStats& stats);

}  // namespace chainpay
