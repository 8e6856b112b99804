#include "chainpay/reports.hpp"

#include <ostream>

#include <nlohmann/json.hpp>

namespace chainpay {

namespace {

using nlohmann::json;

json param_object(const PropertySpec& prop) {
    switch (prop.kind) {
        case PropertyKind::eps_dsp: return {{"eps", rat_str(prop.param)}};
        case PropertyKind::delta_scr: return {{"delta", rat_str(prop.param)}};
        case PropertyKind::gamma_sec: return {{"gamma", rat_str(prop.param)}};
        default: return json::object();
    }
}

json witness_object(const Witness& witness) {
    json out;
    out["k"] = witness.k ? json(*witness.k) : json(nullptr);
    out["t"] = witness.t ? json(*witness.t) : json(nullptr);
    out["n"] = witness.n ? json(*witness.n) : json(nullptr);
    out["p"] = witness.p ? json(*witness.p) : json(nullptr);
    return out;
}

json coords_array(const std::vector<Coord>& coords) {
    json out = json::array();
    for (const Coord& c : coords) out.push_back(json::array({c.k, c.t}));
    return out;
}

json elimination_object(const EliminationReport& report) {
    return {{"horizon", report.horizon},
            {"forced_zero", coords_array(report.forced_zero)},
            {"free_parameters", coords_array(report.free_parameters)},
            {"equalities", report.equalities}};
}

}  // namespace

json to_json(const CheckReport& report) {
    json out;
    out["property"] = property_kind_name(report.property.kind);
    out["params"] = param_object(report.property);
    out["verdict"] = verdict_name(report.verdict);
    out["witness"] = report.witness ? witness_object(*report.witness) : json(nullptr);
    out["margin"] = rat_str(report.margin);
    out["bounds"] = {{"t_max", report.bounds.t_max},
                     {"n_max", report.bounds.n_max},
                     {"p_max", report.bounds.p_max}};
    return out;
}

json to_json(const AttackResult& result) {
    json out;
    if (const SybilMove* sybil = std::get_if<SybilMove>(&result.move)) {
        out["kind"] = "sybil";
        out["k"] = sybil->k;
        out["t"] = sybil->t;
        out["n"] = sybil->n;
    } else {
        const CollapseMove& collapse = std::get<CollapseMove>(result.move);
        out["kind"] = "collapse";
        out["k"] = collapse.k;
        out["t"] = collapse.t;
        out["p"] = collapse.p;
    }
    out["gain"] = rat_str(result.gain);
    out["ratio"] = result.ratio ? json(rat_str(*result.ratio)) : json(nullptr);
    return out;
}

json to_json(const ImpossibilityReport& report) {
    json out = elimination_object(report);
    out["theorem"] = "impossibility";
    out["verified"] = report.scr_zero_forced;
    return out;
}

json to_json(const WtaStructureReport& report) {
    json out = elimination_object(report);
    out["theorem"] = "wta";
    out["verified"] = report.structure_verified;
    out["interior_forced_zero"] = coords_array(report.interior_forced_zero);
    json winners = json::array();
    for (const auto& pair : report.winner_equalities)
        winners.push_back(json::array({json::array({pair[0].k, pair[0].t}),
                                       json::array({pair[1].k, pair[1].t})}));
    out["winner_equalities"] = winners;
    json depth1 = json::array();
    for (const auto& pair : report.depth1_equalities)
        depth1.push_back(json::array({json::array({pair[0].k, pair[0].t}),
                                      json::array({pair[1].k, pair[1].t})}));
    out["depth1_equalities"] = depth1;
    return out;
}

json to_json(const BatchStats& stats) {
    json histogram = json::object();
    for (const auto& [t, count] : stats.t_histogram) histogram[std::to_string(t)] = count;
    return {{"config_digest", stats.config_digest},
            {"mechanism", stats.mechanism},
            {"runs", stats.runs},
            {"completion_rate", stats.completion_rate},
            {"mean_rounds", stats.mean_rounds},
            {"t_histogram", histogram},
            {"mean_total_payout", stats.mean_total_payout},
            {"mean_leaf_reward", stats.mean_leaf_reward}};
}

void write_region_csv(std::ostream& out, const std::vector<RegionCell>& cells) {
    out << "delta,epsilon,gamma,inside,witness_property,witness_t,witness_n\n";
    for (const RegionCell& cell : cells) {
        out << rat_str(cell.point.delta) << ',' << rat_str(cell.point.eps) << ','
            << rat_str(cell.point.gamma) << ',' << (cell.verdict.inside ? 1 : 0) << ',';
        if (cell.verdict.violation) {
            const CheckReport& violation = *cell.verdict.violation;
            out << property_kind_name(violation.property.kind) << ',';
            const Witness& witness = violation.witness.value();
            if (witness.t) out << *witness.t;
            out << ',';
            if (witness.n) out << *witness.n;
        } else {
            out << ",,";
        }
        out << '\n';
    }
}

void write_per_run_csv(std::ostream& out, const BatchStats& stats) {
    out << "run,completed,rounds,t,total_payout,leaf_reward,tree_size\n";
    for (const RunRecord& record : stats.records) {
        const SimMetrics& m = record.metrics;
        out << record.run << ',' << (m.completed ? 1 : 0) << ',' << m.rounds_elapsed << ',';
        if (m.completed)
            out << m.t << ',' << rat_str(m.total_payout) << ',' << rat_str(m.leaf_reward);
        else
            out << ",,";
        out << ',' << m.tree_size << '\n';
    }
}

}  // namespace chainpay
