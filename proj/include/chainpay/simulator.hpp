#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "chainpay/attacks.hpp"
#include "chainpay/mechanism.hpp"

namespace chainpay {

/// Recruitment happens over a tree: node 0 is the planner at depth 0,
/// agents are appended in creation order with a link to their recruiter.
struct SimNode {
    int id = 0;
    int parent = -1;
    int depth = 0;
};

struct RecruitmentTree {
    std::vector<SimNode> nodes;        // nodes[0] is the planner
    std::optional<int> winner;
    std::vector<int> winning_chain;    // ids at depths 1..t, ending in the winner
};

enum class Strategy { honest, sybil_if_profitable, collapse_if_profitable };

const char* strategy_name(Strategy strategy);
std::optional<Strategy> strategy_from(std::string_view name);

/// Growth model: synchronous rounds of a Galton-Watson branching process.
/// Each round, the agents recruited in the previous round first try to
/// execute the task (probability exec_prob each, the smallest node id among
/// this round's successes wins and the process stops), then draw their
/// recruit count from offspring_pmf and retire. The planner recruits in
/// round 1. exec_depth_trigger replaces the execution coin: agents at that
/// depth or deeper always execute, shallower ones never do.
struct SimConfig {
    std::map<int, double> offspring_pmf = {{0, 0.5}, {2, 0.5}};
    double exec_prob = 0.1;
    std::optional<int> exec_depth_trigger;
    int max_rounds = 200;
    int population_cap = 100000;  // total tree size including the planner
    double sybil_cost = 0.0;
    int sybil_cap = 5;         // most fakes a single agent will create
    Strategy strategy = Strategy::honest;
    std::uint64_t seed = 0;
};

/// Canonical "key = value" rendering; also the digest input.
std::string describe_config(const SimConfig& config);
/// FNV-1a hash of describe_config, hex encoded.
std::string config_digest(const SimConfig& config);

struct SimMetrics {
    bool completed = false;
    int rounds_elapsed = 0;
    int t = 0;                 // realized winning-chain length
    Rational total_payout;     // exact chain total when completed
    Rational leaf_reward;      // exact winner payment when completed
    int tree_size = 0;         // all nodes including the planner
};

/// Runs one seeded growth; deterministic in (config, mech). Throws
/// Error{domain_too_small} when a tabular mechanism cannot price the
/// realized chain.
std::pair<RecruitmentTree, SimMetrics> grow_tree(const SimConfig& config, const Mechanism& mech);

/// Outcome of letting winning-chain agents manipulate their report.
/// Exactly one move (the most profitable one) is applied. utility_deltas
/// lists exact net payment changes per original node id; a collapsed group
/// appears once, under the id of its top node.
struct OverlayResult {
    int reported_t = 0;
    Rational group_gain;
    std::optional<std::variant<SybilMove, CollapseMove>> move;
    std::vector<std::pair<int, Rational>> utility_deltas;
};

/// Applies the strategy to a completed tree. Sybil attackers grow their
/// fake chain one node at a time and stop at the first addition whose
/// marginal payment does not beat sybil_cost; collapse attackers take the
/// gain-maximal (k,p), preferring longer collapses on ties.
OverlayResult strategic_overlay(const RecruitmentTree& tree, const Mechanism& mech,
                                Strategy strategy, double sybil_cost, int sybil_cap);

struct RunRecord {
    int run = 0;
    SimMetrics metrics;
    int reported_t = 0;  // equals metrics.t for honest runs
};

struct BatchStats {
    std::string config_digest;
    std::string mechanism;
    int runs = 0;
    double completion_rate = 0.0;
    double mean_rounds = 0.0;          // over all runs
    double mean_total_payout = 0.0;    // over completed runs
    double mean_leaf_reward = 0.0;     // over completed runs
    std::map<int, int> t_histogram;    // over completed runs
    std::vector<RunRecord> records;
};

/// Independent runs with per-run seeds stream_seed(config.seed, run index);
/// identical results for any thread count.
BatchStats run_batch(const SimConfig& config, const Mechanism& mech, int runs, int threads = 1);

}  // namespace chainpay
