#include "chainpay/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chainpay/parallel.hpp"
#include "chainpay/rng.hpp"

namespace chainpay {

namespace {

void require(bool ok, Errc code, const std::string& what) {
    if (!ok) throw Error(code, what);
}

void validate_config(const SimConfig& config) {
    require(!config.offspring_pmf.empty(), Errc::parameter_out_of_range, "offspring pmf is empty");
    double mass = 0.0;
    for (const auto& [count, prob] : config.offspring_pmf) {
        require(count >= 0, Errc::parameter_out_of_range, "offspring counts must be >= 0");
        require(prob >= 0.0, Errc::parameter_out_of_range, "offspring probabilities must be >= 0");
        mass += prob;
    }
    require(std::abs(mass - 1.0) <= 1e-9, Errc::parameter_out_of_range,
            "offspring pmf must sum to 1");
    require(config.exec_prob >= 0.0 && config.exec_prob <= 1.0, Errc::parameter_out_of_range,
            "exec_prob must be in [0,1]");
    require(config.max_rounds >= 1, Errc::parameter_out_of_range, "max_rounds must be >= 1");
    require(config.population_cap >= 1, Errc::parameter_out_of_range,
            "population_cap must be >= 1");
    require(config.sybil_cost >= 0.0, Errc::parameter_out_of_range, "sybil_cost must be >= 0");
    require(config.sybil_cap >= 0, Errc::parameter_out_of_range, "sybil_cap must be >= 0");
}

int draw_offspring(const std::map<int, double>& pmf, double u) {
    double cumulative = 0.0;
    for (const auto& [count, prob] : pmf) {
        cumulative += prob;
        if (u < cumulative) return count;
    }
    return pmf.rbegin()->first;  // absorb float dust in the last bucket
}

}  // namespace

const char* strategy_name(Strategy strategy) {
    switch (strategy) {
        case Strategy::honest: return "honest";
        case Strategy::sybil_if_profitable: return "sybil_if_profitable";
        case Strategy::collapse_if_profitable: return "collapse_if_profitable";
    }
    return "?";
}

std::optional<Strategy> strategy_from(std::string_view name) {
    for (Strategy s : {Strategy::honest, Strategy::sybil_if_profitable,
                       Strategy::collapse_if_profitable})
        if (name == strategy_name(s)) return s;
    return std::nullopt;
}

std::string describe_config(const SimConfig& config) {
    std::ostringstream out;
    out << "pmf =";
    bool first = true;
    for (const auto& [count, prob] : config.offspring_pmf) {
        out << (first ? " " : ",") << count << ":" << prob;
        first = false;
    }
    out << "\nq = " << config.exec_prob;
    out << "\nexec-depth-trigger = ";
    if (config.exec_depth_trigger) out << *config.exec_depth_trigger;
    else out << "none";
    out << "\nmax-rounds = " << config.max_rounds;
    out << "\npopulation-cap = " << config.population_cap;
    out << "\nsybil-cost = " << config.sybil_cost;
    out << "\nsybil-cap = " << config.sybil_cap;
    out << "\nstrategy = " << strategy_name(config.strategy);
    out << "\nseed = " << config.seed;
    return out.str();
}

std::string config_digest(const SimConfig& config) {
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (unsigned char c : describe_config(config)) {
        hash ^= c;
        hash *= 0x100000001B3ULL;
    }
    std::ostringstream out;
    out << std::hex << hash;
    return out.str();
}

std::pair<RecruitmentTree, SimMetrics> grow_tree(const SimConfig& config, const Mechanism& mech) {
    validate_config(config);
    std::mt19937_64 rng(splitmix64(config.seed));

    RecruitmentTree tree;
    tree.nodes.push_back({0, -1, 0});
    SimMetrics metrics;

    std::vector<int> frontier{0};
    bool capped = false;
    for (int round = 1; round <= config.max_rounds && !frontier.empty(); ++round) {
        metrics.rounds_elapsed = round;

        // Execution phase: every frontier agent tries; the smallest id
        // among this round's successes wins.
        std::optional<int> winner;
        for (int id : frontier) {
            const SimNode& node = tree.nodes[static_cast<size_t>(id)];
            if (node.depth == 0) continue;  // the planner never executes
            bool executes;
            if (config.exec_depth_trigger)
                executes = node.depth >= *config.exec_depth_trigger;
            else
                executes = uniform01(rng) < config.exec_prob;
            if (executes && !winner) winner = id;
        }
        if (winner) {
            tree.winner = winner;
            break;
        }

        // Recruitment phase: the frontier reproduces once and retires.
        std::vector<int> next_frontier;
        for (int id : frontier) {
            int children = draw_offspring(config.offspring_pmf, uniform01(rng));
            int depth = tree.nodes[static_cast<size_t>(id)].depth + 1;
            for (int c = 0; c < children && !capped; ++c) {
                int child_id = static_cast<int>(tree.nodes.size());
                tree.nodes.push_back({child_id, id, depth});
                next_frontier.push_back(child_id);
                if (static_cast<int>(tree.nodes.size()) >= config.population_cap) capped = true;
            }
            if (capped) break;
        }
        if (capped) break;
        frontier = std::move(next_frontier);
    }

    metrics.tree_size = static_cast<int>(tree.nodes.size());
    if (tree.winner) {
        for (int id = *tree.winner; id != 0; id = tree.nodes[static_cast<size_t>(id)].parent)
            tree.winning_chain.push_back(id);
        std::reverse(tree.winning_chain.begin(), tree.winning_chain.end());
        metrics.completed = true;
        metrics.t = static_cast<int>(tree.winning_chain.size());
        require(mech.covers(metrics.t), Errc::domain_too_small,
                "mechanism cannot price realized chain length " + std::to_string(metrics.t));
        metrics.total_payout = mech.chain_total(metrics.t);
        metrics.leaf_reward = mech.reward({metrics.t, metrics.t});
    }
    return {std::move(tree), metrics};
}

namespace {

OverlayResult apply_sybil(const RecruitmentTree& tree, const Mechanism& mech, double sybil_cost,
                          int sybil_cap) {
    int t = static_cast<int>(tree.winning_chain.size());
    Rational cost(sybil_cost);  // exact value of the configured double

    // For each chain agent, grow the fake chain while the marginal payment
    // of the next fake beats its cost.
    struct Plan {
        int k = 0;
        int n = 0;
        Rational net_gain;
    };
    std::optional<Plan> best;
    for (int k = 1; k <= t; ++k) {
        Rational previous_gain = 0;
        int n = 0;
        Rational net;
        for (int next = 1; next <= sybil_cap; ++next) {
            if (!mech.covers(t + next)) break;
            Rational gain = sybil_gain(mech, {k, t, next}).gain;
            if (gain - previous_gain <= cost) break;
            previous_gain = gain;
            n = next;
            net = gain - Rational(next) * cost;
        }
        if (n > 0 && net > 0 && (!best || net > best->net_gain ||
                                 (net == best->net_gain && k > best->k)))
            best = Plan{k, n, net};
    }

    OverlayResult result;
    result.reported_t = t;
    result.group_gain = 0;
    if (!best) return result;

    SybilMove move{best->k, t, best->n};
    result.move = move;
    result.reported_t = t + move.n;
    result.group_gain = best->net_gain;
    for (int j = 1; j <= t; ++j) {
        int id = tree.winning_chain[static_cast<size_t>(j - 1)];
        Rational delta;
        if (j < move.k)
            delta = mech.reward({j, t + move.n}) - mech.reward({j, t});
        else if (j == move.k)
            delta = best->net_gain;
        else  // pushed down by the inserted fakes
            delta = mech.reward({j + move.n, t + move.n}) - mech.reward({j, t});
        result.utility_deltas.emplace_back(id, delta);
    }
    return result;
}

OverlayResult apply_collapse(const RecruitmentTree& tree, const Mechanism& mech) {
    int t = static_cast<int>(tree.winning_chain.size());
    OverlayResult result;
    result.reported_t = t;
    result.group_gain = 0;
    if (t < 2) return result;

    // Gain-maximal collapse; ties prefer the longest subchain, then the
    // smallest top depth.
    std::optional<CollapseMove> best;
    Rational best_gain;
    for (int k = 1; k < t; ++k)
        for (int p = 1; k + p <= t; ++p) {
            Rational gain = collapse_gain(mech, {k, t, p}).gain;
            if (!best || gain > best_gain || (gain == best_gain && p > best->p))
                best = CollapseMove{k, t, p}, best_gain = gain;
        }
    if (!best || best_gain <= 0) return result;

    result.move = *best;
    result.reported_t = t - best->p;
    result.group_gain = best_gain;
    for (int j = 1; j <= t; ++j) {
        int id = tree.winning_chain[static_cast<size_t>(j - 1)];
        if (j == best->k) {
            result.utility_deltas.emplace_back(id, best_gain);
        } else if (j > best->k && j <= best->k + best->p) {
            continue;  // merged into the top node's entry
        } else if (j < best->k) {
            result.utility_deltas.emplace_back(
                id, mech.reward({j, t - best->p}) - mech.reward({j, t}));
        } else {
            result.utility_deltas.emplace_back(
                id, mech.reward({j - best->p, t - best->p}) - mech.reward({j, t}));
        }
    }
    return result;
}

}  // namespace

OverlayResult strategic_overlay(const RecruitmentTree& tree, const Mechanism& mech,
                                Strategy strategy, double sybil_cost, int sybil_cap) {
    require(tree.winner.has_value(), Errc::position_out_of_domain,
            "strategic overlay needs a completed tree");
    switch (strategy) {
        case Strategy::honest: {
            OverlayResult result;
            result.reported_t = static_cast<int>(tree.winning_chain.size());
            result.group_gain = 0;
            return result;
        }
        case Strategy::sybil_if_profitable: return apply_sybil(tree, mech, sybil_cost, sybil_cap);
        case Strategy::collapse_if_profitable: return apply_collapse(tree, mech);
    }
    throw Error(Errc::parameter_out_of_range, "unreachable");
}

BatchStats run_batch(const SimConfig& config, const Mechanism& mech, int runs, int threads) {
    require(runs >= 1, Errc::parameter_out_of_range, "runs must be >= 1");
    validate_config(config);

    BatchStats stats;
    stats.config_digest = config_digest(config);
    stats.mechanism = mech.describe();
    stats.runs = runs;
    stats.records.resize(static_cast<size_t>(runs));

    parallel_for(static_cast<size_t>(runs), threads, [&](size_t index) {
        SimConfig run_config = config;
        run_config.seed = stream_seed(config.seed, static_cast<std::uint64_t>(index));
        auto [tree, metrics] = grow_tree(run_config, mech);
        RunRecord record;
        record.run = static_cast<int>(index);
        record.metrics = metrics;
        record.reported_t = metrics.t;
        if (metrics.completed && config.strategy != Strategy::honest)
            record.reported_t = strategic_overlay(tree, mech, config.strategy, config.sybil_cost,
                                                  config.sybil_cap)
                                    .reported_t;
        stats.records[index] = std::move(record);
    });

    int completed = 0;
    double rounds_sum = 0.0;
    double payout_sum = 0.0;
    double leaf_sum = 0.0;
    for (const RunRecord& record : stats.records) {
        rounds_sum += record.metrics.rounds_elapsed;
        if (record.metrics.completed) {
            ++completed;
            payout_sum += record.metrics.total_payout.get_d();
            leaf_sum += record.metrics.leaf_reward.get_d();
            ++stats.t_histogram[record.metrics.t];
        }
    }
    stats.completion_rate = static_cast<double>(completed) / runs;
    stats.mean_rounds = rounds_sum / runs;
    stats.mean_total_payout = completed ? payout_sum / completed : 0.0;
    stats.mean_leaf_reward = completed ? leaf_sum / completed : 0.0;
    return stats;
}

}  // namespace chainpay
