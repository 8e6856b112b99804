#include <algorithm>

#include "doctest.h"

#include "chainpay/rng.hpp"
#include "chainpay/simulator.hpp"

using namespace chainpay;

namespace {

Rational q(const char* text) { return parse_rational(text); }

SimConfig chain_config(int trigger_depth) {
    SimConfig config;
    config.offspring_pmf = {{1, 1.0}};
    config.exec_prob = 0.0;
    config.exec_depth_trigger = trigger_depth;
    config.seed = 5;
    return config;
}

// Straightforward re-implementation of the documented round semantics,
// used as an oracle for grow_tree: same seed, same draws, same outcome.
struct OracleRun {
    bool completed = false;
    int rounds = 0;
    int t = 0;
    int size = 0;
};

OracleRun oracle_grow(const SimConfig& config) {
    std::mt19937_64 rng(splitmix64(config.seed));
    std::vector<int> parent{-1};
    std::vector<int> depth{0};
    std::vector<int> frontier{0};
    OracleRun out;
    std::optional<int> winner;
    bool capped = false;
    for (int round = 1; round <= config.max_rounds && !frontier.empty(); ++round) {
        out.rounds = round;
        for (int id : frontier) {
            if (depth[size_t(id)] == 0) continue;
            bool fires = config.exec_depth_trigger
                             ? depth[size_t(id)] >= *config.exec_depth_trigger
                             : uniform01(rng) < config.exec_prob;
            if (fires && !winner) winner = id;
        }
        if (winner) break;
        std::vector<int> next;
        for (int id : frontier) {
            double u = uniform01(rng);
            double acc = 0.0;
            int children = config.offspring_pmf.rbegin()->first;
            for (auto [count, prob] : config.offspring_pmf) {
                acc += prob;
                if (u < acc) {
                    children = count;
                    break;
                }
            }
            for (int c = 0; c < children && !capped; ++c) {
                parent.push_back(id);
                depth.push_back(depth[size_t(id)] + 1);
                next.push_back(int(parent.size()) - 1);
                if (int(parent.size()) >= config.population_cap) capped = true;
            }
            if (capped) break;
        }
        if (capped) break;
        frontier = std::move(next);
    }
    out.size = int(parent.size());
    if (winner) {
        out.completed = true;
        out.t = depth[size_t(*winner)];
    }
    return out;
}

}  // namespace

TEST_CASE("a forced single chain completes at exactly the trigger depth") {
    Mechanism mech = Mechanism::gamma_delta_geom(q("1/2"), q("1/2"), Budget{1});
    auto [tree, metrics] = grow_tree(chain_config(4), mech);
    CHECK(metrics.completed);
    CHECK(metrics.t == 4);
    CHECK(metrics.tree_size == 5);  // planner + the four chain agents
    CHECK(metrics.total_payout == mech.chain_total(4));
    CHECK(metrics.leaf_reward == mech.reward({4, 4}));
    CHECK(tree.winning_chain.size() == 4);
}

TEST_CASE("no recruits and no execution means the run never completes") {
    SimConfig config;
    config.offspring_pmf = {{0, 1.0}};
    config.exec_prob = 0.0;
    auto [tree, metrics] = grow_tree(config, Mechanism::wta(1, Budget{1}));
    CHECK_FALSE(metrics.completed);
    CHECK(metrics.tree_size == 1);
    CHECK_FALSE(tree.winner.has_value());
}

TEST_CASE("growth is deterministic in the seed") {
    SimConfig config;
    config.seed = 42;
    Mechanism mech = Mechanism::delta_geom(q("1/2"), Budget{1});
    auto [tree_a, metrics_a] = grow_tree(config, mech);
    auto [tree_b, metrics_b] = grow_tree(config, mech);
    REQUIRE(tree_a.nodes.size() == tree_b.nodes.size());
    for (size_t i = 0; i < tree_a.nodes.size(); ++i) {
        CHECK(tree_a.nodes[i].parent == tree_b.nodes[i].parent);
        CHECK(tree_a.nodes[i].depth == tree_b.nodes[i].depth);
    }
    CHECK(metrics_a.completed == metrics_b.completed);
    CHECK(metrics_a.t == metrics_b.t);
}

TEST_CASE("winning chain is the unique root path and payments conserve exactly") {
    Mechanism mech = Mechanism::delta_geom(q("1/2"), Budget{1});
    int completed_seen = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        SimConfig config;
        config.seed = seed;
        auto [tree, metrics] = grow_tree(config, mech);
        if (!metrics.completed) continue;
        ++completed_seen;

        REQUIRE(tree.winner.has_value());
        REQUIRE(int(tree.winning_chain.size()) == metrics.t);
        // Path structure: depths 1..t, each node the parent of the next,
        // topmost recruited by the planner, deepest the winner.
        CHECK(tree.nodes[size_t(tree.winning_chain.front())].parent == 0);
        CHECK(tree.winning_chain.back() == *tree.winner);
        for (int j = 0; j < metrics.t; ++j) {
            const SimNode& node = tree.nodes[size_t(tree.winning_chain[size_t(j)])];
            CHECK(node.depth == j + 1);
            if (j > 0) CHECK(node.parent == tree.winning_chain[size_t(j - 1)]);
        }

        // Only chain members are paid; their payments add up to the total.
        Rational on_chain_sum = 0;
        for (int j = 1; j <= metrics.t; ++j) on_chain_sum += mech.reward({j, metrics.t});
        CHECK(on_chain_sum == metrics.total_payout);
        CHECK(metrics.total_payout == 1);  // the budget-exhausting family pays all of r_max
    }
    CHECK(completed_seen > 50);
}

TEST_CASE("grow_tree agrees with an independent re-implementation, run for run") {
    SimConfig base;
    base.offspring_pmf = {{0, 0.5}, {2, 0.5}};
    base.exec_prob = 0.1;
    Mechanism mech = Mechanism::delta_geom(q("1/2"), Budget{1});
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        SimConfig config = base;
        config.seed = stream_seed(9, seed);
        auto [tree, metrics] = grow_tree(config, mech);
        OracleRun expected = oracle_grow(config);
        CHECK(metrics.completed == expected.completed);
        CHECK(metrics.rounds_elapsed == expected.rounds);
        CHECK(metrics.tree_size == expected.size);
        if (expected.completed) CHECK(metrics.t == expected.t);
    }
}

TEST_CASE("batch of one equals a single growth, and batches are thread-count invariant") {
    SimConfig config;
    config.seed = 11;
    Mechanism mech = Mechanism::delta_geom(q("1/2"), Budget{1});

    BatchStats single = run_batch(config, mech, 1);
    SimConfig derived = config;
    derived.seed = stream_seed(config.seed, 0);
    auto [tree, metrics] = grow_tree(derived, mech);
    CHECK(single.records[0].metrics.completed == metrics.completed);
    CHECK(single.records[0].metrics.t == metrics.t);
    CHECK(single.records[0].metrics.tree_size == metrics.tree_size);

    BatchStats sequential = run_batch(config, mech, 400, 1);
    BatchStats parallel = run_batch(config, mech, 400, 4);
    CHECK(sequential.completion_rate == parallel.completion_rate);
    for (size_t i = 0; i < sequential.records.size(); ++i) {
        CHECK(sequential.records[i].metrics.t == parallel.records[i].metrics.t);
        CHECK(sequential.records[i].reported_t == parallel.records[i].reported_t);
    }
}

TEST_CASE("two mechanisms priced over identical trees see the same chain lengths") {
    SimConfig config;
    config.seed = 13;
    Mechanism gd = Mechanism::gamma_delta_geom(q("1/2"), q("1/2"), Budget{1});
    Mechanism dg = Mechanism::delta_geom(q("1/2"), Budget{1});
    BatchStats a = run_batch(config, gd, 300);
    BatchStats b = run_batch(config, dg, 300);
    for (size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].metrics.t == b.records[i].metrics.t);
        if (!a.records[i].metrics.completed) continue;
        int t = a.records[i].metrics.t;
        CHECK(a.records[i].metrics.total_payout == gd.chain_total(t));
        CHECK(b.records[i].metrics.total_payout == 1);
    }
}

TEST_CASE("collapse overlay merges a whole top-down chain") {
    Mechanism topdown = Mechanism::top_down_geom(Budget{1});
    auto [tree, metrics] = grow_tree(chain_config(3), topdown);
    REQUIRE(metrics.t == 3);
    OverlayResult overlay =
        strategic_overlay(tree, topdown, Strategy::collapse_if_profitable, 0.0, 5);
    CHECK(overlay.reported_t == 1);
    CHECK(overlay.group_gain == q("9/64"));
    REQUIRE(overlay.move.has_value());
    CollapseMove move = std::get<CollapseMove>(*overlay.move);
    CHECK(move.k == 1);
    CHECK(move.p == 2);
    // The merged group books the whole gain on its top node.
    CHECK(overlay.utility_deltas.size() == 1);
    CHECK(overlay.utility_deltas[0].second == q("9/64"));
}

TEST_CASE("collapse overlay leaves a collapse-proof mechanism alone") {
    Mechanism dg = Mechanism::delta_geom(q("1/2"), Budget{1});
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        SimConfig config;
        config.seed = seed;
        auto [tree, metrics] = grow_tree(config, dg);
        if (!metrics.completed) continue;
        OverlayResult overlay =
            strategic_overlay(tree, dg, Strategy::collapse_if_profitable, 0.0, 5);
        CHECK(overlay.reported_t == metrics.t);
        CHECK_FALSE(overlay.move.has_value());
    }
}

TEST_CASE("sybil overlay: free fakes fill the cap, costly fakes never start") {
    Mechanism gd = Mechanism::gamma_delta_geom(q("1/2"), q("1/2"), Budget{1});
    auto [tree, metrics] = grow_tree(chain_config(2), gd);
    REQUIRE(metrics.t == 2);

    OverlayResult free_fakes =
        strategic_overlay(tree, gd, Strategy::sybil_if_profitable, 0.0, 5);
    REQUIRE(free_fakes.move.has_value());
    SybilMove move = std::get<SybilMove>(*free_fakes.move);
    CHECK(move.k == 2);  // the winner gains most
    CHECK(move.n == 5);
    CHECK(free_fakes.reported_t == 7);
    // Winner payment 1/2 times the partial geometric sum over five fakes.
    CHECK(free_fakes.group_gain == q("31/64"));

    OverlayResult deterred =
        strategic_overlay(tree, gd, Strategy::sybil_if_profitable, 0.3, 5);
    CHECK_FALSE(deterred.move.has_value());  // first fake pays 1/4 < 0.3
    CHECK(deterred.reported_t == 2);

    OverlayResult partial =
        strategic_overlay(tree, gd, Strategy::sybil_if_profitable, 0.1, 5);
    REQUIRE(partial.move.has_value());
    // Marginal payments 1/4, 1/8, ... stop beating the cost after two fakes.
    CHECK(std::get<SybilMove>(*partial.move).n == 2);
}

TEST_CASE("sybil overlay: sybil-proof mechanisms attract no fakes even for free") {
    auto [tree, metrics] = grow_tree(chain_config(3), Mechanism::wta(1, Budget{1}));
    REQUIRE(metrics.completed);
    for (Mechanism mech : {Mechanism::wta(1, Budget{1}), Mechanism::top_down_geom(Budget{1})}) {
        OverlayResult overlay =
            strategic_overlay(tree, mech, Strategy::sybil_if_profitable, 0.0, 8);
        CHECK_FALSE(overlay.move.has_value());
        CHECK(overlay.reported_t == metrics.t);
    }
}

TEST_CASE("per-agent deltas track the reported positions") {
    Mechanism gd = Mechanism::gamma_delta_geom(q("1/2"), q("1/2"), Budget{1});
    auto [tree, metrics] = grow_tree(chain_config(3), gd);
    REQUIRE(metrics.t == 3);
    OverlayResult overlay = strategic_overlay(tree, gd, Strategy::sybil_if_profitable, 0.0, 2);
    REQUIRE(overlay.move.has_value());
    SybilMove move = std::get<SybilMove>(*overlay.move);
    CHECK(move.k == 3);
    CHECK(move.n == 2);
    REQUIRE(overlay.utility_deltas.size() == 3);
    // Agents above the attacker keep their depth but the chain lengthens,
    // so their payments shrink: R(j,5) - R(j,3).
    CHECK(overlay.utility_deltas[0].second == q("-3/32"));
    CHECK(overlay.utility_deltas[1].second == q("-3/16"));
    CHECK(overlay.utility_deltas[2].second == overlay.group_gain);
}

TEST_CASE("config digests separate different configurations") {
    SimConfig a;
    SimConfig b;
    b.seed = 1;
    SimConfig c;
    c.exec_prob = 0.2;
    CHECK(config_digest(a) != config_digest(b));
    CHECK(config_digest(a) != config_digest(c));
    CHECK(config_digest(a) == config_digest(SimConfig{}));
}
