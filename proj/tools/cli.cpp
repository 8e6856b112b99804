#include "cli.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "chainpay/reports.hpp"

namespace chainpay {

namespace {

using nlohmann::json;

// Reports go to stdout (and optionally a file); logs and errors to stderr.

void emit(const json& report, const std::string& out_path) {
    std::string text = report.dump(2) + "\n";
    std::cout << text;
    if (!out_path.empty()) {
        std::ofstream file(out_path);
        if (!file) throw Error(Errc::malformed_row, "cannot write '" + out_path + "'");
        file << text;
    }
}

void emit_text(const std::string& text, const std::string& out_path) {
    std::cout << text;
    if (!out_path.empty()) {
        std::ofstream file(out_path);
        if (!file) throw Error(Errc::malformed_row, "cannot write '" + out_path + "'");
        file << text;
    }
}

std::map<int, double> parse_pmf(const std::string& text) {
    std::map<int, double> pmf;
    std::stringstream ss(text);
    std::string entry;
    while (std::getline(ss, entry, ',')) {
        auto colon = entry.find(':');
        if (colon == std::string::npos)
            throw Error(Errc::malformed_row, "pmf entries look like count:probability");
        pmf[std::stoi(entry.substr(0, colon))] = std::stod(entry.substr(colon + 1));
    }
    return pmf;
}

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    auto end = s.find_last_not_of(" \t\r\n");
    return begin == std::string::npos ? "" : s.substr(begin, end - begin + 1);
}

/// "key = value" lines with '#' comments; keys match the long flag names.
std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::malformed_row, "cannot open config file '" + path + "'");
    std::map<std::string, std::string> values;
    std::string line;
    while (std::getline(in, line)) {
        std::string row = trim(line);
        if (row.empty() || row.front() == '#') continue;
        auto eq = row.find('=');
        if (eq == std::string::npos)
            throw Error(Errc::malformed_row, "config lines look like 'key = value': '" + row + "'");
        values[trim(row.substr(0, eq))] = trim(row.substr(eq + 1));
    }
    return values;
}

struct MechArgs {
    std::string spec;
    std::string rmax = "1";

    Mechanism build() const {
        return parse_mechanism_spec(spec, Budget{parse_rational(rmax)});
    }
};

void add_mech_options(CLI::App* cmd, MechArgs& args) {
    cmd->add_option("--mech", args.spec,
                    "Mechanism spec: wta:<payout> | gdgeom:<gamma>,<delta> | dgeom:<delta> | "
                    "topdown | table:<path>")
        ->required();
    cmd->add_option("--rmax", args.rmax, "Planner budget R_max (rational)");
}

int do_check(const MechArgs& mech_args, const std::string& prop_name, const std::string& eps,
             const std::string& delta, const std::string& gamma, const CheckBounds& bounds,
             const std::string& out_path) {
    Mechanism mech = mech_args.build();
    auto kind = property_kind_from(prop_name);
    if (!kind) throw Error(Errc::parameter_out_of_range, "unknown property '" + prop_name + "'");
    auto need = [&](const std::string& value, const char* flag) {
        if (value.empty())
            throw Error(Errc::parameter_out_of_range,
                        "property " + prop_name + " needs " + flag);
        return parse_rational(value);
    };
    PropertySpec prop = PropertySpec::dsp();
    switch (*kind) {
        case PropertyKind::dsp: prop = PropertySpec::dsp(); break;
        case PropertyKind::eps_dsp: prop = PropertySpec::eps_dsp(need(eps, "--eps")); break;
        case PropertyKind::cp: prop = PropertySpec::cp(); break;
        case PropertyKind::bb: prop = PropertySpec::bb(); break;
        case PropertyKind::scr: prop = PropertySpec::scr(); break;
        case PropertyKind::wcr: prop = PropertySpec::wcr(); break;
        case PropertyKind::delta_scr: prop = PropertySpec::delta_scr(need(delta, "--delta")); break;
        case PropertyKind::gamma_sec: prop = PropertySpec::gamma_sec(need(gamma, "--gamma")); break;
    }
    CheckReport report = check_property(mech, prop, bounds);
    emit(to_json(report), out_path);
    return report.passed() ? 0 : 1;
}

int do_attack(const MechArgs& mech_args, const std::string& kind, int k, int t, int n_max,
              int p_max, const std::string& out_path) {
    Mechanism mech = mech_args.build();
    AttackResult result = kind == "sybil" ? best_sybil(mech, k, t, n_max)
                                          : best_collapse(mech, t, p_max);
    emit(to_json(result), out_path);
    return result.gain > 0 ? 1 : 0;
}

int do_prove(const std::string& theorem, int horizon, const std::string& out_path) {
    if (theorem == "impossibility") {
        ImpossibilityReport report = verify_impossibility(horizon);
        emit(to_json(report), out_path);
        return report.scr_zero_forced ? 0 : 1;
    }
    WtaStructureReport report = verify_wta_structure(horizon);
    emit(to_json(report), out_path);
    return report.structure_verified ? 0 : 1;
}

int do_region(const std::string& step_delta, const std::string& step_eps,
              const std::string& step_gamma, const std::string& eps_max, int threads,
              const std::string& out_path) {
    auto cells = region_scan(parse_rational(step_delta), parse_rational(step_eps),
                             parse_rational(step_gamma), parse_rational(eps_max), threads);
    std::ostringstream csv;
    write_region_csv(csv, cells);
    emit_text(csv.str(), out_path);
    return 0;
}

int do_pay(const MechArgs& mech_args, int t) {
    Mechanism mech = mech_args.build();
    std::vector<Rational> payments = mech.chain_payments(t);
    std::string line;
    for (size_t i = 0; i < payments.size(); ++i) {
        if (i) line += ' ';
        line += rat_str(payments[i]);
    }
    std::cout << line << "\n";
    return 0;
}

int do_simulate(const MechArgs& mech_args, const SimConfig& config, int runs, int threads,
                const std::string& out_path, const std::string& per_run_path) {
    Mechanism mech = mech_args.build();
    BatchStats stats = run_batch(config, mech, runs, threads);
    emit(to_json(stats), out_path);
    if (!per_run_path.empty()) {
        std::ofstream file(per_run_path);
        if (!file) throw Error(Errc::malformed_row, "cannot write '" + per_run_path + "'");
        write_per_run_csv(file, stats);
    }
    return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Audit, attack, prove, scan and simulate chain payment mechanisms"};
    app.require_subcommand(1);

    MechArgs check_mech;
    std::string check_prop, check_eps, check_delta, check_gamma, check_out;
    CheckBounds check_bounds;
    CLI::App* check = app.add_subcommand("check", "Decide one incentive property, with witness");
    add_mech_options(check, check_mech);
    check->add_option("--prop", check_prop,
                      "dsp | eps_dsp | cp | bb | scr | wcr | delta_scr | gamma_sec")
        ->required();
    check->add_option("--eps", check_eps, "Parameter for eps_dsp (rational)");
    check->add_option("--delta", check_delta, "Parameter for delta_scr (rational)");
    check->add_option("--gamma", check_gamma, "Parameter for gamma_sec (rational)");
    check->add_option("--tmax", check_bounds.t_max, "Largest chain length scanned");
    check->add_option("--nmax", check_bounds.n_max, "Largest sybil count scanned");
    check->add_option("--pmax", check_bounds.p_max, "Largest collapse length scanned");
    check->add_option("--out", check_out, "Also write the JSON report here");

    MechArgs attack_mech;
    std::string attack_kind, attack_out;
    int attack_k = 1, attack_t = 1, attack_nmax = 10, attack_pmax = 10;
    CLI::App* attack = app.add_subcommand("attack", "Search for the most profitable manipulation");
    add_mech_options(attack, attack_mech);
    attack->add_option("--kind", attack_kind, "sybil | collapse")
        ->required()
        ->check(CLI::IsMember({"sybil", "collapse"}));
    attack->add_option("--k", attack_k, "Attacker depth (sybil)");
    attack->add_option("--t", attack_t, "Chain length")->required();
    attack->add_option("--nmax", attack_nmax, "Largest sybil count tried");
    attack->add_option("--pmax", attack_pmax, "Largest collapse length tried");
    attack->add_option("--out", attack_out, "Also write the JSON report here");

    std::string prove_theorem, prove_out;
    int prove_horizon = 4;
    CLI::App* prove = app.add_subcommand("prove", "Verify a theorem at a finite horizon");
    prove->add_option("--theorem", prove_theorem, "impossibility | wta")
        ->required()
        ->check(CLI::IsMember({"impossibility", "wta"}));
    prove->add_option("--horizon", prove_horizon, "Largest chain length in the system")
        ->required();
    prove->add_option("--out", prove_out, "Also write the JSON report here");

    std::string region_sd = "1/8", region_se = "1/4", region_sg = "1/8", region_emax = "2";
    std::string region_out;
    int region_threads = 1;
    CLI::App* region = app.add_subcommand("region", "Scan the (delta,eps,gamma) parameter space");
    region->add_option("--step-delta", region_sd, "Grid step for delta");
    region->add_option("--step-eps", region_se, "Grid step for eps");
    region->add_option("--step-gamma", region_sg, "Grid step for gamma");
    region->add_option("--eps-max", region_emax, "Largest eps scanned");
    region->add_option("--threads", region_threads, "Worker threads")
        ->envname("CHAINPAY_THREADS");
    region->add_option("--out", region_out, "Also write the CSV here");

    MechArgs pay_mech;
    int pay_t = 1;
    CLI::App* pay = app.add_subcommand("pay", "Print the chain payments for a given length");
    add_mech_options(pay, pay_mech);
    pay->add_option("--t", pay_t, "Chain length")->required();

    MechArgs sim_mech;
    SimConfig sim_config;
    std::string sim_pmf = "0:0.5,2:0.5", sim_strategy = "honest", sim_out, sim_per_run;
    std::string sim_cfg_path;
    int sim_runs = 100, sim_threads = 1, sim_trigger = -1;
    CLI::App* simulate = app.add_subcommand("simulate", "Grow recruitment trees and pay them");
    add_mech_options(simulate, sim_mech);
    simulate->add_option("--config", sim_cfg_path, "Defaults file with 'key = value' lines");
    simulate->add_option("--runs", sim_runs, "Independent runs");
    simulate->add_option("--pmf", sim_pmf, "Offspring pmf, e.g. 0:0.5,2:0.5");
    simulate->add_option("--q", sim_config.exec_prob, "Per-round execution probability");
    simulate->add_option("--exec-depth-trigger", sim_trigger,
                         "Agents at this depth or deeper always execute (-1: off)");
    simulate->add_option("--max-rounds", sim_config.max_rounds, "Round cap per run");
    simulate->add_option("--population-cap", sim_config.population_cap, "Tree size cap");
    simulate->add_option("--sybil-cost", sim_config.sybil_cost, "Cost per fake node");
    simulate->add_option("--sybil-cap", sim_config.sybil_cap, "Most fakes per attacker");
    simulate->add_option("--strategy", sim_strategy,
                         "honest | sybil_if_profitable | collapse_if_profitable");
    simulate->add_option("--seed", sim_config.seed, "Master seed");
    simulate->add_option("--threads", sim_threads, "Worker threads")
        ->envname("CHAINPAY_THREADS");
    simulate->add_option("--out", sim_out, "Also write the JSON results here");
    simulate->add_option("--per-run", sim_per_run, "Write one CSV row per run here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*check)
            return do_check(check_mech, check_prop, check_eps, check_delta, check_gamma,
                            check_bounds, check_out);
        if (*attack)
            return do_attack(attack_mech, attack_kind, attack_k, attack_t, attack_nmax,
                             attack_pmax, attack_out);
        if (*prove) return do_prove(prove_theorem, prove_horizon, prove_out);
        if (*region)
            return do_region(region_sd, region_se, region_sg, region_emax, region_threads,
                             region_out);
        if (*pay) return do_pay(pay_mech, pay_t);
        if (*simulate) {
            if (!sim_cfg_path.empty()) {
                // Config file entries are defaults; flags given on the
                // command line win.
                std::map<std::string, std::function<void(const std::string&)>> setters{
                    {"mech", [&](const std::string& v) { sim_mech.spec = v; }},
                    {"rmax", [&](const std::string& v) { sim_mech.rmax = v; }},
                    {"runs", [&](const std::string& v) { sim_runs = std::stoi(v); }},
                    {"pmf", [&](const std::string& v) { sim_pmf = v; }},
                    {"q", [&](const std::string& v) { sim_config.exec_prob = std::stod(v); }},
                    {"exec-depth-trigger",
                     [&](const std::string& v) { sim_trigger = std::stoi(v); }},
                    {"max-rounds",
                     [&](const std::string& v) { sim_config.max_rounds = std::stoi(v); }},
                    {"population-cap",
                     [&](const std::string& v) { sim_config.population_cap = std::stoi(v); }},
                    {"sybil-cost",
                     [&](const std::string& v) { sim_config.sybil_cost = std::stod(v); }},
                    {"sybil-cap",
                     [&](const std::string& v) { sim_config.sybil_cap = std::stoi(v); }},
                    {"strategy", [&](const std::string& v) { sim_strategy = v; }},
                    {"seed", [&](const std::string& v) { sim_config.seed = std::stoull(v); }},
                    {"threads", [&](const std::string& v) { sim_threads = std::stoi(v); }},
                    {"out", [&](const std::string& v) { sim_out = v; }},
                    {"per-run", [&](const std::string& v) { sim_per_run = v; }},
                };
                for (const auto& [key, value] : read_config_file(sim_cfg_path)) {
                    auto it = setters.find(key);
                    if (it == setters.end())
                        throw Error(Errc::malformed_row, "unknown config key '" + key + "'");
                    if (simulate->count("--" + key) == 0) it->second(value);
                }
            }
            sim_config.offspring_pmf = parse_pmf(sim_pmf);
            if (sim_trigger >= 0) sim_config.exec_depth_trigger = sim_trigger;
            auto strategy = strategy_from(sim_strategy);
            if (!strategy)
                throw Error(Errc::parameter_out_of_range,
                            "unknown strategy '" + sim_strategy + "'");
            sim_config.strategy = *strategy;
            return do_simulate(sim_mech, sim_config, sim_runs, sim_threads, sim_out, sim_per_run);
        }
    } catch (const Error& e) {
        std::cerr << "chainpay: " << errc_name(e.code()) << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "chainpay: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace chainpay
