#include "chainpay/mechanism.hpp"

#include <fstream>
#include <istream>
#include <sstream>

namespace chainpay {

namespace {

void require(bool ok, Errc code, const std::string& what) {
    if (!ok) throw Error(code, what);
}

void validate_budget(const Budget& budget) {
    require(budget.r_max > 0, Errc::parameter_out_of_range, "budget r_max must be > 0");
}

}  // namespace

Mechanism Mechanism::wta(const Rational& payout, const Budget& budget) {
    validate_budget(budget);
    require(payout > 0 && payout <= budget.r_max, Errc::parameter_out_of_range,
            "WTA payout must satisfy 0 < payout <= r_max");
    Mechanism m;
    m.family_ = Family::wta;
    m.budget_ = budget;
    m.payout_ = payout;
    return m;
}

Mechanism Mechanism::gamma_delta_geom(const Rational& gamma, const Rational& delta,
                                      const Budget& budget) {
    validate_budget(budget);
    require(gamma > 0 && gamma <= 1, Errc::parameter_out_of_range, "gamma must be in (0,1]");
    require(delta > 0 && delta < 1, Errc::parameter_out_of_range, "delta must be in (0,1)");
    Mechanism m;
    m.family_ = Family::gamma_delta_geom;
    m.budget_ = budget;
    m.gamma_ = gamma;
    m.delta_ = delta;
    return m;
}

Mechanism Mechanism::delta_geom(const Rational& delta, const Budget& budget) {
    validate_budget(budget);
    require(delta > 0 && delta < 1, Errc::parameter_out_of_range, "delta must be in (0,1)");
    Mechanism m;
    m.family_ = Family::delta_geom;
    m.budget_ = budget;
    m.delta_ = delta;
    return m;
}

Mechanism Mechanism::top_down_geom(const Budget& budget) {
    validate_budget(budget);
    Mechanism m;
    m.family_ = Family::top_down_geom;
    m.budget_ = budget;
    return m;
}

Mechanism Mechanism::tabular(Table table, const Budget& budget) {
    validate_budget(budget);
    require(!table.empty(), Errc::incomplete_chain, "tabular mechanism needs at least one entry");
    int t_max = 0;
    for (const auto& [pos, reward] : table) {
        auto [t, k] = pos;
        require(k >= 1 && t >= k, Errc::position_out_of_domain,
                "table entry outside 1 <= k <= t");
        require(reward >= 0, Errc::negative_reward, "table reward must be nonnegative");
        t_max = std::max(t_max, t);
    }
    // Property checks quantify over all positions, so partial tables would
    // make verdicts meaningless: require totality up to t_max.
    for (int t = 1; t <= t_max; ++t)
        for (int k = 1; k <= t; ++k)
            require(table.count({t, k}) == 1, Errc::incomplete_chain,
                    "missing table entry (k=" + std::to_string(k) + ",t=" + std::to_string(t) + ")");
    Mechanism m;
    m.family_ = Family::tabular;
    m.budget_ = budget;
    m.table_ = std::move(table);
    m.table_t_max_ = t_max;
    return m;
}

std::optional<int> Mechanism::table_limit() const {
    if (family_ == Family::tabular) return table_t_max_;
    return std::nullopt;
}

bool Mechanism::covers(int t) const {
    return t >= 1 && (family_ != Family::tabular || t <= table_t_max_);
}

Rational Mechanism::reward(ChainPosition pos) const {
    require(pos.k >= 1 && pos.t >= pos.k, Errc::position_out_of_domain,
            "position needs 1 <= k <= t");
    switch (family_) {
        case Family::wta:
            return pos.k == pos.t ? payout_ : Rational(0);
        case Family::gamma_delta_geom:
            return rat_pow(delta_, static_cast<unsigned long>(pos.t - pos.k)) * gamma_ *
                   budget_.r_max;
        case Family::delta_geom: {
            Rational leaf = (1 - delta_) / (1 - rat_pow(delta_, static_cast<unsigned long>(pos.t))) *
                            budget_.r_max;
            return rat_pow(delta_, static_cast<unsigned long>(pos.t - pos.k)) * leaf;
        }
        case Family::top_down_geom:
            return rat_pow(Rational(1, 2), static_cast<unsigned long>(pos.k + pos.t)) *
                   budget_.r_max;
        case Family::tabular: {
            auto it = table_.find({pos.t, pos.k});
            require(it != table_.end(), Errc::position_out_of_domain,
                    "tabular mechanism has no entry for (k=" + std::to_string(pos.k) +
                        ",t=" + std::to_string(pos.t) + ")");
            return it->second;
        }
    }
    throw Error(Errc::position_out_of_domain, "unreachable");
}

std::vector<Rational> Mechanism::chain_payments(int t) const {
    require(t >= 1, Errc::position_out_of_domain, "chain length must be >= 1");
    require(covers(t), Errc::position_out_of_domain,
            "chain length " + std::to_string(t) + " beyond mechanism domain");
    std::vector<Rational> payments;
    payments.reserve(static_cast<size_t>(t));
    for (int k = 1; k <= t; ++k) payments.push_back(reward({k, t}));
    return payments;
}

Rational Mechanism::chain_total(int t) const {
    Rational total = 0;
    for (const Rational& payment : chain_payments(t)) total += payment;
    return total;
}

std::string Mechanism::describe() const {
    std::string head;
    switch (family_) {
        case Family::wta: head = "wta:" + rat_str(payout_); break;
        case Family::gamma_delta_geom:
            head = "gdgeom:" + rat_str(gamma_) + "," + rat_str(delta_);
            break;
        case Family::delta_geom: head = "dgeom:" + rat_str(delta_); break;
        case Family::top_down_geom: head = "topdown"; break;
        case Family::tabular:
            head = "table[t_max=" + std::to_string(table_t_max_) + "]";
            break;
    }
    return head + " rmax=" + rat_str(budget_.r_max);
}

namespace {

std::string strip(std::string s) {
    size_t begin = s.find_first_not_of(" \t\r\n");
    size_t end = s.find_last_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    return s.substr(begin, end - begin + 1);
}

int parse_index(const std::string& field, const std::string& line) {
    try {
        size_t used = 0;
        int value = std::stoi(field, &used);
        if (used != field.size()) throw std::invalid_argument(field);
        return value;
    } catch (const std::exception&) {
        throw Error(Errc::malformed_row, "bad index in row: '" + line + "'");
    }
}

}  // namespace

Mechanism parse_tabular(std::istream& in, const Budget& budget) {
    Mechanism::Table table;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        std::string row = strip(line);
        if (row.empty() || row.front() == '#') continue;
        if (!header_seen) {
            std::string compact;
            for (char c : row)
                if (c != ' ' && c != '\t') compact += c;
            if (compact != "t,k,reward")
                throw Error(Errc::malformed_row, "expected header 't,k,reward', got '" + row + "'");
            header_seen = true;
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(row);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(strip(field));
        if (fields.size() != 3)
            throw Error(Errc::malformed_row, "expected 3 fields in row: '" + row + "'");
        int t = parse_index(fields[0], row);
        int k = parse_index(fields[1], row);
        if (k < 1 || t < k)
            throw Error(Errc::malformed_row, "position outside 1 <= k <= t in row: '" + row + "'");
        Rational reward = parse_rational(fields[2]);
        if (reward < 0) throw Error(Errc::negative_reward, "negative reward in row: '" + row + "'");
        auto [it, inserted] = table.emplace(std::make_pair(t, k), reward);
        (void)it;
        if (!inserted)
            throw Error(Errc::duplicate_entry, "duplicate entry for (k=" + std::to_string(k) +
                                                   ",t=" + std::to_string(t) + ")");
    }
    if (!header_seen) throw Error(Errc::malformed_row, "missing 't,k,reward' header");
    return Mechanism::tabular(std::move(table), budget);
}

Mechanism parse_mechanism_spec(std::string_view spec, const Budget& budget) {
    std::string text = strip(std::string(spec));
    if (text == "topdown") return Mechanism::top_down_geom(budget);
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw Error(Errc::malformed_row, "unknown mechanism spec '" + text + "'");
    std::string name = text.substr(0, colon);
    std::string args = text.substr(colon + 1);
    if (name == "wta") return Mechanism::wta(parse_rational(args), budget);
    if (name == "dgeom") return Mechanism::delta_geom(parse_rational(args), budget);
    if (name == "gdgeom") {
        auto comma = args.find(',');
        if (comma == std::string::npos)
            throw Error(Errc::malformed_row, "gdgeom needs gamma,delta: '" + text + "'");
        return Mechanism::gamma_delta_geom(parse_rational(args.substr(0, comma)),
                                           parse_rational(args.substr(comma + 1)), budget);
    }
    if (name == "table") {
        std::ifstream file(args);
        if (!file) throw Error(Errc::malformed_row, "cannot open table file '" + args + "'");
        return parse_tabular(file, budget);
    }
    throw Error(Errc::malformed_row, "unknown mechanism spec '" + text + "'");
}

}  // namespace chainpay
