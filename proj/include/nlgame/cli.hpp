/**
 * @file cli.hpp
 * @brief Run configuration and the price / oracle / replicate / regions /
 *        sweep commands behind the nlgame executable.
 *
 * Exit codes: 0 success, 2 configuration error, 3 solver or model error,
 * 4 problem too large to enumerate, 5 verification battery failure.
 */

#ifndef NLGAME_CLI_HPP
#define NLGAME_CLI_HPP

#include "nlgame/io.hpp"
#include "nlgame/nlgame.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace nlgame::cli {

using json = nlohmann::json;

enum ExitCode : int { kOk = 0, kConfigError = 2, kSolverError = 3, kTooLarge = 4, kBatteryFailure = 5 };

inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ConfigError:
        case ErrorKind::DegenerateLattice:
        case ErrorKind::InvalidPenalty:
        case ErrorKind::InvalidParameters:
        case ErrorKind::NonFiniteInput: return kConfigError;
        case ErrorKind::TooLarge:
        case ErrorKind::TooManyPaths: return kTooLarge;
        default: return kSolverError;
    }
}

struct Tolerances {
    double obstacle_eq = 1e-9;
    double oracle = 1e-10;
    double replication = 1e-10;
};

struct RunConfig {
    json raw;
    std::filesystem::path base_dir;
    Lattice lattice;
    GeneratorSpec generator;
    BenchmarkAccount benchmark;
    ContractSpec contract;
    std::string side = "hedger";
    double endowment_hedger = 0.0;
    double endowment_counterparty = 0.0;
    Tolerances tolerances;
    std::string out_dir = "nlgame_out";
    std::set<std::string> formats{"json", "csv"};
    double hedge_bump_root = 0.0;

    std::vector<Side> sides() const {
        if (side == "both") return {Side::Hedger, Side::Counterparty};
        return {side == "hedger" ? Side::Hedger : Side::Counterparty};
    }
    PartyView view(Side s) const {
        return {s, s == Side::Hedger ? endowment_hedger : endowment_counterparty, benchmark};
    }
};

namespace detail {

inline Error config_error(const std::string& what) { return Error(ErrorKind::ConfigError, what); }

inline void allow_keys(const json& block, const std::string& name, std::initializer_list<const char*> keys) {
    if (!block.is_object()) throw config_error("'" + name + "' must be an object");
    for (auto it = block.begin(); it != block.end(); ++it) {
        bool known = false;
        for (const char* k : keys) known = known || it.key() == k;
        if (!known) throw config_error("unknown key '" + name + "." + it.key() + "'");
    }
}

inline double number(const json& block, const std::string& name, const char* key) {
    if (!block.contains(key)) throw config_error("missing '" + name + "." + key + "'");
    const json& v = block.at(key);
    if (!v.is_number()) throw config_error("'" + name + "." + key + "' must be a number");
    return v.get<double>();
}

inline double number_or(const json& block, const std::string& name, const char* key, double fallback) {
    return block.contains(key) ? number(block, name, key) : fallback;
}

inline const json& block(const json& root, const char* key) {
    if (!root.contains(key)) throw config_error("missing block '" + std::string(key) + "'");
    return root.at(key);
}

inline Lattice parse_lattice(const json& b) {
    allow_keys(b, "lattice", {"s0", "u", "d", "vol", "T", "N"});
    const double n_raw = number(b, "lattice", "N");
    if (n_raw < 1.0 || n_raw != static_cast<double>(static_cast<std::size_t>(n_raw)))
        throw config_error("'lattice.N' must be a positive integer");
    const TimeGrid grid(number(b, "lattice", "T"), static_cast<std::size_t>(n_raw));
    const double s0 = number(b, "lattice", "s0");
    if (b.contains("vol")) {
        if (b.contains("u") || b.contains("d")) throw config_error("give either 'lattice.vol' or 'lattice.u'/'lattice.d'");
        return build_crr_lattice(s0, number(b, "lattice", "vol"), grid);
    }
    return build_lattice(s0, number(b, "lattice", "u"), number(b, "lattice", "d"), grid);
}

inline GeneratorSpec parse_generator(const json& b) {
    if (!b.is_object() || !b.contains("type") || !b.at("type").is_string())
        throw config_error("'generator.type' must be one of zero, linear, differential");
    const std::string type = b.at("type").get<std::string>();
    if (type == "zero") {
        allow_keys(b, "generator", {"type"});
        return GeneratorSpec::zero();
    }
    if (type == "linear") {
        allow_keys(b, "generator", {"type", "rate"});
        return GeneratorSpec::linear(number(b, "generator", "rate"));
    }
    if (type == "differential") {
        allow_keys(b, "generator", {"type", "r_lend", "r_borrow"});
        return GeneratorSpec::differential(number(b, "generator", "r_lend"), number(b, "generator", "r_borrow"));
    }
    throw config_error("unknown generator type '" + type + "'");
}

inline ContractSpec parse_contract(const json& b, const Lattice& lat, const std::filesystem::path& base) {
    if (!b.is_object() || !b.contains("type") || !b.at("type").is_string())
        throw config_error("'contract.type' must be one of israeli_put, game_bond, custom");
    const std::string type = b.at("type").get<std::string>();
    if (type == "israeli_put") {
        allow_keys(b, "contract", {"type", "strike", "penalty"});
        return builtin_israeli_put(number(b, "contract", "strike"), number(b, "contract", "penalty"), lat);
    }
    if (type == "game_bond") {
        allow_keys(b, "contract", {"type", "face", "coupon", "call_penalty", "put_discount"});
        return builtin_game_bond(number(b, "contract", "face"), number(b, "contract", "coupon"),
                                 number(b, "contract", "call_penalty"), number(b, "contract", "put_discount"), lat);
    }
    if (type == "custom") {
        allow_keys(b, "contract", {"type", "files"});
        const json& files = block(b, "files");
        allow_keys(files, "contract.files", {"xh", "xc", "xbar", "da"});
        auto load = [&](const char* key) {
            if (!files.contains(key) || !files.at(key).is_string())
                throw config_error("missing file 'contract.files." + std::string(key) + "'");
            const std::filesystem::path p = base / files.at(key).get<std::string>();
            if (!std::filesystem::exists(p)) throw config_error("file not found: " + p.string());
            return read_node_csv_file(p.string(), lat.steps());
        };
        ContractSpec c{load("xh"), load("xc"), load("xbar"), files.contains("da") ? load("da") : NodeProcess(lat.steps())};
        return c;
    }
    throw config_error("unknown contract type '" + type + "'");
}

}  // namespace detail

inline void apply_tolerance(Tolerances& t, const std::string& key, double value) {
    if (!(value > 0.0)) throw Error(ErrorKind::ConfigError, "tolerance '" + key + "' must be > 0");
    if (key == "obstacle_eq") t.obstacle_eq = value;
    else if (key == "oracle") t.oracle = value;
    else if (key == "replication") t.replication = value;
    else throw Error(ErrorKind::ConfigError, "unknown tolerance '" + key + "'");
}

/// Builds a validated configuration from parsed JSON; relative files resolve against base_dir.
inline RunConfig parse_config(const json& root, const std::filesystem::path& base_dir = ".") {
    using namespace detail;
    allow_keys(root, "config",
               {"lattice", "generator", "benchmark", "contract", "party", "tolerances", "output", "replication"});
    Lattice lat = parse_lattice(block(root, "lattice"));
    GeneratorSpec gen = parse_generator(block(root, "generator"));
    BenchmarkAccount acct{};
    if (root.contains("benchmark")) {
        const json& b = root.at("benchmark");
        allow_keys(b, "benchmark", {"r_lend", "r_borrow"});
        acct = {number_or(b, "benchmark", "r_lend", 0.0), number_or(b, "benchmark", "r_borrow", 0.0)};
        acct.validate();
    }
    ContractSpec contract = parse_contract(block(root, "contract"), lat, base_dir);
    RunConfig cfg{root, base_dir, lat, gen, acct, contract, "hedger", 0.0, 0.0, Tolerances{}, "nlgame_out", {"json", "csv"}, 0.0};

    if (root.contains("party")) {
        const json& p = root.at("party");
        allow_keys(p, "party", {"side", "endowment", "endowment_hedger", "endowment_counterparty"});
        if (p.contains("side")) {
            if (!p.at("side").is_string()) throw config_error("'party.side' must be a string");
            cfg.side = p.at("side").get<std::string>();
            if (cfg.side != "hedger" && cfg.side != "counterparty" && cfg.side != "both")
                throw config_error("'party.side' must be hedger, counterparty or both");
        }
        const double x = number_or(p, "party", "endowment", 0.0);
        cfg.endowment_hedger = number_or(p, "party", "endowment_hedger", x);
        cfg.endowment_counterparty = number_or(p, "party", "endowment_counterparty", x);
    }
    if (root.contains("tolerances")) {
        const json& t = root.at("tolerances");
        allow_keys(t, "tolerances", {"obstacle_eq", "oracle", "replication"});
        for (const char* key : {"obstacle_eq", "oracle", "replication"})
            if (t.contains(key)) apply_tolerance(cfg.tolerances, key, number(t, "tolerances", key));
    }
    if (root.contains("output")) {
        const json& o = root.at("output");
        allow_keys(o, "output", {"dir", "formats"});
        if (o.contains("dir")) {
            if (!o.at("dir").is_string()) throw config_error("'output.dir' must be a string");
            cfg.out_dir = o.at("dir").get<std::string>();
        }
        if (o.contains("formats")) {
            if (!o.at("formats").is_array()) throw config_error("'output.formats' must be a list");
            cfg.formats.clear();
            for (const auto& f : o.at("formats")) {
                if (!f.is_string()) throw config_error("'output.formats' entries must be strings");
                const std::string name = f.get<std::string>();
                if (name != "json" && name != "csv" && name != "paths")
                    throw config_error("unknown output format '" + name + "'");
                cfg.formats.insert(name);
            }
        }
    }
    if (root.contains("replication")) {
        const json& r = root.at("replication");
        allow_keys(r, "replication", {"hedge_bump_root"});
        cfg.hedge_bump_root = number_or(r, "replication", "hedge_bump_root", 0.0);
    }
    return cfg;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ConfigError, "cannot open config " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ConfigError, "cannot parse " + path + ": " + e.what());
    }
}

struct CommandRequest {
    std::string command;
    std::string config_path;
    std::optional<std::string> out_dir;
    unsigned workers = 1;
    std::vector<std::string> tol_overrides;  ///< "key=value"
    std::string sweep_axis;
    std::vector<double> sweep_values;
};

namespace detail {

struct Context {
    RunConfig cfg;
    std::filesystem::path out;
    unsigned workers = 1;
    std::ostream& log;
};

inline void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
    write_text_file(path.string(), j.dump(2) + "\n");
}

inline std::string side_name(Side s) { return std::string(to_string(s)); }

inline void write_regions(const Context& ctx, const QuoteResult& q) {
    const std::string s = side_name(q.side);
    write_text_file((ctx.out / (s + "_region_sigma.csv")).string(), node_csv_string(region_process(q.region_sigma)));
    write_text_file((ctx.out / (s + "_region_tau.csv")).string(), node_csv_string(region_process(q.region_tau)));
    write_text_file((ctx.out / (s + "_region_bar_sigma.csv")).string(),
                    node_csv_string(region_process(q.region_bar_sigma)));
    write_text_file((ctx.out / (s + "_region_bar_tau.csv")).string(), node_csv_string(region_process(q.region_bar_tau)));
}

inline QuoteResult quote(const RunConfig& cfg, Side side) {
    return acceptable_price(cfg.contract, cfg.view(side), cfg.generator, cfg.lattice, cfg.tolerances.obstacle_eq);
}

/// Single side: the object itself; both sides: keyed by side.
inline nlohmann::ordered_json by_side(const std::vector<std::pair<Side, nlohmann::ordered_json>>& parts) {
    if (parts.size() == 1) return parts.front().second;
    nlohmann::ordered_json j;
    for (const auto& [s, part] : parts) j[side_name(s)] = part;
    return j;
}

inline int cmd_price(Context& ctx) {
    std::vector<std::pair<Side, nlohmann::ordered_json>> parts;
    std::vector<double> prices;
    for (Side s : ctx.cfg.sides()) {
        const QuoteResult q = quote(ctx.cfg, s);
        parts.emplace_back(s, to_json(q));
        prices.push_back(q.price);
        write_regions(ctx, q);
        if (ctx.cfg.formats.count("csv")) {
            const std::string n = side_name(s);
            write_text_file((ctx.out / (n + "_Y.csv")).string(), node_csv_string(q.solution.Y));
            write_text_file((ctx.out / (n + "_Z.csv")).string(), node_csv_string(q.solution.Z));
            write_text_file((ctx.out / (n + "_dL.csv")).string(), node_csv_string(q.solution.dL));
            write_text_file((ctx.out / (n + "_dU.csv")).string(), node_csv_string(q.solution.dU));
        }
    }
    nlohmann::ordered_json j = by_side(parts);
    if (prices.size() == 2) j["spread"] = prices[0] - prices[1];
    write_json(ctx.out / "quote.json", j);
    ctx.log << j.dump(2) << '\n';
    return kOk;
}

inline int cmd_regions(Context& ctx) {
    for (Side s : ctx.cfg.sides()) write_regions(ctx, quote(ctx.cfg, s));
    return kOk;
}

inline int cmd_oracle(Context& ctx) {
    std::vector<std::pair<Side, nlohmann::ordered_json>> parts;
    bool all_match = true;
    for (Side s : ctx.cfg.sides()) {
        const PartyView view = ctx.cfg.view(s);
        const DrbsdeInputs in = party_obstacles(ctx.cfg.contract, view, ctx.cfg.generator, ctx.cfg.lattice);
        require_enumerable(in.lattice);
        const GamePayoff payoff = make_game_payoff(in, party_tie(ctx.cfg.contract, view, ctx.cfg.lattice));
        const double y0 = solve_drbsde(in).y0();
        OracleSettings os;
        os.workers = ctx.workers;
        const GameValueReport report = game_value_brute(in, payoff, os);
        const SaddleDiagnosis d = saddle_check(report, y0, ctx.cfg.tolerances.oracle);
        all_match = all_match && d.matches_upper;
        nlohmann::ordered_json part = to_json(report, y0, d);
        parts.emplace_back(s, part);
    }
    const nlohmann::ordered_json j = by_side(parts);
    write_json(ctx.out / "oracle.json", j);
    ctx.log << j.dump(2) << '\n';
    return all_match ? kOk : kBatteryFailure;
}

inline int cmd_replicate(Context& ctx) {
    std::vector<std::pair<Side, nlohmann::ordered_json>> parts;
    std::optional<std::string> failure;
    VerifySettings vs;
    vs.gap_tol = ctx.cfg.tolerances.replication;
    vs.obstacle_tol = ctx.cfg.tolerances.obstacle_eq;
    vs.value_tol = ctx.cfg.tolerances.oracle;
    for (Side s : ctx.cfg.sides()) {
        const QuoteResult q = quote(ctx.cfg, s);
        path_count(q.inputs.lattice);
        NodeProcess hedge = q.solution.Z;
        hedge(0, 0) += ctx.cfg.hedge_bump_root;
        const ReplicationReport r = verify_replication(q, vs, &hedge);
        parts.emplace_back(s, to_json(r));
        if (!r.passed() && !failure) {
            std::string where = r.first_failing_path ? " at path " + std::to_string(*r.first_failing_path) : "";
            failure = side_name(s) + " replication battery failed" + where;
        }
        if (ctx.cfg.formats.count("paths")) {
            std::ostringstream csv;
            csv << "path_id,step,V,Y,L_cum,U_cum\n";
            for (PathId p = 0; p < r.n_paths; ++p) {
                WealthPath w = forward_wealth(q.y0, hedge, q.inputs.generator, q.inputs.cashflow, q.inputs.lattice, p);
                attach_reflection(w, q.solution);
                const std::vector<double> y = solution_along(q, p);
                for (std::size_t k = 0; k < w.values.size(); ++k)
                    csv << p << ',' << k << ',' << format_double(w.values[k]) << ',' << format_double(y[k]) << ','
                        << format_double(w.L_cum[k]) << ',' << format_double(w.U_cum[k]) << '\n';
            }
            write_text_file((ctx.out / ("replication_paths_" + side_name(s) + ".csv")).string(), csv.str());
        }
    }
    const nlohmann::ordered_json j = by_side(parts);
    write_json(ctx.out / "replication.json", j);
    ctx.log << j.dump(2) << '\n';
    if (failure) {
        std::cerr << *failure << '\n';
        return kBatteryFailure;
    }
    return kOk;
}

inline json* find_leaf(json& root, const std::string& axis) {
    json* node = &root;
    std::istringstream parts(axis);
    std::string key;
    while (std::getline(parts, key, '.')) {
        if (!node->is_object() || !node->contains(key)) return nullptr;
        node = &(*node)[key];
    }
    return node->is_number() ? node : nullptr;
}

struct SweepRow {
    double hedger = 0.0;
    double counterparty = 0.0;
    std::optional<Error> error;
};

inline int cmd_sweep(Context& ctx, const std::string& axis, const std::vector<double>& values) {
    json probe = ctx.cfg.raw;
    if (axis.empty() || !find_leaf(probe, axis)) throw Error(ErrorKind::ConfigError, "unknown sweep axis '" + axis + "'");
    if (values.empty()) throw Error(ErrorKind::ConfigError, "sweep needs at least one value");

    std::vector<SweepRow> rows(values.size());
    auto run_point = [&](std::size_t i) {
        try {
            json point = ctx.cfg.raw;
            json* leaf = find_leaf(point, axis);
            if (axis == "lattice.N") *leaf = static_cast<std::int64_t>(values[i]);
            else *leaf = values[i];
            RunConfig cfg = parse_config(point, ctx.cfg.base_dir);
            cfg.tolerances = ctx.cfg.tolerances;
            rows[i].hedger = quote(cfg, Side::Hedger).price;
            rows[i].counterparty = quote(cfg, Side::Counterparty).price;
        } catch (const Error& e) {
            rows[i].error = e;
        }
    };
    const unsigned workers = std::max(1U, std::min<unsigned>(ctx.workers, static_cast<unsigned>(values.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < values.size(); ++i) run_point(i);
    } else {
        std::mutex m;
        std::size_t next = 0;
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t i;
                    {
                        std::lock_guard<std::mutex> lock(m);
                        if (next >= values.size()) return;
                        i = next++;
                    }
                    run_point(i);
                }
            });
        for (auto& t : pool) t.join();
    }
    for (const SweepRow& r : rows)
        if (r.error) throw *r.error;

    std::ostringstream csv;
    csv << "value,price_hedger,price_counterparty,spread\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        csv << format_double(values[i]) << ',' << format_double(rows[i].hedger) << ','
            << format_double(rows[i].counterparty) << ',' << format_double(rows[i].hedger - rows[i].counterparty)
            << '\n';
    write_text_file((ctx.out / "sweep.csv").string(), csv.str());
    ctx.log << csv.str();
    return kOk;
}

}  // namespace detail

/// Runs one command and maps failures to exit codes; messages go to `err`.
inline int run_command(const CommandRequest& req, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    const auto started = std::chrono::steady_clock::now();
    try {
        const std::filesystem::path config_path(req.config_path);
        RunConfig cfg = parse_config(load_json_file(req.config_path), config_path.parent_path());
        for (const std::string& kv : req.tol_overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw Error(ErrorKind::ConfigError, "--tol-override expects key=value");
            char* end = nullptr;
            const std::string value = kv.substr(eq + 1);
            const double v = std::strtod(value.c_str(), &end);
            if (value.empty() || *end) throw Error(ErrorKind::ConfigError, "bad tolerance value '" + value + "'");
            apply_tolerance(cfg.tolerances, kv.substr(0, eq), v);
        }
        std::filesystem::path out_dir = req.out_dir ? std::filesystem::path(*req.out_dir) : std::filesystem::path(cfg.out_dir);
        if (!req.out_dir && out_dir.is_relative()) out_dir = config_path.parent_path() / out_dir;
        std::filesystem::create_directories(out_dir);
        detail::Context ctx{std::move(cfg), out_dir, std::max(1U, req.workers), out};

        int code;
        if (req.command == "price") code = detail::cmd_price(ctx);
        else if (req.command == "oracle") code = detail::cmd_oracle(ctx);
        else if (req.command == "replicate") code = detail::cmd_replicate(ctx);
        else if (req.command == "regions") code = detail::cmd_regions(ctx);
        else if (req.command == "sweep") code = detail::cmd_sweep(ctx, req.sweep_axis, req.sweep_values);
        else throw Error(ErrorKind::ConfigError, "unknown command '" + req.command + "'");

        const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
        out << "runtime_ms=" << ms << '\n';
        std::ofstream run_log(out_dir / "run.log", std::ios::app);
        run_log << req.command << " runtime_ms=" << ms << " exit=" << code << '\n';
        return code;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::filesystem::filesystem_error& e) {
        err << "ConfigError: " << e.what() << '\n';
        return kConfigError;
    }
}

}  // namespace nlgame::cli

#endif  // NLGAME_CLI_HPP
