/**
 * @file io.hpp
 * @brief NodeProcess CSV files and JSON encodings of results.
 *
 * CSV layout: header `step,up_count,value`, rows sorted by (step, up_count),
 * values printed with 17 significant digits so they re-parse bit-exactly.
 */

#ifndef NLGAME_IO_HPP
#define NLGAME_IO_HPP

#include "nlgame/drbsde.hpp"
#include "nlgame/dynkin_oracle.hpp"
#include "nlgame/errors.hpp"
#include "nlgame/model_core.hpp"
#include "nlgame/pricing.hpp"
#include "nlgame/replication.hpp"
#include "nlgame/stopping_rule.hpp"

#include <json.hpp>

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace nlgame {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_node_csv(std::ostream& os, const NodeProcess& p) {
    os << "step,up_count,value\n";
    for (std::size_t k = 0; k <= p.steps(); ++k)
        for (std::size_t j = 0; j <= k; ++j) os << k << ',' << j << ',' << format_double(p(k, j)) << '\n';
}

inline std::string node_csv_string(const NodeProcess& p) {
    std::ostringstream os;
    write_node_csv(os, p);
    return os.str();
}

/// Parses a NodeProcess CSV for a tree with `steps` steps; every node must appear exactly once.
inline NodeProcess read_node_csv(std::istream& is, std::size_t steps, const std::string& source = "csv") {
    auto fail = [&](const std::string& why) { return Error(ErrorKind::ConfigError, source + ": " + why); };
    std::string line;
    if (!std::getline(is, line)) throw fail("empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "step,up_count,value") throw fail("expected header 'step,up_count,value'");
    NodeProcess p(steps);
    std::vector<std::uint8_t> seen(node_count(steps), 0);
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string a, b, c;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c))
            throw fail("row " + std::to_string(row) + " needs three fields");
        char* end = nullptr;
        const unsigned long long k = std::strtoull(a.c_str(), &end, 10);
        if (a.empty() || *end) throw fail("bad step on row " + std::to_string(row));
        const unsigned long long j = std::strtoull(b.c_str(), &end, 10);
        if (b.empty() || *end) throw fail("bad up_count on row " + std::to_string(row));
        errno = 0;
        const double v = std::strtod(c.c_str(), &end);
        if (c.empty() || *end || errno == ERANGE) throw fail("bad value on row " + std::to_string(row));
        if (k > steps || j > k) throw fail("node (" + a + "," + b + ") outside a " + std::to_string(steps) + "-step tree");
        const std::size_t i = node_index(k, j);
        if (seen[i]) throw fail("node (" + a + "," + b + ") appears twice");
        seen[i] = 1;
        p.at_index(i) = v;
    }
    for (auto s : seen)
        if (!s) throw fail("missing nodes for a " + std::to_string(steps) + "-step tree");
    return p;
}

inline NodeProcess read_node_csv_file(const std::string& path, std::size_t steps) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ConfigError, "cannot open " + path);
    return read_node_csv(in, steps, path);
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + path);
    out << text;
}

inline NodeProcess region_process(const NodeSet& s) {
    NodeProcess p(s.steps());
    for (std::size_t i = 0; i < s.size(); ++i) p.at_index(i) = s.contains_index(i) ? 1.0 : 0.0;
    return p;
}

inline nlohmann::ordered_json to_json(const QuoteResult& q) {
    nlohmann::ordered_json j;
    j["side"] = std::string(to_string(q.side));
    j["price"] = q.price;
    j["y0"] = q.y0;
    j["residual_max"] = q.solution.residual_max;
    j["iterations_max"] = q.solution.iterations_max;
    return j;
}

inline nlohmann::ordered_json to_json(const GameValueReport& r, double y0, const SaddleDiagnosis& d) {
    nlohmann::ordered_json j;
    j["upper"] = r.upper_value;
    j["lower"] = r.lower_value;
    j["y0"] = y0;
    j["matches_upper"] = d.matches_upper;
    j["has_value"] = d.has_value;
    j["n_rules"] = r.rule_count;
    j["full_pair_enumeration"] = r.full_pair_enumeration;
    return j;
}

inline nlohmann::ordered_json to_json(const ReplicationReport& r) {
    nlohmann::ordered_json j;
    j["replicates"] = r.replicates;
    j["max_gap"] = r.max_gap;
    j["ao_at_plus"] = r.ao_at_plus;
    j["sh_fails_at_minus"] = r.sh_fails_at_minus;
    j["n_paths"] = r.n_paths;
    if (r.first_failing_path) j["first_failing_path"] = *r.first_failing_path;
    return j;
}

}  // namespace nlgame

#endif  // NLGAME_IO_HPP
