#include "stablab/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace stablab::report {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

Config parse_config_text(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParamError("config line " + std::to_string(lineno) +
                                 ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParamError("config line " + std::to_string(lineno) +
                             ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ParamError("config line " + std::to_string(lineno) + ": empty key");
        if (!section.empty()) key = section + "." + key;
        cfg[key] = value;
    }
    return cfg;
}

Config parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParamError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

std::string get_str(const Config& c, const std::string& key, const std::string& dflt) {
    const auto it = c.find(key);
    return it == c.end() ? dflt : it->second;
}

double get_num(const Config& c, const std::string& key, double dflt) {
    const auto it = c.find(key);
    if (it == c.end()) return dflt;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParamError("config key '" + key + "': not a number: " + it->second);
    }
}

long get_int(const Config& c, const std::string& key, long dflt) {
    const double v = get_num(c, key, static_cast<double>(dflt));
    const long l = static_cast<long>(v);
    if (static_cast<double>(l) != v)
        throw ParamError("config key '" + key + "': not an integer");
    return l;
}

std::uint64_t param_hash(const Config& c) {
    std::uint64_t h = 14695981039346656037ull;
    auto feed = [&](const std::string& s) {
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 1099511628211ull;
        }
    };
    for (const auto& [k, v] : c) {  // std::map iterates in sorted key order
        feed(k);
        feed("=");
        feed(v);
        feed("\n");
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string format_sig(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

namespace {
std::string join_coords(const Vec& x) {
    std::string s;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) s += ';';
        s += format_sig(x[i]);
    }
    return s;
}
}  // namespace

std::string to_csv(const est::ExperimentReport& rep, std::uint64_t hash) {
    std::ostringstream out;
    out << "experiment,param_hash,seed,point_index,x_coords,estimate,stderr,n,"
           "statistic,statistic_err,pass\n";
    const std::string tail = format_sig(rep.statistic) + "," +
                             format_sig(rep.statistic_err) + "," +
                             (rep.pass ? "1" : "0");
    for (const auto& p : rep.points) {
        out << rep.name << ',' << hash_hex(hash) << ',' << rep.seed << ','
            << p.index << ',' << join_coords(p.x) << ',' << format_sig(p.est.mean)
            << ',' << format_sig(p.est.stderror) << ',' << p.est.n << ',' << tail
            << '\n';
    }
    return out.str();
}

std::string to_json(const est::ExperimentReport& rep, std::uint64_t hash) {
    nlohmann::json j;
    j["experiment"] = rep.name;
    j["param_hash"] = hash_hex(hash);
    j["seed"] = rep.seed;
    j["statistic"] = rep.statistic;
    j["statistic_err"] = rep.statistic_err;
    j["pass"] = rep.pass;
    j["runtime_s"] = rep.runtime_s;
    j["notes"] = rep.notes;
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : rep.params) params[k] = v;
    j["params"] = params;
    j["points"] = nlohmann::json::array();
    for (const auto& p : rep.points) {
        nlohmann::json pj;
        pj["index"] = p.index;
        pj["x"] = p.x;
        pj["estimate"] = p.est.mean;
        pj["stderr"] = p.est.stderror;
        pj["n"] = p.est.n;
        j["points"].push_back(pj);
    }
    return j.dump(2) + "\n";
}

std::string manifest_json(const est::ExperimentReport& rep, const Config& resolved,
                          std::uint64_t hash) {
    nlohmann::json j;
    j["artifact_version"] = "1.0.0";
    j["experiment"] = rep.name;
    j["param_hash"] = hash_hex(hash);
    j["seed"] = rep.seed;
    j["wall_clock_s"] = rep.runtime_s;
    j["pass"] = rep.pass;
    nlohmann::json cfg = nlohmann::json::object();
    for (const auto& [k, v] : resolved) cfg[k] = v;
    j["config"] = cfg;
    return j.dump(2) + "\n";
}

}  // namespace stablab::report
