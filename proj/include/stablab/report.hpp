#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stablab/estimators.hpp"

namespace stablab::report {

// Line-oriented `key = value` configuration with [section] headers; keys are
// flattened to "section.key".  '#' starts a comment.
using Config = std::map<std::string, std::string>;

Config parse_config_text(const std::string& text);
Config parse_config_file(const std::string& path);

// Lookups with defaults; throw ParamError on malformed numbers.
std::string get_str(const Config& c, const std::string& key, const std::string& dflt);
double get_num(const Config& c, const std::string& key, double dflt);
long get_int(const Config& c, const std::string& key, long dflt);

// FNV-1a over the sorted resolved key=value lines; stable across runs, so
// result rows from different runs are joinable.
std::uint64_t param_hash(const Config& c);
std::string hash_hex(std::uint64_t h);

// Fixed schema:
// experiment,param_hash,seed,point_index,x_coords,estimate,stderr,n,statistic,statistic_err,pass
// x_coords is ';'-joined, numbers use 15 significant digits.
std::string to_csv(const est::ExperimentReport& rep, std::uint64_t hash);

// JSON document matching docs/report.schema.json.
std::string to_json(const est::ExperimentReport& rep, std::uint64_t hash);

// Reproducibility manifest: version, resolved config, seed, wall clock,
// pass/fail summary.
std::string manifest_json(const est::ExperimentReport& rep, const Config& resolved,
                          std::uint64_t hash);

std::string format_sig(double v);  // 15 significant digits

}  // namespace stablab::report
