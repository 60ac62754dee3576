#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfs/ifs.hpp"

namespace mfs {

enum class Task { Spectrum, Census, Dual, Empirical, Report };

std::string to_string(Task t);
Task parse_task(const std::string& name);

struct EmpiricalConfig {
    int n1 = 14, n2 = 16;
    int guard_bits = -1;
    std::vector<double> q;
};

struct DualConfig {
    int property_p_depth = 8;
    std::size_t integrality_pairs = 1000;
    int integrality_depth = 8;
    std::size_t exhaustive_limit = 10000;
};

struct CensusConfig {
    int tn_cover_refinement = 0;
    std::string snapshot_in, snapshot_out;
};

struct RunConfig {
    WeightedIFS ifs;
    nlohmann::json ifs_json;  // the ifs block as given
    Task task = Task::Report;
    int n_max = 10;
    std::vector<double> q_grid;  // empty means the default grid
    std::string out_dir = "out";
    bool svg = true;
    std::size_t word_budget = 100'000'000;
    std::size_t class_budget = 50'000'000;
    std::uint64_t seed = 1;
    int threads = 0;  // 0 keeps the OpenMP default
    EmpiricalConfig empirical;
    DualConfig dual;
    CensusConfig census;
};

// Strict schema: unknown keys and wrong types raise ParseError naming the
// JSON path (and line/column for syntax errors).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Every field with its resolved value, for writing next to the results.
nlohmann::json resolved_json(const RunConfig& c);

// Overrides from MFS_TASK, MFS_NMAX, MFS_OUT, MFS_THREADS, MFS_BUDGET, MFS_SEED.
void apply_env_overrides(RunConfig& c);

}  // namespace mfs
