#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mfs/config.hpp"

namespace mfs {

struct RunSummary {
    // Ordered "key: value" lines; values carry their validity source in brackets.
    std::vector<std::pair<std::string, std::string>> entries;
    std::vector<std::string> files;
    std::vector<std::string> warnings;
    bool partial = false;
    std::string partial_reason;

    void add(const std::string& key, const std::string& value) { entries.emplace_back(key, value); }
    std::string text() const;
};

// Runs the configured task and writes its artifacts into cfg.out_dir.
// Throws ParseError, CorrectnessAlarm or BudgetError (after writing whatever
// was computed) for the CLI to map to exit codes.
RunSummary run(const RunConfig& cfg);

}  // namespace mfs
