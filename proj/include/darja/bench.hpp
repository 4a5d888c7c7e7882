#pragma once

#include <string>
#include <vector>

#include "darja/engine.hpp"

namespace darja {

struct StageSummary {
    std::string stage;
    double p50 = 0.0;
    double p95 = 0.0;
    double mean = 0.0;
    double share = 0.0;  // mean / sum of stage means on this path
};

struct PathReport {
    std::string route;  // "nlu" or "rag"
    std::size_t turns = 0;
    std::size_t misrouted = 0;  // turns that took the other path; left out of the stats
    std::vector<StageSummary> stages;  // pipeline order
    StageSummary total;

    const StageSummary* find(const std::string& stage) const;
    const StageSummary* dominant() const;
};

struct BenchReport {
    std::vector<PathReport> paths;

    bool empty() const { return paths.empty(); }
    const PathReport* find(const std::string& route) const;
    std::string render() const;
};

// Runs `n` turns per path, cycling through the query lists; a path whose
// count is zero is left out of the report.
BenchReport run_bench(Engine& engine, const std::vector<std::string>& nlu_queries, std::size_t nlu_turns,
                      const std::vector<std::string>& rag_queries, std::size_t rag_turns);

}  // namespace darja
