#include "darja/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>

#include "darja/error.hpp"
#include "darja/telemetry.hpp"

namespace darja {

namespace {

const std::vector<std::string> kStageOrder = {"normalize", "featurize", "classify", "route", "template",
                                              "retrieve",  "rerank",    "prompt",   "generate"};

StageSummary summarize(const std::string& name, const std::vector<double>& samples) {
    StageSummary s;
    s.stage = name;
    s.p50 = percentile(samples, 50);
    s.p95 = percentile(samples, 95);
    s.mean = samples.empty() ? 0.0 : std::accumulate(samples.begin(), samples.end(), 0.0) / samples.size();
    return s;
}

PathReport run_path(Engine& engine, const std::string& route, const std::vector<std::string>& queries,
                    std::size_t turns) {
    if (queries.empty()) throw DataError("bench: no queries for the " + route + " path");
    PathReport report;
    report.route = route;
    std::map<std::string, std::vector<double>> samples;
    for (std::size_t i = 0; i < turns; ++i) {
        const auto reply = engine.handle_turn("bench-" + route + "-" + std::to_string(i % 8), queries[i % queries.size()]);
        ++report.turns;
        // a turn that took the other path says nothing about this one
        if (to_string(reply.route.path) != route) {
            ++report.misrouted;
            continue;
        }
        for (const auto& [stage, ms] : reply.latency) samples[stage].push_back(ms);
    }
    double sum = 0.0;
    for (const auto& name : kStageOrder) {
        const auto it = samples.find(name);
        if (it == samples.end()) continue;
        report.stages.push_back(summarize(name, it->second));
        sum += report.stages.back().mean;
    }
    for (auto& s : report.stages) s.share = sum > 0.0 ? s.mean / sum : 0.0;
    report.total = summarize("total", samples["total"]);
    report.total.share = 1.0;
    return report;
}

}  // namespace

const StageSummary* PathReport::find(const std::string& stage) const {
    for (const auto& s : stages)
        if (s.stage == stage) return &s;
    return nullptr;
}

const StageSummary* PathReport::dominant() const {
    const auto it = std::max_element(stages.begin(), stages.end(),
                                     [](const StageSummary& a, const StageSummary& b) { return a.share < b.share; });
    return it == stages.end() ? nullptr : &*it;
}

const PathReport* BenchReport::find(const std::string& route) const {
    for (const auto& p : paths)
        if (p.route == route) return &p;
    return nullptr;
}

std::string BenchReport::render() const {
    if (paths.empty()) return "no turns measured\n";
    std::string out;
    char line[160];
    for (const auto& p : paths) {
        std::snprintf(line, sizeof line, "path %s: %zu turns (%zu misrouted)\n", p.route.c_str(), p.turns, p.misrouted);
        out += line;
        std::snprintf(line, sizeof line, "  %-10s %10s %10s %10s %8s\n", "stage", "p50 ms", "p95 ms", "mean ms", "share");
        out += line;
        for (const auto& s : p.stages) {
            std::snprintf(line, sizeof line, "  %-10s %10.3f %10.3f %10.3f %7.2f%%\n", s.stage.c_str(), s.p50, s.p95,
                          s.mean, 100.0 * s.share);
            out += line;
        }
        std::snprintf(line, sizeof line, "  %-10s %10.3f %10.3f %10.3f\n", "total", p.total.p50, p.total.p95,
                      p.total.mean);
        out += line;
    }
    return out;
}

BenchReport run_bench(Engine& engine, const std::vector<std::string>& nlu_queries, std::size_t nlu_turns,
                      const std::vector<std::string>& rag_queries, std::size_t rag_turns) {
    BenchReport report;
    if (nlu_turns > 0) report.paths.push_back(run_path(engine, "nlu", nlu_queries, nlu_turns));
    if (rag_turns > 0) report.paths.push_back(run_path(engine, "rag", rag_queries, rag_turns));
    return report;
}

}  // namespace darja
