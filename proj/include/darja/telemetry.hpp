#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "darja/rag.hpp"

namespace darja {

// Nearest-rank percentile, p in [0, 100]. Empty input gives 0.
double percentile(std::vector<double> samples, double p);

// Cumulative millisecond histogram.
class LatencyHistogram {
public:
    static constexpr std::array<double, 11> kBounds = {1, 2.5, 5, 10, 25, 50, 100, 250, 500, 1000, 5000};

    void observe(double ms);
    std::uint64_t count() const { return count_; }
    double sum() const { return sum_; }
    // counts()[i] = observations <= kBounds[i]; the +Inf bucket is count().
    std::array<std::uint64_t, kBounds.size()> cumulative() const;

private:
    std::array<std::uint64_t, kBounds.size()> buckets_{};
    std::uint64_t count_ = 0;
    double sum_ = 0.0;
};

// Request counters and per-stage latency histograms for /v1/metrics.
class ServiceMetrics {
public:
    void count_request(const std::string& endpoint, int status);
    void observe_turn(const std::string& route, const StageLatencies& stages);

    // Prometheus-style plain text.
    std::string render() const;

private:
    mutable std::mutex mu_;
    std::map<std::pair<std::string, int>, std::uint64_t> requests_;
    std::map<std::pair<std::string, std::string>, LatencyHistogram> stages_;
};

}  // namespace darja
