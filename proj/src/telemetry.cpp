#include "darja/telemetry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace darja {

double percentile(std::vector<double> samples, double p) {
    if (samples.empty()) return 0.0;
    std::sort(samples.begin(), samples.end());
    const auto n = samples.size();
    auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return samples[rank - 1];
}

void LatencyHistogram::observe(double ms) {
    const auto it = std::lower_bound(kBounds.begin(), kBounds.end(), ms);
    if (it != kBounds.end()) ++buckets_[static_cast<std::size_t>(it - kBounds.begin())];
    ++count_;
    sum_ += ms;
}

std::array<std::uint64_t, LatencyHistogram::kBounds.size()> LatencyHistogram::cumulative() const {
    auto out = buckets_;
    for (std::size_t i = 1; i < out.size(); ++i) out[i] += out[i - 1];
    return out;
}

void ServiceMetrics::count_request(const std::string& endpoint, int status) {
    std::lock_guard lock(mu_);
    ++requests_[{endpoint, status}];
}

void ServiceMetrics::observe_turn(const std::string& route, const StageLatencies& stages) {
    std::lock_guard lock(mu_);
    for (const auto& [stage, ms] : stages) stages_[{route, stage}].observe(ms);
}

std::string ServiceMetrics::render() const {
    std::lock_guard lock(mu_);
    std::ostringstream out;
    out << "# TYPE darja_requests_total counter\n";
    for (const auto& [key, n] : requests_)
        out << "darja_requests_total{endpoint=\"" << key.first << "\",status=\"" << key.second << "\"} " << n << "\n";
    out << "# TYPE darja_stage_latency_ms histogram\n";
    for (const auto& [key, h] : stages_) {
        const auto labels = "route=\"" + key.first + "\",stage=\"" + key.second + "\"";
        const auto cum = h.cumulative();
        for (std::size_t i = 0; i < cum.size(); ++i)
            out << "darja_stage_latency_ms_bucket{" << labels << ",le=\"" << LatencyHistogram::kBounds[i] << "\"} "
                << cum[i] << "\n";
        out << "darja_stage_latency_ms_bucket{" << labels << ",le=\"+Inf\"} " << h.count() << "\n";
        out << "darja_stage_latency_ms_sum{" << labels << "} " << h.sum() << "\n";
        out << "darja_stage_latency_ms_count{" << labels << "} " << h.count() << "\n";
    }
    return out.str();
}

}  // namespace darja
