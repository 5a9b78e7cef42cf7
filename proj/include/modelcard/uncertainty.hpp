#pragma once

#include "modelcard/ingest.hpp"
#include "modelcard/metrics.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace modelcard {

enum class CiMethod { BootstrapPercentile, Wilson };

std::string_view to_string(CiMethod method) noexcept;

struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.95;
    CiMethod method = CiMethod::BootstrapPercentile;

    bool contains(double x) const noexcept { return lower <= x && x <= upper; }
    double width() const noexcept { return upper - lower; }
    bool operator==(const ConfidenceInterval&) const = default;
};

struct MetricInterval {
    MetricSelector metric;
    double estimate = 0.0;
    ConfidenceInterval ci;
};

struct CIReport {
    ConfidenceInterval accuracy_ci;     // bootstrap
    ConfidenceInterval accuracy_wilson; // analytic cross-check
    std::vector<MetricInterval> intervals; // every reported metric, reporting order
    std::size_t replicates = 0;
    std::uint64_t seed = 0;
    double level = 0.95;

    /// Throws Internal when the metric was not part of the report.
    const MetricInterval& find(const MetricSelector& metric) const;
};

struct BootstrapOptions {
    std::size_t replicates = 2000;
    std::uint64_t seed = 42;
    double level = 0.95;
    unsigned threads = 0; // 0 = hardware concurrency; never changes results
};

inline constexpr std::size_t kMinReplicates = 100;

/// Two-sided standard-normal critical value. 0.95 maps to exactly 1.959964.
double critical_value(double level);

/// Wilson score interval for a binomial proportion, clamped to [0, 1].
/// Throws InvalidLevel, CountExceedsN.
ConfidenceInterval wilson_interval(std::uint64_t successes, std::uint64_t n, double level);

/// Percentile bootstrap over record resamples (with replacement, size n).
/// Replicate r draws from its own stream seeded by (seed, r), so results do
/// not depend on thread count. Throws EmptyLog, TooFewReplicates, InvalidLevel.
ConfidenceInterval bootstrap_ci(const PredictionLog& log, const MetricSelector& statistic,
                                const BootstrapOptions& options);

/// Bootstrap intervals for every reported metric (one shared resampling pass)
/// plus the Wilson interval for accuracy.
CIReport build_ci_report(const PredictionLog& log, const MetricSet& metrics, const BootstrapOptions& options);

/// Linear-interpolation quantile of sorted data (Hyndman-Fan type 7).
double quantile_sorted(const std::vector<double>& sorted, double p);

/// Seed of replicate r's substream.
std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t replicate) noexcept;

} // namespace modelcard
