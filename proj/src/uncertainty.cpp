#include "modelcard/uncertainty.hpp"

#include "modelcard/error.hpp"
#include "modelcard/text.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace modelcard {

std::string_view to_string(CiMethod method) noexcept
{
    return method == CiMethod::Wilson ? "wilson" : "bootstrap_percentile";
}

const MetricInterval& CIReport::find(const MetricSelector& metric) const
{
    for (const auto& mi : intervals)
        if (mi.metric == metric) return mi;
    throw Error(ErrorCode::Internal, "no interval for metric " + metric.id());
}

namespace {

void check_level(double level)
{
    if (!(level > 0.0 && level < 1.0))
        throw Error(ErrorCode::InvalidLevel, "confidence level must lie in (0,1), got " + text::shortest(level));
}

// SplitMix64 output function.
std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Unbiased draw in [0, bound) by rejection; std::uniform_int_distribution is
// implementation-defined and would make intervals platform dependent.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound)
{
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

void check_bootstrap_inputs(const PredictionLog& log, const BootstrapOptions& options)
{
    if (log.records.empty()) throw Error(ErrorCode::EmptyLog, "cannot bootstrap an empty prediction log");
    if (options.replicates < kMinReplicates)
        throw Error(ErrorCode::TooFewReplicates, "bootstrap needs at least " + std::to_string(kMinReplicates) +
                                                     " replicates, got " + std::to_string(options.replicates));
    check_level(options.level);
}

// samples[s][r] = value of statistic s on replicate r.
std::vector<std::vector<double>> bootstrap_samples(const PredictionLog& log,
                                                   const std::vector<MetricSelector>& statistics,
                                                   const BootstrapOptions& options)
{
    const std::size_t reps = options.replicates;
    const std::size_t n = log.records.size();
    const std::size_t k = log.num_classes();
    std::vector<std::vector<double>> samples(statistics.size(), std::vector<double>(reps));

    // Flattened (true, predicted) cell per record so a replicate is a tally.
    std::vector<std::size_t> cell(n);
    for (std::size_t i = 0; i < n; ++i)
        cell[i] = log.records[i].true_label * k + log.records[i].predicted_label;

    auto run = [&](std::size_t begin, std::size_t end) {
        std::vector<std::uint64_t> counts(k * k);
        for (std::size_t r = begin; r < end; ++r) {
            std::mt19937_64 rng(replicate_seed(options.seed, r));
            std::fill(counts.begin(), counts.end(), 0);
            for (std::size_t i = 0; i < n; ++i) ++counts[cell[bounded(rng, n)]];
            const MetricSet m = derive_metrics(ConfusionMatrix(log.label_map, counts));
            for (std::size_t s = 0; s < statistics.size(); ++s) samples[s][r] = statistics[s].value(m);
        }
    };

    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, reps));
    if (threads <= 1) {
        run(0, reps);
        return samples;
    }
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (reps + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(reps, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(run, begin, end);
    }
    pool.clear(); // joins
    return samples;
}

ConfidenceInterval percentile_interval(std::vector<double> values, double level)
{
    std::sort(values.begin(), values.end());
    const double alpha = 1.0 - level;
    ConfidenceInterval ci;
    ci.lower = std::clamp(quantile_sorted(values, alpha / 2.0), 0.0, 1.0);
    ci.upper = std::clamp(quantile_sorted(values, 1.0 - alpha / 2.0), 0.0, 1.0);
    ci.level = level;
    ci.method = CiMethod::BootstrapPercentile;
    return ci;
}

} // namespace

std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t replicate) noexcept
{
    return mix64(mix64(seed) ^ replicate);
}

double quantile_sorted(const std::vector<double>& sorted, double p)
{
    if (sorted.empty()) throw Error(ErrorCode::Internal, "quantile of empty sample");
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double critical_value(double level)
{
    check_level(level);
    if (level == 0.95) return 1.959964;
    // Solve erfc(z / sqrt 2) = 1 - level by Newton's method on the upper tail.
    const double tail = 1.0 - level;
    double z = 1.0;
    for (int i = 0; i < 100; ++i) {
        const double f = std::erfc(z / std::sqrt(2.0)) - tail;
        const double df = -std::sqrt(2.0 / std::acos(-1.0)) * std::exp(-z * z / 2.0);
        const double step = f / df;
        z -= step;
        if (z < 0.0) z = 1e-8;
        if (std::abs(step) < 1e-15) break;
    }
    return z;
}

ConfidenceInterval wilson_interval(std::uint64_t successes, std::uint64_t n, double level)
{
    check_level(level);
    if (n == 0) throw Error(ErrorCode::CountExceedsN, "Wilson interval needs n >= 1");
    if (successes > n)
        throw Error(ErrorCode::CountExceedsN,
                    "successes " + std::to_string(successes) + " exceed n " + std::to_string(n));
    const double z = critical_value(level);
    const double nd = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nd;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nd;
    const double center = (p + z2 / (2.0 * nd)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / nd + z2 / (4.0 * nd * nd));

    ConfidenceInterval ci;
    ci.lower = successes == 0 ? 0.0 : std::clamp(center - half, 0.0, p);
    ci.upper = successes == n ? 1.0 : std::clamp(center + half, p, 1.0);
    ci.level = level;
    ci.method = CiMethod::Wilson;
    return ci;
}

ConfidenceInterval bootstrap_ci(const PredictionLog& log, const MetricSelector& statistic,
                                const BootstrapOptions& options)
{
    check_bootstrap_inputs(log, options);
    auto samples = bootstrap_samples(log, {statistic}, options);
    return percentile_interval(std::move(samples.front()), options.level);
}

CIReport build_ci_report(const PredictionLog& log, const MetricSet& metrics, const BootstrapOptions& options)
{
    check_bootstrap_inputs(log, options);
    const std::size_t k = log.num_classes();
    if (metrics.per_class.size() != k ||
        metrics.per_class.front().tp + metrics.per_class.front().fp + metrics.per_class.front().fn +
                metrics.per_class.front().tn != log.records.size())
        throw Error(ErrorCode::Internal, "metric set was not derived from this prediction log");

    const auto selectors = reported_metrics(k);
    auto samples = bootstrap_samples(log, selectors, options);

    CIReport report;
    report.replicates = options.replicates;
    report.seed = options.seed;
    report.level = options.level;
    report.intervals.reserve(selectors.size());
    for (std::size_t s = 0; s < selectors.size(); ++s) {
        MetricInterval mi;
        mi.metric = selectors[s];
        mi.estimate = selectors[s].value(metrics);
        mi.ci = percentile_interval(std::move(samples[s]), options.level);
        report.intervals.push_back(mi);
    }
    report.accuracy_ci = report.intervals.front().ci;

    std::uint64_t correct = 0;
    for (const auto& r : log.records) correct += r.true_label == r.predicted_label;
    report.accuracy_wilson = wilson_interval(correct, log.records.size(), options.level);
    return report;
}

} // namespace modelcard
