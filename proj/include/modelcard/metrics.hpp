#pragma once

#include "modelcard/ingest.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace modelcard {

/// K x K counts; rows are true labels, columns predicted labels.
class ConfusionMatrix {
public:
    ConfusionMatrix() = default;
    ConfusionMatrix(std::shared_ptr<const ClassLabelMap> labels, std::vector<std::uint64_t> counts);

    std::size_t size() const noexcept { return k_; }
    std::uint64_t total() const noexcept { return n_; }
    std::uint64_t at(std::size_t truth, std::size_t predicted) const { return counts_[truth * k_ + predicted]; }
    std::uint64_t row_sum(std::size_t truth) const;
    std::uint64_t column_sum(std::size_t predicted) const;
    std::uint64_t trace() const;
    std::uint64_t max_count() const;

    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
    const ClassLabelMap& labels() const { return *labels_; }
    const std::shared_ptr<const ClassLabelMap>& label_map() const noexcept { return labels_; }

    ConfusionMatrix operator+(const ConfusionMatrix& other) const;
    bool operator==(const ConfusionMatrix& other) const { return k_ == other.k_ && counts_ == other.counts_; }

private:
    std::shared_ptr<const ClassLabelMap> labels_;
    std::vector<std::uint64_t> counts_;
    std::size_t k_ = 0;
    std::uint64_t n_ = 0;
};

struct PerClassStats {
    std::size_t class_index = 0;
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool degenerate_precision = false; // tp + fp == 0
    bool degenerate_recall = false;    // tp + fn == 0

    std::uint64_t support() const noexcept { return tp + fn; }
};

struct MetricSet {
    double accuracy = 0.0;
    std::vector<PerClassStats> per_class;
    double macro_precision = 0.0, macro_recall = 0.0, macro_f1 = 0.0;
    double micro_precision = 0.0, micro_recall = 0.0, micro_f1 = 0.0;
};

ConfusionMatrix build_confusion_matrix(const PredictionLog& log);

/// Counts over an arbitrary record sequence; used by resampling.
ConfusionMatrix build_confusion_matrix(std::span<const PredictionRecord> records,
                                       std::shared_ptr<const ClassLabelMap> labels);

/// Throws EmptyMatrix when the matrix holds no records.
MetricSet derive_metrics(const ConfusionMatrix& cm);

/// F1 from precision and recall; 0 when both are 0.
double f1_score(double precision, double recall) noexcept;

/// Human-readable notes for the Limitations section: zero-denominator
/// metrics, classes absent from the evaluation set, and class imbalance.
std::vector<std::string> metric_warnings(const ClassLabelMap& labels, const MetricSet& metrics);

/// Support ratio (largest/smallest non-empty class) at which imbalance is flagged.
inline constexpr double kImbalanceRatio = 3.0;

enum class MetricKind { Accuracy, MacroPrecision, MacroRecall, MacroF1, Precision, Recall, F1 };

/// Names one reported scalar metric. Per-class kinds carry a class index.
struct MetricSelector {
    MetricKind kind = MetricKind::Accuracy;
    std::size_t class_index = 0;

    /// Stable machine key: "accuracy", "macro_f1", "precision_2", ...
    std::string id() const;
    std::string display_name(const ClassLabelMap& labels) const;
    double value(const MetricSet& metrics) const;
    /// True when the underlying per-class denominator was zero.
    bool degenerate(const MetricSet& metrics) const;

    bool operator==(const MetricSelector&) const = default;
};

/// Reporting order: accuracy, macro P/R/F1, then P/R/F1 per class in label order.
std::vector<MetricSelector> reported_metrics(std::size_t num_classes);

} // namespace modelcard
