#include "modelcard/metrics.hpp"

#include "modelcard/error.hpp"
#include "modelcard/text.hpp"

#include <algorithm>
#include <numeric>

namespace modelcard {

ConfusionMatrix::ConfusionMatrix(std::shared_ptr<const ClassLabelMap> labels, std::vector<std::uint64_t> counts)
    : labels_(std::move(labels)), counts_(std::move(counts))
{
    k_ = labels_ ? labels_->size() : 0;
    if (counts_.size() != k_ * k_)
        throw Error(ErrorCode::Internal, "confusion matrix size does not match label map");
    n_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t truth) const
{
    std::uint64_t s = 0;
    for (std::size_t j = 0; j < k_; ++j) s += at(truth, j);
    return s;
}

std::uint64_t ConfusionMatrix::column_sum(std::size_t predicted) const
{
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < k_; ++i) s += at(i, predicted);
    return s;
}

std::uint64_t ConfusionMatrix::trace() const
{
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < k_; ++i) s += at(i, i);
    return s;
}

std::uint64_t ConfusionMatrix::max_count() const
{
    return counts_.empty() ? 0 : *std::max_element(counts_.begin(), counts_.end());
}

ConfusionMatrix ConfusionMatrix::operator+(const ConfusionMatrix& other) const
{
    if (k_ != other.k_) throw Error(ErrorCode::Internal, "cannot add confusion matrices of different size");
    std::vector<std::uint64_t> sum(counts_);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += other.counts_[i];
    return ConfusionMatrix(labels_, std::move(sum));
}

ConfusionMatrix build_confusion_matrix(std::span<const PredictionRecord> records,
                                       std::shared_ptr<const ClassLabelMap> labels)
{
    const std::size_t k = labels ? labels->size() : 0;
    std::vector<std::uint64_t> counts(k * k, 0);
    for (const auto& r : records) {
        if (r.true_label >= k || r.predicted_label >= k)
            throw Error(ErrorCode::UnknownLabel, "record label outside the label map");
        ++counts[r.true_label * k + r.predicted_label];
    }
    return ConfusionMatrix(std::move(labels), std::move(counts));
}

ConfusionMatrix build_confusion_matrix(const PredictionLog& log)
{
    return build_confusion_matrix(log.records, log.label_map);
}

double f1_score(double precision, double recall) noexcept
{
    const double denom = precision + recall;
    return denom == 0.0 ? 0.0 : 2.0 * precision * recall / denom;
}

MetricSet derive_metrics(const ConfusionMatrix& cm)
{
    const std::uint64_t n = cm.total();
    if (n == 0) throw Error(ErrorCode::EmptyMatrix, "confusion matrix is empty");
    const std::size_t k = cm.size();
    const double nd = static_cast<double>(n);

    MetricSet m;
    m.accuracy = static_cast<double>(cm.trace()) / nd;
    m.per_class.reserve(k);
    double sum_p = 0.0, sum_r = 0.0, sum_f = 0.0;
    std::uint64_t pooled_tp = 0, pooled_fp = 0, pooled_fn = 0;
    for (std::size_t c = 0; c < k; ++c) {
        PerClassStats s;
        s.class_index = c;
        s.tp = cm.at(c, c);
        s.fp = cm.column_sum(c) - s.tp;
        s.fn = cm.row_sum(c) - s.tp;
        s.tn = n - s.tp - s.fp - s.fn;
        s.degenerate_precision = s.tp + s.fp == 0;
        s.degenerate_recall = s.tp + s.fn == 0;
        s.precision = s.degenerate_precision ? 0.0 : static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp);
        s.recall = s.degenerate_recall ? 0.0 : static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fn);
        s.f1 = f1_score(s.precision, s.recall);
        sum_p += s.precision;
        sum_r += s.recall;
        sum_f += s.f1;
        pooled_tp += s.tp;
        pooled_fp += s.fp;
        pooled_fn += s.fn;
        m.per_class.push_back(s);
    }
    const double kd = static_cast<double>(k);
    m.macro_precision = sum_p / kd;
    m.macro_recall = sum_r / kd;
    m.macro_f1 = sum_f / kd;

    // Single-label input: pooled fp == pooled fn == n - trace, so all three
    // micro averages reduce to trace / n and are bit-identical to accuracy.
    m.micro_precision = static_cast<double>(pooled_tp) / static_cast<double>(pooled_tp + pooled_fp);
    m.micro_recall = static_cast<double>(pooled_tp) / static_cast<double>(pooled_tp + pooled_fn);
    m.micro_f1 = pooled_fp == pooled_fn ? m.micro_precision : f1_score(m.micro_precision, m.micro_recall);
    return m;
}

std::vector<std::string> metric_warnings(const ClassLabelMap& labels, const MetricSet& metrics)
{
    std::vector<std::string> notes;
    for (const auto& s : metrics.per_class) {
        const std::string& name = labels.name(s.class_index);
        if (s.degenerate_recall)
            notes.push_back("Class '" + name + "' has no examples in the evaluation set; its recall is reported as 0.");
        if (s.degenerate_precision)
            notes.push_back("Class '" + name + "' is never predicted; its precision is reported as 0.");
    }
    std::uint64_t lo = 0, hi = 0;
    std::size_t lo_c = 0, hi_c = 0;
    for (const auto& s : metrics.per_class) {
        const auto sup = s.support();
        if (sup == 0) continue;
        if (lo == 0 || sup < lo) { lo = sup; lo_c = s.class_index; }
        if (sup > hi) { hi = sup; hi_c = s.class_index; }
    }
    if (lo > 0 && static_cast<double>(hi) >= kImbalanceRatio * static_cast<double>(lo))
        notes.push_back("Evaluation set is imbalanced: '" + labels.name(hi_c) + "' has " + std::to_string(hi) +
                        " examples versus " + std::to_string(lo) + " for '" + labels.name(lo_c) +
                        "' (ratio " + text::fixed(static_cast<double>(hi) / static_cast<double>(lo), 2) +
                        "); metrics may be biased toward the majority class.");
    return notes;
}

std::string MetricSelector::id() const
{
    const std::string idx = std::to_string(class_index);
    switch (kind) {
    case MetricKind::Accuracy: return "accuracy";
    case MetricKind::MacroPrecision: return "macro_precision";
    case MetricKind::MacroRecall: return "macro_recall";
    case MetricKind::MacroF1: return "macro_f1";
    case MetricKind::Precision: return "precision_" + idx;
    case MetricKind::Recall: return "recall_" + idx;
    case MetricKind::F1: return "f1_" + idx;
    }
    return "unknown";
}

std::string MetricSelector::display_name(const ClassLabelMap& labels) const
{
    switch (kind) {
    case MetricKind::Accuracy: return "Accuracy";
    case MetricKind::MacroPrecision: return "Macro precision";
    case MetricKind::MacroRecall: return "Macro recall";
    case MetricKind::MacroF1: return "Macro F1";
    case MetricKind::Precision: return "Precision (" + labels.name(class_index) + ")";
    case MetricKind::Recall: return "Recall (" + labels.name(class_index) + ")";
    case MetricKind::F1: return "F1 (" + labels.name(class_index) + ")";
    }
    return "Unknown";
}

double MetricSelector::value(const MetricSet& m) const
{
    switch (kind) {
    case MetricKind::Accuracy: return m.accuracy;
    case MetricKind::MacroPrecision: return m.macro_precision;
    case MetricKind::MacroRecall: return m.macro_recall;
    case MetricKind::MacroF1: return m.macro_f1;
    case MetricKind::Precision: return m.per_class.at(class_index).precision;
    case MetricKind::Recall: return m.per_class.at(class_index).recall;
    case MetricKind::F1: return m.per_class.at(class_index).f1;
    }
    return 0.0;
}

bool MetricSelector::degenerate(const MetricSet& m) const
{
    switch (kind) {
    case MetricKind::Precision: return m.per_class.at(class_index).degenerate_precision;
    case MetricKind::Recall: return m.per_class.at(class_index).degenerate_recall;
    case MetricKind::F1: {
        const auto& s = m.per_class.at(class_index);
        return s.degenerate_precision || s.degenerate_recall;
    }
    default: return false;
    }
}

std::vector<MetricSelector> reported_metrics(std::size_t num_classes)
{
    std::vector<MetricSelector> out = {
        {MetricKind::Accuracy, 0},
        {MetricKind::MacroPrecision, 0},
        {MetricKind::MacroRecall, 0},
        {MetricKind::MacroF1, 0},
    };
    for (std::size_t c = 0; c < num_classes; ++c) {
        out.push_back({MetricKind::Precision, c});
        out.push_back({MetricKind::Recall, c});
        out.push_back({MetricKind::F1, c});
    }
    return out;
}

} // namespace modelcard
