#include "modelcard/chartgen.hpp"

#include "modelcard/error.hpp"
#include "modelcard/text.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace modelcard {

std::string_view to_string(ChartKind kind) noexcept
{
    switch (kind) {
    case ChartKind::ConfusionHeatmap: return "confusion_heatmap";
    case ChartKind::TrainingCurves: return "training_curves";
    case ChartKind::CiErrorBars: return "ci_errorbars";
    case ChartKind::MetricsTable: return "metrics_table";
    }
    return "unknown";
}

std::string_view chart_file_name(ChartKind kind) noexcept
{
    switch (kind) {
    case ChartKind::ConfusionHeatmap: return "cm.svg";
    case ChartKind::TrainingCurves: return "curves.svg";
    case ChartKind::CiErrorBars: return "ci.svg";
    case ChartKind::MetricsTable: return "table.svg";
    }
    return "chart.svg";
}

std::string percent_label(double level)
{
    std::string s = text::fixed(level * 100.0, 2);
    while (s.ends_with('0')) s.pop_back();
    if (s.ends_with('.')) s.pop_back();
    return s;
}

namespace {

constexpr std::string_view kInk = "#222222";
constexpr std::string_view kGrid = "#dddddd";
constexpr std::string_view kTrainColor = "#1f77b4";
constexpr std::string_view kValColor = "#ff7f0e";

std::string num(double v) { return text::fixed(v, 2); }

// Minimal append-only SVG builder. Attribute values are escaped; coordinates
// are written with two decimals so output is byte-stable.
class SvgWriter {
public:
    SvgWriter(int width, int height, std::string_view title, std::string_view kind)
    {
        out_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(width) +
                "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) + " " +
                std::to_string(height) + "\" font-family=\"Helvetica, Arial, sans-serif\" font-size=\"12\" "
                "data-chart=\"" + std::string(kind) + "\">\n";
        out_ += "<title>" + text::escape_xml(title) + "</title>\n";
        rect(0, 0, width, height, "#ffffff", "background");
    }

    void rect(double x, double y, double w, double h, std::string_view fill, std::string_view cls,
              std::string_view extra = {})
    {
        out_ += "<rect class=\"" + std::string(cls) + "\" x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" +
                num(w) + "\" height=\"" + num(h) + "\" fill=\"" + std::string(fill) + "\"";
        if (!extra.empty()) out_ += " " + std::string(extra);
        out_ += "/>\n";
    }

    void line(double x1, double y1, double x2, double y2, std::string_view stroke, double width = 1.0,
              std::string_view cls = {}, std::string_view extra = {})
    {
        out_ += "<line";
        if (!cls.empty()) out_ += " class=\"" + std::string(cls) + "\"";
        out_ += " x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
                "\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"" + num(width) + "\"";
        if (!extra.empty()) out_ += " " + std::string(extra);
        out_ += "/>\n";
    }

    void circle(double cx, double cy, double r, std::string_view fill, std::string_view cls,
                std::string_view extra = {})
    {
        out_ += "<circle class=\"" + std::string(cls) + "\" cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" +
                num(r) + "\" fill=\"" + std::string(fill) + "\"";
        if (!extra.empty()) out_ += " " + std::string(extra);
        out_ += "/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, std::string_view stroke,
                  std::string_view cls, std::string_view dash = {})
    {
        out_ += "<polyline class=\"" + std::string(cls) + "\" fill=\"none\" stroke=\"" + std::string(stroke) +
                "\" stroke-width=\"1.50\"";
        if (!dash.empty()) out_ += " stroke-dasharray=\"" + std::string(dash) + "\"";
        out_ += " points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i) out_ += ' ';
            out_ += num(pts[i].first) + "," + num(pts[i].second);
        }
        out_ += "\"/>\n";
    }

    void label(double x, double y, std::string_view content, std::string_view anchor = "start",
              std::string_view extra = {})
    {
        out_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + std::string(anchor) + "\"";
        if (!extra.empty()) out_ += " " + std::string(extra);
        out_ += ">" + text::escape_xml(content) + "</text>\n";
    }

    std::string finish() &&
    {
        out_ += "</svg>\n";
        return std::move(out_);
    }

private:
    std::string out_;
};

std::string hex_color(int r, int g, int b)
{
    constexpr char digits[] = "0123456789abcdef";
    std::string s = "#";
    for (int c : {r, g, b}) {
        s += digits[(c >> 4) & 0xF];
        s += digits[c & 0xF];
    }
    return s;
}

} // namespace

std::string heatmap_fill(std::uint64_t count, std::uint64_t max_count)
{
    constexpr std::array<int, 3> light{247, 251, 255};
    constexpr std::array<int, 3> dark{8, 48, 107};
    const double t = max_count == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(max_count);
    std::array<int, 3> c{};
    for (int i = 0; i < 3; ++i)
        c[i] = static_cast<int>(std::lround(light[i] + t * (dark[i] - light[i])));
    return hex_color(c[0], c[1], c[2]);
}

Chart render_confusion_heatmap(const ConfusionMatrix& cm, std::string_view title)
{
    if (cm.total() == 0) throw Error(ErrorCode::EmptyMatrix, "cannot render an empty confusion matrix");
    const std::size_t k = cm.size();
    const auto& labels = cm.labels();
    const std::uint64_t peak = cm.max_count();

    const double left = 150.0, top = 70.0;
    const double grid = std::min(kChartWidth - left - 40.0, kChartHeight - top - 70.0);
    const double cell = grid / static_cast<double>(k);

    SvgWriter svg(kChartWidth, kChartHeight, title, to_string(ChartKind::ConfusionHeatmap));
    svg.label(kChartWidth / 2.0, 28, title, "middle", "font-size=\"16\" font-weight=\"bold\"");
    svg.label(left + grid / 2.0, top - 30, "Predicted label", "middle", "font-weight=\"bold\"");
    svg.label(24, top + grid / 2.0, "True label", "middle",
             "font-weight=\"bold\" transform=\"rotate(-90 24 " + num(top + grid / 2.0) + ")\"");

    for (std::size_t j = 0; j < k; ++j)
        svg.label(left + (static_cast<double>(j) + 0.5) * cell, top - 8, labels.name(j), "middle");
    for (std::size_t i = 0; i < k; ++i)
        svg.label(left - 8, top + (static_cast<double>(i) + 0.5) * cell + 4, labels.name(i), "end");

    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const std::uint64_t c = cm.at(i, j);
            const double x = left + static_cast<double>(j) * cell;
            const double y = top + static_cast<double>(i) * cell;
            svg.rect(x, y, cell, cell, heatmap_fill(c, peak), "cell",
                     "stroke=\"#ffffff\" data-row=\"" + std::to_string(i) + "\" data-col=\"" + std::to_string(j) +
                         "\" data-count=\"" + std::to_string(c) + "\"");
            const bool dark = 2 * c > peak;
            svg.label(x + cell / 2.0, y + cell / 2.0 + 5, std::to_string(c), "middle",
                     dark ? "fill=\"#ffffff\" font-size=\"14\"" : "fill=\"#222222\" font-size=\"14\"");
        }
    }
    svg.label(left + grid / 2.0, top + grid + 30, "n = " + std::to_string(cm.total()), "middle");
    return {ChartKind::ConfusionHeatmap, std::move(svg).finish(), kChartWidth, kChartHeight};
}

namespace {

struct Range {
    double lo;
    double hi;
};

Range padded_range(const std::vector<double>& values, bool clamp_unit)
{
    auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    double lo = *mn, hi = *mx;
    const double span = hi - lo;
    const double pad = span > 0.0 ? 0.05 * span : 0.05 * std::max(std::abs(hi), 1.0);
    lo -= pad;
    hi += pad;
    if (clamp_unit) {
        lo = std::max(lo, 0.0);
        hi = std::min(hi, 1.0);
    }
    return {lo, hi};
}

void draw_panel(SvgWriter& svg, const std::vector<EpochRecord>& history, double top, double height,
                std::string_view label, bool accuracy)
{
    const double left = 80.0, right = kChartWidth - 30.0;
    const double bottom = top + height;
    std::vector<double> train, val;
    for (const auto& e : history) {
        train.push_back(accuracy ? e.train_acc : e.train_loss);
        val.push_back(accuracy ? e.val_acc : e.val_loss);
    }
    std::vector<double> all(train);
    all.insert(all.end(), val.begin(), val.end());
    const Range yr = padded_range(all, accuracy);
    const double x0 = static_cast<double>(history.front().epoch);
    const double x1 = static_cast<double>(history.back().epoch);

    auto px = [&](double epoch) { return left + (epoch - x0) / (x1 - x0) * (right - left); };
    auto py = [&](double v) { return bottom - (v - yr.lo) / (yr.hi - yr.lo) * height; };

    for (int t = 0; t <= 4; ++t) {
        const double v = yr.lo + (yr.hi - yr.lo) * t / 4.0;
        svg.line(left, py(v), right, py(v), kGrid, 0.5);
        svg.label(left - 6, py(v) + 4, text::fixed(v, 4), "end", "font-size=\"10\"");
    }
    svg.line(left, top, left, bottom, kInk);
    svg.line(left, bottom, right, bottom, kInk);
    svg.label(left - 58, top + height / 2.0, label, "middle",
             "transform=\"rotate(-90 " + num(left - 58) + " " + num(top + height / 2.0) + ")\"");

    const std::string kind = accuracy ? "accuracy" : "loss";
    std::vector<std::pair<double, double>> train_pts, val_pts;
    for (std::size_t i = 0; i < history.size(); ++i) {
        const double x = px(static_cast<double>(history[i].epoch));
        train_pts.emplace_back(x, py(train[i]));
        val_pts.emplace_back(x, py(val[i]));
    }
    svg.polyline(train_pts, kTrainColor, "series " + kind + "-train");
    svg.polyline(val_pts, kValColor, "series " + kind + "-val", "6 3");
}

} // namespace

Chart render_training_curves(const std::vector<EpochRecord>& history, std::string_view title)
{
    if (history.size() < 2)
        throw Error(ErrorCode::TooFewEpochs, "training curves need at least 2 epochs, got " +
                                                 std::to_string(history.size()));
    SvgWriter svg(kChartWidth, kChartHeight, title, to_string(ChartKind::TrainingCurves));
    svg.label(kChartWidth / 2.0, 24, title, "middle", "font-size=\"16\" font-weight=\"bold\"");

    // legend
    svg.line(200, 42, 230, 42, kTrainColor, 2.0);
    svg.label(236, 46, "Training");
    svg.line(340, 42, 370, 42, kValColor, 2.0, {}, "stroke-dasharray=\"6 3\"");
    svg.label(376, 46, "Validation");

    draw_panel(svg, history, 62, 165, "Loss", false);
    draw_panel(svg, history, 262, 165, "Accuracy", true);

    const double left = 80.0, right = kChartWidth - 30.0;
    const long long first = history.front().epoch, last = history.back().epoch;
    for (int t = 0; t <= 4; ++t) {
        const long long e = first + (last - first) * t / 4;
        const double x = left + static_cast<double>(e - first) / static_cast<double>(last - first) * (right - left);
        svg.label(x, 442, std::to_string(e), "middle", "font-size=\"10\"");
    }
    svg.label((left + right) / 2.0, 462, "Epoch", "middle");
    return {ChartKind::TrainingCurves, std::move(svg).finish(), kChartWidth, kChartHeight};
}

Chart render_ci_errorbars(const CIReport& report, const MetricSet&, const ClassLabelMap& labels,
                          std::string_view title)
{
    const std::string heading = title.empty()
                                    ? percent_label(report.level) + "% confidence intervals"
                                    : std::string(title);
    SvgWriter svg(kChartWidth, kChartHeight, heading, to_string(ChartKind::CiErrorBars));
    svg.label(kChartWidth / 2.0, 26, heading, "middle", "font-size=\"16\" font-weight=\"bold\"");

    const double left = 190.0, right = kChartWidth - 40.0, top = 50.0, bottom = kChartHeight - 50.0;
    auto px = [&](double v) { return left + v * (right - left); };
    for (int t = 0; t <= 4; ++t) {
        const double v = t / 4.0;
        svg.line(px(v), top, px(v), bottom, kGrid, 0.5);
        svg.label(px(v), bottom + 16, text::fixed(v, 4), "middle", "font-size=\"10\"");
    }
    svg.line(left, bottom, right, bottom, kInk);

    const std::size_t rows = report.intervals.size();
    const double step = std::min(36.0, (bottom - top) / static_cast<double>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
        const auto& mi = report.intervals[r];
        const double y = top + step * (static_cast<double>(r) + 0.5);
        svg.label(left - 10, y + 4, mi.metric.display_name(labels), "end");
        const std::string data = "data-metric=\"" + mi.metric.id() + "\"";
        svg.line(px(mi.ci.lower), y, px(mi.ci.upper), y, kInk, 2.0, "ci-bar", data);
        svg.line(px(mi.ci.lower), y - 5, px(mi.ci.lower), y + 5, kInk, 1.5);
        svg.line(px(mi.ci.upper), y - 5, px(mi.ci.upper), y + 5, kInk, 1.5);
        svg.circle(px(mi.estimate), y, 4.0, kTrainColor, "ci-marker", data);
    }
    svg.label((left + right) / 2.0, kChartHeight - 12, "Metric value", "middle");
    return {ChartKind::CiErrorBars, std::move(svg).finish(), kChartWidth, kChartHeight};
}

Chart render_metrics_table(const MetricSet& metrics, const CIReport& report, const ClassLabelMap& labels,
                           std::string_view title)
{
    SvgWriter svg(kChartWidth, kChartHeight, title, to_string(ChartKind::MetricsTable));
    svg.label(kChartWidth / 2.0, 26, title, "middle", "font-size=\"16\" font-weight=\"bold\"");

    const double left = 40.0, right = kChartWidth - 40.0, top = 44.0;
    const double col_value = 330.0, col_ci = 450.0;
    const std::size_t rows = report.intervals.size();
    const double footer = 28.0;
    const double step = std::min(26.0, (kChartHeight - top - footer - 10.0) / static_cast<double>(rows + 1));

    svg.rect(left, top, right - left, step, "#e8eef5", "header-row");
    svg.label(left + 8, top + step * 0.7, "Metric", "start", "font-weight=\"bold\"");
    svg.label(col_value, top + step * 0.7, "Estimate", "middle", "font-weight=\"bold\"");
    svg.label(col_ci, top + step * 0.7, percent_label(report.level) + "% CI", "middle", "font-weight=\"bold\"");

    bool any_degenerate = false;
    for (std::size_t r = 0; r < rows; ++r) {
        const auto& mi = report.intervals[r];
        const double y = top + step * static_cast<double>(r + 1);
        if (r % 2 == 1) svg.rect(left, y, right - left, step, "#f6f6f6", "stripe");
        const bool degenerate = mi.metric.degenerate(metrics);
        any_degenerate = any_degenerate || degenerate;
        std::string name = mi.metric.display_name(labels);
        if (degenerate) name += " †";
        const double baseline = y + step * 0.7;
        svg.label(left + 8, baseline, name, "start", "class=\"metric-name\"");
        svg.label(col_value, baseline, text::fixed(mi.estimate, 4), "middle", "class=\"metric-value\"");
        svg.label(col_ci, baseline, "[" + text::fixed(mi.ci.lower, 4) + ", " + text::fixed(mi.ci.upper, 4) + "]",
                 "middle", "class=\"metric-ci\"");
    }
    const double table_bottom = top + step * static_cast<double>(rows + 1);
    svg.line(left, table_bottom, right, table_bottom, kInk, 1.0);
    if (any_degenerate)
        svg.label(left, table_bottom + 18,
                 "† zero denominator (class never predicted or absent); reported as 0.0000", "start",
                 "class=\"footnote\" font-size=\"10\"");
    return {ChartKind::MetricsTable, std::move(svg).finish(), kChartWidth, kChartHeight};
}

} // namespace modelcard
