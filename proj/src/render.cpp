#include "modelcard/render.hpp"

#include "modelcard/error.hpp"
#include "modelcard/text.hpp"
#include "modelcard/versioning.hpp"

#include <algorithm>
#include <cstdio>

#include <openssl/evp.h>

namespace fs = std::filesystem;
using namespace std::chrono;

namespace modelcard {

std::string format_utc(sys_seconds t)
{
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const hh_mm_ss hms{t - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

std::optional<sys_seconds> parse_utc(std::string_view iso)
{
    if (iso.ends_with('Z')) iso.remove_suffix(1);
    if (iso.size() != 19 || iso[4] != '-' || iso[7] != '-' || (iso[10] != 'T' && iso[10] != ' ') ||
        iso[13] != ':' || iso[16] != ':')
        return std::nullopt;
    auto field = [&](std::size_t pos, std::size_t len) { return text::parse_int(iso.substr(pos, len)); };
    const auto y = field(0, 4), mo = field(5, 2), d = field(8, 2), h = field(11, 2), mi = field(14, 2),
               s = field(17, 2);
    if (!y || !mo || !d || !h || !mi || !s) return std::nullopt;
    const year_month_day ymd{year{static_cast<int>(*y)}, month{static_cast<unsigned>(*mo)},
                             day{static_cast<unsigned>(*d)}};
    if (!ymd.ok() || *h > 23 || *mi > 59 || *s > 59 || *h < 0 || *mi < 0 || *s < 0) return std::nullopt;
    return sys_days{ymd} + hours{*h} + minutes{*mi} + seconds{*s};
}

std::string base64_encode(std::string_view bytes)
{
    std::string out(4 * ((bytes.size() + 2) / 3) + 1, '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                  reinterpret_cast<const unsigned char*>(bytes.data()), static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

namespace {

constexpr std::string_view kStyle =
    "body{font-family:Helvetica,Arial,sans-serif;margin:0;background:#f4f6f8;color:#222}"
    "header.banner{background:#1d4e2c;color:#fff;padding:18px 32px}"
    "header.banner h1{margin:0;font-size:26px}header.banner p{margin:4px 0 0}"
    "main{max-width:900px;margin:0 auto;padding:16px 32px;background:#fff}"
    "section{border-bottom:1px solid #e3e3e3;padding:8px 0 16px}"
    "h2{color:#2e7d32;margin:12px 0 8px}"
    "figure{margin:12px 0;text-align:center}figure svg,figure img{max-width:100%;height:auto}"
    "figcaption{font-size:13px;color:#555}"
    ".not-provided{color:#777;font-style:italic}"
    "footer{max-width:900px;margin:0 auto;padding:12px 32px;font-size:12px;color:#666}";

std::string esc(std::string_view s) { return text::escape_xml(s); }

std::string field(std::string_view label, std::string_view value)
{
    return "<li>" + esc(label) + ": " + esc(value) + "</li>\n";
}

std::string not_provided(std::string_view what)
{
    return "<p class=\"not-provided\">" + esc(what) + "</p>\n";
}

std::string strip_xml_prolog(std::string svg)
{
    const auto start = svg.find("<svg");
    if (start == std::string::npos) throw Error(ErrorCode::ValidationFailed, "SVG image has no <svg> element");
    return svg.substr(start);
}

// href/src values in user SVGs may only point at in-document fragments.
void reject_external_refs(const std::string& svg, const std::string& path)
{
    for (std::string_view attr : {"href=", "src="}) {
        for (auto pos = svg.find(attr); pos != std::string::npos; pos = svg.find(attr, pos + 1)) {
            const auto v = pos + attr.size();
            if (v + 1 < svg.size() && (svg[v] == '"' || svg[v] == '\'') && svg[v + 1] == '#') continue;
            throw Error(ErrorCode::ValidationFailed,
                        "image " + path + " references an external resource and cannot be embedded");
        }
    }
}

std::string figure(std::string_view id, std::string_view body, std::string_view caption)
{
    return "<figure id=\"" + std::string(id) + "\">\n" + std::string(body) + "<figcaption>" + esc(caption) +
           "</figcaption>\n</figure>\n";
}

std::string user_image(const CardConfig& config, const ImageAsset& image, std::size_t index)
{
    const fs::path path = config.resolve(image.path);
    std::string bytes = text::read_file(path);
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    std::string body;
    if (ext == ".svg") {
        body = strip_xml_prolog(std::move(bytes));
        reject_external_refs(body, image.path);
        if (!body.ends_with('\n')) body += '\n';
    } else {
        body = "<img src=\"data:image/png;base64," + base64_encode(bytes) + "\" alt=\"" + esc(image.caption) + "\">\n";
    }
    return figure("image-" + std::to_string(index + 1), body, image.caption);
}

const Chart* find_chart(const std::vector<Chart>& charts, ChartKind kind)
{
    for (const auto& c : charts)
        if (c.kind == kind) return &c;
    return nullptr;
}

} // namespace

ModelCardDocument generate_model_card(const CardConfig& config, const MetricSet& metrics, const CIReport& cis,
                                      const std::vector<Chart>& charts, std::string_view version,
                                      const RenderOptions& options)
{
    const VersionString ver = VersionString::parse(version);

    std::vector<ChartKind> required = {ChartKind::ConfusionHeatmap, ChartKind::MetricsTable, ChartKind::CiErrorBars};
    if (config.assets.epoch_log) required.push_back(ChartKind::TrainingCurves);
    for (auto kind : required)
        if (!find_chart(charts, kind))
            throw Error(ErrorCode::MissingChart, "missing " + std::string(to_string(kind)) + " chart");

    ModelCardDocument doc;
    doc.version = ver.raw();
    doc.generated_at = format_utc(options.frozen_timestamp.value_or(floor<seconds>(system_clock::now())));
    doc.manifest_hash = options.manifest_hash;
    if (doc.manifest_hash.empty()) {
        ManifestInputs in;
        in.canonical_config = canonical_config(config);
        nlohmann::json estimates;
        for (const auto& sel : reported_metrics(metrics.per_class.size())) estimates[sel.id()] = sel.value(metrics);
        in.metrics = estimates;
        for (const auto& c : charts) in.chart_svgs.push_back(c.svg);
        doc.manifest_hash = manifest_hash(in);
    }

    const ClassLabelMap labels = config.label_map();
    const std::string title = config.title ? "Model Card - " + *config.title : std::string("Model Card");
    const std::string level = percent_label(cis.level);

    std::string h;
    h.reserve(64 * 1024);
    h += "<!DOCTYPE html>\n";
    h += "<!-- generator: " + std::string(kGeneratorName) + " " + kGeneratorVersion +
         "; manifest sha256: " + doc.manifest_hash + " -->\n";
    h += "<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>" + esc(title) + "</title>\n<style>" +
         std::string(kStyle) + "</style>\n</head>\n<body>\n";
    h += "<header class=\"banner\">\n<h1>" + esc(title) + "</h1>\n<p class=\"version\">Version " + esc(doc.version) +
         "</p>\n</header>\n<main>\n";

    // Overview
    h += "<section id=\"overview\">\n<h2>Overview</h2>\n<p>" + esc(config.overview) + "</p>\n";
    h += config.intended_use ? "<p>Intended use: " + esc(*config.intended_use) + "</p>\n"
                             : not_provided("Intended use: not provided");
    h += "</section>\n";

    // Dataset
    std::string ground_truth;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) ground_truth += ", ";
        ground_truth += labels.name(i) + " (" + std::to_string(i) + ")";
    }
    std::string preprocessing;
    for (std::size_t i = 0; i < config.dataset.preprocessing.size(); ++i) {
        if (i) preprocessing += ", ";
        preprocessing += config.dataset.preprocessing[i];
    }
    h += "<section id=\"dataset\">\n<h2>Dataset</h2>\n<ul>\n";
    h += field("Dataset", config.dataset.name);
    h += field("Number of Classes", std::to_string(config.dataset.num_classes));
    h += field("Ground Truth", ground_truth);
    h += field("Training/Validation Split", config.dataset.split);
    h += field("Preprocessing", preprocessing.empty() ? "None provided" : preprocessing);
    h += "</ul>\n</section>\n";

    // Model details
    h += "<section id=\"model-details\">\n<h2>Model Details</h2>\n<ul>\n";
    h += field("Input", config.model.input_desc);
    h += field("Output", config.model.output_desc);
    h += field("Model Type", config.model.model_type);
    h += field("Learning Rate", text::shortest(config.model.learning_rate));
    h += field("Batch Size", std::to_string(config.model.batch_size));
    h += field("Parameters", config.model.parameter_count);
    h += "</ul>\n</section>\n";

    // Performance
    const auto n = metrics.per_class.front().tp + metrics.per_class.front().fp + metrics.per_class.front().fn +
                   metrics.per_class.front().tn;
    h += "<section id=\"performance\">\n<h2>Performance</h2>\n";
    h += "<p>Evaluated on " + std::to_string(n) + " held-out predictions. Accuracy: " + text::fixed(metrics.accuracy, 4) + "; macro F1: " +
         text::fixed(metrics.macro_f1, 4) + ".</p>\n";
    h += figure("chart-cm", find_chart(charts, ChartKind::ConfusionHeatmap)->svg,
                "Confusion matrix (rows: true label, columns: predicted label)");
    h += figure("chart-table", find_chart(charts, ChartKind::MetricsTable)->svg,
                "Point estimates with " + level + "% confidence intervals");
    if (const Chart* curves = find_chart(charts, ChartKind::TrainingCurves); curves && config.assets.epoch_log)
        h += figure("chart-curves", curves->svg, "Training and validation loss and accuracy per epoch");
    else
        h += not_provided("Training curves: not provided (no epoch log configured).");
    for (std::size_t i = 0; i < config.assets.images.size(); ++i) h += user_image(config, config.assets.images[i], i);
    h += "</section>\n";

    // Limitations
    h += "<section id=\"limitations\">\n<h2>Limitations</h2>\n";
    if (config.limitations.empty()) {
        h += not_provided("No limitations provided.");
    } else {
        h += "<ul>\n";
        for (const auto& l : config.limitations) h += "<li>" + esc(l) + "</li>\n";
        h += "</ul>\n";
    }
    if (const auto notes = metric_warnings(labels, metrics); !notes.empty()) {
        h += "<p>Detected from the evaluation data:</p>\n<ul class=\"metric-warnings\">\n";
        for (const auto& note : notes) h += "<li>" + esc(note) + "</li>\n";
        h += "</ul>\n";
    }
    h += "</section>\n";

    // Uncertainty
    h += "<section id=\"uncertainty\">\n<h2>Uncertainty</h2>\n";
    h += "<p>Each metric carries a " + level + "% percentile bootstrap interval over " + std::to_string(cis.replicates) +
         " resamples of the evaluation set (seed " + std::to_string(cis.seed) + ").</p>\n";
    h += figure("chart-ci", find_chart(charts, ChartKind::CiErrorBars)->svg,
                level + "% confidence intervals; markers show point estimates");
    h += "<p>Accuracy, Wilson score interval (analytic cross-check): [" + text::fixed(cis.accuracy_wilson.lower, 4) +
         ", " + text::fixed(cis.accuracy_wilson.upper, 4) + "].</p>\n";
    h += "</section>\n";

    // References
    h += "<section id=\"references\">\n<h2>References</h2>\n";
    if (config.references.empty()) {
        h += not_provided("None provided");
    } else {
        h += "<ol>\n";
        for (const auto& r : config.references) h += "<li>" + esc(r) + "</li>\n";
        h += "</ol>\n";
    }
    h += "</section>\n";

    for (std::size_t i = 0; i < config.extra_sections.size(); ++i) {
        const auto& s = config.extra_sections[i];
        h += "<section id=\"extra-" + std::to_string(i + 1) + "\">\n<h2>" + esc(s.name) + "</h2>\n<p>" + esc(s.text) +
             "</p>\n</section>\n";
    }

    h += "</main>\n<footer>Generated " + doc.generated_at + " by " + kGeneratorName + " " + kGeneratorVersion +
         ". Manifest sha256: " + doc.manifest_hash + "</footer>\n</body>\n</html>\n";
    doc.html = std::move(h);
    return doc;
}

void write_card(const ModelCardDocument& doc, const fs::path& output_path)
{
    text::write_file_atomic(output_path, doc.html);
    std::error_code ec;
    const auto size = fs::file_size(output_path, ec);
    if (ec || size != doc.html.size())
        throw Error(ErrorCode::IoError, "card at " + output_path.string() + " was not written completely");
}

} // namespace modelcard
