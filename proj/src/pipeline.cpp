#include "modelcard/pipeline.hpp"

#include "modelcard/error.hpp"
#include "modelcard/metrics_json.hpp"
#include "modelcard/text.hpp"

namespace fs = std::filesystem;
using namespace std::chrono;

namespace modelcard {

CardConfig load_valid_config(const fs::path& path, std::vector<Diagnostic>* warnings)
{
    ParseResult parsed = parse_config(path);
    if (warnings) *warnings = parsed.report.warnings;
    if (!parsed.report.accepted()) {
        std::string msg = path.string() + " failed validation:";
        for (const auto& d : parsed.report.errors) msg += "\n  " + d.path + ": " + d.message;
        throw Error(ErrorCode::ValidationFailed, msg);
    }
    return std::move(*parsed.config);
}

CardBuild build_card(CardConfig config, std::string_view version, std::optional<sys_seconds> frozen_timestamp,
                     unsigned threads)
{
    CardBuild b;
    const VersionString ver = VersionString::parse(version);
    b.config = apply_defaults(std::move(config));
    const CardConfig& c = b.config;

    const ClassLabelMap labels = c.label_map();
    const fs::path log_path = c.resolve(c.assets.prediction_log);
    const std::string log_bytes = text::read_file(log_path);
    const PredictionLog log = parse_prediction_csv(log_bytes, labels, log_path.string());

    std::map<std::string, std::string> digests;
    digests[c.assets.prediction_log] = sha256_hex(log_bytes);

    std::optional<std::vector<EpochRecord>> history;
    if (c.assets.epoch_log) {
        const fs::path p = c.resolve(*c.assets.epoch_log);
        const std::string bytes = text::read_file(p);
        history = parse_epoch_csv(bytes, p.string());
        digests[*c.assets.epoch_log] = sha256_hex(bytes);
    }
    for (const auto& img : c.assets.images) digests[img.path] = sha256_hex(text::read_file(c.resolve(img.path)));

    b.confusion = build_confusion_matrix(log);
    b.metrics = derive_metrics(b.confusion);
    BootstrapOptions opts;
    opts.replicates = static_cast<std::size_t>(c.replicates());
    opts.seed = c.seed();
    opts.level = c.level();
    opts.threads = threads;
    b.cis = build_ci_report(log, b.metrics, opts);

    b.charts.push_back(render_confusion_heatmap(b.confusion));
    if (history) b.charts.push_back(render_training_curves(*history));
    b.charts.push_back(render_ci_errorbars(b.cis, b.metrics, labels));
    b.charts.push_back(render_metrics_table(b.metrics, b.cis, labels));

    ManifestInputs in;
    in.canonical_config = canonical_config(c);
    in.metrics = metrics_document(b.confusion, b.metrics, &b.cis);
    for (const auto& chart : b.charts) in.chart_svgs.push_back(chart.svg);
    in.input_digests = digests;

    RenderOptions ropts;
    ropts.frozen_timestamp = frozen_timestamp;
    ropts.manifest_hash = manifest_hash(in);
    b.document = generate_model_card(c, b.metrics, b.cis, b.charts, ver.raw(), ropts);

    b.manifest.version = ver;
    b.manifest.manifest_hash = ropts.manifest_hash;
    b.manifest.input_digests = std::move(digests);
    b.manifest.created_at = b.document.generated_at;
    b.manifest.config = std::move(in.canonical_config);
    b.manifest.metrics = std::move(in.metrics);
    return b;
}

GenerateResult run_generate(const GenerateRequest& req)
{
    GenerateResult result;
    CardConfig config = load_valid_config(req.config_path, &result.warnings);
    if (req.seed) config.uncertainty.seed = *req.seed;

    CardBuild b = build_card(std::move(config), req.version, req.frozen_timestamp, req.threads);

    result.output_path = req.output_path;
    result.registry_path = req.registry_path.value_or(req.output_path.parent_path() / kRegistryFileName);
    result.manifest_hash = b.manifest.manifest_hash;

    // Fail on a version conflict before any file is written.
    check_registrable(load_registry(result.registry_path), b.manifest);
    text::ensure_directory(req.output_path.has_parent_path() ? req.output_path.parent_path() : fs::path("."));

    const fs::path folder = b.config.asset_folder();
    for (const auto& chart : b.charts) {
        const fs::path p = folder / chart_file_name(chart.kind);
        text::write_file_atomic(p, chart.svg);
        result.chart_paths.push_back(p);
    }
    write_card(b.document, req.output_path);
    result.registry_outcome = register_card(b.manifest, result.registry_path);
    return result;
}

} // namespace modelcard
