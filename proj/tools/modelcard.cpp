#include "modelcard/error.hpp"
#include "modelcard/ingest.hpp"
#include "modelcard/metrics_json.hpp"
#include "modelcard/pipeline.hpp"
#include "modelcard/text.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace modelcard;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kIo = 2, kInternal = 3 };

int exit_for(const Error& e)
{
    if (is_io_error(e.code())) return kIo;
    if (e.code() == ErrorCode::Internal) return kInternal;
    return kInvalid;
}

void print_diagnostics(const ValidationReport& report)
{
    for (const auto& d : report.errors) std::cerr << "error: " << d.path << ": " << d.message << '\n';
    for (const auto& d : report.warnings) std::cerr << "warning: " << d.path << ": " << d.message << '\n';
}

int cmd_validate(const std::string& config)
{
    const ParseResult r = parse_config(config);
    print_diagnostics(r.report);
    if (!r.report.accepted()) {
        std::cerr << r.report.errors.size() << " error(s) in " << config << '\n';
        return kInvalid;
    }
    std::cout << "valid: " << config << '\n';
    return kOk;
}

int cmd_generate(const GenerateRequest& req)
{
    const GenerateResult r = run_generate(req);
    for (const auto& d : r.warnings) std::cerr << "warning: " << d.path << ": " << d.message << '\n';
    if (r.registry_outcome == RegisterOutcome::AlreadyPresent)
        std::cerr << "registry already holds version " << req.version << " with this hash\n";
    std::cout << r.output_path.string() << '\n' << r.manifest_hash << '\n';
    return kOk;
}

std::string pad(std::string s, std::size_t width)
{
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

int cmd_metrics(const std::string& predictions, const std::string& labels_path, bool as_json)
{
    const ClassLabelMap labels = load_label_map(labels_path);
    const PredictionLog log = parse_prediction_log(fs::path(predictions), labels);
    const ConfusionMatrix cm = build_confusion_matrix(log);
    const MetricSet m = derive_metrics(cm);
    const CIReport cis = build_ci_report(log, m, BootstrapOptions{});

    if (as_json) {
        std::cout << metrics_document(cm, m, &cis).dump(2) << '\n';
        return kOk;
    }
    std::cout << pad("metric", 28) << pad("value", 10) << percent_label(cis.level) << "% CI\n";
    for (const auto& mi : cis.intervals) {
        std::string name = mi.metric.display_name(labels);
        if (mi.metric.degenerate(m)) name += " *";
        std::cout << pad(name, 28) << pad(text::fixed(mi.estimate, 4), 10) << '[' << text::fixed(mi.ci.lower, 4)
                  << ", " << text::fixed(mi.ci.upper, 4) << "]\n";
    }
    std::cout << "n = " << cm.total() << "; bootstrap " << cis.replicates << " replicates, seed " << cis.seed << '\n';
    for (const auto& note : metric_warnings(labels, m)) std::cerr << "note: " << note << '\n';
    return kOk;
}

int cmd_diff(const std::string& registry, const std::string& old_v, const std::string& new_v)
{
    if (!fs::exists(registry)) throw Error(ErrorCode::MissingFile, "registry not found: " + registry);
    const auto entries = load_registry(registry);
    std::cout << format_diff(diff_cards(entries, old_v, new_v));
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Generate versioned, self-contained HTML model cards from run artifacts."};
    app.require_subcommand(1);
    app.set_version_flag("--version-info", std::string(kGeneratorName) + " " + kGeneratorVersion);

    std::string config;
    auto* validate = app.add_subcommand("validate", "Check a card config and report every problem");
    validate->add_option("--config", config, "Card YAML file")->required();

    GenerateRequest req;
    std::string config_path, output, freeze;
    std::uint64_t seed = 0;
    auto* generate = app.add_subcommand("generate", "Build the card, write charts and HTML, register the version");
    generate->add_option("--config", config_path, "Card YAML file")->required();
    generate->add_option("--output", output, "HTML output path; the registry lives next to it")->required();
    generate->add_option("--version", req.version, "Card version, MAJOR[.MINOR[.PATCH]]")->required();
    auto* seed_opt = generate->add_option("--seed", seed, "Bootstrap seed (overrides the config)");
    generate->add_option("--freeze-timestamp", freeze,
                         "Use this UTC time (YYYY-MM-DDTHH:MM:SSZ) instead of the clock; for reproducible builds");

    std::string predictions, labels;
    bool as_json = false;
    auto* metrics = app.add_subcommand("metrics", "Print metrics and confidence intervals for a prediction log");
    metrics->add_option("--predictions", predictions, "Prediction log CSV")->required();
    metrics->add_option("--labels", labels, "Label map YAML")->required();
    metrics->add_flag("--json", as_json, "Emit the metrics JSON document");

    std::string registry, old_v, new_v;
    auto* diff = app.add_subcommand("diff", "Compare two registered card versions");
    diff->add_option("--registry", registry, "Registry file (cards.registry.json)")->required();
    diff->add_option("--old", old_v, "Old version")->required();
    diff->add_option("--new", new_v, "New version")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInvalid;
    }

    try {
        if (*validate) return cmd_validate(config);
        if (*generate) {
            req.config_path = config_path;
            req.output_path = output;
            if (*seed_opt) req.seed = seed;
            if (!freeze.empty()) {
                req.frozen_timestamp = parse_utc(freeze);
                if (!req.frozen_timestamp) {
                    std::cerr << "error: --freeze-timestamp: expected YYYY-MM-DDTHH:MM:SSZ, got '" << freeze << "'\n";
                    return kInvalid;
                }
            }
            return cmd_generate(req);
        }
        if (*metrics) return cmd_metrics(predictions, labels, as_json);
        if (*diff) return cmd_diff(registry, old_v, new_v);
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
        return exit_for(e);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kInternal;
}
