#pragma once

#include "modelcard/cardspec.hpp"
#include "modelcard/chartgen.hpp"
#include "modelcard/metrics.hpp"
#include "modelcard/render.hpp"
#include "modelcard/uncertainty.hpp"
#include "modelcard/versioning.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace modelcard {

struct GenerateRequest {
    std::filesystem::path config_path;
    std::filesystem::path output_path;
    std::string version;
    std::optional<std::uint64_t> seed; // overrides the config seed
    std::optional<std::chrono::sys_seconds> frozen_timestamp;
    /// Defaults to cards.registry.json next to the output file.
    std::optional<std::filesystem::path> registry_path;
    unsigned threads = 0;
};

struct GenerateResult {
    std::filesystem::path output_path;
    std::filesystem::path registry_path;
    std::string manifest_hash;
    RegisterOutcome registry_outcome = RegisterOutcome::Added;
    std::vector<std::filesystem::path> chart_paths;
    std::vector<Diagnostic> warnings;
};

/// Everything `generate` computes before touching the filesystem.
struct CardBuild {
    CardConfig config;
    ConfusionMatrix confusion;
    MetricSet metrics;
    CIReport cis;
    std::vector<Chart> charts; // chart-kind order
    CardManifest manifest;
    ModelCardDocument document;
};

/// Throws ValidationFailed (message lists every error) for a rejected config.
CardConfig load_valid_config(const std::filesystem::path& path, std::vector<Diagnostic>* warnings = nullptr);

/// Pure part of the pipeline: ingest, metrics, intervals, charts, manifest, HTML.
CardBuild build_card(CardConfig config, std::string_view version,
                     std::optional<std::chrono::sys_seconds> frozen_timestamp = std::nullopt, unsigned threads = 0);

/// Full pipeline. Checks the registry for a version conflict before writing
/// anything, then writes charts into the asset folder, the HTML card, and the
/// registry entry.
GenerateResult run_generate(const GenerateRequest& request);

} // namespace modelcard
