#pragma once

#include "modelcard/ingest.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace modelcard {

struct DatasetSection {
    std::string name;
    long long num_classes = 0;
    std::vector<std::string> ground_truth; // label names in index order
    std::string split;
    std::vector<std::string> preprocessing;

    bool operator==(const DatasetSection&) const = default;
};

struct ModelSection {
    std::string input_desc;
    std::string output_desc;
    std::string model_type;
    double learning_rate = 0.0;
    long long batch_size = 0;
    std::string parameter_count; // free text, e.g. "0.56M"

    bool operator==(const ModelSection&) const = default;
};

struct ImageAsset {
    std::string path;
    std::string caption;

    bool operator==(const ImageAsset&) const = default;
};

struct AssetPaths {
    std::optional<std::string> folder; // where generated charts are written
    std::string prediction_log;
    std::optional<std::string> epoch_log;
    std::vector<ImageAsset> images;

    bool operator==(const AssetPaths&) const = default;
};

struct UncertaintySettings {
    std::optional<double> level;
    std::optional<long long> replicates;
    std::optional<std::uint64_t> seed;

    bool operator==(const UncertaintySettings&) const = default;
};

struct ExtraSection {
    std::string name;
    std::string text;

    bool operator==(const ExtraSection&) const = default;
};

inline constexpr double kDefaultLevel = 0.95;
inline constexpr long long kDefaultReplicates = 2000;
inline constexpr std::uint64_t kDefaultSeed = 42;

/// Validated card specification. Asset paths are kept as written; they
/// resolve against `base_dir` (the directory holding the YAML file).
struct CardConfig {
    std::optional<std::string> title;
    std::string overview;
    std::optional<std::string> intended_use;
    DatasetSection dataset;
    ModelSection model;
    std::vector<std::string> limitations;
    std::vector<std::string> references;
    AssetPaths assets;
    UncertaintySettings uncertainty;
    std::vector<ExtraSection> extra_sections;

    std::filesystem::path base_dir;

    std::filesystem::path resolve(const std::string& path) const;
    std::filesystem::path asset_folder() const;
    ClassLabelMap label_map() const;

    double level() const { return uncertainty.level.value_or(kDefaultLevel); }
    long long replicates() const { return uncertainty.replicates.value_or(kDefaultReplicates); }
    std::uint64_t seed() const { return uncertainty.seed.value_or(kDefaultSeed); }

    bool operator==(const CardConfig&) const = default;
};

struct Diagnostic {
    std::string path; // YAML path such as "dataset.ground_truth" or "limitations[1]"
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

struct ValidationReport {
    std::vector<Diagnostic> errors;
    std::vector<Diagnostic> warnings;

    bool accepted() const noexcept { return errors.empty(); }
};

struct ParseResult {
    std::optional<CardConfig> config; // engaged iff report.accepted()
    ValidationReport report;
};

/// Parses and validates a card YAML file, collecting every violation.
/// Throws MissingFile and YamlSyntaxError; everything else lands in the report.
ParseResult parse_config(const std::filesystem::path& path);
ParseResult parse_config_string(std::string_view yaml, const std::filesystem::path& base_dir,
                                std::string_view source = "<memory>");

/// Fills the uncertainty block with 0.95 / 2000 / 42 where absent.
CardConfig apply_defaults(CardConfig config);

/// Emits YAML that parse_config_string reads back into an equal config.
std::string to_yaml(const CardConfig& config);

} // namespace modelcard
