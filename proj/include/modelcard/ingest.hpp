#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace modelcard {

/// Class index -> display name. Indices are always 0..K-1, K >= 2.
class ClassLabelMap {
public:
    ClassLabelMap() = default;

    /// Builds from names in index order. Throws InvalidLabelMap.
    explicit ClassLabelMap(std::vector<std::string> names);

    /// Builds from explicit (index, name) pairs in any order. Throws
    /// InvalidLabelMap on gaps, duplicates or empty names.
    static ClassLabelMap from_pairs(std::vector<std::pair<long long, std::string>> pairs);

    std::size_t size() const noexcept { return names_.size(); }
    const std::string& name(std::size_t index) const { return names_.at(index); }
    const std::vector<std::string>& names() const noexcept { return names_; }

    bool operator==(const ClassLabelMap&) const = default;

private:
    std::vector<std::string> names_;
};

/// Parses a label-map YAML document: a sequence of single-entry `index: name`
/// maps, or a plain sequence of names in index order.
ClassLabelMap parse_label_map_yaml(std::string_view yaml);
ClassLabelMap load_label_map(const std::filesystem::path& path);

struct PredictionRecord {
    std::size_t true_label = 0;
    std::size_t predicted_label = 0;
    std::vector<double> scores; // empty or exactly K entries

    bool operator==(const PredictionRecord&) const = default;
};

struct PredictionLog {
    std::vector<PredictionRecord> records;
    std::shared_ptr<const ClassLabelMap> label_map;
    std::string source_path;
    /// Set by a `# scores: probability` line ahead of the header.
    bool scores_are_probabilities = false;

    std::size_t num_classes() const { return label_map ? label_map->size() : 0; }
    bool has_scores() const { return !records.empty() && !records.front().scores.empty(); }
};

struct EpochRecord {
    long long epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double train_acc = 0.0;
    double val_acc = 0.0;

    bool operator==(const EpochRecord&) const = default;
};

struct AssetFolder {
    std::filesystem::path root;
    std::vector<std::filesystem::path> images; // relative to root
    std::vector<std::filesystem::path> logs;   // relative to root
    std::vector<std::string> warnings;
};

/// Index of the largest score; ties go to the lowest index.
std::size_t argmax_lowest(const std::vector<double>& scores);

PredictionLog parse_prediction_csv(std::string_view csv, const ClassLabelMap& labels,
                                   std::string source_path = "<memory>");
PredictionLog parse_prediction_log(const std::filesystem::path& path, const ClassLabelMap& labels);

/// Writes the canonical CSV form; parse(serialize(log)) reproduces the records.
std::string serialize_prediction_log(const PredictionLog& log);

std::vector<EpochRecord> parse_epoch_csv(std::string_view csv, std::string_view source = "<memory>");
std::vector<EpochRecord> parse_epoch_log(const std::filesystem::path& path);

AssetFolder scan_assets(const std::filesystem::path& root);

} // namespace modelcard
