#pragma once

#include "modelcard/cardspec.hpp"

#include <compare>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace modelcard {

/// MAJOR[.MINOR[.PATCH]], non-negative integers. Missing components order as 0,
/// so "1", "1.0" and "1.0.0" compare equal while staying distinct strings.
class VersionString {
public:
    /// Throws InvalidVersion.
    static VersionString parse(std::string_view raw);

    const std::string& raw() const noexcept { return raw_; }
    const std::vector<std::uint64_t>& components() const noexcept { return parts_; }

    std::weak_ordering operator<=>(const VersionString& other) const;
    bool operator==(const VersionString& other) const { return (*this <=> other) == 0; }

private:
    std::string raw_;
    std::vector<std::uint64_t> parts_;
};

/// SHA-256, lower-case hex (64 chars). The only digest the tool uses.
std::string sha256_hex(std::string_view bytes);

/// Config as JSON with defaults applied; key order sorted, so the form does not
/// depend on YAML key order, quoting or whitespace. Asset paths stay as written.
nlohmann::json canonical_config(const CardConfig& config);

struct ManifestInputs {
    nlohmann::json canonical_config;
    nlohmann::json metrics;                    // metrics document
    std::vector<std::string> chart_svgs;       // in chart-kind order
    std::map<std::string, std::string> input_digests; // asset path -> sha256
};

/// Length-framed SHA-256 over every input, so no two distinct input sets share
/// a preimage.
std::string manifest_hash(const ManifestInputs& inputs);

struct CardManifest {
    VersionString version = VersionString::parse("0");
    std::string manifest_hash;
    std::map<std::string, std::string> input_digests;
    std::string created_at; // ISO 8601 UTC, second precision
    nlohmann::json config;  // canonical config, stored for diffs
    nlohmann::json metrics; // metrics document, stored for diffs
};

nlohmann::ordered_json to_json(const CardManifest& manifest);
CardManifest manifest_from_json(const nlohmann::json& j);

inline constexpr const char* kRegistryFileName = "cards.registry.json";

/// Reads a registry; a missing file is an empty registry. Entries come back
/// in version order.
std::vector<CardManifest> load_registry(const std::filesystem::path& registry_path);

enum class RegisterOutcome { Added, AlreadyPresent };

/// Throws VersionConflict when `manifest.version` exists with another hash.
void check_registrable(const std::vector<CardManifest>& registry, const CardManifest& manifest);

/// Appends the manifest (atomic rewrite, lock file against concurrent writers).
/// Throws VersionConflict; IoError, retryable, when another writer holds the lock.
RegisterOutcome register_card(const CardManifest& manifest, const std::filesystem::path& registry_path);

enum class AssetChangeKind { Added, Removed, Modified };
std::string_view to_string(AssetChangeKind kind) noexcept;

struct ConfigChange {
    std::string path;
    std::string old_value; // "<absent>" when missing on that side
    std::string new_value;
    bool operator==(const ConfigChange&) const = default;
};

struct MetricDelta {
    std::string metric;
    double old_value = 0.0;
    double new_value = 0.0;
    double delta = 0.0; // new - old at 4-decimal precision
};

struct AssetChange {
    std::string path;
    AssetChangeKind kind = AssetChangeKind::Modified;
};

struct CardDiff {
    std::vector<ConfigChange> config_changes;
    std::vector<MetricDelta> metric_deltas;
    std::vector<AssetChange> asset_changes;

    bool empty() const noexcept
    {
        return config_changes.empty() && metric_deltas.empty() && asset_changes.empty();
    }
};

CardDiff diff_manifests(const CardManifest& old_card, const CardManifest& new_card);

/// Looks both versions up by exact string. Throws UnknownVersion.
CardDiff diff_cards(const std::vector<CardManifest>& registry, std::string_view old_version,
                    std::string_view new_version);

/// Plain-text rendering used by the CLI; "no changes" for an empty diff.
std::string format_diff(const CardDiff& diff);

} // namespace modelcard
