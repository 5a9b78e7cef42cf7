#pragma once

#include "modelcard/cardspec.hpp"
#include "modelcard/chartgen.hpp"
#include "modelcard/metrics.hpp"
#include "modelcard/uncertainty.hpp"

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace modelcard {

inline constexpr const char* kGeneratorName = "modelcard";
inline constexpr const char* kGeneratorVersion = "1.0.0";

struct ModelCardDocument {
    std::string html;
    std::string version;
    std::string generated_at; // ISO 8601 UTC, e.g. 2025-03-01T12:00:00Z
    std::string manifest_hash;
};

struct RenderOptions {
    /// Replaces the wall clock; the only source of nondeterminism in a card.
    std::optional<std::chrono::sys_seconds> frozen_timestamp;
    /// Computed from config, metrics and charts when left empty.
    std::string manifest_hash;
};

std::string format_utc(std::chrono::sys_seconds t);

/// Accepts YYYY-MM-DDTHH:MM:SS with an optional trailing Z.
std::optional<std::chrono::sys_seconds> parse_utc(std::string_view iso);

/// Assembles the self-contained HTML card. User images listed in the config
/// are read from disk and inlined. Throws InvalidVersion, MissingChart,
/// MissingFile.
ModelCardDocument generate_model_card(const CardConfig& config, const MetricSet& metrics, const CIReport& cis,
                                      const std::vector<Chart>& charts, std::string_view version,
                                      const RenderOptions& options = {});

/// Atomic write (temp file + rename). Throws IoError with the path.
void write_card(const ModelCardDocument& doc, const std::filesystem::path& output_path);

/// Base64 (RFC 4648, with padding).
std::string base64_encode(std::string_view bytes);

} // namespace modelcard
