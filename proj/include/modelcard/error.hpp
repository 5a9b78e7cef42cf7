#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace modelcard {

enum class ErrorCode {
    // input / validation
    MalformedHeader,
    MalformedRow,
    UnknownLabel,
    ArgmaxMismatch,
    ScoreOutOfRange,
    EmptyLog,
    NonMonotonicEpochs,
    ValueOutOfRange,
    InvalidLabelMap,
    EmptyMatrix,
    InvalidLevel,
    CountExceedsN,
    TooFewReplicates,
    TooFewEpochs,
    YamlSyntaxError,
    ValidationFailed,
    InvalidVersion,
    MissingChart,
    VersionConflict,
    UnknownVersion,
    // filesystem
    MissingFile,
    MissingFolder,
    PermissionDenied,
    IoError,
    // anything else
    Internal,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for codes caused by the local filesystem rather than by file content.
bool is_io_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace modelcard
