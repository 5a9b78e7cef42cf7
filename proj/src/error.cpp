#include "modelcard/error.hpp"

namespace modelcard {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::ArgmaxMismatch: return "ArgmaxMismatch";
    case ErrorCode::ScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorCode::EmptyLog: return "EmptyLog";
    case ErrorCode::NonMonotonicEpochs: return "NonMonotonicEpochs";
    case ErrorCode::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorCode::InvalidLabelMap: return "InvalidLabelMap";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::InvalidLevel: return "InvalidLevel";
    case ErrorCode::CountExceedsN: return "CountExceedsN";
    case ErrorCode::TooFewReplicates: return "TooFewReplicates";
    case ErrorCode::TooFewEpochs: return "TooFewEpochs";
    case ErrorCode::YamlSyntaxError: return "YamlSyntaxError";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::InvalidVersion: return "InvalidVersion";
    case ErrorCode::MissingChart: return "MissingChart";
    case ErrorCode::VersionConflict: return "VersionConflict";
    case ErrorCode::UnknownVersion: return "UnknownVersion";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::MissingFolder: return "MissingFolder";
    case ErrorCode::PermissionDenied: return "PermissionDenied";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

bool is_io_error(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::MissingFile:
    case ErrorCode::MissingFolder:
    case ErrorCode::PermissionDenied:
    case ErrorCode::IoError:
        return true;
    default:
        return false;
    }
}

} // namespace modelcard
