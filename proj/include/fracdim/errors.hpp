#pragma once

#include <stdexcept>
#include <string>

namespace fracdim {

// Thrown when an estimate cannot be produced from otherwise well-formed
// input: degenerate data (constant series, single occupied box), empty
// Julia boundary bands, and similar. Argument/contract violations use
// std::invalid_argument instead.
class EstimationError : public std::runtime_error {
public:
    explicit EstimationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Track-level analysis failure inside the corpus pipeline (undecodable
// clip, no analyzable windows, unreadable file).
class AnalysisError : public std::runtime_error {
public:
    explicit AnalysisError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed corpus manifest (bad tag syntax, duplicate path, empty path).
class ManifestError : public std::runtime_error {
public:
    explicit ManifestError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class WavErrorKind {
    not_riff,           // missing/foreign container magic (incl. RIFX)
    missing_fmt,
    duplicate_fmt,
    missing_data,
    duplicate_data,
    unsupported_format, // format code other than PCM (1) or IEEE float (3)
    unsupported_depth,  // bit depth outside the supported set for the code
    truncated,          // chunk or payload extends past the end of the buffer
    inconsistent,       // internal field contradictions (block align, sizes, zero channels/rate)
};

inline const char* to_string(WavErrorKind k) {
    switch (k) {
        case WavErrorKind::not_riff: return "not_riff";
        case WavErrorKind::missing_fmt: return "missing_fmt";
        case WavErrorKind::duplicate_fmt: return "duplicate_fmt";
        case WavErrorKind::missing_data: return "missing_data";
        case WavErrorKind::duplicate_data: return "duplicate_data";
        case WavErrorKind::unsupported_format: return "unsupported_format";
        case WavErrorKind::unsupported_depth: return "unsupported_depth";
        case WavErrorKind::truncated: return "truncated";
        case WavErrorKind::inconsistent: return "inconsistent";
    }
    return "unknown";
}

class WavError : public std::runtime_error {
public:
    WavError(WavErrorKind kind, const std::string& msg)
        : std::runtime_error(std::string(to_string(kind)) + ": " + msg), kind_(kind) {}

    WavErrorKind kind() const noexcept { return kind_; }

private:
    WavErrorKind kind_;
};

} // namespace fracdim
