#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace factsearch {

enum class ErrorCode {
    MalformedRecord,
    Io,
    NumericFieldNotAnalyzable,
    OverlappingGroups,
    MalformedLine,
    DuplicateId,
    NotNumeric,
    EmptyRange,
    NotFacetable,
    VersionMismatch,
    CorruptSegment,
    IncompatibleFieldFilter,
    InvalidFilter,
    InvalidRange,
    ExpansionOverflow,
    LimitOutOfRange,
    BadRequest,
};

std::string_view to_string(ErrorCode code);

// Every failure surfaced by the library is an Error carrying a code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Dump parse failure; line is 1-based.
class MalformedRecord : public Error {
public:
    MalformedRecord(std::size_t line, const std::string& reason)
        : Error(ErrorCode::MalformedRecord,
                "malformed record at line " + std::to_string(line) + ": " + reason),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace factsearch
