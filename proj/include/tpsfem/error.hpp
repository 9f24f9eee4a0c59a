#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tpsfem {

enum class ErrorCode {
    InvalidArgument,
    NotRefinable,
    EmptyResult,
    ZeroInterior,
    OutsideTriangle,
    OutsideDomain,
    DegenerateTriangle,
    NoDataInDomain,
    DimensionMismatch,
    SingularSystem,
    NonConvergence,
    TraceOverflow,
    InsufficientData,
    DegenerateGeometry,
    NoNeighbors,
    EmptyField,
    NoControlPoints,
    ParseError,
    DegenerateExtent,
    IoError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-checkable error category.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

    ErrorCode code() const noexcept { return code_; }
    /// Message without the category prefix.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorCode code_;
    std::string message_;
};

} // namespace tpsfem
