#include "tpsfem/error.hpp"

namespace tpsfem {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotRefinable: return "NotRefinable";
    case ErrorCode::EmptyResult: return "EmptyResult";
    case ErrorCode::ZeroInterior: return "ZeroInterior";
    case ErrorCode::OutsideTriangle: return "OutsideTriangle";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorCode::NoDataInDomain: return "NoDataInDomain";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::TraceOverflow: return "TraceOverflow";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::NoNeighbors: return "NoNeighbors";
    case ErrorCode::EmptyField: return "EmptyField";
    case ErrorCode::NoControlPoints: return "NoControlPoints";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DegenerateExtent: return "DegenerateExtent";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace tpsfem
