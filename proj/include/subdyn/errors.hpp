#pragma once

#include <stdexcept>
#include <string>

namespace subdyn {

enum class ErrorCode {
    MotorIsGraph,
    UnknownParam,
    LimitExceeded,
    InvalidPartition,
    IllTypedDelta,
    NotSubfunctorial,
    InefficientComponent,
    CapExceeded,
    IllTypedDisposition,
    IncompatibleDispositions,
    MissingArrowMap,
    FamilyInvalid,
    Inefficient,
    BadDocument,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::MotorIsGraph: return "MotorIsGraph";
        case ErrorCode::UnknownParam: return "UnknownParam";
        case ErrorCode::LimitExceeded: return "LimitExceeded";
        case ErrorCode::InvalidPartition: return "InvalidPartition";
        case ErrorCode::IllTypedDelta: return "IllTypedDelta";
        case ErrorCode::NotSubfunctorial: return "NotSubfunctorial";
        case ErrorCode::InefficientComponent: return "InefficientComponent";
        case ErrorCode::CapExceeded: return "CapExceeded";
        case ErrorCode::IllTypedDisposition: return "IllTypedDisposition";
        case ErrorCode::IncompatibleDispositions: return "IncompatibleDispositions";
        case ErrorCode::MissingArrowMap: return "MissingArrowMap";
        case ErrorCode::FamilyInvalid: return "FamilyInvalid";
        case ErrorCode::Inefficient: return "Inefficient";
        case ErrorCode::BadDocument: return "BadDocument";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

} // namespace subdyn
