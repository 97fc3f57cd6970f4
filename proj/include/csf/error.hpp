#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace csf {

enum class ErrorKind {
    DegenerateCurve,
    NotEmbedded,
    InvalidPair,
    ResampleFailure,
    SelfIntersection,
    NumericalBlowup,
    DomainError,
    WrongRunKind,
    GenerationFailure,
    ConfigError,
    ParseError,
    IoError,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::DegenerateCurve: return "DegenerateCurve";
    case ErrorKind::NotEmbedded: return "NotEmbedded";
    case ErrorKind::InvalidPair: return "InvalidPair";
    case ErrorKind::ResampleFailure: return "ResampleFailure";
    case ErrorKind::SelfIntersection: return "SelfIntersection";
    case ErrorKind::NumericalBlowup: return "NumericalBlowup";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::WrongRunKind: return "WrongRunKind";
    case ErrorKind::GenerationFailure: return "GenerationFailure";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind and
/// an optional free-form context (offending index, file name, ...).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::string context = {})
        : std::runtime_error(message), kind_(kind), context_(std::move(context)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& context() const noexcept { return context_; }

private:
    ErrorKind kind_;
    std::string context_;
};

} // namespace csf
