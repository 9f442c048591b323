#pragma once

#include <stdexcept>
#include <string>

namespace darktext {

enum class ErrorCode {
    InvalidArgument,
    Shape,
    Config,
    Data,
    Io,
    Parse,
    EmptyCorpus,
    SamplingExhausted,
    ProviderContract,
    Numeric,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) throw Error(code, message);
}

inline const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::Shape: return "shape";
    case ErrorCode::Config: return "config";
    case ErrorCode::Data: return "data";
    case ErrorCode::Io: return "io";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::EmptyCorpus: return "empty-corpus";
    case ErrorCode::SamplingExhausted: return "sampling-exhausted";
    case ErrorCode::ProviderContract: return "provider-contract";
    case ErrorCode::Numeric: return "numeric";
    }
    return "unknown";
}

} // namespace darktext
