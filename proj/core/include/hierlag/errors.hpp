#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hierlag {

enum class Errc {
    InvalidArgument,
    NonFiniteCoefficient,
    UnstableProcess,
    LagTooLarge,
    DimensionMismatch,
    LagBoundInfeasible,
    DegenerateProbe,
    ParseError,
    EmptySeries,
};

const char* errc_name(Errc code) noexcept;

/// Base for every error raised by the library. The code is stable and can be
/// matched on; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// A series is too short for the requested lag (n_m <= L).
class LagTooLarge : public Error {
public:
    LagTooLarge(std::size_t series, std::size_t length, std::size_t lag)
        : Error(Errc::LagTooLarge, "series " + std::to_string(series) + " has length " +
                                       std::to_string(length) + " <= lag " + std::to_string(lag)),
          series_(series) {}

    std::size_t series() const noexcept { return series_; }

private:
    std::size_t series_;
};

/// Malformed input file; line is 1-based.
class ParseError : public Error {
public:
    ParseError(std::string path, std::size_t line, const std::string& reason)
        : Error(Errc::ParseError, path + ":" + std::to_string(line) + ": " + reason),
          path_(std::move(path)), line_(line) {}

    const std::string& path() const noexcept { return path_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string path_;
    std::size_t line_;
};

inline const char* errc_name(Errc code) noexcept {
    switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NonFiniteCoefficient: return "NonFiniteCoefficient";
    case Errc::UnstableProcess: return "UnstableProcess";
    case Errc::LagTooLarge: return "LagTooLarge";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::LagBoundInfeasible: return "LagBoundInfeasible";
    case Errc::DegenerateProbe: return "DegenerateProbe";
    case Errc::ParseError: return "ParseError";
    case Errc::EmptySeries: return "EmptySeries";
    }
    return "Unknown";
}

} // namespace hierlag
