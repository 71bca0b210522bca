#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace hestonlt {

enum class ErrorCode {
    NonPositiveParam,
    CorrelationOutOfRange,
    KappaBarNonPositive,
    DegenerateDenominator,
    OutsideMomentDomain,
    OutsideStrip,
    LogBranchFailure,
    NonPositiveInput,
    PriceOutOfBounds,
    NoConvergence,
    ThresholdOrder,
    NonPositiveSigma,
    NonPositiveEffectiveVariance,
    AmplitudeRatioNonPositive,
    NonPositiveResult,
    TruncationFailure,
    SubdivisionExhausted,
    InvalidConfig,
    ParseError,
    EmptyQuoteSet,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so
// callers (and the CLI) can branch on the violation without parsing text.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t row, std::string column, const std::string& reason)
        : Error(ErrorCode::ParseError,
                "row " + std::to_string(row) + ", column '" + column + "': " + reason),
          row_(row), column_(std::move(column)) {}

    std::size_t row() const noexcept { return row_; }
    const std::string& column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::string column_;
};

}  // namespace hestonlt
