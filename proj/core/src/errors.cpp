#include "hestonlt/errors.hpp"

namespace hestonlt {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NonPositiveParam: return "NonPositiveParam";
        case ErrorCode::CorrelationOutOfRange: return "CorrelationOutOfRange";
        case ErrorCode::KappaBarNonPositive: return "KappaBarNonPositive";
        case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
        case ErrorCode::OutsideMomentDomain: return "OutsideMomentDomain";
        case ErrorCode::OutsideStrip: return "OutsideStrip";
        case ErrorCode::LogBranchFailure: return "LogBranchFailure";
        case ErrorCode::NonPositiveInput: return "NonPositiveInput";
        case ErrorCode::PriceOutOfBounds: return "PriceOutOfBounds";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::ThresholdOrder: return "ThresholdOrder";
        case ErrorCode::NonPositiveSigma: return "NonPositiveSigma";
        case ErrorCode::NonPositiveEffectiveVariance: return "NonPositiveEffectiveVariance";
        case ErrorCode::AmplitudeRatioNonPositive: return "AmplitudeRatioNonPositive";
        case ErrorCode::NonPositiveResult: return "NonPositiveResult";
        case ErrorCode::TruncationFailure: return "TruncationFailure";
        case ErrorCode::SubdivisionExhausted: return "SubdivisionExhausted";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::EmptyQuoteSet: return "EmptyQuoteSet";
    }
    return "Unknown";
}

}  // namespace hestonlt
