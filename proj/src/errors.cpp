#include "toposq/errors.hpp"

namespace toposq {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NotHermitian: return "NotHermitian";
        case ErrorKind::NotProjection: return "NotProjection";
        case ErrorKind::NotState: return "NotState";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::NonCommuting: return "NonCommuting";
        case ErrorKind::TrivialContext: return "TrivialContext";
        case ErrorKind::PosetTooLarge: return "PosetTooLarge";
        case ErrorKind::NotInContext: return "NotInContext";
        case ErrorKind::ContextMismatch: return "ContextMismatch";
        case ErrorKind::NotSubcontext: return "NotSubcontext";
        case ErrorKind::NoUniqueTarget: return "NoUniqueTarget";
        case ErrorKind::PosetMismatch: return "PosetMismatch";
        case ErrorKind::NotAntitone: return "NotAntitone";
        case ErrorKind::NotTabulated: return "NotTabulated";
        case ErrorKind::BadCoefficient: return "BadCoefficient";
        case ErrorKind::NotLocallyDisjoint: return "NotLocallyDisjoint";
        case ErrorKind::NoContainingContext: return "NoContainingContext";
        case ErrorKind::WellDefinednessViolation: return "WellDefinednessViolation";
        case ErrorKind::EmptyWitnessSet: return "EmptyWitnessSet";
        case ErrorKind::PoolRankDeficient: return "PoolRankDeficient";
        case ErrorKind::InfeasibleMeasure: return "InfeasibleMeasure";
        case ErrorKind::NotUnitVector: return "NotUnitVector";
        case ErrorKind::SearchBudgetExceeded: return "SearchBudgetExceeded";
        case ErrorKind::EnumerationTooLarge: return "EnumerationTooLarge";
        case ErrorKind::BadTolerances: return "BadTolerances";
        case ErrorKind::Parse: return "ParseError";
        case ErrorKind::Validation: return "ValidationError";
    }
    return "Unknown";
}

}  // namespace toposq
