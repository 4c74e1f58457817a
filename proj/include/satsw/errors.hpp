#pragma once

#include <stdexcept>
#include <string>

namespace satsw {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct NotSquare : Error {
    using Error::Error;
};

struct NonFinite : Error {
    using Error::Error;
};

struct NearSingular : Error {
    NearSingular(const std::string& what, double sigmaMin)
        : Error(what), sigma_min(sigmaMin) {}
    double sigma_min;
};

struct IllConditioned : Error {
    using Error::Error;
};

struct AssumptionViolated : Error {
    AssumptionViolated(const std::string& what, char assumption, int mode)
        : Error(what), which(assumption), mode_index(mode) {}
    char which;      // 'A' dims / '1' stabilizability / '2' feedthrough
    int mode_index;  // 1-based
};

struct DomainError : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct IllPosedLoop : Error {
    using Error::Error;
};

struct NoConvergence : Error {
    using Error::Error;
};

struct NonFiniteState : Error {
    NonFiniteState(const std::string& what, double t) : Error(what), time(t) {}
    double time;
};

struct InvalidTimes : Error {
    using Error::Error;
};

struct ZeroDisturbance : Error {
    using Error::Error;
};

struct UnknownId : Error {
    using Error::Error;
};

}  // namespace satsw
