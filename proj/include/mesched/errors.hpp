#pragma once

#include <stdexcept>
#include <string>

namespace mesched {

// A selection or cluster schedule is missing a carrier or has the wrong shape.
struct MalformedSelection : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A requested dispatch violates a unit constraint (gas rate, power rating, SoC bound).
struct InfeasibleDispatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A negotiation message failed validation; it is dropped, not fatal.
struct MalformedMessage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scenario file or preset violates the schema or an invariant.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A metric has no defined value for the given inputs (e.g. zero target norm).
struct MetricUndefined : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The brute-force enumeration space exceeds the configured limit.
struct OracleTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mesched
