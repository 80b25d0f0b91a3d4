// Typed error hierarchy shared by all components.
#pragma once

#include <stdexcept>
#include <string>

namespace plr {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ZeroVectorError : Error {
    using Error::Error;
};

struct NonPositiveTemperatureError : Error {
    using Error::Error;
};

struct DimensionMismatchError : Error {
    using Error::Error;
};

struct LengthMismatchError : Error {
    using Error::Error;
};

struct IndexOutOfRangeError : Error {
    using Error::Error;
};

struct TooFewSeedsError : Error {
    using Error::Error;
};

struct HeterogeneousHeadsError : Error {
    using Error::Error;
};

struct UninitializedPrototypesError : Error {
    using Error::Error;
};

struct InvalidDistributionError : Error {
    using Error::Error;
};

// Carries the offending field name in the message.
struct InvalidConfigError : Error {
    using Error::Error;
};

}  // namespace plr
