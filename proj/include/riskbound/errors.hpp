#pragma once

#include <stdexcept>
#include <string>

namespace riskbound {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value violates a documented invariant (probabilities, ranges, shapes).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class InvalidEnvelope : public Error {
public:
    using Error::Error;
};

/// A quantile bound whose defining set is empty for some level.
class UndefinedBound : public Error {
public:
    using Error::Error;
};

class ImpossibleObservation : public Error {
public:
    using Error::Error;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class DegenerateWeights : public Error {
public:
    using Error::Error;
};

class UnsupportedBelief : public Error {
public:
    using Error::Error;
};

/// The guard of a bound formula does not hold for the estimated quantities.
class InapplicableCase : public Error {
public:
    using Error::Error;
};

class UnknownScenario : public Error {
public:
    using Error::Error;
};

} // namespace riskbound
