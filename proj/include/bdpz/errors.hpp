#pragma once

#include <stdexcept>
#include <string>

namespace bdpz {

// Base for every error raised by the library. The CLI maps subclasses to
// exit codes (see tools/bdpz.cpp).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed model/weight documents, non-covering bands, bad arguments.
class SchemaError : public Error {
public:
    using Error::Error;
};

// The weight sequence does not certify a positive contraction rate.
class NotErgodicWithTheseWeights : public Error {
public:
    using Error::Error;
};

class NotAchievable : public Error {
public:
    using Error::Error;
};

class DecreasingQuotient : public Error {
public:
    using Error::Error;
};

// Solver failures.
class SolverError : public Error {
public:
    using Error::Error;
};

class StepTooLarge : public SolverError {
public:
    using SolverError::SolverError;
};

class MassDrift : public SolverError {
public:
    using SolverError::SolverError;
};

class NegativeProbability : public SolverError {
public:
    using SolverError::SolverError;
};

class NoConvergence : public SolverError {
public:
    using SolverError::SolverError;
};

}  // namespace bdpz
