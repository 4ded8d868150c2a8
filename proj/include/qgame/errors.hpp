#pragma once

#include <stdexcept>
#include <string>

namespace qgame {

/// Base of every error raised by the library. The CLI maps subclasses onto
/// exit codes, so new error kinds should derive from the closest category.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad rational literal, schema violation, unknown index.
class InputError : public Error {
public:
    using Error::Error;
};

class DomainMismatchError : public Error {
public:
    using Error::Error;
};

class InvalidGameError : public Error {
public:
    using Error::Error;
};

class UnvaluedConsequenceError : public Error {
public:
    using Error::Error;
};

/// A rewrite or derivation step was asked to run outside its hypotheses.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A checked rewrite produced a game whose canonical form differs from its
/// input. Never expected; raised instead of silently emitting a bad step.
class SoundnessError : public Error {
public:
    using Error::Error;
};

class EmptyGameError : public Error {
public:
    using Error::Error;
};

class SizeError : public Error {
public:
    using Error::Error;
};

class AxiomViolationError : public Error {
public:
    using Error::Error;
};

class OracleInconsistencyError : public Error {
public:
    using Error::Error;
};

/// Argument outside the range an operation is defined on, e.g. m > n.
class DomainError : public Error {
public:
    using Error::Error;
};

class DegenerateError : public Error {
public:
    using Error::Error;
};

}  // namespace qgame
