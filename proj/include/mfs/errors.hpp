#pragma once

#include <stdexcept>
#include <string>

namespace mfs {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input: config syntax, schema, or an invalid IFS description.
class ParseError : public Error {
public:
    using Error::Error;
};

// An enumeration would exceed its configured word/class budget.
class BudgetError : public Error {
public:
    using Error::Error;
};

// A quantity that a theorem guarantees was observed to fail. Always a bug.
class CorrectnessAlarm : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class FieldMismatch : public Error {
public:
    using Error::Error;
};

class InconsistencyError : public Error {
public:
    using Error::Error;
};

}  // namespace mfs
