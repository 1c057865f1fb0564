#pragma once

#include <stdexcept>

namespace mixfactor {

// Error taxonomy mirrors the CLI exit codes: I/O failures (1), schema or
// contract violations (2), numeric failures such as non-finite data (3).

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mixfactor
