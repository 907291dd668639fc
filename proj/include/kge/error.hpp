#pragma once

#include <stdexcept>
#include <string>

namespace kge {

// Malformed or inconsistent input data (files, records, checkpoints).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical failure during optimisation (non-finite loss or gradient).
class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace kge
