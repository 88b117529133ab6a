#pragma once

#include <stdexcept>
#include <string>

namespace capdiff {

// Violated precondition on an argument (bad probability, k = 0, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed set spec, config document or CLI input.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The request is well formed but exceeds an engine bound
// (oversized enumeration, schedule queried outside its table, k too large).
class CapabilityRefused : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace capdiff
