#pragma once

#include <stdexcept>
#include <string>

namespace martinet {

/// Invalid input: parameter outside its domain or an unusable configuration.
/// Maps to CLI exit code 2.
class domain_error : public std::invalid_argument {
public:
    explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Internal numeric failure: lost bracket, degeneracy, accuracy or truncation
/// target missed. Maps to CLI exit code 1.
class solver_error : public std::runtime_error {
public:
    explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace martinet
