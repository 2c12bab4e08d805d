#pragma once

#include <stdexcept>
#include <string>

namespace ccm {

// Bad or inconsistent input data (files, configs, dimension mismatches).
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Misuse of the command-line surface (unknown flag, missing argument).
class UsageError : public std::runtime_error {
public:
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace ccm
