#pragma once

#include <stdexcept>
#include <string>

namespace rchaos {

/// Bad arguments: wrong tuple length, out-of-range index, mismatched
/// dimensions, malformed input files. Mapped to exit code 2 by the CLI.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Work refused because it would exceed a configured cap (typically the
/// exact-enumeration cap on the hypercube dimension). CLI exit code 3.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rchaos
