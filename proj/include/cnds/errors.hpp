#pragma once

#include <stdexcept>
#include <string>

namespace cnds {

struct Diverged : std::runtime_error {
  explicit Diverged(const std::string& what) : std::runtime_error(what) {}
};

struct TooManyBoxes : std::runtime_error {
  explicit TooManyBoxes(const std::string& what) : std::runtime_error(what) {}
};

struct IncompatibleSampling : std::runtime_error {
  explicit IncompatibleSampling(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownName : std::runtime_error {
  explicit UnknownName(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateProbe : std::runtime_error {
  explicit DegenerateProbe(const std::string& what) : std::runtime_error(what) {}
};

struct FormatVersionMismatch : std::runtime_error {
  explicit FormatVersionMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct CorruptHeader : std::runtime_error {
  explicit CorruptHeader(const std::string& what) : std::runtime_error(what) {}
};

struct NotForwardInvariant : std::runtime_error {
  explicit NotForwardInvariant(const std::string& what) : std::runtime_error(what) {}
};

struct CycleInTransientSet : std::runtime_error {
  explicit CycleInTransientSet(const std::string& what) : std::runtime_error(what) {}
};

struct NotNested : std::runtime_error {
  explicit NotNested(const std::string& what) : std::runtime_error(what) {}
};

struct NotFound : std::runtime_error {
  explicit NotFound(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cnds
