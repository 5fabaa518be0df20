#pragma once

#include <stdexcept>
#include <string>

namespace gf {

struct InvalidCoefficient : std::runtime_error {
  explicit InvalidCoefficient(const std::string& what) : std::runtime_error(what) {}
};

struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

struct GridMismatch : std::runtime_error {
  explicit GridMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct NoConvergence : std::runtime_error {
  explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

struct BlowUp : std::runtime_error {
  explicit BlowUp(const std::string& what) : std::runtime_error(what) {}
};

struct TailOverflow : std::runtime_error {
  explicit TailOverflow(const std::string& what) : std::runtime_error(what) {}
};

struct UnsupportedKernel : std::runtime_error {
  explicit UnsupportedKernel(const std::string& what) : std::runtime_error(what) {}
};

struct NonPositiveData : std::runtime_error {
  explicit NonPositiveData(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gf
