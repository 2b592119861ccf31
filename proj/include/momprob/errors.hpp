#pragma once

#include <stdexcept>
#include <string>

namespace momprob {

// Instance would require more work than the configured resource cap allows
// (enumeration cap, LP size cap). Never silently truncates.
class CapExceeded : public std::runtime_error {
 public:
  explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file; `path` points at the offending JSON location.
class FormatError : public std::runtime_error {
 public:
  FormatError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Objective present and unbounded below over the feasible region.
class UnboundedError : public std::runtime_error {
 public:
  explicit UnboundedError(const std::string& what) : std::runtime_error(what) {}
};

// Pivot-count ceiling reached; converts pathological inputs into an error
// instead of a hang.
class PivotLimitError : public std::runtime_error {
 public:
  explicit PivotLimitError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace momprob
