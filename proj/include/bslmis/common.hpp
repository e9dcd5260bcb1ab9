#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bslmis {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Error kinds. Every failure raised by the library derives from Error so the
// CLI can report a machine-readable kind next to the message.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain", what) {}
};

class FactorizationError : public Error {
 public:
  explicit FactorizationError(const std::string& what)
      : Error("factorization", what) {}
};

class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, Vector theta, std::size_t m)
      : Error("singularity", what), theta_(std::move(theta)), m_(m) {}
  const Vector& theta() const noexcept { return theta_; }
  std::size_t m() const noexcept { return m_; }

 private:
  Vector theta_;
  std::size_t m_;
};

class DegenerateSummaryError : public Error {
 public:
  explicit DegenerateSummaryError(const std::string& what)
      : Error("degenerate-summary", what) {}
};

class DegeneratePosteriorError : public Error {
 public:
  explicit DegeneratePosteriorError(const std::string& what)
      : Error("degenerate-posterior", what) {}
};

class NotAMaxError : public Error {
 public:
  explicit NotAMaxError(const std::string& what) : Error("not-a-max", what) {}
};

class InsufficientResolutionError : public Error {
 public:
  explicit InsufficientResolutionError(const std::string& what)
      : Error("insufficient-resolution", what) {}
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string key)
      : Error("config", what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("parse", what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A labelled summary-statistic vector S_n(y).
struct SummaryVec {
  Vector values;
  std::vector<std::string> labels;

  std::size_t dim() const { return static_cast<std::size_t>(values.size()); }
};

}  // namespace bslmis
