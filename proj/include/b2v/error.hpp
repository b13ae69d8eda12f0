#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace b2v {

enum class Errc {
  // input data problems
  MalformedFile,
  SyntaxError,
  DuplicateId,
  DanglingReference,
  InvalidPolygon,
  NoCellInRange,
  UnknownNode,
  EmptyTimeline,
  SliceOutOfRange,
  IsolatedNode,
  EmptyCorpus,
  AllZeroCounts,
  ZeroVector,
  NoLabeledExamples,
  FormatError,
  InvalidArgument,
  IoFailure,
  // bugs or numerical breakdown
  InvariantViolation,
};

std::string_view errc_name(Errc code) noexcept;

/// Every failure raised by the library. `line`/`column` are 1-based and only
/// set for positioned diagnostics (zero otherwise).
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);
  Error(Errc code, const std::string& message, std::size_t line, std::size_t column);

  Errc code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  /// The message without the category prefix and position suffix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
  std::size_t line_ = 0;
  std::size_t column_ = 0;
};

}  // namespace b2v
