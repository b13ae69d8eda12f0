#include "b2v/error.hpp"

namespace b2v {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedFile: return "MalformedFile";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::DanglingReference: return "DanglingReference";
    case Errc::InvalidPolygon: return "InvalidPolygon";
    case Errc::NoCellInRange: return "NoCellInRange";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::EmptyTimeline: return "EmptyTimeline";
    case Errc::SliceOutOfRange: return "SliceOutOfRange";
    case Errc::IsolatedNode: return "IsolatedNode";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::AllZeroCounts: return "AllZeroCounts";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::NoLabeledExamples: return "NoLabeledExamples";
    case Errc::FormatError: return "FormatError";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::IoFailure: return "IoFailure";
    case Errc::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

namespace {

std::string decorate(Errc code, const std::string& message) {
  return std::string(errc_name(code)) + ": " + message;
}

}  // namespace

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(decorate(code, message)), code_(code), detail_(message) {}

Error::Error(Errc code, const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(decorate(code, message) + " at line " + std::to_string(line) +
                         ", column " + std::to_string(column)),
      code_(code),
      detail_(message),
      line_(line),
      column_(column) {}

}  // namespace b2v
