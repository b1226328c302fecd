#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bosg {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define BOSG_DEFINE_ERROR(Name)            \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

// Graph
BOSG_DEFINE_ERROR(UnknownNode);
BOSG_DEFINE_ERROR(UnknownEdge);
BOSG_DEFINE_ERROR(DuplicateEdge);
BOSG_DEFINE_ERROR(InvariantViolation);
BOSG_DEFINE_ERROR(EmptyGraph);

// World
BOSG_DEFINE_ERROR(ScenarioError);
BOSG_DEFINE_ERROR(NoStartCell);
BOSG_DEFINE_ERROR(MultipleStartCells);
BOSG_DEFINE_ERROR(ObjectOnWall);
BOSG_DEFINE_ERROR(UnknownObject);
BOSG_DEFINE_ERROR(NotADoor);

// Planning
BOSG_DEFINE_ERROR(NoPath);

// Execution
BOSG_DEFINE_ERROR(WrongBehavior);
BOSG_DEFINE_ERROR(NotAtSource);
BOSG_DEFINE_ERROR(TooFarFromDoor);
BOSG_DEFINE_ERROR(DoorMissing);
BOSG_DEFINE_ERROR(StalePlan);

// Mission
BOSG_DEFINE_ERROR(LogWriteError);
BOSG_DEFINE_ERROR(BindError);

#undef BOSG_DEFINE_ERROR

/// Malformed scenario text; `line` is 1-based.
class ParseError : public ScenarioError {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : ScenarioError("line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Unreadable event log; `line` is 1-based.
class CorruptLog : public Error {
 public:
  CorruptLog(std::size_t line, const std::string& reason)
      : Error("corrupt log at line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace bosg
