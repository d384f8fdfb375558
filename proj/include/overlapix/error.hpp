/*
 * (C) Copyright 2026 the overlapix authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace overlapix {

/// Broad failure classes. The CLI maps these onto exit codes, the C API
/// onto status values.
enum class ErrorKind {
  Schema,     // inconsistent or malformed input structure
  Format,     // unparseable values, unknown order keys, bad syntax
  Partition,  // bins overlap, fail to cover, or break contiguity
  Config,     // infeasible or out-of-range configuration
  Capacity,   // instance exceeds a hard implementation limit
  Criterion,  // selection criterion cannot be evaluated on this input
  TimeBudget, // configured time budget exceeded
  Io,         // file system failure
  Internal,   // broken invariant; always a bug
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

inline const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Format: return "format";
    case ErrorKind::Partition: return "partition";
    case ErrorKind::Config: return "config";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::Criterion: return "criterion";
    case ErrorKind::TimeBudget: return "time-budget";
    case ErrorKind::Io: return "io";
    case ErrorKind::Internal: return "internal";
  }
  return "unknown";
}

[[noreturn]] inline void throw_error(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

} // namespace overlapix
