/*
 * (C) Copyright 2026 the overlapix authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>

namespace overlapix {

/// Wall-clock budget for the exponential-worst-case operations. Unset means
/// unlimited. Checked coarsely inside long loops.
class Deadline {
public:
  Deadline() = default;
  static Deadline after_seconds(double secs) {
    Deadline d;
    d.at_ = std::chrono::steady_clock::now() +
            std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                std::chrono::duration<double>(secs));
    return d;
  }

  bool expired() const {
    return at_ && std::chrono::steady_clock::now() > *at_;
  }
  bool is_set() const { return at_.has_value(); }

private:
  std::optional<std::chrono::steady_clock::time_point> at_;
};

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Work is handed out
/// by index, so writers that target slot i of a preallocated buffer produce
/// output independent of the worker count. Exceptions propagate to the
/// caller.
void parallel_for_index(std::size_t n, unsigned threads,
                        const std::function<void(std::size_t)>& fn);

} // namespace overlapix
