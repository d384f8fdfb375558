/*
 * (C) Copyright 2026 the overlapix authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "overlapix/bitset.hpp"
#include "overlapix/model.hpp"
#include "overlapix/rational.hpp"

namespace overlapix {

/// Hard cap on the number of studies a subset mask may address.
inline constexpr std::size_t kMaxStudies = 4096;

/// A set of studies, addressed by index into an EncodedSynthesis.
struct StudySubset {
  BitVec mask;

  StudySubset() = default;
  explicit StudySubset(std::size_t n_studies) : mask(n_studies) {}

  static StudySubset of(std::size_t n_studies, std::initializer_list<std::size_t> idx) {
    StudySubset s(n_studies);
    for (auto i : idx) s.mask.set(i);
    return s;
  }
  static StudySubset from_indices(std::size_t n_studies,
                                  const std::vector<std::size_t>& idx) {
    StudySubset s(n_studies);
    for (auto i : idx) s.mask.set(i);
    return s;
  }

  std::size_t size() const { return mask.count(); }
  bool contains(std::size_t i) const { return mask.test(i); }
  std::vector<std::size_t> members() const { return mask.set_bits(); }

  friend bool operator==(const StudySubset& a, const StudySubset& b) {
    return a.mask == b.mask;
  }
  friend bool operator<(const StudySubset& a, const StudySubset& b) {
    return a.mask < b.mask;
  }
};

/// Per-subset result: per-characteristic shared/union bin ratios, their
/// minimum, and the plain (overlap-ignoring) sum of member sample sizes.
struct CombinationReport {
  StudySubset subset;
  std::vector<Rational> per_characteristic;
  Rational overall;
  std::uint64_t pooled_size_naive = 0;
};

/// Shared-bin over union-bin ratio of one characteristic for this subset;
/// 0 by convention for subsets of fewer than two studies.
Rational per_characteristic_potential(const EncodedSynthesis& encoded,
                                      const StudySubset& subset, std::size_t k);

CombinationReport potential(const EncodedSynthesis& encoded, const StudySubset& subset);

/// Symmetric matrix of pairwise potentials; diagonal 0 by convention.
/// `threads` only affects wall time, never the result.
std::vector<std::vector<Rational>> pairwise_matrix(const EncodedSynthesis& encoded,
                                                   unsigned threads = 1);

} // namespace overlapix
