/*
 * (C) Copyright 2026 the overlapix authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "overlapix/potential.hpp"

#include "overlapix/error.hpp"
#include "overlapix/runtime.hpp"

namespace overlapix {

namespace {

// Numerator = bins covered by every member, denominator = bins covered by
// at least one member.
Rational ratio_for(const std::vector<BitVec>& vectors, const BitVec& member_mask) {
  BitVec shared;
  BitVec covered;
  bool first = true;
  member_mask.for_each_set([&](std::size_t i) {
    if (first) {
      shared = vectors[i];
      covered = vectors[i];
      first = false;
    } else {
      shared &= vectors[i];
      covered |= vectors[i];
    }
  });
  std::size_t num = shared.count();
  std::size_t den = covered.count();
  if (den == 0)
    throw_error(ErrorKind::Internal, "study covers no bin of some characteristic");
  return make_rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

} // namespace

Rational per_characteristic_potential(const EncodedSynthesis& encoded,
                                      const StudySubset& subset, std::size_t k) {
  if (encoded.characteristic_count() == 0)
    throw_error(ErrorKind::Schema, "encoded synthesis has no characteristics");
  if (k >= encoded.characteristic_count())
    throw_error(ErrorKind::Internal, "characteristic index out of range");
  if (subset.size() < 2) return Rational(0);
  return ratio_for(encoded.coverage[k], subset.mask);
}

CombinationReport potential(const EncodedSynthesis& encoded, const StudySubset& subset) {
  if (encoded.characteristic_count() == 0)
    throw_error(ErrorKind::Schema, "encoded synthesis has no characteristics");

  CombinationReport report;
  report.subset = subset;
  subset.mask.for_each_set(
      [&](std::size_t i) { report.pooled_size_naive += encoded.sample_sizes[i]; });

  if (subset.size() < 2) {
    report.per_characteristic.assign(encoded.characteristic_count(), Rational(0));
    report.overall = Rational(0);
    return report;
  }

  report.overall = Rational(1);
  for (std::size_t k = 0; k < encoded.characteristic_count(); ++k) {
    Rational r = ratio_for(encoded.coverage[k], subset.mask);
    if (r < report.overall) report.overall = r;
    report.per_characteristic.push_back(std::move(r));
  }
  return report;
}

std::vector<std::vector<Rational>> pairwise_matrix(const EncodedSynthesis& encoded,
                                                   unsigned threads) {
  std::size_t n = encoded.study_count();
  if (n < 2)
    throw_error(ErrorKind::Schema, "pairwise matrix needs at least 2 studies");

  std::vector<std::vector<Rational>> matrix(n, std::vector<Rational>(n, Rational(0)));
  parallel_for_index(n, threads, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      StudySubset pair(n);
      pair.mask.set(i);
      pair.mask.set(j);
      Rational value = potential(encoded, pair).overall;
      matrix[i][j] = value;
      matrix[j][i] = value;
    }
  });
  return matrix;
}

} // namespace overlapix
