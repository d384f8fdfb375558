/*
 * (C) Copyright 2026 the overlapix authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "overlapix/bound.hpp"

#include "overlapix/error.hpp"
#include "overlapix/potential.hpp"

namespace overlapix {

std::uint64_t naive_pooled_size(const std::vector<StudyEnvelope>& envelopes) {
  std::uint64_t total = 0;
  for (const auto& env : envelopes) total += env.sample_size;
  return total;
}

BoundReport lower_bound_proxy_from_pairs(
    const std::vector<std::uint64_t>& sample_sizes,
    const std::vector<std::vector<Rational>>& pair_values) {
  std::size_t n = sample_sizes.size();

  BoundReport report;
  for (auto s : sample_sizes) report.naive_total += s;
  report.lower_bound_proxy = Rational(static_cast<std::int64_t>(report.naive_total));

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Rational& p = pair_values[i][j];
      Rational pair_sum(static_cast<std::int64_t>(sample_sizes[i] + sample_sizes[j]));
      Rational raw = p / (1 + p) * pair_sum;
      Rational cap(static_cast<std::int64_t>(std::min(sample_sizes[i], sample_sizes[j])));

      PairDeduction d;
      d.study_a = i;
      d.study_b = j;
      d.pair_potential = p;
      if (raw > cap) {
        d.deduction = cap;
        d.capped = true;
      } else {
        d.deduction = raw;
      }
      report.lower_bound_proxy -= d.deduction;
      report.pairwise_deductions.push_back(std::move(d));
    }
  }
  return report;
}

BoundReport lower_bound_proxy(const EncodedSynthesis& encoded) {
  if (encoded.study_count() < 1)
    throw_error(ErrorKind::Schema, "no studies");
  if (encoded.study_count() == 1) {
    BoundReport report;
    report.naive_total = encoded.sample_sizes[0];
    report.lower_bound_proxy = Rational(static_cast<std::int64_t>(report.naive_total));
    return report;
  }
  return lower_bound_proxy_from_pairs(encoded.sample_sizes, pairwise_matrix(encoded));
}

} // namespace overlapix
