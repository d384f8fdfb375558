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

#include "overlapix/model.hpp"
#include "overlapix/rational.hpp"

namespace overlapix {

struct PairDeduction {
  std::size_t study_a = 0; // indices, a < b
  std::size_t study_b = 0;
  Rational pair_potential;
  Rational deduction; // min(p/(1+p) * (n_a+n_b), min(n_a,n_b))
  bool capped = false; // the smaller sample size was the binding term
};

/// Naive pooled size minus capped pairwise deductions. The proxy is not
/// clamped: on densely overlapping instances it can drop below the best
/// overlap-free pooled size, or below zero, and is reported as-is.
struct BoundReport {
  std::uint64_t naive_total = 0;
  std::vector<PairDeduction> pairwise_deductions; // sorted pairs (a,b), a<b
  Rational lower_bound_proxy;
};

std::uint64_t naive_pooled_size(const std::vector<StudyEnvelope>& envelopes);

BoundReport lower_bound_proxy(const EncodedSynthesis& encoded);

/// Same formula with caller-supplied pairwise proportions; lets the oracle
/// feed true overlap proportions through the identical arithmetic.
BoundReport lower_bound_proxy_from_pairs(
    const std::vector<std::uint64_t>& sample_sizes,
    const std::vector<std::vector<Rational>>& pair_values);

} // namespace overlapix
