/*
 * (C) Copyright 2026 the overlapix authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "overlapix/model.hpp"
#include "overlapix/potential.hpp"
#include "overlapix/rational.hpp"
#include "overlapix/runtime.hpp"

namespace overlapix {

struct EnumerationConfig {
  Rational min_potential = Rational(0); // exclusive: report only values above it
  std::optional<std::size_t> top_k;
  std::optional<std::size_t> max_subset_size;
  unsigned threads = 1;
  Deadline deadline;
};

struct EnumerationResult {
  std::vector<CombinationReport> reports; // decreasing potential, then size, then mask
  bool truncated = false;                 // top_k dropped some qualifying subsets
  std::uint64_t total_found = 0;          // qualifying subsets before truncation
};

/// Node i and j are connected exactly when their pairwise potential is zero,
/// i.e. when combining them is provably overlap-free.
struct ExclusionGraph {
  std::size_t n = 0;
  std::vector<BitVec> adjacency;

  bool has_edge(std::size_t i, std::size_t j) const {
    return adjacency[i].test(j);
  }
};

/// The maximal overlap-free combinations (every pair inside each member is
/// an exclusion edge, and no member extends another).
struct OverlapFreeFamily {
  std::vector<StudySubset> b2_members;
  std::string provenance;
};

enum class SelectionCriterion {
  MaxPooledSampleSize, // default
  MaxStudyCount,
  MaxInverseVarianceWeight, // requires per-study effect standard errors
  Composite,                // study count, then pooled size
};

const char* selection_criterion_name(SelectionCriterion c);
SelectionCriterion parse_selection_criterion(const std::string& text);

struct SelectionResult {
  SelectionCriterion criterion = SelectionCriterion::MaxPooledSampleSize;
  StudySubset best;
  std::uint64_t pooled_size = 0;
  std::size_t study_count = 0;
  std::optional<double> inverse_variance_weight;
  std::vector<StudySubset> ties; // every candidate attaining the best score
  bool tied = false;
};

/// All subsets with potential above the threshold, found by depth-first
/// subset extension over the running per-characteristic shared/covered
/// vectors. A branch dies as soon as one characteristic loses its last
/// shared bin, which no superset can recover.
EnumerationResult enumerate_potentials(const EncodedSynthesis& encoded,
                                       const EnumerationConfig& config);

ExclusionGraph exclusion_graph(const EncodedSynthesis& encoded);

/// Maximal cliques of the exclusion graph, enumerated with pivoting.
OverlapFreeFamily overlap_free_b2(const EncodedSynthesis& encoded,
                                  const Deadline& deadline = {});

SelectionResult select_best(const OverlapFreeFamily& family,
                            const std::vector<StudyEnvelope>& envelopes,
                            SelectionCriterion criterion);

} // namespace overlapix
