/*
 * (C) Copyright 2026 the overlapix authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "overlapix/model.hpp"
#include "overlapix/potential.hpp"
#include "overlapix/rational.hpp"
#include "overlapix/runtime.hpp"

namespace overlapix {

/// One individual observation event with its true characteristic values,
/// generated directly at atom resolution.
struct LatentRecord {
  std::uint64_t event_id = 0;
  std::vector<std::string> values; // aligned with SyntheticSynthesis::specs
};

/// Individual-level dataset with known study memberships. Studies index
/// into `records`; the derived envelopes are what the study would report.
struct SyntheticSynthesis {
  std::vector<CharacteristicSpec> specs;
  std::vector<CharacteristicDomain> domains; // the latent atom universes
  std::vector<LatentRecord> records;
  std::vector<std::string> study_ids;
  std::vector<std::vector<std::size_t>> memberships; // sorted record indices
  std::vector<StudyEnvelope> envelopes;              // derived, one per study
  bool overlap_realized = false;

  std::size_t study_count() const { return study_ids.size(); }
};

struct LatentCharacteristicConfig {
  std::string id;
  DomainKind kind = DomainKind::Categorical;
  OrderKey order = OrderKey::Lexicographic;
  std::vector<std::string> atoms; // explicit universe; or generated when empty
  std::size_t atom_count = 0;     // used when atoms is empty
};

struct GenerationConfig {
  std::size_t study_count = 4;
  std::size_t collective_size = 20;
  std::size_t study_size_min = 2;
  std::size_t study_size_max = 6;
  std::vector<LatentCharacteristicConfig> characteristics;
  double overlap_intensity = 0.3; // chance a draw reuses an already-included event
  double envelope_padding = 0.0;  // widen derived envelopes by this fraction of bins
  double distortion = 0.0;        // chance a recorded value moves to another atom
  std::uint64_t seed = 1;
};

/// Deterministic under seed on every platform: the generator is mt19937_64
/// with plain modulo reduction, no std distributions.
SyntheticSynthesis generate(const GenerationConfig& config);

/// Tightest reported ranges covering the (possibly distorted) recorded
/// member values; ordered kinds report the contiguous span.
std::vector<StudyEnvelope> derive_envelopes(const SyntheticSynthesis& synthesis);

struct OverlapTruth {
  std::vector<std::size_t> overlap_records; // sorted record indices of O(A)
  std::uint64_t union_count = 0;
  int f1 = 0;            // overlap exists
  std::uint64_t f2 = 0;  // |O(A)|
  Rational f3;           // proportion of overlap
  double f4 = 0.0;       // |O(A)| / geometric mean of member sizes
};

OverlapTruth true_overlap(const SyntheticSynthesis& synthesis, const StudySubset& subset);

std::uint64_t union_size(const SyntheticSynthesis& synthesis, const StudySubset& subset);

struct InclusionExclusionReport {
  std::uint64_t union_size = 0;
  std::int64_t alternating_sum = 0;  // over every non-empty subset
  bool identity_holds = false;
  std::int64_t pairwise_truncation = 0; // sum of sizes minus pairwise intersections
  bool pairwise_bound_holds = false;    // pairwise_truncation <= union_size
  bool proportion_form_matches = false; // p/(1+p)*(n_i+n_j) equals |S_i n S_j| per pair
};

/// Term-by-term verification of the union-size identity and its pairwise
/// truncation on one synthesis. Exponential in the study count.
InclusionExclusionReport inclusion_exclusion_check(const SyntheticSynthesis& synthesis);

struct SweepConfig {
  GenerationConfig base;            // seed is the base; instance i uses seed+i
  std::size_t instances = 100;
  std::size_t max_subset_size = 6;
  unsigned threads = 1;
  Deadline deadline;
};

struct SoundnessViolation {
  std::size_t instance_index = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> subset; // member indices
  SyntheticSynthesis synthesis;    // serialize for replay
};

struct SweepReport {
  std::size_t instances = 0;
  std::uint64_t subsets_checked = 0;
  std::uint64_t exclusions_confirmed = 0; // potential 0 and true overlap 0
  std::uint64_t false_alarms = 0;         // potential > 0 but true overlap 0
  std::uint64_t non_bound_events = 0;     // potential below the true proportion
  std::vector<SoundnessViolation> violations; // potential 0 with true overlap > 0
};

/// Exclusion-soundness sweep: derived envelopes, singleton bins, every
/// subset up to the size cap. Any violation is a generator or encoder bug
/// unless distortion was requested.
SweepReport soundness_sweep(const SweepConfig& config);

} // namespace overlapix
