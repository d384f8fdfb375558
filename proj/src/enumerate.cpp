/*
 * (C) Copyright 2026 the overlapix authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "overlapix/enumerate.hpp"

#include <algorithm>

#include "overlapix/error.hpp"

namespace overlapix {

namespace {

struct DfsState {
  const EncodedSynthesis& encoded;
  const EnumerationConfig& config;
  std::vector<CombinationReport>& out;
  std::size_t budget_tick = 0;

  void check_deadline() {
    if (++budget_tick % 1024 == 0 && config.deadline.expired())
      throw_error(ErrorKind::TimeBudget, "enumeration exceeded the time budget");
  }

  // shared[k] / covered[k] are the running AND / OR vectors of the members
  // chosen so far; `last` is the highest member index.
  void extend(StudySubset& members, std::uint64_t pooled,
              std::vector<BitVec>& shared, std::vector<BitVec>& covered,
              std::size_t last) {
    std::size_t n = encoded.study_count();
    std::size_t nk = encoded.characteristic_count();
    for (std::size_t j = last + 1; j < n; ++j) {
      check_deadline();

      std::vector<BitVec> next_shared(nk), next_covered(nk);
      bool dead = false;
      for (std::size_t k = 0; k < nk; ++k) {
        next_shared[k] = shared[k] & encoded.coverage[k][j];
        if (next_shared[k].none()) {
          dead = true;
          break;
        }
        next_covered[k] = covered[k] | encoded.coverage[k][j];
      }
      if (dead) continue; // zero on one characteristic kills every superset

      members.mask.set(j);
      std::uint64_t next_pooled = pooled + encoded.sample_sizes[j];

      Rational value(1);
      std::vector<Rational> per_k;
      per_k.reserve(nk);
      for (std::size_t k = 0; k < nk; ++k) {
        Rational r = make_rational(static_cast<std::int64_t>(next_shared[k].count()),
                                   static_cast<std::int64_t>(next_covered[k].count()));
        if (r < value) value = r;
        per_k.push_back(std::move(r));
      }

      // potential only shrinks as the subset grows, so a value at or below
      // the threshold rules out this branch as well
      if (value > config.min_potential) {
        if (members.size() >= 2) {
          CombinationReport report;
          report.subset = members;
          report.per_characteristic = per_k;
          report.overall = value;
          report.pooled_size_naive = next_pooled;
          out.push_back(std::move(report));
        }
        if (!config.max_subset_size || members.size() < *config.max_subset_size)
          extend(members, next_pooled, next_shared, next_covered, j);
      }

      members.mask.reset(j);
    }
  }
};

bool report_order(const CombinationReport& a, const CombinationReport& b) {
  if (a.overall != b.overall) return a.overall > b.overall;
  if (a.subset.size() != b.subset.size()) return a.subset.size() < b.subset.size();
  return a.subset < b.subset;
}

} // namespace

EnumerationResult enumerate_potentials(const EncodedSynthesis& encoded,
                                       const EnumerationConfig& config) {
  std::size_t n = encoded.study_count();
  if (n < 2)
    throw_error(ErrorKind::Schema, "enumeration needs at least 2 studies");
  if (n > kMaxStudies)
    throw_error(ErrorKind::Capacity,
                "instance has " + std::to_string(n) + " studies; the subset mask "
                "supports at most " + std::to_string(kMaxStudies));
  if (config.min_potential < 0 || config.min_potential > 1)
    throw_error(ErrorKind::Config, "min potential must lie in [0,1]");
  if (config.top_k && *config.top_k < 1)
    throw_error(ErrorKind::Config, "top-k must be >= 1");

  std::size_t nk = encoded.characteristic_count();

  // one root branch per smallest member; workers never share results
  std::vector<std::vector<CombinationReport>> per_root(n);
  parallel_for_index(n, config.threads, [&](std::size_t root) {
    DfsState state{encoded, config, per_root[root]};
    StudySubset members(n);
    members.mask.set(root);
    std::vector<BitVec> shared(nk), covered(nk);
    for (std::size_t k = 0; k < nk; ++k) {
      shared[k] = encoded.coverage[k][root];
      covered[k] = encoded.coverage[k][root];
    }
    state.extend(members, encoded.sample_sizes[root], shared, covered, root);
  });

  EnumerationResult result;
  for (auto& chunk : per_root)
    for (auto& r : chunk) result.reports.push_back(std::move(r));
  std::sort(result.reports.begin(), result.reports.end(), report_order);

  result.total_found = result.reports.size();
  if (config.top_k && result.reports.size() > *config.top_k) {
    result.reports.resize(*config.top_k);
    result.truncated = true;
  }
  return result;
}

ExclusionGraph exclusion_graph(const EncodedSynthesis& encoded) {
  std::size_t n = encoded.study_count();
  ExclusionGraph graph;
  graph.n = n;
  graph.adjacency.assign(n, BitVec(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      bool excluded = false;
      for (std::size_t k = 0; k < encoded.characteristic_count() && !excluded; ++k)
        excluded = !encoded.coverage[k][i].intersects(encoded.coverage[k][j]);
      if (excluded) {
        graph.adjacency[i].set(j);
        graph.adjacency[j].set(i);
      }
    }
  }
  return graph;
}

namespace {

struct CliqueCollector {
  const ExclusionGraph& graph;
  const Deadline& deadline;
  std::vector<StudySubset>& out;
  std::size_t tick = 0;

  void expand(BitVec& chosen, BitVec candidates, BitVec excluded) {
    if (++tick % 256 == 0 && deadline.expired())
      throw_error(ErrorKind::TimeBudget,
                  "maximal-clique enumeration exceeded the time budget");

    if (candidates.none() && excluded.none()) {
      StudySubset member(graph.n);
      member.mask = chosen;
      out.push_back(std::move(member));
      return;
    }

    // pivot: the candidate-or-excluded vertex covering most candidates
    std::size_t pivot = 0;
    std::size_t best_cover = 0;
    bool have_pivot = false;
    auto consider = [&](std::size_t u) {
      std::size_t cover = (candidates & graph.adjacency[u]).count();
      if (!have_pivot || cover > best_cover) {
        pivot = u;
        best_cover = cover;
        have_pivot = true;
      }
    };
    candidates.for_each_set(consider);
    excluded.for_each_set(consider);

    BitVec frontier = candidates;
    if (have_pivot) {
      // skip candidates the pivot already covers
      BitVec skip = graph.adjacency[pivot];
      BitVec reduced(graph.n);
      frontier.for_each_set([&](std::size_t v) {
        if (!skip.test(v)) reduced.set(v);
      });
      frontier = reduced;
    }

    frontier.for_each_set([&](std::size_t v) {
      chosen.set(v);
      expand(chosen, candidates & graph.adjacency[v], excluded & graph.adjacency[v]);
      chosen.reset(v);
      candidates.reset(v);
      excluded.set(v);
    });
  }
};

} // namespace

OverlapFreeFamily overlap_free_b2(const EncodedSynthesis& encoded,
                                  const Deadline& deadline) {
  std::size_t n = encoded.study_count();
  if (n == 0)
    throw_error(ErrorKind::Schema, "no studies");
  if (n > kMaxStudies)
    throw_error(ErrorKind::Capacity,
                "instance has " + std::to_string(n) + " studies; the subset mask "
                "supports at most " + std::to_string(kMaxStudies));

  ExclusionGraph graph = exclusion_graph(encoded);

  OverlapFreeFamily family;
  BitVec chosen(n);
  BitVec candidates = BitVec::all_ones(n);
  BitVec excluded(n);
  CliqueCollector collector{graph, deadline, family.b2_members};
  collector.expand(chosen, candidates, excluded);

  // largest pooled size first; mask as the stable tie-break
  auto pooled_of = [&](const StudySubset& s) {
    std::uint64_t total = 0;
    s.mask.for_each_set([&](std::size_t i) { total += encoded.sample_sizes[i]; });
    return total;
  };
  std::sort(family.b2_members.begin(), family.b2_members.end(),
            [&](const StudySubset& a, const StudySubset& b) {
              std::uint64_t pa = pooled_of(a), pb = pooled_of(b);
              if (pa != pb) return pa > pb;
              return a < b;
            });
  family.provenance = "maximal cliques of the pairwise exclusion graph";
  return family;
}

const char* selection_criterion_name(SelectionCriterion c) {
  switch (c) {
    case SelectionCriterion::MaxPooledSampleSize: return "max-pooled-sample-size";
    case SelectionCriterion::MaxStudyCount: return "max-study-count";
    case SelectionCriterion::MaxInverseVarianceWeight:
      return "max-total-inverse-variance-weight";
    case SelectionCriterion::Composite: return "composite";
  }
  return "unknown";
}

SelectionCriterion parse_selection_criterion(const std::string& text) {
  if (text == "max-pooled-sample-size") return SelectionCriterion::MaxPooledSampleSize;
  if (text == "max-study-count") return SelectionCriterion::MaxStudyCount;
  if (text == "max-total-inverse-variance-weight")
    return SelectionCriterion::MaxInverseVarianceWeight;
  if (text == "composite") return SelectionCriterion::Composite;
  throw_error(ErrorKind::Config, "unknown selection criterion '" + text + "'");
}

SelectionResult select_best(const OverlapFreeFamily& family,
                            const std::vector<StudyEnvelope>& envelopes,
                            SelectionCriterion criterion) {
  if (family.b2_members.empty())
    throw_error(ErrorKind::Schema, "overlap-free family is empty");

  if (criterion == SelectionCriterion::MaxInverseVarianceWeight) {
    std::vector<std::string> missing;
    for (const auto& member : family.b2_members)
      member.mask.for_each_set([&](std::size_t i) {
        if (!envelopes[i].effect) {
          const std::string& id = envelopes[i].study_id;
          if (std::find(missing.begin(), missing.end(), id) == missing.end())
            missing.push_back(id);
        }
      });
    if (!missing.empty()) {
      std::string joined;
      for (const auto& id : missing) joined += (joined.empty() ? "" : ", ") + id;
      throw_error(ErrorKind::Criterion,
                  "inverse-variance selection needs effect standard errors; "
                  "missing for: " + joined);
    }
  }

  auto pooled_of = [&](const StudySubset& s) {
    std::uint64_t total = 0;
    s.mask.for_each_set([&](std::size_t i) { total += envelopes[i].sample_size; });
    return total;
  };
  auto weight_of = [&](const StudySubset& s) {
    double total = 0.0;
    s.mask.for_each_set([&](std::size_t i) {
      double se = envelopes[i].effect->standard_error;
      total += 1.0 / (se * se);
    });
    return total;
  };

  // returns true when a scores strictly better than b
  auto better = [&](const StudySubset& a, const StudySubset& b) {
    switch (criterion) {
      case SelectionCriterion::MaxPooledSampleSize:
        return pooled_of(a) > pooled_of(b);
      case SelectionCriterion::MaxStudyCount:
        return a.size() > b.size();
      case SelectionCriterion::MaxInverseVarianceWeight:
        return weight_of(a) > weight_of(b);
      case SelectionCriterion::Composite: {
        if (a.size() != b.size()) return a.size() > b.size();
        return pooled_of(a) > pooled_of(b);
      }
    }
    return false;
  };

  const StudySubset* best = &family.b2_members.front();
  for (const auto& member : family.b2_members)
    if (better(member, *best)) best = &member;

  SelectionResult result;
  result.criterion = criterion;
  for (const auto& member : family.b2_members)
    if (!better(*best, member) && !better(member, *best)) result.ties.push_back(member);
  std::sort(result.ties.begin(), result.ties.end());
  result.best = result.ties.front(); // deterministic: smallest mask among ties
  result.tied = result.ties.size() > 1;
  result.pooled_size = pooled_of(result.best);
  result.study_count = result.best.size();
  if (criterion == SelectionCriterion::MaxInverseVarianceWeight)
    result.inverse_variance_weight = weight_of(result.best);
  return result;
}

} // namespace overlapix
