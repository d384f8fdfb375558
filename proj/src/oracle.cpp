/*
 * (C) Copyright 2026 the overlapix authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "overlapix/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <unordered_set>

#include "overlapix/error.hpp"

namespace overlapix {

namespace {

// Modulo reduction keeps the stream identical across standard libraries;
// the bias is irrelevant for test-data generation.
std::size_t uniform_below(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<CharacteristicDomain> domains_from_configs(
    const std::vector<LatentCharacteristicConfig>& configs) {
  if (configs.empty())
    throw_error(ErrorKind::Config, "generation needs at least one characteristic");
  std::vector<CharacteristicDomain> domains;
  for (const auto& c : configs) {
    CharacteristicDomain dom;
    dom.id = c.id;
    dom.kind = c.kind;
    dom.order = c.order;
    if (!c.atoms.empty()) {
      dom.atoms = c.atoms;
    } else {
      if (c.atom_count < 1)
        throw_error(ErrorKind::Config,
                    "characteristic '" + c.id + "' has no atoms and no atom count");
      for (std::size_t j = 0; j < c.atom_count; ++j) {
        if (c.kind == DomainKind::Ordered && c.order == OrderKey::Integer)
          dom.atoms.push_back(std::to_string(j));
        else
          dom.atoms.push_back(c.id + "_" + std::to_string(j));
      }
    }
    if (dom.kind == DomainKind::Ordered && dom.order != OrderKey::Lexicographic) {
      std::sort(dom.atoms.begin(), dom.atoms.end(),
                [&](const std::string& a, const std::string& b) {
                  return atom_less(dom.order, a, b);
                });
    } else if (dom.kind == DomainKind::Ordered) {
      std::sort(dom.atoms.begin(), dom.atoms.end());
    }
    domains.push_back(std::move(dom));
  }
  return domains;
}

bool any_pair_overlaps(const std::vector<std::vector<std::size_t>>& memberships) {
  for (std::size_t i = 0; i < memberships.size(); ++i)
    for (std::size_t j = i + 1; j < memberships.size(); ++j) {
      std::vector<std::size_t> common;
      std::set_intersection(memberships[i].begin(), memberships[i].end(),
                            memberships[j].begin(), memberships[j].end(),
                            std::back_inserter(common));
      if (!common.empty()) return true;
    }
  return false;
}

BitVec membership_bits(const SyntheticSynthesis& synthesis, std::size_t study) {
  BitVec bits(synthesis.records.size());
  for (auto r : synthesis.memberships[study]) bits.set(r);
  return bits;
}

} // namespace

SyntheticSynthesis generate(const GenerationConfig& config) {
  if (config.study_count < 1)
    throw_error(ErrorKind::Config, "study count must be >= 1");
  if (config.collective_size < 1)
    throw_error(ErrorKind::Config, "collective size must be >= 1");
  if (config.study_size_min < 1 || config.study_size_min > config.study_size_max)
    throw_error(ErrorKind::Config, "study size range is empty or starts at 0");
  if (config.study_size_max > config.collective_size)
    throw_error(ErrorKind::Config, "study size exceeds the collective size");
  for (double p : {config.overlap_intensity, config.envelope_padding, config.distortion})
    if (p < 0.0 || p > 1.0)
      throw_error(ErrorKind::Config, "probabilities must lie in [0,1]");

  SyntheticSynthesis synthesis;
  synthesis.domains = domains_from_configs(config.characteristics);
  for (const auto& dom : synthesis.domains) {
    CharacteristicSpec spec;
    spec.id = dom.id;
    spec.kind = dom.kind;
    spec.order = dom.order;
    synthesis.specs.push_back(std::move(spec));
  }

  std::mt19937_64 rng(config.seed);

  synthesis.records.reserve(config.collective_size);
  for (std::size_t u = 0; u < config.collective_size; ++u) {
    LatentRecord rec;
    rec.event_id = u;
    for (const auto& dom : synthesis.domains)
      rec.values.push_back(dom.atoms[uniform_below(rng, dom.atoms.size())]);
    synthesis.records.push_back(std::move(rec));
  }

  for (std::size_t i = 0; i < config.study_count; ++i)
    synthesis.study_ids.push_back("S" + std::to_string(i + 1));

  const int max_attempts = 64;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    synthesis.memberships.assign(config.study_count, {});
    std::vector<bool> used(config.collective_size, false); // member of any study so far

    for (std::size_t i = 0; i < config.study_count; ++i) {
      std::size_t span = config.study_size_max - config.study_size_min + 1;
      std::size_t size = config.study_size_min + uniform_below(rng, span);
      std::vector<bool> in_study(config.collective_size, false);

      for (std::size_t t = 0; t < size; ++t) {
        std::vector<std::size_t> pool;
        bool prefer_shared =
            config.overlap_intensity > 0.0 && uniform_unit(rng) < config.overlap_intensity;
        if (prefer_shared) {
          for (std::size_t u = 0; u < config.collective_size; ++u)
            if (used[u] && !in_study[u]) pool.push_back(u);
        }
        if (pool.empty()) {
          for (std::size_t u = 0; u < config.collective_size; ++u)
            if (!in_study[u]) pool.push_back(u);
        }
        std::size_t pick = pool[uniform_below(rng, pool.size())];
        in_study[pick] = true;
        synthesis.memberships[i].push_back(pick);
      }
      std::sort(synthesis.memberships[i].begin(), synthesis.memberships[i].end());
      for (auto u : synthesis.memberships[i]) used[u] = true;
    }

    synthesis.overlap_realized = any_pair_overlaps(synthesis.memberships);
    bool want_overlap = config.overlap_intensity > 0.0 && config.study_count >= 2;
    if (!want_overlap || synthesis.overlap_realized) break;
  }

  // recorded values: true values, except where distortion moves one
  std::vector<std::vector<std::vector<std::string>>> recorded(config.study_count);
  for (std::size_t i = 0; i < config.study_count; ++i) {
    recorded[i].resize(synthesis.memberships[i].size());
    for (std::size_t m = 0; m < synthesis.memberships[i].size(); ++m) {
      const LatentRecord& rec = synthesis.records[synthesis.memberships[i][m]];
      recorded[i][m] = rec.values;
      for (std::size_t k = 0; k < synthesis.domains.size(); ++k) {
        const auto& atoms = synthesis.domains[k].atoms;
        if (config.distortion > 0.0 && atoms.size() > 1 &&
            uniform_unit(rng) < config.distortion) {
          std::size_t cur = synthesis.domains[k].atom_index(recorded[i][m][k]);
          std::size_t alt = uniform_below(rng, atoms.size() - 1);
          if (alt >= cur) ++alt;
          recorded[i][m][k] = atoms[alt];
        }
      }
    }
  }

  // envelopes over the recorded values, optionally padded
  for (std::size_t i = 0; i < config.study_count; ++i) {
    StudyEnvelope env;
    env.study_id = synthesis.study_ids[i];
    env.sample_size = synthesis.memberships[i].size();
    for (std::size_t k = 0; k < synthesis.domains.size(); ++k) {
      const auto& dom = synthesis.domains[k];
      std::size_t lo = dom.atoms.size(), hi = 0;
      std::unordered_set<std::string> seen;
      for (std::size_t m = 0; m < synthesis.memberships[i].size(); ++m) {
        std::size_t pos = dom.atom_index(recorded[i][m][k]);
        lo = std::min(lo, pos);
        hi = std::max(hi, pos);
        seen.insert(recorded[i][m][k]);
      }

      ReportedRange range;
      range.characteristic = dom.id;
      std::size_t extra = static_cast<std::size_t>(
          config.envelope_padding * static_cast<double>(dom.atoms.size()));
      if (dom.kind == DomainKind::Ordered) {
        for (std::size_t e = 0; e < extra; ++e) {
          bool left = uniform_unit(rng) < 0.5;
          if (left && lo > 0)
            --lo;
          else if (!left && hi + 1 < dom.atoms.size())
            ++hi;
          else if (lo > 0)
            --lo;
          else if (hi + 1 < dom.atoms.size())
            ++hi;
        }
        for (std::size_t p = lo; p <= hi; ++p) range.atoms.push_back(dom.atoms[p]);
      } else {
        for (const auto& a : dom.atoms)
          if (seen.count(a)) range.atoms.push_back(a);
        for (std::size_t e = 0; e < extra; ++e) {
          std::vector<std::size_t> unused;
          for (std::size_t p = 0; p < dom.atoms.size(); ++p)
            if (!seen.count(dom.atoms[p])) unused.push_back(p);
          if (unused.empty()) break;
          std::size_t pick = unused[uniform_below(rng, unused.size())];
          seen.insert(dom.atoms[pick]);
          range.atoms.push_back(dom.atoms[pick]);
        }
      }
      env.ranges.push_back(std::move(range));
    }
    synthesis.envelopes.push_back(std::move(env));
  }

  return synthesis;
}

std::vector<StudyEnvelope> derive_envelopes(const SyntheticSynthesis& synthesis) {
  std::vector<StudyEnvelope> envelopes;
  for (std::size_t i = 0; i < synthesis.study_count(); ++i) {
    StudyEnvelope env;
    env.study_id = synthesis.study_ids[i];
    env.sample_size = synthesis.memberships[i].size();
    for (std::size_t k = 0; k < synthesis.domains.size(); ++k) {
      const auto& dom = synthesis.domains[k];
      std::size_t lo = dom.atoms.size(), hi = 0;
      std::unordered_set<std::string> seen;
      for (auto r : synthesis.memberships[i]) {
        const std::string& v = synthesis.records[r].values[k];
        std::size_t pos = dom.atom_index(v);
        lo = std::min(lo, pos);
        hi = std::max(hi, pos);
        seen.insert(v);
      }
      ReportedRange range;
      range.characteristic = dom.id;
      if (dom.kind == DomainKind::Ordered) {
        for (std::size_t p = lo; p <= hi; ++p) range.atoms.push_back(dom.atoms[p]);
      } else {
        for (const auto& a : dom.atoms)
          if (seen.count(a)) range.atoms.push_back(a);
      }
      env.ranges.push_back(std::move(range));
    }
    envelopes.push_back(std::move(env));
  }
  return envelopes;
}

OverlapTruth true_overlap(const SyntheticSynthesis& synthesis, const StudySubset& subset) {
  OverlapTruth truth;
  truth.f3 = Rational(0);
  if (subset.size() < 2) return truth;

  BitVec overlap_bits;
  BitVec union_bits(synthesis.records.size());
  bool first = true;
  double size_product = 1.0;
  subset.mask.for_each_set([&](std::size_t i) {
    BitVec bits = membership_bits(synthesis, i);
    if (first) {
      overlap_bits = bits;
      first = false;
    } else {
      overlap_bits &= bits;
    }
    union_bits |= bits;
    size_product *= static_cast<double>(synthesis.memberships[i].size());
  });

  truth.overlap_records = overlap_bits.set_bits();
  truth.union_count = union_bits.count();
  truth.f2 = overlap_bits.count();
  truth.f1 = truth.f2 > 0 ? 1 : 0;
  truth.f3 = truth.union_count == 0
                 ? Rational(0)
                 : make_rational(static_cast<std::int64_t>(truth.f2),
                                 static_cast<std::int64_t>(truth.union_count));
  truth.f4 = static_cast<double>(truth.f2) /
             std::pow(size_product, 1.0 / static_cast<double>(subset.size()));
  return truth;
}

std::uint64_t union_size(const SyntheticSynthesis& synthesis, const StudySubset& subset) {
  BitVec bits(synthesis.records.size());
  subset.mask.for_each_set([&](std::size_t i) { bits |= membership_bits(synthesis, i); });
  return bits.count();
}

InclusionExclusionReport inclusion_exclusion_check(const SyntheticSynthesis& synthesis) {
  std::size_t n = synthesis.study_count();
  if (n > 20)
    throw_error(ErrorKind::Capacity,
                "inclusion-exclusion check enumerates all subsets; refusing n > 20");

  std::vector<BitVec> members;
  for (std::size_t i = 0; i < n; ++i) members.push_back(membership_bits(synthesis, i));

  InclusionExclusionReport report;
  {
    BitVec all(synthesis.records.size());
    for (const auto& b : members) all |= b;
    report.union_size = all.count();
  }

  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    BitVec inter;
    bool first = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask >> i & 1)) continue;
      if (first) {
        inter = members[i];
        first = false;
      } else {
        inter &= members[i];
      }
    }
    auto term = static_cast<std::int64_t>(inter.count());
    int bits = std::popcount(mask);
    report.alternating_sum += (bits % 2 == 1) ? term : -term;
    if (bits == 1) report.pairwise_truncation += term;
    if (bits == 2) report.pairwise_truncation -= term;
  }
  report.identity_holds =
      report.alternating_sum == static_cast<std::int64_t>(report.union_size);
  report.pairwise_bound_holds =
      report.pairwise_truncation <= static_cast<std::int64_t>(report.union_size);

  // the proportion form of each pairwise term: p/(1+p) * (n_i + n_j) = |S_i n S_j|
  report.proportion_form_matches = true;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      StudySubset pair(n);
      pair.mask.set(i);
      pair.mask.set(j);
      OverlapTruth truth = true_overlap(synthesis, pair);
      Rational p = truth.f3;
      Rational via_proportion =
          p / (1 + p) *
          Rational(static_cast<std::int64_t>(members[i].count() + members[j].count()));
      if (via_proportion != Rational(static_cast<std::int64_t>(truth.f2)))
        report.proportion_form_matches = false;
    }
  }
  return report;
}

SweepReport soundness_sweep(const SweepConfig& config) {
  SweepReport report;
  report.instances = config.instances;

  struct InstanceTally {
    std::uint64_t checked = 0, confirmed = 0, alarms = 0, non_bound = 0;
    std::vector<SoundnessViolation> violations;
  };
  std::vector<InstanceTally> tallies(config.instances);

  parallel_for_index(config.instances, config.threads, [&](std::size_t idx) {
    if (config.deadline.expired())
      throw_error(ErrorKind::TimeBudget, "soundness sweep exceeded the time budget");

    GenerationConfig gen = config.base;
    gen.seed = config.base.seed + idx;
    SyntheticSynthesis synthesis = generate(gen);

    auto domains = build_global_domains(synthesis.specs, synthesis.envelopes);
    auto partition = partition_domains(domains, PartitionScheme::singleton());
    EncodedSynthesis encoded = encode(synthesis.envelopes, domains, partition);

    std::size_t n = synthesis.study_count();
    InstanceTally& tally = tallies[idx];
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
      auto size = static_cast<std::size_t>(std::popcount(mask));
      if (size < 2 || size > config.max_subset_size) continue;
      StudySubset subset(n);
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1) subset.mask.set(i);

      Rational envelope_potential = potential(encoded, subset).overall;
      OverlapTruth truth = true_overlap(synthesis, subset);
      ++tally.checked;

      if (envelope_potential == 0) {
        if (truth.f2 > 0) {
          SoundnessViolation v;
          v.instance_index = idx;
          v.seed = gen.seed;
          v.subset = subset.members();
          v.synthesis = synthesis;
          tally.violations.push_back(std::move(v));
        } else {
          ++tally.confirmed;
        }
      } else if (truth.f2 == 0) {
        ++tally.alarms;
      }
      if (envelope_potential < truth.f3) ++tally.non_bound;
    }
  });

  for (auto& tally : tallies) {
    report.subsets_checked += tally.checked;
    report.exclusions_confirmed += tally.confirmed;
    report.false_alarms += tally.alarms;
    report.non_bound_events += tally.non_bound;
    for (auto& v : tally.violations) report.violations.push_back(std::move(v));
  }
  return report;
}

} // namespace overlapix
