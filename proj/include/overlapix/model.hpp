/*
 * (C) Copyright 2026 the overlapix authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "overlapix/bitset.hpp"

namespace overlapix {

enum class DomainKind { Ordered, Categorical };

/// How atoms of an ordered characteristic are compared and how intervals
/// over them are enumerated. Categorical characteristics have no key.
enum class OrderKey { Integer, IsoMonth, IsoDate, Lexicographic };

const char* domain_kind_name(DomainKind kind);
const char* order_key_name(OrderKey key);
DomainKind parse_domain_kind(const std::string& text);
OrderKey parse_order_key(const std::string& text);

/// Declaration of one characteristic as it appears in an input file:
/// identity and ordering rules, but not yet the atom universe.
struct CharacteristicSpec {
  std::string id;
  DomainKind kind = DomainKind::Categorical;
  OrderKey order = OrderKey::Lexicographic; // meaningful for ordered kinds
  std::string resolution_note;              // free-text, documentation only
};

/// The global atom universe of one characteristic: the union of every
/// study's reported atoms, ordered (by the order key for ordered kinds,
/// by first appearance for categorical kinds).
struct CharacteristicDomain {
  std::string id;
  DomainKind kind = DomainKind::Categorical;
  OrderKey order = OrderKey::Lexicographic;
  std::vector<std::string> atoms;

  std::size_t atom_index(const std::string& atom) const; // throws Schema if absent
  bool contains(const std::string& atom) const;
};

/// A study's reported restriction on one characteristic, normalized to an
/// explicit atom set (intervals are expanded at ingest).
struct ReportedRange {
  std::string characteristic;
  std::vector<std::string> atoms; // unique, non-empty, input order
};

struct EffectSummary {
  double estimate = 0.0;
  double standard_error = 0.0;
};

struct StudyEnvelope {
  std::string study_id;
  std::uint64_t sample_size = 0;
  std::vector<ReportedRange> ranges; // exactly one per declared characteristic
  std::optional<EffectSummary> effect;
  std::map<std::string, std::uint64_t> arm_sizes;

  const ReportedRange* find_range(const std::string& characteristic_id) const;
};

/// Ordered, pairwise-disjoint bins covering one characteristic's domain.
struct CharacteristicPartition {
  std::string characteristic;
  std::vector<std::vector<std::string>> bins; // each bin non-empty; ordered kinds: contiguous
};

struct PartitionFamily {
  std::vector<CharacteristicPartition> parts; // aligned with domain order

  const CharacteristicPartition& part_for(const std::string& characteristic_id) const;
  std::size_t bin_count(std::size_t k) const { return parts[k].bins.size(); }
};

enum class PartitionSchemeKind { Singleton, UniformWidth, Explicit };

struct PartitionScheme {
  PartitionSchemeKind kind = PartitionSchemeKind::Singleton;
  std::size_t width = 1;             // UniformWidth only
  PartitionFamily explicit_family;   // Explicit only

  static PartitionScheme singleton() { return {}; }
  static PartitionScheme uniform_width(std::size_t w) {
    PartitionScheme s;
    s.kind = PartitionSchemeKind::UniformWidth;
    s.width = w;
    return s;
  }
  static PartitionScheme explicit_bins(PartitionFamily family) {
    PartitionScheme s;
    s.kind = PartitionSchemeKind::Explicit;
    s.explicit_family = std::move(family);
    return s;
  }
};

/// The binary coverage matrix: for study i and characteristic k, bit l says
/// whether the study's reported range intersects bin l.
struct EncodedSynthesis {
  std::vector<std::string> study_ids;
  std::vector<std::uint64_t> sample_sizes;
  std::vector<std::string> characteristic_ids;
  // coverage[k][i] has one bit per bin of characteristic k
  std::vector<std::vector<BitVec>> coverage;

  std::size_t study_count() const { return study_ids.size(); }
  std::size_t characteristic_count() const { return characteristic_ids.size(); }
  std::size_t bin_count(std::size_t k) const {
    return coverage[k].empty() ? 0 : coverage[k][0].size();
  }
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Union of every study's atoms per characteristic. Ordered domains are
/// sorted by the order key; categorical domains keep first-appearance order.
/// Every envelope must report every declared characteristic.
std::vector<CharacteristicDomain> build_global_domains(
    const std::vector<CharacteristicSpec>& specs,
    const std::vector<StudyEnvelope>& envelopes);

PartitionFamily partition_domains(const std::vector<CharacteristicDomain>& domains,
                                  const PartitionScheme& scheme);

EncodedSynthesis encode(const std::vector<StudyEnvelope>& envelopes,
                        const std::vector<CharacteristicDomain>& domains,
                        const PartitionFamily& partition);

/// Union of the atoms of every bin the study covers; a superset of the
/// study's own atoms, and exactly them under singleton bins.
std::vector<std::string> decode_covered_atoms(const EncodedSynthesis& encoded,
                                              const PartitionFamily& partition,
                                              std::size_t study,
                                              std::size_t characteristic);

/// Atom comparison under an order key; throws Format if an atom does not
/// parse under the key.
bool atom_less(OrderKey key, const std::string& a, const std::string& b);

/// Enumerate the inclusive interval [from, to] at the key's natural step
/// (integers by 1, months by month, dates by day). Lexicographic keys have
/// no enumerable step and are rejected.
std::vector<std::string> expand_interval(OrderKey key, const std::string& from,
                                         const std::string& to);

} // namespace overlapix
