/*
 * (C) Copyright 2026 the overlapix authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "overlapix/model.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

#include "overlapix/error.hpp"

namespace overlapix {

namespace {

std::int64_t parse_int_atom(const std::string& atom, const std::string& context) {
  std::int64_t value = 0;
  const char* first = atom.data();
  const char* last = atom.data() + atom.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw_error(ErrorKind::Format,
                "atom '" + atom + "' of " + context + " is not an integer");
  return value;
}

// days_from_civil / civil_from_days: proleptic Gregorian day arithmetic.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y += m <= 2;
}

bool all_digits(const std::string& s, std::size_t from, std::size_t to) {
  for (std::size_t i = from; i < to; ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return true;
}

// "YYYY-MM" -> months since year 0
std::int64_t parse_month_atom(const std::string& atom, const std::string& context) {
  if (atom.size() != 7 || atom[4] != '-' || !all_digits(atom, 0, 4) ||
      !all_digits(atom, 5, 7))
    throw_error(ErrorKind::Format,
                "atom '" + atom + "' of " + context + " is not a YYYY-MM month");
  std::int64_t year = std::stoll(atom.substr(0, 4));
  std::int64_t month = std::stoll(atom.substr(5, 2));
  if (month < 1 || month > 12)
    throw_error(ErrorKind::Format, "atom '" + atom + "' of " + context +
                                       " has month outside 01..12");
  return year * 12 + (month - 1);
}

std::string render_month_atom(std::int64_t ordinal) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04lld-%02lld",
                static_cast<long long>(ordinal / 12),
                static_cast<long long>(ordinal % 12 + 1));
  return buf;
}

// "YYYY-MM-DD" -> day ordinal
std::int64_t parse_date_atom(const std::string& atom, const std::string& context) {
  if (atom.size() != 10 || atom[4] != '-' || atom[7] != '-' ||
      !all_digits(atom, 0, 4) || !all_digits(atom, 5, 7) || !all_digits(atom, 8, 10))
    throw_error(ErrorKind::Format,
                "atom '" + atom + "' of " + context + " is not a YYYY-MM-DD date");
  std::int64_t year = std::stoll(atom.substr(0, 4));
  unsigned month = static_cast<unsigned>(std::stoul(atom.substr(5, 2)));
  unsigned day = static_cast<unsigned>(std::stoul(atom.substr(8, 2)));
  if (month < 1 || month > 12 || day < 1 || day > 31)
    throw_error(ErrorKind::Format,
                "atom '" + atom + "' of " + context + " is out of calendar range");
  std::int64_t ordinal = days_from_civil(year, month, day);
  // reject e.g. Feb 30 by round-tripping
  std::int64_t y2;
  unsigned m2, d2;
  civil_from_days(ordinal, y2, m2, d2);
  if (y2 != year || m2 != month || d2 != day)
    throw_error(ErrorKind::Format,
                "atom '" + atom + "' of " + context + " is not a real date");
  return ordinal;
}

std::string render_date_atom(std::int64_t ordinal) {
  std::int64_t y;
  unsigned m, d;
  civil_from_days(ordinal, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u", static_cast<long long>(y), m, d);
  return buf;
}

std::int64_t atom_sort_value(OrderKey key, const std::string& atom,
                             const std::string& context) {
  switch (key) {
    case OrderKey::Integer: return parse_int_atom(atom, context);
    case OrderKey::IsoMonth: return parse_month_atom(atom, context);
    case OrderKey::IsoDate: return parse_date_atom(atom, context);
    case OrderKey::Lexicographic: break;
  }
  throw_error(ErrorKind::Internal, "lexicographic atoms carry no sort value");
}

} // namespace

const char* domain_kind_name(DomainKind kind) {
  return kind == DomainKind::Ordered ? "ordered" : "categorical";
}

const char* order_key_name(OrderKey key) {
  switch (key) {
    case OrderKey::Integer: return "integer";
    case OrderKey::IsoMonth: return "iso-month";
    case OrderKey::IsoDate: return "iso-date";
    case OrderKey::Lexicographic: return "lexicographic";
  }
  return "unknown";
}

DomainKind parse_domain_kind(const std::string& text) {
  if (text == "ordered") return DomainKind::Ordered;
  if (text == "categorical") return DomainKind::Categorical;
  throw_error(ErrorKind::Format, "unknown characteristic kind '" + text +
                                     "' (expected 'ordered' or 'categorical')");
}

OrderKey parse_order_key(const std::string& text) {
  if (text == "integer") return OrderKey::Integer;
  if (text == "iso-month") return OrderKey::IsoMonth;
  if (text == "iso-date") return OrderKey::IsoDate;
  if (text == "lexicographic") return OrderKey::Lexicographic;
  throw_error(ErrorKind::Format, "unknown order key '" + text + "'");
}

std::size_t CharacteristicDomain::atom_index(const std::string& atom) const {
  auto it = std::find(atoms.begin(), atoms.end(), atom);
  if (it == atoms.end())
    throw_error(ErrorKind::Schema,
                "atom '" + atom + "' not in domain of characteristic '" + id + "'");
  return static_cast<std::size_t>(it - atoms.begin());
}

bool CharacteristicDomain::contains(const std::string& atom) const {
  return std::find(atoms.begin(), atoms.end(), atom) != atoms.end();
}

const ReportedRange* StudyEnvelope::find_range(const std::string& characteristic_id) const {
  for (const auto& r : ranges)
    if (r.characteristic == characteristic_id) return &r;
  return nullptr;
}

const CharacteristicPartition& PartitionFamily::part_for(
    const std::string& characteristic_id) const {
  for (const auto& p : parts)
    if (p.characteristic == characteristic_id) return p;
  throw_error(ErrorKind::Partition,
              "no partition for characteristic '" + characteristic_id + "'");
}

bool atom_less(OrderKey key, const std::string& a, const std::string& b) {
  if (key == OrderKey::Lexicographic) return a < b;
  return atom_sort_value(key, a, "ordered characteristic") <
         atom_sort_value(key, b, "ordered characteristic");
}

std::vector<std::string> expand_interval(OrderKey key, const std::string& from,
                                         const std::string& to) {
  std::vector<std::string> out;
  switch (key) {
    case OrderKey::Integer: {
      std::int64_t lo = parse_int_atom(from, "interval endpoint");
      std::int64_t hi = parse_int_atom(to, "interval endpoint");
      if (lo > hi)
        throw_error(ErrorKind::Format, "empty interval " + from + ".." + to);
      for (std::int64_t v = lo; v <= hi; ++v) out.push_back(std::to_string(v));
      return out;
    }
    case OrderKey::IsoMonth: {
      std::int64_t lo = parse_month_atom(from, "interval endpoint");
      std::int64_t hi = parse_month_atom(to, "interval endpoint");
      if (lo > hi)
        throw_error(ErrorKind::Format, "empty interval " + from + ".." + to);
      for (std::int64_t v = lo; v <= hi; ++v) out.push_back(render_month_atom(v));
      return out;
    }
    case OrderKey::IsoDate: {
      std::int64_t lo = parse_date_atom(from, "interval endpoint");
      std::int64_t hi = parse_date_atom(to, "interval endpoint");
      if (lo > hi)
        throw_error(ErrorKind::Format, "empty interval " + from + ".." + to);
      for (std::int64_t v = lo; v <= hi; ++v) out.push_back(render_date_atom(v));
      return out;
    }
    case OrderKey::Lexicographic:
      throw_error(ErrorKind::Format,
                  "interval syntax needs an enumerable order key (integer, "
                  "iso-month or iso-date), not 'lexicographic'");
  }
  return out;
}

std::vector<CharacteristicDomain> build_global_domains(
    const std::vector<CharacteristicSpec>& specs,
    const std::vector<StudyEnvelope>& envelopes) {
  if (specs.empty())
    throw_error(ErrorKind::Schema, "no characteristics declared");

  std::unordered_set<std::string> declared;
  for (const auto& s : specs) {
    if (!declared.insert(s.id).second)
      throw_error(ErrorKind::Schema, "characteristic '" + s.id + "' declared twice");
  }

  for (const auto& env : envelopes) {
    if (env.sample_size < 1)
      throw_error(ErrorKind::Schema,
                  "study '" + env.study_id + "' has sample size 0");
    std::unordered_set<std::string> seen;
    for (const auto& r : env.ranges) {
      if (!declared.count(r.characteristic))
        throw_error(ErrorKind::Schema, "study '" + env.study_id +
                                           "' reports undeclared characteristic '" +
                                           r.characteristic + "'");
      if (!seen.insert(r.characteristic).second)
        throw_error(ErrorKind::Schema, "study '" + env.study_id +
                                           "' reports characteristic '" +
                                           r.characteristic + "' twice");
      if (r.atoms.empty())
        throw_error(ErrorKind::Schema, "study '" + env.study_id +
                                           "' has an empty range for '" +
                                           r.characteristic + "'");
      std::unordered_set<std::string> atom_seen;
      for (const auto& a : r.atoms)
        if (!atom_seen.insert(a).second)
          throw_error(ErrorKind::Schema, "study '" + env.study_id + "' lists atom '" +
                                             a + "' twice for '" + r.characteristic +
                                             "'");
    }
    for (const auto& s : specs)
      if (!seen.count(s.id))
        throw_error(ErrorKind::Schema, "study '" + env.study_id +
                                           "' is missing characteristic '" + s.id +
                                           "'");
  }

  std::vector<CharacteristicDomain> domains;
  domains.reserve(specs.size());
  for (const auto& spec : specs) {
    CharacteristicDomain dom;
    dom.id = spec.id;
    dom.kind = spec.kind;
    dom.order = spec.order;

    std::unordered_set<std::string> present;
    for (const auto& env : envelopes) {
      const ReportedRange* r = env.find_range(spec.id);
      for (const auto& a : r->atoms) {
        if (present.insert(a).second) dom.atoms.push_back(a);
      }
    }

    if (spec.kind == DomainKind::Ordered) {
      const std::string context = "ordered characteristic '" + spec.id + "'";
      std::stable_sort(dom.atoms.begin(), dom.atoms.end(),
                       [&](const std::string& a, const std::string& b) {
                         if (spec.order == OrderKey::Lexicographic) return a < b;
                         return atom_sort_value(spec.order, a, context) <
                                atom_sort_value(spec.order, b, context);
                       });
      if (spec.order != OrderKey::Lexicographic) {
        for (std::size_t i = 1; i < dom.atoms.size(); ++i) {
          if (atom_sort_value(spec.order, dom.atoms[i - 1], context) ==
              atom_sort_value(spec.order, dom.atoms[i], context))
            throw_error(ErrorKind::Format, "atoms '" + dom.atoms[i - 1] + "' and '" +
                                               dom.atoms[i] + "' of " + context +
                                               " compare equal");
        }
      }
    }
    // categorical: first-appearance order, which the scan above produced

    domains.push_back(std::move(dom));
  }
  return domains;
}

PartitionFamily partition_domains(const std::vector<CharacteristicDomain>& domains,
                                  const PartitionScheme& scheme) {
  PartitionFamily family;
  switch (scheme.kind) {
    case PartitionSchemeKind::Singleton: {
      for (const auto& dom : domains) {
        CharacteristicPartition part;
        part.characteristic = dom.id;
        for (const auto& a : dom.atoms) part.bins.push_back({a});
        family.parts.push_back(std::move(part));
      }
      return family;
    }
    case PartitionSchemeKind::UniformWidth: {
      if (scheme.width < 1)
        throw_error(ErrorKind::Config, "uniform partition width must be >= 1");
      for (const auto& dom : domains) {
        CharacteristicPartition part;
        part.characteristic = dom.id;
        if (dom.kind == DomainKind::Ordered) {
          for (std::size_t i = 0; i < dom.atoms.size(); i += scheme.width) {
            std::size_t end = std::min(i + scheme.width, dom.atoms.size());
            part.bins.emplace_back(dom.atoms.begin() + static_cast<long>(i),
                                   dom.atoms.begin() + static_cast<long>(end));
          }
        } else {
          // width grouping is defined on ordered atoms only
          for (const auto& a : dom.atoms) part.bins.push_back({a});
        }
        family.parts.push_back(std::move(part));
      }
      return family;
    }
    case PartitionSchemeKind::Explicit: {
      const PartitionFamily& given = scheme.explicit_family;
      for (const auto& dom : domains) {
        const CharacteristicPartition* found = nullptr;
        for (const auto& p : given.parts)
          if (p.characteristic == dom.id) found = &p;
        if (!found)
          throw_error(ErrorKind::Partition,
                      "explicit partition lacks characteristic '" + dom.id + "'");
        const auto& bins = found->bins;

        std::unordered_map<std::string, std::size_t> assigned; // atom -> bin idx
        for (std::size_t b = 0; b < bins.size(); ++b) {
          if (bins[b].empty())
            throw_error(ErrorKind::Partition, "bin " + std::to_string(b) + " of '" +
                                                  dom.id + "' is empty");
          for (const auto& a : bins[b]) {
            if (!dom.contains(a))
              throw_error(ErrorKind::Partition,
                          "bin " + std::to_string(b) + " of '" + dom.id +
                              "' contains atom '" + a + "' outside the domain");
            auto [it, inserted] = assigned.emplace(a, b);
            if (!inserted)
              throw_error(ErrorKind::Partition,
                          "bins " + std::to_string(it->second) + " and " +
                              std::to_string(b) + " of '" + dom.id +
                              "' overlap on atom '" + a + "'");
          }
        }
        for (const auto& a : dom.atoms)
          if (!assigned.count(a))
            throw_error(ErrorKind::Partition, "partition of '" + dom.id +
                                                  "' does not cover atom '" + a + "'");

        if (dom.kind == DomainKind::Ordered) {
          // each bin must be a contiguous run, and runs must appear in order
          std::unordered_map<std::string, std::size_t> atom_pos;
          for (std::size_t i = 0; i < dom.atoms.size(); ++i) atom_pos[dom.atoms[i]] = i;
          std::size_t expected = 0;
          for (std::size_t b = 0; b < bins.size(); ++b) {
            std::vector<std::size_t> pos;
            for (const auto& a : bins[b]) pos.push_back(atom_pos[a]);
            std::sort(pos.begin(), pos.end());
            for (std::size_t i = 1; i < pos.size(); ++i)
              if (pos[i] != pos[i - 1] + 1)
                throw_error(ErrorKind::Partition,
                            "bin " + std::to_string(b) + " of ordered '" + dom.id +
                                "' is not contiguous");
            if (pos.front() != expected)
              throw_error(ErrorKind::Partition,
                          "bin " + std::to_string(b) + " of ordered '" + dom.id +
                              "' is out of order");
            expected = pos.back() + 1;
          }
        }

        family.parts.push_back(*found);
      }
      return family;
    }
  }
  throw_error(ErrorKind::Internal, "unreachable partition scheme");
}

EncodedSynthesis encode(const std::vector<StudyEnvelope>& envelopes,
                        const std::vector<CharacteristicDomain>& domains,
                        const PartitionFamily& partition) {
  EncodedSynthesis enc;
  for (const auto& env : envelopes) {
    enc.study_ids.push_back(env.study_id);
    enc.sample_sizes.push_back(env.sample_size);
  }
  enc.coverage.resize(domains.size());
  for (std::size_t k = 0; k < domains.size(); ++k) {
    const auto& dom = domains[k];
    enc.characteristic_ids.push_back(dom.id);
    const auto& part = partition.part_for(dom.id);
    std::unordered_map<std::string, std::size_t> bin_of;
    for (std::size_t b = 0; b < part.bins.size(); ++b)
      for (const auto& a : part.bins[b]) bin_of[a] = b;

    enc.coverage[k].reserve(envelopes.size());
    for (const auto& env : envelopes) {
      BitVec bits(part.bins.size());
      const ReportedRange* r = env.find_range(dom.id);
      for (const auto& a : r->atoms) {
        auto it = bin_of.find(a);
        if (it == bin_of.end())
          throw_error(ErrorKind::Internal, "atom '" + a + "' escaped partition of '" +
                                               dom.id + "'");
        bits.set(it->second);
      }
      enc.coverage[k].push_back(std::move(bits));
    }
  }
  return enc;
}

std::vector<std::string> decode_covered_atoms(const EncodedSynthesis& encoded,
                                              const PartitionFamily& partition,
                                              std::size_t study,
                                              std::size_t characteristic) {
  const auto& part = partition.part_for(encoded.characteristic_ids[characteristic]);
  std::vector<std::string> out;
  encoded.coverage[characteristic][study].for_each_set([&](std::size_t b) {
    for (const auto& a : part.bins[b]) out.push_back(a);
  });
  return out;
}

} // namespace overlapix
