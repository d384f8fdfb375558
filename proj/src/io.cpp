/*
 * (C) Copyright 2026 the overlapix authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "overlapix/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "overlapix/error.hpp"

namespace overlapix {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& context) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (item.key() == a) {
        known = true;
        break;
      }
    if (!known)
      throw_error(ErrorKind::Schema,
                  "unknown field '" + item.key() + "' in " + context);
  }
}

std::string atom_from_json(const json& value, const std::string& context) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer())
    return std::to_string(value.get<std::int64_t>());
  throw_error(ErrorKind::Format, "atom in " + context + " must be a string or integer");
}

const CharacteristicSpec& spec_for(const std::vector<CharacteristicSpec>& specs,
                                   const std::string& id, const std::string& context) {
  for (const auto& s : specs)
    if (s.id == id) return s;
  throw_error(ErrorKind::Schema,
              "undeclared characteristic '" + id + "' in " + context);
}

/// Expand "a..b" on ordered kinds, push atoms de-duplicated in input order.
void append_atoms(std::vector<std::string>& out, const CharacteristicSpec& spec,
                  const std::string& entry, const std::string& context) {
  std::vector<std::string> produced;
  auto dots = entry.find("..");
  if (spec.kind == DomainKind::Ordered && dots != std::string::npos && dots > 0 &&
      dots + 2 < entry.size()) {
    produced = expand_interval(spec.order, entry.substr(0, dots), entry.substr(dots + 2));
  } else {
    produced.push_back(entry);
  }
  for (auto& a : produced) {
    if (a.empty())
      throw_error(ErrorKind::Format, "empty atom in " + context);
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(std::move(a));
  }
}

std::vector<CharacteristicSpec> parse_characteristic_decls(const json& arr,
                                                           const std::string& where) {
  if (!arr.is_array() || arr.empty())
    throw_error(ErrorKind::Schema, where + ": 'characteristics' must be a non-empty array");
  std::vector<CharacteristicSpec> specs;
  for (const auto& c : arr) {
    if (!c.is_object())
      throw_error(ErrorKind::Schema, where + ": characteristic declaration must be an object");
    check_keys(c, {"id", "kind", "order", "resolution", "atoms"},
               "characteristic declaration");
    CharacteristicSpec spec;
    if (!c.contains("id") || !c["id"].is_string())
      throw_error(ErrorKind::Schema, where + ": characteristic needs a string 'id'");
    spec.id = c["id"].get<std::string>();
    if (!c.contains("kind") || !c["kind"].is_string())
      throw_error(ErrorKind::Schema, "characteristic '" + spec.id + "' needs a 'kind'");
    spec.kind = parse_domain_kind(c["kind"].get<std::string>());
    if (spec.kind == DomainKind::Ordered) {
      if (!c.contains("order") || !c["order"].is_string())
        throw_error(ErrorKind::Schema, "ordered characteristic '" + spec.id +
                                           "' needs an 'order' key");
      spec.order = parse_order_key(c["order"].get<std::string>());
    } else if (c.contains("order")) {
      throw_error(ErrorKind::Schema, "categorical characteristic '" + spec.id +
                                         "' must not declare an 'order' key");
    }
    if (c.contains("resolution")) {
      if (!c["resolution"].is_string())
        throw_error(ErrorKind::Schema,
                    "characteristic '" + spec.id + "': 'resolution' must be a string");
      spec.resolution_note = c["resolution"].get<std::string>();
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

void fill_missing_ranges(EnvelopeSet& set, MissingPolicy policy) {
  for (const auto& spec : set.specs) {
    std::vector<std::string> union_atoms;
    for (const auto& env : set.envelopes) {
      const ReportedRange* r = env.find_range(spec.id);
      if (!r) continue;
      for (const auto& a : r->atoms)
        if (std::find(union_atoms.begin(), union_atoms.end(), a) == union_atoms.end())
          union_atoms.push_back(a);
    }
    for (auto& env : set.envelopes) {
      if (env.find_range(spec.id)) continue;
      if (policy == MissingPolicy::Error)
        throw_error(ErrorKind::Schema, "study '" + env.study_id +
                                           "' is missing characteristic '" + spec.id +
                                           "' (pass --missing=full-range to assume "
                                           "the full reported range)");
      if (union_atoms.empty())
        throw_error(ErrorKind::Schema, "characteristic '" + spec.id +
                                           "' is reported by no study at all");
      ReportedRange range;
      range.characteristic = spec.id;
      range.atoms = union_atoms;
      env.ranges.push_back(std::move(range));
    }
  }
}

// --- CSV ---------------------------------------------------------------------

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(cell);
      cell.clear();
    } else {
      cell += ch;
    }
  }
  if (quoted)
    throw_error(ErrorKind::Format,
                "line " + std::to_string(line_no) + ": unterminated quote");
  cells.push_back(cell);
  return cells;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

struct CsvColumn {
  enum Kind { StudyId, SampleSize, Characteristic, EffectEstimate, EffectSe, Arm } kind;
  std::string name; // characteristic id or arm name
};

std::uint64_t parse_count(const std::string& text, const std::string& context) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
    throw_error(ErrorKind::Format, context + ": '" + text + "' is not a count");
  return std::stoull(text);
}

double parse_double(const std::string& text, const std::string& context) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw_error(ErrorKind::Format, context + ": '" + text + "' is not a number");
  }
}

} // namespace

EnvelopeSet ingest_json_text(const std::string& text, const IngestOptions& options) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw_error(ErrorKind::Format, std::string("JSON parse error: ") + e.what());
  }
  if (!doc.is_object())
    throw_error(ErrorKind::Schema, "envelope file must be a JSON object");
  check_keys(doc, {"schema_version", "characteristics", "studies"}, "envelope file");

  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer() ||
      doc["schema_version"].get<int>() != kSchemaVersion)
    throw_error(ErrorKind::Schema, "envelope file needs \"schema_version\": " +
                                       std::to_string(kSchemaVersion));

  EnvelopeSet set;
  if (!doc.contains("characteristics"))
    throw_error(ErrorKind::Schema, "envelope file lacks 'characteristics'");
  set.specs = parse_characteristic_decls(doc["characteristics"], "envelope file");

  if (!doc.contains("studies") || !doc["studies"].is_array())
    throw_error(ErrorKind::Schema, "envelope file needs a 'studies' array");

  std::unordered_set<std::string> ids;
  for (const auto& s : doc["studies"]) {
    if (!s.is_object())
      throw_error(ErrorKind::Schema, "study row must be an object");
    check_keys(s, {"id", "sample_size", "ranges", "effect", "arms"}, "study row");

    StudyEnvelope env;
    if (!s.contains("id") || !s["id"].is_string())
      throw_error(ErrorKind::Schema, "study row needs a string 'id'");
    env.study_id = s["id"].get<std::string>();
    if (!ids.insert(env.study_id).second)
      throw_error(ErrorKind::Schema, "duplicate study id '" + env.study_id + "'");

    if (!s.contains("sample_size") || !s["sample_size"].is_number_unsigned() ||
        s["sample_size"].get<std::uint64_t>() < 1)
      throw_error(ErrorKind::Schema,
                  "study '" + env.study_id + "' needs a positive integer 'sample_size'");
    env.sample_size = s["sample_size"].get<std::uint64_t>();

    if (s.contains("ranges")) {
      if (!s["ranges"].is_object())
        throw_error(ErrorKind::Schema, "study '" + env.study_id + "': 'ranges' must map "
                                       "characteristic ids to atom lists");
      for (const auto& item : s["ranges"].items()) {
        const std::string context = "study '" + env.study_id + "', characteristic '" +
                                    item.key() + "'";
        const CharacteristicSpec& spec = spec_for(set.specs, item.key(), context);
        if (!item.value().is_array() || item.value().empty())
          throw_error(ErrorKind::Schema, context + ": range must be a non-empty array");
        ReportedRange range;
        range.characteristic = spec.id;
        for (const auto& entry : item.value())
          append_atoms(range.atoms, spec, atom_from_json(entry, context), context);
        env.ranges.push_back(std::move(range));
      }
    }

    if (s.contains("effect")) {
      const json& e = s["effect"];
      if (!e.is_object())
        throw_error(ErrorKind::Schema, "study '" + env.study_id + "': 'effect' must be "
                                       "an object with 'estimate' and 'se'");
      check_keys(e, {"estimate", "se"}, "effect of study '" + env.study_id + "'");
      if (!e.contains("estimate") || !e.contains("se") ||
          !e["estimate"].is_number() || !e["se"].is_number())
        throw_error(ErrorKind::Schema,
                    "study '" + env.study_id + "': effect needs numeric 'estimate' and 'se'");
      EffectSummary effect;
      effect.estimate = e["estimate"].get<double>();
      effect.standard_error = e["se"].get<double>();
      if (effect.standard_error <= 0.0)
        throw_error(ErrorKind::Schema,
                    "study '" + env.study_id + "': standard error must be positive");
      env.effect = effect;
    }

    if (s.contains("arms")) {
      if (!s["arms"].is_object())
        throw_error(ErrorKind::Schema, "study '" + env.study_id + "': 'arms' must map "
                                       "arm names to counts");
      for (const auto& item : s["arms"].items()) {
        if (!item.value().is_number_unsigned())
          throw_error(ErrorKind::Schema, "study '" + env.study_id + "': arm '" +
                                             item.key() + "' needs a non-negative count");
        env.arm_sizes[item.key()] = item.value().get<std::uint64_t>();
      }
    }

    set.envelopes.push_back(std::move(env));
  }

  fill_missing_ranges(set, options.missing);
  return set;
}

EnvelopeSet ingest_csv_text(const std::string& text, const IngestOptions& options) {
  std::vector<std::string> lines;
  {
    std::string line;
    std::istringstream in(text);
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }
  if (lines.empty()) throw_error(ErrorKind::Format, "empty CSV file");

  EnvelopeSet set;
  std::vector<CsvColumn> columns;
  {
    auto headers = split_csv_line(lines[0], 1);
    for (const auto& raw : headers) {
      std::string h = trim(raw);
      if (h == "study_id") {
        columns.push_back({CsvColumn::StudyId, ""});
      } else if (h == "sample_size") {
        columns.push_back({CsvColumn::SampleSize, ""});
      } else if (h == "effect_estimate") {
        columns.push_back({CsvColumn::EffectEstimate, ""});
      } else if (h == "effect_se") {
        columns.push_back({CsvColumn::EffectSe, ""});
      } else if (h.rfind("arm:", 0) == 0) {
        columns.push_back({CsvColumn::Arm, h.substr(4)});
      } else {
        // characteristic column: id:kind[:order]
        auto c1 = h.find(':');
        if (c1 == std::string::npos)
          throw_error(ErrorKind::Schema,
                      "line 1: unknown column '" + h + "' (characteristic columns "
                      "use 'id:kind' or 'id:kind:order')");
        auto c2 = h.find(':', c1 + 1);
        CharacteristicSpec spec;
        spec.id = h.substr(0, c1);
        std::string kind = c2 == std::string::npos ? h.substr(c1 + 1)
                                                   : h.substr(c1 + 1, c2 - c1 - 1);
        spec.kind = parse_domain_kind(kind);
        if (spec.kind == DomainKind::Ordered) {
          if (c2 == std::string::npos)
            throw_error(ErrorKind::Schema, "line 1: ordered column '" + spec.id +
                                               "' needs an order key ('" + spec.id +
                                               ":ordered:integer' etc.)");
          spec.order = parse_order_key(h.substr(c2 + 1));
        } else if (c2 != std::string::npos) {
          throw_error(ErrorKind::Schema, "line 1: categorical column '" + spec.id +
                                             "' must not carry an order key");
        }
        columns.push_back({CsvColumn::Characteristic, spec.id});
        set.specs.push_back(std::move(spec));
      }
    }
  }
  bool has_id = false, has_size = false;
  for (const auto& c : columns) {
    has_id |= c.kind == CsvColumn::StudyId;
    has_size |= c.kind == CsvColumn::SampleSize;
  }
  if (!has_id || !has_size)
    throw_error(ErrorKind::Schema, "line 1: CSV needs 'study_id' and 'sample_size' columns");
  if (set.specs.empty())
    throw_error(ErrorKind::Schema, "line 1: CSV declares no characteristic columns");

  std::unordered_set<std::string> ids;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    std::size_t line_no = li + 1;
    auto cells = split_csv_line(lines[li], line_no);
    if (cells.size() != columns.size())
      throw_error(ErrorKind::Format, "line " + std::to_string(line_no) + ": expected " +
                                         std::to_string(columns.size()) + " cells, got " +
                                         std::to_string(cells.size()));

    StudyEnvelope env;
    std::optional<double> estimate, se;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      std::string cell = trim(cells[c]);
      const std::string where = "line " + std::to_string(line_no);
      switch (columns[c].kind) {
        case CsvColumn::StudyId:
          if (cell.empty())
            throw_error(ErrorKind::Schema, where + ": empty study_id");
          env.study_id = cell;
          break;
        case CsvColumn::SampleSize:
          env.sample_size = parse_count(cell, where + ", sample_size");
          if (env.sample_size < 1)
            throw_error(ErrorKind::Schema, where + ": sample_size must be positive");
          break;
        case CsvColumn::Characteristic: {
          if (cell.empty()) break; // missing range, resolved by policy below
          const CharacteristicSpec& spec =
              spec_for(set.specs, columns[c].name, where);
          ReportedRange range;
          range.characteristic = spec.id;
          std::istringstream parts(cell);
          std::string entry;
          while (std::getline(parts, entry, ';')) {
            entry = trim(entry);
            if (entry.empty())
              throw_error(ErrorKind::Format, where + ", column '" + spec.id +
                                                 "': empty atom between semicolons");
            append_atoms(range.atoms, spec, entry,
                         where + ", column '" + spec.id + "'");
          }
          if (range.atoms.empty())
            throw_error(ErrorKind::Format,
                        where + ", column '" + spec.id + "': empty range");
          env.ranges.push_back(std::move(range));
          break;
        }
        case CsvColumn::EffectEstimate:
          if (!cell.empty()) estimate = parse_double(cell, where + ", effect_estimate");
          break;
        case CsvColumn::EffectSe:
          if (!cell.empty()) se = parse_double(cell, where + ", effect_se");
          break;
        case CsvColumn::Arm:
          if (!cell.empty())
            env.arm_sizes[columns[c].name] =
                parse_count(cell, where + ", arm:" + columns[c].name);
          break;
      }
    }
    if (estimate.has_value() != se.has_value())
      throw_error(ErrorKind::Schema, "line " + std::to_string(line_no) +
                                         ": effect_estimate and effect_se must be "
                                         "given together");
    if (estimate) {
      if (*se <= 0.0)
        throw_error(ErrorKind::Schema, "line " + std::to_string(line_no) +
                                           ": standard error must be positive");
      env.effect = EffectSummary{*estimate, *se};
    }
    if (!ids.insert(env.study_id).second)
      throw_error(ErrorKind::Schema, "line " + std::to_string(line_no) +
                                         ": duplicate study id '" + env.study_id + "'");
    set.envelopes.push_back(std::move(env));
  }

  fill_missing_ranges(set, options.missing);
  return set;
}

EnvelopeSet ingest_file(const std::string& path, const IngestOptions& options) {
  std::string text = read_file(path);
  InputFormat format = options.format;
  if (format == InputFormat::Auto) {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
      format = InputFormat::Json;
    else if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv")
      format = InputFormat::Csv;
    else {
      auto first = text.find_first_not_of(" \t\r\n");
      format = (first != std::string::npos && text[first] == '{') ? InputFormat::Json
                                                                  : InputFormat::Csv;
    }
  }
  return format == InputFormat::Json ? ingest_json_text(text, options)
                                     : ingest_csv_text(text, options);
}

nlohmann::json envelope_set_to_json(const EnvelopeSet& set) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  json chars = json::array();
  for (const auto& spec : set.specs) {
    json c;
    c["id"] = spec.id;
    c["kind"] = domain_kind_name(spec.kind);
    if (spec.kind == DomainKind::Ordered) c["order"] = order_key_name(spec.order);
    if (!spec.resolution_note.empty()) c["resolution"] = spec.resolution_note;
    chars.push_back(std::move(c));
  }
  doc["characteristics"] = std::move(chars);

  json studies = json::array();
  for (const auto& env : set.envelopes) {
    json s;
    s["id"] = env.study_id;
    s["sample_size"] = env.sample_size;
    json ranges;
    for (const auto& spec : set.specs) {
      const ReportedRange* r = env.find_range(spec.id);
      if (r) ranges[spec.id] = r->atoms;
    }
    s["ranges"] = std::move(ranges);
    if (env.effect) {
      s["effect"] = {{"estimate", env.effect->estimate},
                     {"se", env.effect->standard_error}};
    }
    if (!env.arm_sizes.empty()) {
      json arms;
      for (const auto& [name, count] : env.arm_sizes) arms[name] = count;
      s["arms"] = std::move(arms);
    }
    studies.push_back(std::move(s));
  }
  doc["studies"] = std::move(studies);
  return doc;
}

PartitionScheme parse_partition_option(const std::string& text) {
  if (text == "singleton") return PartitionScheme::singleton();
  if (text.rfind("width=", 0) == 0) {
    std::string digits = text.substr(6);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      throw_error(ErrorKind::Config, "bad partition width in '" + text + "'");
    return PartitionScheme::uniform_width(std::stoull(digits));
  }
  if (text.rfind("file=", 0) == 0) {
    std::string path = text.substr(5);
    json doc;
    try {
      doc = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
      throw_error(ErrorKind::Format,
                  "partition file '" + path + "': " + std::string(e.what()));
    }
    if (!doc.is_object())
      throw_error(ErrorKind::Partition, "partition file must map characteristic ids "
                                        "to lists of bins");
    PartitionFamily family;
    for (const auto& item : doc.items()) {
      CharacteristicPartition part;
      part.characteristic = item.key();
      if (!item.value().is_array())
        throw_error(ErrorKind::Partition, "partition of '" + item.key() +
                                              "' must be a list of bins");
      for (const auto& bin : item.value()) {
        if (!bin.is_array())
          throw_error(ErrorKind::Partition, "bins of '" + item.key() +
                                                "' must be lists of atoms");
        std::vector<std::string> atoms;
        for (const auto& a : bin)
          atoms.push_back(atom_from_json(a, "partition of '" + item.key() + "'"));
        part.bins.push_back(std::move(atoms));
      }
      family.parts.push_back(std::move(part));
    }
    return PartitionScheme::explicit_bins(std::move(family));
  }
  throw_error(ErrorKind::Config, "unknown partition scheme '" + text +
                                     "' (expected singleton, width=N or file=PATH)");
}

EnumerationConfig enumeration_config_from_json(const nlohmann::json& doc) {
  EnumerationConfig config;
  if (doc.is_null()) return config;
  if (!doc.is_object())
    throw_error(ErrorKind::Config, "enumeration config must be a JSON object");
  check_keys(doc, {"min_potential", "top_k", "max_subset_size"}, "enumeration config");
  if (doc.contains("min_potential") && !doc["min_potential"].is_null())
    config.min_potential = parse_rational(doc["min_potential"].get<std::string>());
  if (doc.contains("top_k") && !doc["top_k"].is_null())
    config.top_k = doc["top_k"].get<std::size_t>();
  if (doc.contains("max_subset_size") && !doc["max_subset_size"].is_null())
    config.max_subset_size = doc["max_subset_size"].get<std::size_t>();
  return config;
}

// --- synthesis fixtures ------------------------------------------------------

nlohmann::json synthesis_to_json(const SyntheticSynthesis& synthesis) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "synthesis-truth";
  json chars = json::array();
  for (std::size_t k = 0; k < synthesis.specs.size(); ++k) {
    const auto& spec = synthesis.specs[k];
    json c;
    c["id"] = spec.id;
    c["kind"] = domain_kind_name(spec.kind);
    if (spec.kind == DomainKind::Ordered) c["order"] = order_key_name(spec.order);
    c["atoms"] = synthesis.domains[k].atoms;
    chars.push_back(std::move(c));
  }
  doc["characteristics"] = std::move(chars);

  json events = json::array();
  for (const auto& rec : synthesis.records) {
    json e;
    e["id"] = rec.event_id;
    json values;
    for (std::size_t k = 0; k < synthesis.specs.size(); ++k)
      values[synthesis.specs[k].id] = rec.values[k];
    e["values"] = std::move(values);
    events.push_back(std::move(e));
  }
  doc["events"] = std::move(events);

  json studies = json::array();
  for (std::size_t i = 0; i < synthesis.study_count(); ++i) {
    json s;
    s["id"] = synthesis.study_ids[i];
    json members = json::array();
    for (auto r : synthesis.memberships[i]) members.push_back(synthesis.records[r].event_id);
    s["members"] = std::move(members);
    studies.push_back(std::move(s));
  }
  doc["studies"] = std::move(studies);
  doc["overlap_realized"] = synthesis.overlap_realized;
  return doc;
}

SyntheticSynthesis synthesis_from_json(const nlohmann::json& doc) {
  if (!doc.is_object())
    throw_error(ErrorKind::Schema, "synthesis fixture must be a JSON object");
  check_keys(doc, {"schema_version", "kind", "characteristics", "events", "studies",
                   "overlap_realized"},
             "synthesis fixture");
  if (!doc.contains("schema_version") ||
      doc["schema_version"].get<int>() != kSchemaVersion)
    throw_error(ErrorKind::Schema, "synthesis fixture needs \"schema_version\": " +
                                       std::to_string(kSchemaVersion));
  if (!doc.contains("kind") || doc["kind"] != "synthesis-truth")
    throw_error(ErrorKind::Schema, "synthesis fixture needs \"kind\": \"synthesis-truth\"");

  SyntheticSynthesis synthesis;
  if (!doc.contains("characteristics"))
    throw_error(ErrorKind::Schema, "synthesis fixture lacks 'characteristics'");
  synthesis.specs = parse_characteristic_decls(doc["characteristics"], "synthesis fixture");

  // explicit atom universes, when declared
  std::vector<std::vector<std::string>> declared(synthesis.specs.size());
  {
    std::size_t k = 0;
    for (const auto& c : doc["characteristics"]) {
      if (c.contains("atoms")) {
        for (const auto& a : c["atoms"])
          declared[k].push_back(atom_from_json(a, "characteristic atoms"));
      }
      ++k;
    }
  }

  if (!doc.contains("events") || !doc["events"].is_array() || doc["events"].empty())
    throw_error(ErrorKind::Schema, "synthesis fixture needs a non-empty 'events' array");

  std::unordered_map<std::uint64_t, std::size_t> record_of;
  for (const auto& e : doc["events"]) {
    check_keys(e, {"id", "values"}, "event");
    if (!e.contains("id") || !e["id"].is_number_unsigned())
      throw_error(ErrorKind::Schema, "event needs an unsigned integer 'id'");
    LatentRecord rec;
    rec.event_id = e["id"].get<std::uint64_t>();
    if (record_of.count(rec.event_id))
      throw_error(ErrorKind::Schema,
                  "duplicate event id " + std::to_string(rec.event_id));
    if (!e.contains("values") || !e["values"].is_object())
      throw_error(ErrorKind::Schema, "event " + std::to_string(rec.event_id) +
                                         " needs a 'values' object");
    for (const auto& spec : synthesis.specs) {
      if (!e["values"].contains(spec.id))
        throw_error(ErrorKind::Schema, "event " + std::to_string(rec.event_id) +
                                           " lacks a value for '" + spec.id + "'");
      rec.values.push_back(atom_from_json(e["values"][spec.id], "event value"));
    }
    for (const auto& item : e["values"].items()) {
      bool known = false;
      for (const auto& spec : synthesis.specs)
        if (spec.id == item.key()) {
          known = true;
          break;
        }
      if (!known)
        throw_error(ErrorKind::Schema,
                    "event " + std::to_string(rec.event_id) +
                        " has a value for undeclared characteristic '" + item.key() + "'");
    }
    record_of[rec.event_id] = synthesis.records.size();
    synthesis.records.push_back(std::move(rec));
  }

  // domains: declared universe or the values seen, ordered appropriately
  for (std::size_t k = 0; k < synthesis.specs.size(); ++k) {
    CharacteristicDomain dom;
    dom.id = synthesis.specs[k].id;
    dom.kind = synthesis.specs[k].kind;
    dom.order = synthesis.specs[k].order;
    if (!declared[k].empty()) {
      dom.atoms = declared[k];
    } else {
      for (const auto& rec : synthesis.records) {
        const auto& v = rec.values[k];
        if (std::find(dom.atoms.begin(), dom.atoms.end(), v) == dom.atoms.end())
          dom.atoms.push_back(v);
      }
    }
    if (dom.kind == DomainKind::Ordered)
      std::sort(dom.atoms.begin(), dom.atoms.end(),
                [&](const std::string& a, const std::string& b) {
                  return atom_less(dom.order, a, b);
                });
    for (const auto& rec : synthesis.records)
      if (!dom.contains(rec.values[k]))
        throw_error(ErrorKind::Schema, "event value '" + rec.values[k] +
                                           "' is outside the declared atoms of '" +
                                           dom.id + "'");
    synthesis.domains.push_back(std::move(dom));
  }

  if (!doc.contains("studies") || !doc["studies"].is_array() || doc["studies"].empty())
    throw_error(ErrorKind::Schema, "synthesis fixture needs a non-empty 'studies' array");
  std::unordered_set<std::string> ids;
  for (const auto& s : doc["studies"]) {
    check_keys(s, {"id", "members"}, "study membership");
    if (!s.contains("id") || !s["id"].is_string())
      throw_error(ErrorKind::Schema, "study membership needs a string 'id'");
    std::string id = s["id"].get<std::string>();
    if (!ids.insert(id).second)
      throw_error(ErrorKind::Schema, "duplicate study id '" + id + "'");
    if (!s.contains("members") || !s["members"].is_array() || s["members"].empty())
      throw_error(ErrorKind::Schema, "study '" + id + "' needs a non-empty 'members' array");
    std::vector<std::size_t> members;
    std::unordered_set<std::uint64_t> seen;
    for (const auto& m : s["members"]) {
      if (!m.is_number_unsigned())
        throw_error(ErrorKind::Schema, "study '" + id + "': members must be event ids");
      std::uint64_t event = m.get<std::uint64_t>();
      if (!seen.insert(event).second)
        throw_error(ErrorKind::Schema, "study '" + id + "' lists event " +
                                           std::to_string(event) + " twice");
      auto it = record_of.find(event);
      if (it == record_of.end())
        throw_error(ErrorKind::Schema, "study '" + id + "' references unknown event " +
                                           std::to_string(event));
      members.push_back(it->second);
    }
    std::sort(members.begin(), members.end());
    synthesis.study_ids.push_back(std::move(id));
    synthesis.memberships.push_back(std::move(members));
  }

  synthesis.envelopes = derive_envelopes(synthesis);
  bool realized = false;
  for (std::size_t i = 0; i < synthesis.study_count() && !realized; ++i)
    for (std::size_t j = i + 1; j < synthesis.study_count() && !realized; ++j) {
      std::vector<std::size_t> common;
      std::set_intersection(synthesis.memberships[i].begin(),
                            synthesis.memberships[i].end(),
                            synthesis.memberships[j].begin(),
                            synthesis.memberships[j].end(),
                            std::back_inserter(common));
      realized = !common.empty();
    }
  synthesis.overlap_realized = realized;
  return synthesis;
}

SyntheticSynthesis load_synthesis(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw_error(ErrorKind::Format, std::string("JSON parse error: ") + e.what());
  }
  return synthesis_from_json(doc);
}

// --- JSON fragments ----------------------------------------------------------

nlohmann::json rational_to_json(const Rational& r, int decimal_places) {
  json out;
  out["fraction"] = to_fraction_string(r);
  out["decimal"] = to_decimal_string(r, decimal_places);
  return out;
}

nlohmann::json partition_to_json(const PartitionFamily& partition) {
  json out = json::array();
  for (const auto& part : partition.parts) {
    json p;
    p["characteristic"] = part.characteristic;
    p["bins"] = part.bins;
    out.push_back(std::move(p));
  }
  return out;
}

nlohmann::json encoded_to_json(const EncodedSynthesis& encoded,
                               const PartitionFamily& partition) {
  json out;
  json studies = json::array();
  for (std::size_t i = 0; i < encoded.study_count(); ++i)
    studies.push_back({{"id", encoded.study_ids[i]},
                       {"sample_size", encoded.sample_sizes[i]}});
  out["studies"] = std::move(studies);

  json chars = json::array();
  for (std::size_t k = 0; k < encoded.characteristic_count(); ++k) {
    json c;
    c["id"] = encoded.characteristic_ids[k];
    c["bins"] = partition.part_for(encoded.characteristic_ids[k]).bins;
    json coverage = json::array();
    for (std::size_t i = 0; i < encoded.study_count(); ++i)
      coverage.push_back(encoded.coverage[k][i].to01());
    c["coverage"] = std::move(coverage);
    chars.push_back(std::move(c));
  }
  out["characteristics"] = std::move(chars);
  return out;
}

nlohmann::json bound_report_to_json(const BoundReport& report,
                                    const std::vector<std::string>& study_ids) {
  json out;
  out["naive_total"] = report.naive_total;
  out["lower_bound_proxy"] = rational_to_json(report.lower_bound_proxy, 2);
  json deductions = json::array();
  for (const auto& d : report.pairwise_deductions) {
    json item;
    item["pair"] = {study_ids[d.study_a], study_ids[d.study_b]};
    item["pair_potential"] = to_fraction_string(d.pair_potential);
    item["deduction"] = rational_to_json(d.deduction, 2);
    item["capped"] = d.capped;
    deductions.push_back(std::move(item));
  }
  out["deductions"] = std::move(deductions);
  return out;
}

std::string fnv1a_hash_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// --- AnalysisSession ----------------------------------------------------------

AnalysisSession AnalysisSession::from_envelopes(EnvelopeSet set, const Options& options) {
  AnalysisSession session;
  session.options_ = options;
  session.set_ = std::move(set);
  session.domains_ = build_global_domains(session.set_.specs, session.set_.envelopes);
  session.partition_ = partition_domains(session.domains_, options.scheme);
  session.encoded_ = encode(session.set_.envelopes, session.domains_, session.partition_);
  return session;
}

AnalysisSession AnalysisSession::from_file(const std::string& path,
                                           const Options& options) {
  return from_envelopes(ingest_file(path, options.ingest), options);
}

AnalysisSession AnalysisSession::from_text(const std::string& text,
                                           const Options& options) {
  EnvelopeSet set = options.ingest.format == InputFormat::Csv
                        ? ingest_csv_text(text, options.ingest)
                        : ingest_json_text(text, options.ingest);
  return from_envelopes(std::move(set), options);
}

Deadline AnalysisSession::make_deadline() const {
  if (options_.time_budget_secs) return Deadline::after_seconds(*options_.time_budget_secs);
  return {};
}

void AnalysisSession::require_studies(std::size_t minimum, const char* operation) const {
  if (study_count() < minimum)
    throw_error(ErrorKind::Schema, std::string("need >= ") + std::to_string(minimum) +
                                       " studies to " + operation + " (got " +
                                       std::to_string(study_count()) + ")");
}

nlohmann::json AnalysisSession::inputs_echo() const { return envelope_set_to_json(set_); }

nlohmann::json AnalysisSession::encoded_json() const {
  return encoded_to_json(encoded_, partition_);
}

nlohmann::json AnalysisSession::pairwise_json() const {
  require_studies(2, "compute the pairwise matrix");
  auto matrix = pairwise_matrix(encoded_, options_.threads);
  json out;
  out["studies"] = encoded_.study_ids;
  json rows = json::array();
  for (const auto& row : matrix) {
    json cells = json::array();
    for (const auto& v : row) cells.push_back(to_fraction_string(v));
    rows.push_back(std::move(cells));
  }
  out["matrix"] = std::move(rows);
  return out;
}

std::string AnalysisSession::pairwise_csv() const {
  require_studies(2, "compute the pairwise matrix");
  return render_heatmap_csv(encoded_.study_ids, pairwise_matrix(encoded_, options_.threads));
}

nlohmann::json AnalysisSession::potentials_json(const EnumerationConfig& config) const {
  require_studies(2, "enumerate combinations");
  EnumerationConfig effective = config;
  effective.threads = options_.threads;
  effective.deadline = make_deadline();
  EnumerationResult result = enumerate_potentials(encoded_, effective);

  json out;
  out["min_potential"] = to_fraction_string(config.min_potential);
  out["top_k"] = config.top_k ? json(*config.top_k) : json(nullptr);
  out["max_subset_size"] =
      config.max_subset_size ? json(*config.max_subset_size) : json(nullptr);
  out["total_found"] = result.total_found;
  out["truncated"] = result.truncated;
  json combos = json::array();
  for (const auto& report : result.reports) {
    json c;
    json members = json::array();
    for (auto i : report.subset.members()) members.push_back(encoded_.study_ids[i]);
    c["members"] = std::move(members);
    c["potential"] = rational_to_json(report.overall);
    json per;
    for (std::size_t k = 0; k < encoded_.characteristic_count(); ++k)
      per[encoded_.characteristic_ids[k]] =
          to_fraction_string(report.per_characteristic[k]);
    c["per_characteristic"] = std::move(per);
    c["pooled_size_naive"] = report.pooled_size_naive;
    combos.push_back(std::move(c));
  }
  out["combinations"] = std::move(combos);
  return out;
}

nlohmann::json AnalysisSession::overlap_free_json(SelectionCriterion criterion) const {
  require_studies(1, "derive overlap-free combinations");
  OverlapFreeFamily family = overlap_free_b2(encoded_, make_deadline());
  SelectionResult selection = select_best(family, set_.envelopes, criterion);

  auto subset_json = [&](const StudySubset& subset) {
    json members = json::array();
    for (auto i : subset.members()) members.push_back(encoded_.study_ids[i]);
    return members;
  };

  json out;
  json b2 = json::array();
  for (const auto& member : family.b2_members) {
    std::uint64_t pooled = 0;
    member.mask.for_each_set([&](std::size_t i) { pooled += encoded_.sample_sizes[i]; });
    b2.push_back({{"members", subset_json(member)},
                  {"study_count", member.size()},
                  {"pooled_size", pooled}});
  }
  out["b2"] = std::move(b2);
  out["provenance"] = family.provenance;

  json selected;
  selected["criterion"] = selection_criterion_name(selection.criterion);
  selected["members"] = subset_json(selection.best);
  selected["pooled_size"] = selection.pooled_size;
  selected["study_count"] = selection.study_count;
  if (selection.inverse_variance_weight)
    selected["inverse_variance_weight"] = *selection.inverse_variance_weight;
  selected["tied"] = selection.tied;
  json ties = json::array();
  for (const auto& t : selection.ties) ties.push_back(subset_json(t));
  selected["ties"] = std::move(ties);
  out["selected"] = std::move(selected);
  return out;
}

nlohmann::json AnalysisSession::bound_json() const {
  require_studies(1, "compute the bound");
  BoundReport report = lower_bound_proxy(encoded_);
  json out = bound_report_to_json(report, encoded_.study_ids);

  // a proxy below the best overlap-free pooled size carries no extra
  // information; surface the comparison
  OverlapFreeFamily family = overlap_free_b2(encoded_, make_deadline());
  SelectionResult best =
      select_best(family, set_.envelopes, SelectionCriterion::MaxPooledSampleSize);
  out["best_overlap_free_pooled_size"] = best.pooled_size;
  out["proxy_below_best_overlap_free"] =
      report.lower_bound_proxy < Rational(static_cast<std::int64_t>(best.pooled_size));
  return out;
}

namespace {

std::string utc_now_iso8601() {
  std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

} // namespace

nlohmann::json AnalysisSession::report_bundle(const EnumerationConfig& enum_config,
                                              SelectionCriterion criterion) const {
  require_studies(2, "build a report");

  json bundle;
  bundle["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  bundle["inputs"] = inputs_echo();
  bundle["partition"] = partition_to_json(partition_);
  bundle["encoded"] = encoded_json();
  bundle["pairwise"] = pairwise_json();
  bundle["potentials"] = potentials_json(enum_config);
  bundle["overlap_free"] = overlap_free_json(criterion);
  bundle["bound"] = bound_json();

  json options_descriptor;
  options_descriptor["partition"] = options_.scheme_label;
  options_descriptor["missing"] =
      options_.ingest.missing == MissingPolicy::FullRange ? "full-range" : "error";
  options_descriptor["criterion"] = selection_criterion_name(criterion);
  options_descriptor["min_potential"] = to_fraction_string(enum_config.min_potential);
  options_descriptor["top_k"] =
      enum_config.top_k ? json(*enum_config.top_k) : json(nullptr);
  options_descriptor["max_subset_size"] =
      enum_config.max_subset_size ? json(*enum_config.max_subset_size) : json(nullptr);
  bundle["options"] = options_descriptor;

  bundle["config_hash"] =
      "fnv1a64:" + fnv1a_hash_hex(bundle["inputs"].dump() + options_descriptor.dump());
  bundle["generated_at"] = utc_now_iso8601(); // excluded from the hash on purpose
  return bundle;
}

std::string AnalysisSession::heatmap_svg() const {
  require_studies(2, "render the heat map");
  return render_heatmap_svg(encoded_.study_ids, pairwise_matrix(encoded_, options_.threads));
}

std::string AnalysisSession::heatmap_csv() const { return pairwise_csv(); }

std::string AnalysisSession::gridplot_svg(const EnumerationConfig& config) const {
  require_studies(2, "render the grid plot");
  EnumerationConfig effective = config;
  effective.threads = options_.threads;
  effective.deadline = make_deadline();
  return render_gridplot_svg(encoded_.study_ids, enumerate_potentials(encoded_, effective));
}

std::string AnalysisSession::gridplot_text(const EnumerationConfig& config) const {
  require_studies(2, "render the grid plot");
  EnumerationConfig effective = config;
  effective.threads = options_.threads;
  effective.deadline = make_deadline();
  return render_gridplot_text(encoded_.study_ids, enumerate_potentials(encoded_, effective));
}

// --- oracle front-ends ---------------------------------------------------------

GenerationConfig generation_config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object())
    throw_error(ErrorKind::Schema, "generation config must be a JSON object");
  check_keys(doc,
             {"study_count", "collective_size", "study_size_min", "study_size_max",
              "characteristics", "overlap_intensity", "envelope_padding", "distortion",
              "seed"},
             "generation config");
  GenerationConfig config;
  if (doc.contains("study_count")) config.study_count = doc["study_count"].get<std::size_t>();
  if (doc.contains("collective_size"))
    config.collective_size = doc["collective_size"].get<std::size_t>();
  if (doc.contains("study_size_min"))
    config.study_size_min = doc["study_size_min"].get<std::size_t>();
  if (doc.contains("study_size_max"))
    config.study_size_max = doc["study_size_max"].get<std::size_t>();
  if (doc.contains("overlap_intensity"))
    config.overlap_intensity = doc["overlap_intensity"].get<double>();
  if (doc.contains("envelope_padding"))
    config.envelope_padding = doc["envelope_padding"].get<double>();
  if (doc.contains("distortion")) config.distortion = doc["distortion"].get<double>();
  if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();

  if (doc.contains("characteristics")) {
    config.characteristics.clear();
    for (const auto& c : doc["characteristics"]) {
      check_keys(c, {"id", "kind", "order", "atoms", "atom_count"},
                 "generation characteristic");
      LatentCharacteristicConfig lc;
      lc.id = c.at("id").get<std::string>();
      lc.kind = parse_domain_kind(c.at("kind").get<std::string>());
      if (c.contains("order")) lc.order = parse_order_key(c["order"].get<std::string>());
      if (c.contains("atoms"))
        for (const auto& a : c["atoms"])
          lc.atoms.push_back(atom_from_json(a, "generation characteristic"));
      if (c.contains("atom_count")) lc.atom_count = c["atom_count"].get<std::size_t>();
      config.characteristics.push_back(std::move(lc));
    }
  } else {
    LatentCharacteristicConfig time;
    time.id = "time";
    time.kind = DomainKind::Ordered;
    time.order = OrderKey::Integer;
    time.atom_count = 8;
    LatentCharacteristicConfig location;
    location.id = "location";
    location.kind = DomainKind::Categorical;
    location.atom_count = 6;
    config.characteristics = {std::move(time), std::move(location)};
  }
  return config;
}

nlohmann::json oracle_check_json(const SyntheticSynthesis& synthesis) {
  std::size_t n = synthesis.study_count();

  json out;
  out["study_count"] = n;
  out["event_count"] = synthesis.records.size();
  out["overlap_realized"] = synthesis.overlap_realized;

  std::uint64_t naive = 0;
  for (const auto& m : synthesis.memberships) naive += m.size();
  out["naive_total"] = naive;
  {
    StudySubset all(n);
    for (std::size_t i = 0; i < n; ++i) all.mask.set(i);
    out["union_size"] = union_size(synthesis, all);
  }

  // derived envelopes must contain every member value
  bool containment = true;
  for (std::size_t i = 0; i < n && containment; ++i) {
    for (auto r : synthesis.memberships[i]) {
      for (std::size_t k = 0; k < synthesis.specs.size(); ++k) {
        const ReportedRange* range =
            synthesis.envelopes[i].find_range(synthesis.specs[k].id);
        const auto& atoms = range->atoms;
        if (std::find(atoms.begin(), atoms.end(), synthesis.records[r].values[k]) ==
            atoms.end())
          containment = false;
      }
    }
  }
  out["envelope_containment"] = containment;

  if (n <= 12) {
    InclusionExclusionReport ie = inclusion_exclusion_check(synthesis);
    out["inclusion_exclusion"] = {
        {"identity_holds", ie.identity_holds},
        {"alternating_sum", ie.alternating_sum},
        {"pairwise_truncation", ie.pairwise_truncation},
        {"pairwise_bound_holds", ie.pairwise_bound_holds},
        {"proportion_form_matches", ie.proportion_form_matches}};
  }

  auto domains = build_global_domains(synthesis.specs, synthesis.envelopes);
  auto partition = partition_domains(domains, PartitionScheme::singleton());
  EncodedSynthesis encoded = encode(synthesis.envelopes, domains, partition);

  json subsets = json::array();
  bool all_sound = true;
  if (n >= 2 && n <= 12) {
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
      if (std::popcount(mask) < 2) continue;
      StudySubset subset(n);
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1) subset.mask.set(i);

      OverlapTruth truth = true_overlap(synthesis, subset);
      Rational envelope_potential = potential(encoded, subset).overall;
      bool sound = !(envelope_potential == 0 && truth.f2 > 0);
      all_sound = all_sound && sound;

      json row;
      json members = json::array();
      for (auto i : subset.members()) members.push_back(synthesis.study_ids[i]);
      row["members"] = std::move(members);
      row["true_overlap_count"] = truth.f2;
      row["true_proportion"] = to_fraction_string(truth.f3);
      row["envelope_potential"] = to_fraction_string(envelope_potential);
      row["sound"] = sound;
      subsets.push_back(std::move(row));
    }
  }
  out["subsets"] = std::move(subsets);
  out["all_sound"] = all_sound;
  return out;
}

SweepConfig sweep_config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object())
    throw_error(ErrorKind::Schema, "sweep config must be a JSON object");
  check_keys(doc, {"generation", "instances", "max_subset_size", "threads"},
             "sweep config");
  SweepConfig config;
  if (doc.contains("generation"))
    config.base = generation_config_from_json(doc["generation"]);
  else
    config.base = generation_config_from_json(json::object());
  if (doc.contains("instances")) config.instances = doc["instances"].get<std::size_t>();
  if (doc.contains("max_subset_size"))
    config.max_subset_size = doc["max_subset_size"].get<std::size_t>();
  if (doc.contains("threads")) config.threads = doc["threads"].get<unsigned>();
  return config;
}

nlohmann::json sweep_report_to_json(const SweepReport& report, const SweepConfig& config) {
  json out;
  out["instances"] = report.instances;
  out["base_seed"] = config.base.seed;
  out["subsets_checked"] = report.subsets_checked;
  out["exclusions_confirmed"] = report.exclusions_confirmed;
  out["false_alarms"] = report.false_alarms;
  out["non_bound_events"] = report.non_bound_events;
  auto rate = [&](std::uint64_t count) {
    if (report.subsets_checked == 0) return std::string("0.000000");
    return to_decimal_string(make_rational(static_cast<std::int64_t>(count),
                                           static_cast<std::int64_t>(report.subsets_checked)),
                             6);
  };
  out["false_alarm_rate"] = rate(report.false_alarms);
  out["non_bound_rate"] = rate(report.non_bound_events);
  out["violation_count"] = report.violations.size();
  json violations = json::array();
  for (const auto& v : report.violations) {
    json item;
    item["instance_index"] = v.instance_index;
    item["seed"] = v.seed;
    json members = json::array();
    for (auto i : v.subset) members.push_back(v.synthesis.study_ids[i]);
    item["subset"] = std::move(members);
    item["synthesis"] = synthesis_to_json(v.synthesis);
    violations.push_back(std::move(item));
  }
  out["violations"] = std::move(violations);
  return out;
}

} // namespace overlapix
