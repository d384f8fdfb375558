/*
 * (C) Copyright 2026 the overlapix authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "overlapix/bound.hpp"
#include "overlapix/enumerate.hpp"
#include "overlapix/model.hpp"
#include "overlapix/oracle.hpp"
#include "overlapix/potential.hpp"
#include "overlapix/runtime.hpp"

namespace overlapix {

inline constexpr const char* kToolName = "overlapix";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

enum class InputFormat { Auto, Json, Csv };
enum class MissingPolicy { Error, FullRange };

struct IngestOptions {
  InputFormat format = InputFormat::Auto;
  MissingPolicy missing = MissingPolicy::Error;
};

/// Parsed envelope table: the characteristic declarations plus one envelope
/// per study, in file order.
struct EnvelopeSet {
  std::vector<CharacteristicSpec> specs;
  std::vector<StudyEnvelope> envelopes;
};

EnvelopeSet ingest_file(const std::string& path, const IngestOptions& options);
EnvelopeSet ingest_json_text(const std::string& text, const IngestOptions& options);
EnvelopeSet ingest_csv_text(const std::string& text, const IngestOptions& options);

/// Canonical envelope-file document for an EnvelopeSet (intervals expanded,
/// missing ranges filled). Valid input for ingest_json_text.
nlohmann::json envelope_set_to_json(const EnvelopeSet& set);

/// "singleton", "width=N", or "file=PATH" (a JSON map of characteristic id
/// to a list of bins, each bin a list of atoms).
PartitionScheme parse_partition_option(const std::string& text);

/// {"min_potential":"1/3","top_k":50,"max_subset_size":6}; null or missing
/// fields keep their defaults.
EnumerationConfig enumeration_config_from_json(const nlohmann::json& doc);

// --- synthesis fixtures (oracle (de)serialization) -------------------------

nlohmann::json synthesis_to_json(const SyntheticSynthesis& synthesis);
SyntheticSynthesis synthesis_from_json(const nlohmann::json& doc);
SyntheticSynthesis load_synthesis(const std::string& path);

// --- JSON fragments ---------------------------------------------------------

nlohmann::json rational_to_json(const Rational& r, int decimal_places = 6);
nlohmann::json partition_to_json(const PartitionFamily& partition);
nlohmann::json encoded_to_json(const EncodedSynthesis& encoded,
                               const PartitionFamily& partition);
nlohmann::json bound_report_to_json(const BoundReport& report,
                                    const std::vector<std::string>& study_ids);

std::string fnv1a_hash_hex(const std::string& data);

/// End-to-end analysis state: envelopes, global domains, partition and the
/// encoding, plus the knobs every downstream query shares.
class AnalysisSession {
public:
  struct Options {
    IngestOptions ingest;
    PartitionScheme scheme = PartitionScheme::singleton();
    std::string scheme_label = "singleton";
    unsigned threads = 1;
    std::optional<double> time_budget_secs;
  };

  static AnalysisSession from_file(const std::string& path, const Options& options);
  static AnalysisSession from_text(const std::string& text, const Options& options);
  static AnalysisSession from_envelopes(EnvelopeSet set, const Options& options);

  const EnvelopeSet& envelopes() const { return set_; }
  const std::vector<CharacteristicDomain>& domains() const { return domains_; }
  const PartitionFamily& partition() const { return partition_; }
  const EncodedSynthesis& encoded() const { return encoded_; }
  const Options& options() const { return options_; }
  std::size_t study_count() const { return encoded_.study_count(); }

  Deadline make_deadline() const;

  nlohmann::json inputs_echo() const;
  nlohmann::json encoded_json() const;
  nlohmann::json pairwise_json() const;
  std::string pairwise_csv() const;
  nlohmann::json potentials_json(const EnumerationConfig& config) const;
  nlohmann::json overlap_free_json(SelectionCriterion criterion) const;
  nlohmann::json bound_json() const;

  /// The full result bundle. `generated_at` is the only field allowed to
  /// differ between byte-wise identical runs; the config hash skips it.
  nlohmann::json report_bundle(const EnumerationConfig& enum_config,
                               SelectionCriterion criterion) const;

  std::string heatmap_svg() const;
  std::string heatmap_csv() const;
  std::string gridplot_svg(const EnumerationConfig& config) const;
  std::string gridplot_text(const EnumerationConfig& config) const;

private:
  AnalysisSession() = default;

  void require_studies(std::size_t minimum, const char* operation) const;

  EnvelopeSet set_;
  std::vector<CharacteristicDomain> domains_;
  PartitionFamily partition_;
  EncodedSynthesis encoded_;
  Options options_;
};

// --- plots (implemented in plots.cpp) ---------------------------------------

std::string render_heatmap_svg(const std::vector<std::string>& study_ids,
                               const std::vector<std::vector<Rational>>& matrix);
std::string render_heatmap_csv(const std::vector<std::string>& study_ids,
                               const std::vector<std::vector<Rational>>& matrix);
std::string render_gridplot_svg(const std::vector<std::string>& study_ids,
                                const EnumerationResult& result);
std::string render_gridplot_text(const std::vector<std::string>& study_ids,
                                 const EnumerationResult& result);

// --- oracle front-ends used by the C API and CLI -----------------------------

GenerationConfig generation_config_from_json(const nlohmann::json& doc);
nlohmann::json oracle_check_json(const SyntheticSynthesis& synthesis);
nlohmann::json sweep_report_to_json(const SweepReport& report,
                                    const SweepConfig& config);
SweepConfig sweep_config_from_json(const nlohmann::json& doc);

} // namespace overlapix
