/*
 * (C) Copyright 2026 the overlapix authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "overlapix.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "overlapix/error.hpp"
#include "overlapix/io.hpp"

using namespace overlapix;
using nlohmann::json;

struct ovx_analysis {
  AnalysisSession session;
};

namespace {

thread_local std::string t_last_error;

ovx_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::TimeBudget: return OVX_TIME_BUDGET_EXCEEDED;
    case ErrorKind::Internal: return OVX_INTERNAL_ERROR;
    default: return OVX_VALIDATION_ERROR;
  }
}

template <typename Fn>
ovx_status guarded(Fn&& fn) {
  try {
    fn();
    t_last_error.clear();
    return OVX_OK;
  } catch (const Error& e) {
    t_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return OVX_INTERNAL_ERROR;
  } catch (...) {
    t_last_error = "unknown failure";
    return OVX_INTERNAL_ERROR;
  }
}

char* copy_out(const std::string& text) {
  char* buf = static_cast<char*>(std::malloc(text.size() + 1));
  if (!buf) throw std::bad_alloc();
  std::memcpy(buf, text.data(), text.size() + 1);
  return buf;
}

json parse_optional_json(const char* text, const char* what) {
  if (!text || !*text) return json(nullptr);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw_error(ErrorKind::Format, std::string(what) + ": " + e.what());
  }
}

AnalysisSession::Options options_from_json(const char* options_json) {
  AnalysisSession::Options options;
  json doc = parse_optional_json(options_json, "options");
  if (!doc.is_null()) {
    if (!doc.is_object()) throw_error(ErrorKind::Config, "options must be a JSON object");
    for (const auto& item : doc.items()) {
      const std::string& key = item.key();
      if (key == "format") {
        std::string f = item.value().get<std::string>();
        if (f == "auto")
          options.ingest.format = InputFormat::Auto;
        else if (f == "json")
          options.ingest.format = InputFormat::Json;
        else if (f == "csv")
          options.ingest.format = InputFormat::Csv;
        else
          throw_error(ErrorKind::Config, "unknown format '" + f + "'");
      } else if (key == "partition") {
        options.scheme_label = item.value().get<std::string>();
        options.scheme = parse_partition_option(options.scheme_label);
      } else if (key == "missing") {
        std::string m = item.value().get<std::string>();
        if (m == "error")
          options.ingest.missing = MissingPolicy::Error;
        else if (m == "full-range")
          options.ingest.missing = MissingPolicy::FullRange;
        else
          throw_error(ErrorKind::Config, "unknown missing policy '" + m + "'");
      } else if (key == "threads") {
        options.threads = item.value().get<unsigned>();
        if (options.threads < 1) options.threads = 1;
      } else if (key == "time_budget_secs") {
        options.time_budget_secs = item.value().get<double>();
      } else {
        throw_error(ErrorKind::Config, "unknown option '" + key + "'");
      }
    }
  }
  if (!options.time_budget_secs) {
    if (const char* env = std::getenv("OVERLAPIX_TIME_BUDGET_SECS")) {
      try {
        options.time_budget_secs = std::stod(env);
      } catch (const std::exception&) {
        throw_error(ErrorKind::Config,
                    "OVERLAPIX_TIME_BUDGET_SECS is not a number: " + std::string(env));
      }
    }
  }
  return options;
}

SelectionCriterion criterion_from(const char* criterion) {
  if (!criterion || !*criterion) return SelectionCriterion::MaxPooledSampleSize;
  return parse_selection_criterion(criterion);
}

} // namespace

extern "C" {

const char* ovx_version(void) { return kToolVersion; }

const char* ovx_last_error(void) { return t_last_error.c_str(); }

ovx_status ovx_analysis_open_file(const char* path, const char* options_json,
                                  ovx_analysis** out) {
  return guarded([&] {
    if (!path || !out) throw_error(ErrorKind::Config, "null argument");
    auto options = options_from_json(options_json);
    *out = new ovx_analysis{AnalysisSession::from_file(path, options)};
  });
}

ovx_status ovx_analysis_open_text(const char* text, const char* options_json,
                                  ovx_analysis** out) {
  return guarded([&] {
    if (!text || !out) throw_error(ErrorKind::Config, "null argument");
    auto options = options_from_json(options_json);
    *out = new ovx_analysis{AnalysisSession::from_text(text, options)};
  });
}

void ovx_analysis_close(ovx_analysis* analysis) { delete analysis; }

int ovx_study_count(const ovx_analysis* analysis) {
  return analysis ? static_cast<int>(analysis->session.study_count()) : -1;
}

ovx_status ovx_inputs_json(ovx_analysis* analysis, char** out) {
  return guarded([&] {
    if (!analysis || !out) throw_error(ErrorKind::Config, "null argument");
    *out = copy_out(analysis->session.inputs_echo().dump(2) + "\n");
  });
}

ovx_status ovx_encoded_json(ovx_analysis* analysis, char** out) {
  return guarded([&] {
    if (!analysis || !out) throw_error(ErrorKind::Config, "null argument");
    *out = copy_out(analysis->session.encoded_json().dump(2) + "\n");
  });
}

ovx_status ovx_pairwise_json(ovx_analysis* analysis, char** out) {
  return guarded([&] {
    if (!analysis || !out) throw_error(ErrorKind::Config, "null argument");
    *out = copy_out(analysis->session.pairwise_json().dump(2) + "\n");
  });
}

ovx_status ovx_pairwise_csv(ovx_analysis* analysis, char** out) {
  return guarded([&] {
    if (!analysis || !out) throw_error(ErrorKind::Config, "null argument");
    *out = copy_out(analysis->session.pairwise_csv());
  });
}

ovx_status ovx_heatmap_svg(ovx_analysis* analysis, char** out) {
  return guarded([&] {
    if (!analysis || !out) throw_error(ErrorKind::Config, "null argument");
    *out = copy_out(analysis->session.heatmap_svg());
  });
}

ovx_status ovx_potentials_json(ovx_analysis* analysis, const char* enum_json,
                               char** out) {
  return guarded([&] {
    if (!analysis || !out) throw_error(ErrorKind::Config, "null argument");
    auto config =
        enumeration_config_from_json(parse_optional_json(enum_json, "enumeration config"));
    *out = copy_out(analysis->session.potentials_json(config).dump(2) + "\n");
  });
}

ovx_status ovx_gridplot_svg(ovx_analysis* analysis, const char* enum_json, char** out) {
  return guarded([&] {
    if (!analysis || !out) throw_error(ErrorKind::Config, "null argument");
    auto config =
        enumeration_config_from_json(parse_optional_json(enum_json, "enumeration config"));
    *out = copy_out(analysis->session.gridplot_svg(config));
  });
}

ovx_status ovx_gridplot_text(ovx_analysis* analysis, const char* enum_json, char** out) {
  return guarded([&] {
    if (!analysis || !out) throw_error(ErrorKind::Config, "null argument");
    auto config =
        enumeration_config_from_json(parse_optional_json(enum_json, "enumeration config"));
    *out = copy_out(analysis->session.gridplot_text(config));
  });
}

ovx_status ovx_overlap_free_json(ovx_analysis* analysis, const char* criterion,
                                 char** out) {
  return guarded([&] {
    if (!analysis || !out) throw_error(ErrorKind::Config, "null argument");
    *out = copy_out(
        analysis->session.overlap_free_json(criterion_from(criterion)).dump(2) + "\n");
  });
}

ovx_status ovx_bound_json(ovx_analysis* analysis, char** out) {
  return guarded([&] {
    if (!analysis || !out) throw_error(ErrorKind::Config, "null argument");
    *out = copy_out(analysis->session.bound_json().dump(2) + "\n");
  });
}

ovx_status ovx_report_json(ovx_analysis* analysis, const char* enum_json,
                           const char* criterion, char** out) {
  return guarded([&] {
    if (!analysis || !out) throw_error(ErrorKind::Config, "null argument");
    auto config =
        enumeration_config_from_json(parse_optional_json(enum_json, "enumeration config"));
    *out = copy_out(
        analysis->session.report_bundle(config, criterion_from(criterion)).dump(2) +
        "\n");
  });
}

ovx_status ovx_oracle_generate(const char* config_json, char** out) {
  return guarded([&] {
    if (!out) throw_error(ErrorKind::Config, "null argument");
    json doc = parse_optional_json(config_json, "generation config");
    GenerationConfig config =
        doc.is_null() ? generation_config_from_json(json::object())
                      : generation_config_from_json(doc);
    SyntheticSynthesis synthesis = generate(config);
    *out = copy_out(synthesis_to_json(synthesis).dump(2) + "\n");
  });
}

ovx_status ovx_oracle_check(const char* fixture_json, char** out) {
  return guarded([&] {
    if (!fixture_json || !out) throw_error(ErrorKind::Config, "null argument");
    json doc = parse_optional_json(fixture_json, "synthesis fixture");
    SyntheticSynthesis synthesis = synthesis_from_json(doc);
    *out = copy_out(oracle_check_json(synthesis).dump(2) + "\n");
  });
}

ovx_status ovx_oracle_check_file(const char* path, char** out) {
  return guarded([&] {
    if (!path || !out) throw_error(ErrorKind::Config, "null argument");
    SyntheticSynthesis synthesis = load_synthesis(path);
    *out = copy_out(oracle_check_json(synthesis).dump(2) + "\n");
  });
}

ovx_status ovx_oracle_sweep(const char* config_json, char** out) {
  return guarded([&] {
    if (!out) throw_error(ErrorKind::Config, "null argument");
    json doc = parse_optional_json(config_json, "sweep config");
    SweepConfig config = doc.is_null() ? sweep_config_from_json(json::object())
                                       : sweep_config_from_json(doc);
    if (const char* env = std::getenv("OVERLAPIX_TIME_BUDGET_SECS")) {
      try {
        config.deadline = Deadline::after_seconds(std::stod(env));
      } catch (const std::exception&) {
        throw_error(ErrorKind::Config,
                    "OVERLAPIX_TIME_BUDGET_SECS is not a number: " + std::string(env));
      }
    }
    SweepReport report = soundness_sweep(config);
    *out = copy_out(sweep_report_to_json(report, config).dump(2) + "\n");
  });
}

void ovx_string_free(char* s) { std::free(s); }

} // extern "C"
