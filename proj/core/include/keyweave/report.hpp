// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "keyweave/model.hpp"
#include "keyweave/providers.hpp"

namespace keyweave::eval {

/// Four-dimension metric suite for one generated clip. Reference-dependent
/// fields are empty when no reference clip was supplied; dover is empty when
/// no quality scorer is configured.
struct MetricReport {
  double mse_first = 0.0;
  double image_genvideo_clip = 0.0;
  double genvideo_text_clip = 0.0;
  std::optional<double> genvideo_refvideo_corresponding;
  double genvideo_clip_temporal = 0.0;
  std::optional<double> genvideo_refvideo_clip;
  std::optional<double> dover;
  std::optional<double> genvideo_refvideo_ssim;

  /// Throws InvalidArgument for out-of-range values or a partially filled
  /// reference group.
  void validate() const;

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

/// One row of the table layout: dimension, metric label, report key.
struct MetricRow {
  std::string_view dimension;
  std::string_view metric;
  std::string_view key;
};

/// Rows in table order.
const std::array<MetricRow, 8>& metric_rows();

struct ReportInputs {
  const ImageBuffer* input_image = nullptr;
  std::string prompt_text;
  const FrameSequence* video = nullptr;
  const FrameSequence* reference = nullptr;  ///< optional
  providers::Embedder* embedder = nullptr;
  providers::QualityScorer* scorer = nullptr;  ///< optional
};

/// Computes every field the inputs allow. The input image is ingested to the
/// clip's size (centre crop + resize) before comparison, and so are reference
/// frames of a different size. Every frame is embedded exactly once.
MetricReport build_report(const ReportInputs& inputs);

/// Field-wise mean. Optional fields average over the reports that carry them
/// and stay empty when none does. Throws InvalidArgument on an empty span.
MetricReport mean_report(std::span<const MetricReport> reports);

struct EntryReport {
  std::string id;
  MetricReport metrics;

  friend bool operator==(const EntryReport&, const EntryReport&) = default;
};

/// Per-entry reports plus their mean.
struct EvaluationReport {
  std::vector<EntryReport> entries;
  MetricReport aggregate;

  friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

EvaluationReport make_evaluation_report(std::vector<EntryReport> entries);

// JSON keeps full precision (shortest round-trip form), absent values are
// null. CSV is long format: scope,dimension,metric,key,value in table order,
// aggregate rows first, then each entry; absent values are empty cells.

std::string report_to_json(const MetricReport& report);
MetricReport report_from_json(std::string_view text);
std::string report_to_csv(const MetricReport& report);
MetricReport report_from_csv(std::string_view text);

std::string evaluation_to_json(const EvaluationReport& report);
EvaluationReport evaluation_from_json(std::string_view text);
std::string evaluation_to_csv(const EvaluationReport& report);
EvaluationReport evaluation_from_csv(std::string_view text);

enum class ReportFormat { kJson, kCsv };
ReportFormat report_format_from_string(std::string_view name);

/// Writes report.json and report.csv into `dir` atomically.
void emit_report(const EvaluationReport& report, const std::filesystem::path& dir);
/// Writes a single file in the requested format.
void emit_report(const EvaluationReport& report, const std::filesystem::path& file, ReportFormat format);
/// Re-ingests report.json from a directory, or a .json/.csv file directly.
EvaluationReport load_report(const std::filesystem::path& path);

}  // namespace keyweave::eval
