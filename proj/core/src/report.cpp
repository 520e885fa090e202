// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keyweave/report.hpp"

#include <charconv>
#include <cmath>
#include <map>

#include <json.hpp>

#include "csv.hpp"
#include "keyweave/error.hpp"
#include "keyweave/metrics.hpp"
#include "keyweave/png_io.hpp"
#include "text_util.hpp"

namespace keyweave::eval {
namespace {

using ojson = nlohmann::ordered_json;

// Accessors in the same order as metric_rows().
struct FieldRef {
  std::optional<double> (*get)(const MetricReport&);
  void (*set)(MetricReport&, std::optional<double>);
};

template <double MetricReport::*M>
FieldRef required_field() {
  return {[](const MetricReport& r) -> std::optional<double> { return r.*M; },
          [](MetricReport& r, std::optional<double> v) {
            if (!v) throw ParseError("required metric is missing");
            r.*M = *v;
          }};
}

template <std::optional<double> MetricReport::*M>
FieldRef optional_field() {
  return {[](const MetricReport& r) { return r.*M; }, [](MetricReport& r, std::optional<double> v) { r.*M = v; }};
}

const std::array<FieldRef, 8>& fields() {
  static const std::array<FieldRef, 8> f = {
      required_field<&MetricReport::mse_first>(),
      required_field<&MetricReport::image_genvideo_clip>(),
      required_field<&MetricReport::genvideo_text_clip>(),
      optional_field<&MetricReport::genvideo_refvideo_corresponding>(),
      required_field<&MetricReport::genvideo_clip_temporal>(),
      optional_field<&MetricReport::genvideo_refvideo_clip>(),
      optional_field<&MetricReport::dover>(),
      optional_field<&MetricReport::genvideo_refvideo_ssim>(),
  };
  return f;
}

void check_range(std::optional<double> v, double lo, double hi, std::string_view key) {
  if (!v) return;
  if (!std::isfinite(*v) || *v < lo || *v > hi) {
    throw InvalidArgument("metric " + std::string(key) + " = " + text::format_double(*v) + " outside [" +
                          text::format_double(lo) + ", " + text::format_double(hi) + "]");
  }
}

double parse_number(std::string_view s) {
  s = text::trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError("'" + std::string(s) + "' is not a number");
  }
  return v;
}

ojson metrics_json(const MetricReport& r) {
  ojson out = ojson::object();
  for (std::size_t i = 0; i < fields().size(); ++i) {
    const auto v = fields()[i].get(r);
    out[std::string(metric_rows()[i].key)] = v ? ojson(*v) : ojson(nullptr);
  }
  return out;
}

MetricReport metrics_from_json(const ojson& j) {
  if (!j.is_object()) throw ParseError("metric report must be a JSON object");
  MetricReport r;
  for (std::size_t i = 0; i < fields().size(); ++i) {
    const std::string key(metric_rows()[i].key);
    std::optional<double> v;
    if (j.contains(key) && !j[key].is_null()) {
      if (!j[key].is_number()) throw ParseError("metric " + key + " is not a number");
      v = j[key].get<double>();
    }
    try {
      fields()[i].set(r, v);
    } catch (const ParseError&) {
      throw ParseError("metric " + key + " is missing");
    }
  }
  r.validate();
  return r;
}

constexpr std::string_view kCsvHeader = "scope,dimension,metric,key,value\n";

void append_csv_rows(std::string& out, std::string_view scope, const MetricReport& r) {
  for (std::size_t i = 0; i < fields().size(); ++i) {
    const auto& row = metric_rows()[i];
    const auto v = fields()[i].get(r);
    out += csv::quote(scope) + ',' + csv::quote(row.dimension) + ',' + csv::quote(row.metric) + ',' +
           std::string(row.key) + ',' + (v ? text::format_double(*v) : std::string()) + '\n';
  }
}

// scope -> report, in first-seen order.
std::vector<std::pair<std::string, MetricReport>> parse_csv_scopes(std::string_view text) {
  const auto rows = csv::parse(text);
  if (rows.empty() || rows[0] != std::vector<std::string>{"scope", "dimension", "metric", "key", "value"}) {
    throw ParseError("report csv has an unexpected header");
  }
  std::vector<std::string> order;
  std::map<std::string, std::map<std::string, std::optional<double>>> values;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != 5) throw ParseError("report csv row " + std::to_string(i + 1) + " has " +
                                          std::to_string(row.size()) + " fields");
    if (!values.contains(row[0])) order.push_back(row[0]);
    auto& slot = values[row[0]][row[3]];
    if (!text::trim(row[4]).empty()) slot = parse_number(row[4]);
  }
  std::vector<std::pair<std::string, MetricReport>> out;
  for (const auto& scope : order) {
    MetricReport r;
    const auto& vals = values[scope];
    for (std::size_t i = 0; i < fields().size(); ++i) {
      const std::string key(metric_rows()[i].key);
      const auto it = vals.find(key);
      try {
        fields()[i].set(r, it == vals.end() ? std::nullopt : it->second);
      } catch (const ParseError&) {
        throw ParseError("report csv scope '" + scope + "' lacks metric " + key);
      }
    }
    r.validate();
    out.emplace_back(scope, r);
  }
  return out;
}

constexpr std::string_view kEntryScopePrefix = "entry:";

}  // namespace

const std::array<MetricRow, 8>& metric_rows() {
  static const std::array<MetricRow, 8> rows = {{
      {"Control-Video Alignment", "MSE (First)", "mse_first"},
      {"Control-Video Alignment", "Image-GenVideo Clip", "image_genvideo_clip"},
      {"Control-Video Alignment", "GenVideo-Text Clip", "genvideo_text_clip"},
      {"Motion Effects", "GenVideo-RefVideo Clip (Corresponding frames)", "genvideo_refvideo_corresponding"},
      {"Temporal Consistency", "GenVideo Clip", "genvideo_clip_temporal"},
      {"Temporal Consistency", "GenVideo-RefVideo Clip", "genvideo_refvideo_clip"},
      {"Frame Quality", "DOVER", "dover"},
      {"Frame Quality", "GenVideo-RefVideo SSIM", "genvideo_refvideo_ssim"},
  }};
  return rows;
}

void MetricReport::validate() const {
  if (!std::isfinite(mse_first) || mse_first < 0.0) throw InvalidArgument("metric mse_first must be >= 0");
  check_range(image_genvideo_clip, -1.0, 1.0, "image_genvideo_clip");
  check_range(genvideo_text_clip, -1.0, 1.0, "genvideo_text_clip");
  check_range(genvideo_refvideo_corresponding, -1.0, 1.0, "genvideo_refvideo_corresponding");
  check_range(genvideo_clip_temporal, -1.0, 1.0, "genvideo_clip_temporal");
  check_range(genvideo_refvideo_clip, -1.0, 1.0, "genvideo_refvideo_clip");
  check_range(dover, 0.0, 1.0, "dover");
  check_range(genvideo_refvideo_ssim, -1.0, 1.0, "genvideo_refvideo_ssim");
  const int refs = int(genvideo_refvideo_corresponding.has_value()) + int(genvideo_refvideo_clip.has_value()) +
                   int(genvideo_refvideo_ssim.has_value());
  if (refs != 0 && refs != 3) {
    throw InvalidArgument("reference metrics must be all present or all absent");
  }
}

MetricReport build_report(const ReportInputs& in) {
  if (in.input_image == nullptr || in.video == nullptr || in.embedder == nullptr) {
    throw InvalidArgument("build_report needs an input image, a video and an embedder");
  }
  const FrameSequence& video = *in.video;
  const int w = video.width();
  const int h = video.height();
  ImageBuffer input = *in.input_image;
  if (input.width() != w || input.height() != h) {
    input = (w == h) ? ingest(input, w) : resize_bilinear(input, w, h);
  }

  auto& embedder = *in.embedder;
  std::vector<providers::Embedding> gen;
  gen.reserve(video.size());
  for (const auto& f : video.frames()) gen.push_back(embedder.embed_image(f));

  MetricReport r;
  r.mse_first = mse_first(input, video);
  r.image_genvideo_clip = mean_cosine_to(embedder.embed_image(input), gen);
  r.genvideo_text_clip = mean_cosine_to(embedder.embed_text(in.prompt_text), gen);
  r.genvideo_clip_temporal = mean_adjacent_cosine(gen);

  if (in.reference != nullptr) {
    if (in.reference->size() != video.size()) {
      throw DimensionMismatch("reference clip has " + std::to_string(in.reference->size()) +
                              " frames, generated clip has " + std::to_string(video.size()));
    }
    std::vector<ImageBuffer> frames;
    frames.reserve(video.size());
    for (const auto& f : in.reference->frames()) {
      frames.push_back(f.width() == w && f.height() == h ? f : resize_bilinear(f, w, h));
    }
    const FrameSequence reference(std::move(frames), in.reference->rate());
    std::vector<providers::Embedding> ref;
    ref.reserve(reference.size());
    for (const auto& f : reference.frames()) ref.push_back(embedder.embed_image(f));
    const double paired = mean_paired_cosine(gen, ref);
    r.genvideo_refvideo_corresponding = paired;
    r.genvideo_refvideo_clip = paired;
    r.genvideo_refvideo_ssim = ssim_video(video, reference);
  }

  if (in.scorer != nullptr) {
    double sum = 0.0;
    for (const auto& f : video.frames()) sum += in.scorer->score_quality(f);
    r.dover = sum / static_cast<double>(video.size());
  }
  r.validate();
  return r;
}

MetricReport mean_report(std::span<const MetricReport> reports) {
  if (reports.empty()) throw InvalidArgument("cannot average zero reports");
  MetricReport out;
  for (std::size_t i = 0; i < fields().size(); ++i) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : reports) {
      if (const auto v = fields()[i].get(r)) {
        sum += *v;
        ++n;
      }
    }
    // Required fields are present in every report, so n > 0 for them.
    fields()[i].set(out, n ? std::optional<double>(sum / static_cast<double>(n)) : std::nullopt);
  }
  return out;
}

EvaluationReport make_evaluation_report(std::vector<EntryReport> entries) {
  std::vector<MetricReport> metrics;
  metrics.reserve(entries.size());
  for (const auto& e : entries) metrics.push_back(e.metrics);
  EvaluationReport out;
  out.aggregate = mean_report(metrics);
  out.entries = std::move(entries);
  return out;
}

std::string report_to_json(const MetricReport& report) { return metrics_json(report).dump(2) + "\n"; }

MetricReport report_from_json(std::string_view text) {
  const auto j = ojson::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("report is not valid JSON");
  return metrics_from_json(j);
}

std::string report_to_csv(const MetricReport& report) {
  std::string out(kCsvHeader);
  append_csv_rows(out, "aggregate", report);
  return out;
}

MetricReport report_from_csv(std::string_view text) {
  const auto scopes = parse_csv_scopes(text);
  if (scopes.size() != 1) throw ParseError("expected exactly one report in csv");
  return scopes.front().second;
}

std::string evaluation_to_json(const EvaluationReport& report) {
  ojson j = ojson::object();
  j["aggregate"] = metrics_json(report.aggregate);
  ojson entries = ojson::array();
  for (const auto& e : report.entries) entries.push_back({{"id", e.id}, {"metrics", metrics_json(e.metrics)}});
  j["entries"] = std::move(entries);
  return j.dump(2) + "\n";
}

EvaluationReport evaluation_from_json(std::string_view text) {
  const auto j = ojson::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ParseError("evaluation report is not a JSON object");
  if (!j.contains("aggregate")) throw ParseError("evaluation report lacks 'aggregate'");
  EvaluationReport out;
  out.aggregate = metrics_from_json(j["aggregate"]);
  if (j.contains("entries")) {
    for (const auto& e : j["entries"]) {
      if (!e.contains("id") || !e["id"].is_string() || !e.contains("metrics")) {
        throw ParseError("evaluation entry needs 'id' and 'metrics'");
      }
      out.entries.push_back({e["id"].get<std::string>(), metrics_from_json(e["metrics"])});
    }
  }
  return out;
}

std::string evaluation_to_csv(const EvaluationReport& report) {
  std::string out(kCsvHeader);
  append_csv_rows(out, "aggregate", report.aggregate);
  for (const auto& e : report.entries) append_csv_rows(out, std::string(kEntryScopePrefix) + e.id, e.metrics);
  return out;
}

EvaluationReport evaluation_from_csv(std::string_view text) {
  EvaluationReport out;
  bool have_aggregate = false;
  for (auto& [scope, metrics] : parse_csv_scopes(text)) {
    if (scope == "aggregate") {
      out.aggregate = metrics;
      have_aggregate = true;
    } else if (scope.starts_with(kEntryScopePrefix)) {
      out.entries.push_back({scope.substr(kEntryScopePrefix.size()), metrics});
    } else {
      throw ParseError("unknown report csv scope '" + scope + "'");
    }
  }
  if (!have_aggregate) throw ParseError("report csv lacks aggregate rows");
  return out;
}

ReportFormat report_format_from_string(std::string_view name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  throw InvalidArgument("unknown report format '" + std::string(name) + "' (expected json or csv)");
}

void emit_report(const EvaluationReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text_atomic(dir / "report.json", evaluation_to_json(report));
  write_text_atomic(dir / "report.csv", evaluation_to_csv(report));
}

void emit_report(const EvaluationReport& report, const std::filesystem::path& file, ReportFormat format) {
  write_text_atomic(file, format == ReportFormat::kJson ? evaluation_to_json(report) : evaluation_to_csv(report));
}

EvaluationReport load_report(const std::filesystem::path& path) {
  auto file = path;
  if (std::filesystem::is_directory(file)) file /= "report.json";
  const auto bytes = read_file(file);
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  if (file.extension() == ".csv") return evaluation_from_csv(text);
  return evaluation_from_json(text);
}

}  // namespace keyweave::eval
