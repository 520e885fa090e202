// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keyweave/pipeline.hpp"

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <exception>
#include <set>
#include <thread>

#include <json.hpp>

#include "keyweave/error.hpp"
#include "keyweave/image.hpp"
#include "keyweave/keyframe_generator.hpp"
#include "keyweave/png_io.hpp"
#include "keyweave/prompt_enhancer.hpp"
#include "keyweave/video_generator.hpp"

namespace keyweave::pipeline {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using providers::Role;

constexpr std::string_view kArtifactFormat = "keyweave.artifact.v1";

// Counts calls made during one run; forwards to the shared provider.
struct CallCounter {
  std::atomic<long> run{0};
  std::shared_ptr<std::atomic<long>> total;
  void bump() {
    run.fetch_add(1);
    total->fetch_add(1);
  }
};

class CountingEnhancer final : public providers::Enhancer {
 public:
  CountingEnhancer(std::shared_ptr<Enhancer> inner, CallCounter& c) : inner_(std::move(inner)), c_(c) {}
  std::string identity() const override { return inner_->identity(); }

 protected:
  std::string do_complete(const providers::EnhanceQuery& q) override {
    c_.bump();
    return inner_->complete(q);
  }

 private:
  std::shared_ptr<Enhancer> inner_;
  CallCounter& c_;
};

class CountingDetector final : public providers::Detector {
 public:
  CountingDetector(std::shared_ptr<Detector> inner, CallCounter& c) : inner_(std::move(inner)), c_(c) {}
  std::string identity() const override { return inner_->identity(); }

 protected:
  MaskSet do_detect(const ImageBuffer& image, std::span<const std::string> labels) override {
    c_.bump();
    return inner_->detect(image, labels);
  }

 private:
  std::shared_ptr<Detector> inner_;
  CallCounter& c_;
};

class CountingKeyframe final : public providers::KeyframeGenerator {
 public:
  CountingKeyframe(std::shared_ptr<KeyframeGenerator> inner, CallCounter& c) : inner_(std::move(inner)), c_(c) {}
  std::string identity() const override { return inner_->identity(); }

 protected:
  ImageBuffer do_generate(const ImageBuffer& image, const MaskSet& masks, std::string_view prompt,
                          std::uint64_t seed) override {
    c_.bump();
    return inner_->generate_keyframe(image, masks, prompt, seed);
  }

 private:
  std::shared_ptr<KeyframeGenerator> inner_;
  CallCounter& c_;
};

class CountingInterpolator final : public providers::Interpolator {
 public:
  CountingInterpolator(std::shared_ptr<Interpolator> inner, CallCounter& c) : inner_(std::move(inner)), c_(c) {}
  std::string identity() const override { return inner_->identity(); }

 protected:
  FrameSequence do_interpolate(const ImageBuffer& start, const ImageBuffer& end, std::string_view prompt,
                               int frame_count, std::uint64_t seed) override {
    c_.bump();
    return inner_->interpolate(start, end, prompt, frame_count, seed);
  }

 private:
  std::shared_ptr<Interpolator> inner_;
  CallCounter& c_;
};

class CountingEmbedder final : public providers::Embedder {
 public:
  CountingEmbedder(std::shared_ptr<Embedder> inner, CallCounter& c) : inner_(std::move(inner)), c_(c) {}
  std::string identity() const override { return inner_->identity(); }

 protected:
  std::vector<double> do_embed_image(const ImageBuffer& image) override {
    c_.bump();
    return inner_->embed_image(image).values;
  }
  std::vector<double> do_embed_text(std::string_view text) override {
    c_.bump();
    return inner_->embed_text(text).values;
  }

 private:
  std::shared_ptr<Embedder> inner_;
  CallCounter& c_;
};

providers::ProviderSet counted(const providers::ProviderSet& p, CallCounter& c) {
  providers::ProviderSet out;
  out.enhancer = std::make_shared<CountingEnhancer>(p.enhancer, c);
  out.detector = std::make_shared<CountingDetector>(p.detector, c);
  out.keyframe = std::make_shared<CountingKeyframe>(p.keyframe, c);
  out.interpolator = std::make_shared<CountingInterpolator>(p.interpolator, c);
  out.embedder = std::make_shared<CountingEmbedder>(p.embedder, c);
  out.scorer = p.scorer;
  return out;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t secs = std::chrono::system_clock::to_time_t(now);
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[40];
  const std::size_t n = std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", &tm);
  std::snprintf(buf + n, sizeof(buf) - n, ".%03dZ", static_cast<int>(ms));
  return buf;
}

// Runs one stage, turning library failures into StageError with the cause nested.
template <class F>
auto in_stage(std::string_view name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ProviderError& e) {
    std::throw_with_nested(StageError(std::string(name), e.what(), e.payload()));
  } catch (const EnhancementError& e) {
    std::throw_with_nested(StageError(std::string(name), e.what(), json(e.raw_responses()).dump()));
  } catch (const Error& e) {
    std::throw_with_nested(StageError(std::string(name), e.what()));
  }
}

json read_json(const fs::path& path) {
  const auto bytes = read_file(path);
  auto j = json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded()) throw ParseError("malformed JSON in " + path.string());
  return j;
}

std::string mask_file(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "masks/mask_%03zu.png", i);
  return buf;
}

json score_json(const keyframe::CandidateScore& s) {
  return {{"l_detect", s.l_detect}, {"l_mask", s.l_mask}, {"l_video", s.l_video}, {"lambda", s.lambda},
          {"total", s.total}};
}

void write_artifact(const fs::path& dir, const GenerationArtifact& a, const keyframe::EndFrameResult& kf,
                    const PipelineConfig& config, const providers::ProviderSet& providers) {
  fs::create_directories(dir / "masks");
  fs::create_directories(dir / "candidates");
  write_png(dir / "input.png", a.request.input_image);
  write_png(dir / "end_frame.png", a.end_frame);
  write_video_dir(dir / "video", a.video, a.provenance);

  json masks = json::array();
  for (std::size_t i = 0; i < a.mask_set.size(); ++i) {
    const auto& e = a.mask_set.entries()[i];
    write_mask_png(dir / mask_file(i), e.mask);
    masks.push_back({{"label", e.label}, {"confidence", e.confidence}, {"file", mask_file(i)}});
  }

  json candidates = json::array();
  for (const auto& c : kf.candidates) {
    json row{{"seed", c.seed}};
    if (c.image) {
      const std::string file = "candidates/candidate_" + std::to_string(c.seed) + ".png";
      write_png(dir / file, *c.image);
      row["file"] = file;
    } else {
      row["file"] = nullptr;
    }
    row["score"] = c.score ? score_json(*c.score) : json(nullptr);
    row["error"] = c.error.empty() ? json(nullptr) : json(c.error);
    candidates.push_back(std::move(row));
  }
  json detections = json::array();
  for (const auto& e : kf.detections.entries()) {
    detections.push_back({{"label", e.label}, {"confidence", e.confidence}});
  }
  json scores{{"selected_seed", kf.candidates[kf.selected].seed},
              {"selected", score_json(kf.score)},
              {"candidates", std::move(candidates)},
              {"detections", std::move(detections)}};
  write_text_atomic(dir / "scores.json", scores.dump(2) + "\n");

  json provenance = json::array();
  for (const auto& p : a.provenance) {
    provenance.push_back({{"stage", p.stage}, {"role", p.role}, {"provider", p.provider}});
  }
  json identities = json::object();
  for (const auto& [role, id] : providers.identities()) identities[role] = id;

  json m;
  m["format"] = kArtifactFormat;
  m["request_digest"] = a.request_digest;
  m["request"] = {{"image", "input.png"},
                  {"user_text", a.request.user_text},
                  {"frame_count", a.request.frame_count},
                  {"seed", a.request.seed},
                  {"lambda_mask", a.request.lambda_mask},
                  {"candidate_count", a.request.candidate_count}};
  m["prompt_bundle"] = {{"keywords", a.prompt_bundle.keywords()},
                        {"frame_state", a.prompt_bundle.frame_state()},
                        {"optimization_prompt", a.prompt_bundle.optimization_prompt()},
                        {"raw_user_text", a.prompt_bundle.raw_user_text()}};
  m["masks"] = std::move(masks);
  m["end_frame"] = "end_frame.png";
  m["video"] = {{"dir", "video"},
                {"frame_count", a.video.size()},
                {"fps", {{"num", a.video.rate().num}, {"den", a.video.rate().den}}},
                {"width", a.video.width()},
                {"height", a.video.height()}};
  m["config"] = json::parse(config.snapshot_json());
  m["providers"] = std::move(identities);
  m["provenance"] = std::move(provenance);
  write_text_atomic(dir / "manifest.json", m.dump(2) + "\n");

  json telemetry = json::array();
  for (const auto& t : a.telemetry) {
    telemetry.push_back({{"stage", t.stage},
                         {"started_at", t.started_at},
                         {"duration_ms", t.duration_ms},
                         {"provider_calls", t.provider_calls},
                         {"retries", t.retries}});
  }
  write_text_atomic(dir / "telemetry.json", telemetry.dump(2) + "\n");
}

// Moves a finished temp directory into place. A concurrent writer of the same
// digest may win the race; its content is identical so the loser is dropped.
void publish(const fs::path& tmp, const fs::path& dir, bool replace) {
  std::error_code ec;
  if (replace) fs::remove_all(dir, ec);
  fs::rename(tmp, dir, ec);
  if (!ec) return;
  fs::remove_all(tmp);
  if (!fs::exists(dir / "manifest.json")) {
    throw IoError("cannot publish artifact " + dir.string() + ": " + ec.message());
  }
}

}  // namespace

std::vector<DatasetEntry> load_dataset_manifest(const fs::path& path) {
  const json j = read_json(path);
  if (!j.is_array()) throw ParseError(path.string() + ": dataset manifest must be a JSON array");
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    fs::path q(p);
    return q.is_absolute() ? q : base / q;
  };
  std::vector<DatasetEntry> out;
  std::set<std::string> ids;
  for (const auto& row : j) {
    try {
      DatasetEntry e;
      e.id = row.at("id").get<std::string>();
      e.image_path = resolve(row.at("image_path").get<std::string>());
      e.text = row.at("text").get<std::string>();
      if (row.contains("reference_video_dir") && !row["reference_video_dir"].is_null()) {
        e.reference_video_dir = resolve(row["reference_video_dir"].get<std::string>());
      }
      if (!ids.insert(e.id).second) throw ParseError("duplicate entry id '" + e.id + "'");
      out.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw ParseError(path.string() + ": bad entry: " + ex.what());
    }
  }
  return out;
}

GenerationArtifact load_artifact(const fs::path& dir) {
  const json m = read_json(dir / "manifest.json");
  try {
    if (m.at("format").get<std::string>() != kArtifactFormat) {
      throw ParseError("unsupported artifact format in " + dir.string());
    }
    const auto& r = m.at("request");
    GenerationRequest request{read_png(dir / r.at("image").get<std::string>()),
                              r.at("user_text").get<std::string>(),
                              r.at("frame_count").get<int>(),
                              r.at("seed").get<std::uint64_t>(),
                              r.at("lambda_mask").get<double>(),
                              r.at("candidate_count").get<int>()};
    const auto& b = m.at("prompt_bundle");
    PromptBundle bundle(b.at("keywords").get<std::vector<std::string>>(), b.at("frame_state").get<std::string>(),
                        b.at("optimization_prompt").get<std::string>(), b.at("raw_user_text").get<std::string>());
    std::vector<MaskEntry> entries;
    for (const auto& e : m.at("masks")) {
      entries.push_back({e.at("label").get<std::string>(), e.at("confidence").get<double>(),
                         read_mask_png(dir / e.at("file").get<std::string>())});
    }
    MaskSet masks(request.input_image.width(), request.input_image.height(), std::move(entries));
    ImageBuffer end_frame = read_png(dir / m.at("end_frame").get<std::string>());
    FrameSequence video = read_video_dir(dir / m.at("video").at("dir").get<std::string>());
    std::vector<ProvenanceRecord> provenance;
    for (const auto& p : m.at("provenance")) {
      provenance.push_back(
          {p.at("stage").get<std::string>(), p.at("role").get<std::string>(), p.at("provider").get<std::string>()});
    }
    std::vector<StageTelemetry> telemetry;
    if (fs::exists(dir / "telemetry.json")) {
      for (const auto& t : read_json(dir / "telemetry.json")) {
        telemetry.push_back({t.at("stage").get<std::string>(), t.at("started_at").get<std::string>(),
                             t.at("duration_ms").get<double>(), t.at("provider_calls").get<int>(),
                             t.at("retries").get<long>()});
      }
    }
    GenerationArtifact a{m.at("request_digest").get<std::string>(),
                         std::move(request),
                         std::move(bundle),
                         std::move(masks),
                         std::move(end_frame),
                         std::move(video),
                         std::move(provenance),
                         std::move(telemetry)};
    a.validate();
    return a;
  } catch (const json::exception& e) {
    throw ParseError("malformed artifact manifest in " + dir.string() + ": " + e.what());
  }
}

Pipeline::Pipeline(PipelineConfig config, providers::ProviderSet providers, RetryCounters retries)
    : config_(std::move(config)), providers_(std::move(providers)), retries_(std::move(retries)) {
  config_.validate();
  providers_.validate();
  template_ = std::make_shared<const prompt::EnhancerTemplate>(
      config_.template_path ? prompt::EnhancerTemplate::from_file(*config_.template_path)
                            : prompt::EnhancerTemplate::default_template());
}

Pipeline Pipeline::from_config(PipelineConfig config, providers::RemoteOptions options) {
  auto built = make_providers(config, std::move(options));
  return Pipeline(std::move(config), std::move(built.set), std::move(built.retries));
}

GenerationRequest Pipeline::make_request(const ImageBuffer& image, std::string text, std::optional<int> frame_count,
                                         std::optional<std::uint64_t> seed) const {
  GenerationRequest r{ingest(image, config_.working_resolution),
                      std::move(text),
                      frame_count.value_or(config_.frame_count),
                      seed.value_or(config_.seed),
                      config_.lambda_mask,
                      config_.candidate_count};
  r.validate();
  return r;
}

fs::path Pipeline::artifact_dir(const GenerationRequest& request) const {
  return config_.artifact_root / content_digest(request);
}

GenerationArtifact Pipeline::run(const GenerationRequest& request) {
  request.validate();
  const std::string digest = content_digest(request);
  const fs::path dir = config_.artifact_root / digest;
  if (config_.cache_enabled && fs::exists(dir / "manifest.json")) {
    cache_hits_->fetch_add(1);
    return load_artifact(dir);
  }
  return generate(request, digest);
}

GenerationArtifact Pipeline::generate(const GenerationRequest& request, const std::string& digest) {
  CallCounter counter{{}, calls_};
  const providers::ProviderSet p = counted(providers_, counter);
  std::vector<StageTelemetry> telemetry;

  auto timed = [&](std::string_view stage, std::initializer_list<Role> roles, auto&& body) {
    StageTelemetry t{std::string(stage), utc_now(), 0.0, 0, 0};
    const long calls_before = counter.run.load();
    const long retries_before = retries_.total(roles);
    const auto start = std::chrono::steady_clock::now();
    auto result = in_stage(stage, body);
    t.duration_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    t.provider_calls = static_cast<int>(counter.run.load() - calls_before);
    t.retries = retries_.total(roles) - retries_before;
    telemetry.push_back(std::move(t));
    return result;
  };

  PromptBundle bundle = timed(kStageEnhance, {Role::kEnhancer}, [&] {
    return prompt::enhance_with_retry(*p.enhancer, request.user_text, "", *template_, config_.enhance_attempts)
        .with_user_text(request.user_text);
  });

  keyframe::EndFrameResult kf =
      timed(kStageKeyframe, {Role::kDetector, Role::kKeyframe, Role::kEmbedder}, [&] {
        return keyframe::generate_end_frame(request, bundle, p, {config_.confidence_floor});
      });

  FrameSequence video = timed(kStageVideo, {Role::kInterpolator}, [&] {
    return video::synthesize(request.input_image, kf.end_frame, bundle, request.frame_count, request.seed,
                             *p.interpolator);
  });

  const auto ids = providers_.identities();
  auto id_of = [&](Role r) {
    const auto it = ids.find(std::string(to_string(r)));
    return it == ids.end() ? std::string() : it->second;
  };
  std::vector<ProvenanceRecord> provenance;
  auto record = [&](std::string_view stage, Role r) {
    provenance.push_back({std::string(stage), std::string(to_string(r)), id_of(r)});
  };
  record(kStageEnhance, Role::kEnhancer);
  record(kStageKeyframe, Role::kDetector);
  record(kStageKeyframe, Role::kKeyframe);
  record(kStageKeyframe, Role::kEmbedder);
  record(kStageVideo, Role::kInterpolator);

  GenerationArtifact artifact{digest,          request,          std::move(bundle),        kf.key_masks,
                              kf.end_frame,    std::move(video), std::move(provenance),    std::move(telemetry)};
  artifact.validate();

  static std::atomic<unsigned long> serial{0};
  const fs::path tmp = config_.artifact_root / (".tmp-" + digest + "-" + std::to_string(::getpid()) + "-" +
                                                std::to_string(serial.fetch_add(1)));
  try {
    write_artifact(tmp, artifact, kf, config_, providers_);
    publish(tmp, config_.artifact_root / digest, !config_.cache_enabled);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(tmp, ec);
    throw;
  }
  return artifact;
}

eval::EvaluationReport Pipeline::evaluate(const fs::path& manifest, const fs::path& out_dir) {
  const auto entries = load_dataset_manifest(manifest);
  if (entries.empty()) throw InvalidArgument(manifest.string() + ": dataset manifest has no entries");

  const std::size_t n = entries.size();
  std::vector<std::optional<eval::EntryReport>> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      const auto& e = entries[i];
      try {
        const auto request = make_request(read_png(e.image_path), e.text);
        const auto artifact = run(request);
        std::optional<FrameSequence> reference;
        if (e.reference_video_dir) reference = read_video_dir(*e.reference_video_dir);
        eval::ReportInputs in;
        in.input_image = &artifact.request.input_image;
        in.prompt_text = e.text;
        in.video = &artifact.video;
        in.reference = reference ? &*reference : nullptr;
        in.embedder = providers_.embedder.get();
        in.scorer = providers_.scorer.get();
        results[i] = eval::EntryReport{e.id, eval::build_report(in)};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  {
    const std::size_t width = std::min<std::size_t>(static_cast<std::size_t>(config_.parallelism), n);
    std::vector<std::jthread> pool;
    for (std::size_t k = 1; k < width; ++k) pool.emplace_back(worker);
    worker();
  }
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  std::vector<eval::EntryReport> reports;
  reports.reserve(n);
  for (auto& r : results) reports.push_back(std::move(*r));
  auto report = eval::make_evaluation_report(std::move(reports));
  eval::emit_report(report, out_dir);
  return report;
}

}  // namespace keyweave::pipeline
