// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keyweave/keyframe_generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <set>

#include "keyweave/error.hpp"
#include "text_util.hpp"

namespace keyweave::keyframe {

CandidateScore CandidateScore::combine(double l_detect, double l_mask, double l_video, double lambda) {
  return {l_detect, l_mask, l_video, lambda, l_detect + lambda * l_mask + l_video};
}

MaskSet select_key_masks(const MaskSet& masks, std::span<const std::string> keywords, double confidence_floor) {
  std::vector<MaskEntry> picked;
  for (const auto& e : masks.entries()) {
    if (e.confidence < confidence_floor) continue;
    const bool named = std::any_of(keywords.begin(), keywords.end(),
                                   [&](const std::string& k) { return text::iequals(k, e.label); });
    if (named) picked.push_back(e);
  }
  std::stable_sort(picked.begin(), picked.end(), [](const MaskEntry& a, const MaskEntry& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return a.label < b.label;
  });
  return MaskSet(masks.width(), masks.height(), std::move(picked));
}

CandidateScore score_candidate(const ImageBuffer& candidate, const ImageBuffer& source, const MaskSet& key_masks,
                               std::string_view text_prompt, double lambda, providers::Embedder& embedder,
                               providers::Detector& detector) {
  if (!candidate.same_shape(source)) throw DimensionMismatch("candidate and source differ in size");
  if (key_masks.width() != source.width() || key_masks.height() != source.height()) {
    throw DimensionMismatch("key masks do not match the source size");
  }

  double l_detect = 1.0;
  double l_mask = 0.0;
  if (!key_masks.empty()) {
    // Unique key labels, first spelling wins.
    std::vector<std::string> labels;
    std::set<std::string> seen;
    for (const auto& e : key_masks.entries()) {
      if (seen.insert(text::lower(e.label)).second) labels.push_back(e.label);
    }
    const MaskSet found = detector.detect(candidate, labels);
    double conf_sum = 0.0;
    for (const auto& label : labels) {
      double best = 0.0;
      for (const auto& e : found.entries()) {
        if (text::iequals(e.label, label)) best = std::max(best, e.confidence);
      }
      conf_sum += best;
    }
    l_detect = 1.0 - conf_sum / static_cast<double>(labels.size());

    const Mask region = key_masks.union_mask();
    const auto a = candidate.data();
    const auto b = source.data();
    double diff = 0.0;
    std::size_t samples = 0;
    for (std::size_t i = 0; i < region.bits().size(); ++i) {
      if (!region.bits()[i]) continue;
      for (int c = 0; c < 3; ++c) diff += std::abs(int(a[3 * i + c]) - int(b[3 * i + c]));
      samples += 3;
    }
    if (samples > 0) l_mask = diff / (255.0 * static_cast<double>(samples));
  }

  const double cos = providers::cosine(embedder.embed_text(text_prompt), embedder.embed_image(candidate));
  const double l_video = std::clamp(1.0 - cos, 0.0, 2.0) / 2.0;
  return CandidateScore::combine(l_detect, l_mask, l_video, lambda);
}

std::string keyframe_prompt(const PromptBundle& bundle) {
  std::string out = bundle.frame_state();
  const auto user = text::trim(bundle.raw_user_text());
  if (!user.empty()) {
    out += ' ';
    out += user;
  }
  return out;
}

EndFrameResult generate_end_frame(const GenerationRequest& request, const PromptBundle& bundle,
                                  const providers::ProviderSet& providers, const Options& options) {
  request.validate();
  const ImageBuffer& source = request.input_image;
  MaskSet detections = providers.detector->detect(source, bundle.keywords());
  MaskSet key_masks = select_key_masks(detections, bundle.keywords(), options.confidence_floor);
  const std::string prompt = keyframe_prompt(bundle);

  struct Outcome {
    std::optional<ImageBuffer> image;
    std::string error;
  };

  const auto n = static_cast<std::size_t>(request.candidate_count);
  std::vector<std::future<Outcome>> generating;
  generating.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t seed = request.seed + i;
    generating.push_back(std::async(std::launch::async, [&, seed]() -> Outcome {
      try {
        return {providers.keyframe->generate_keyframe(source, key_masks, prompt, seed), {}};
      } catch (const std::exception& e) {
        return {std::nullopt, e.what()};
      }
    }));
  }
  std::vector<Outcome> outcomes;
  outcomes.reserve(n);
  for (auto& f : generating) outcomes.push_back(f.get());

  // Scoring failures propagate; launch all, then collect in seed order.
  std::vector<std::future<CandidateScore>> scoring(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!outcomes[i].image) continue;
    scoring[i] = std::async(std::launch::async, [&, i] {
      return score_candidate(*outcomes[i].image, source, key_masks, prompt, request.lambda_mask,
                             *providers.embedder, *providers.detector);
    });
  }

  std::vector<Candidate> candidates(n);
  std::optional<std::size_t> best;
  std::exception_ptr scoring_error;
  for (std::size_t i = 0; i < n; ++i) {
    candidates[i].seed = request.seed + i;
    candidates[i].error = outcomes[i].error;
    candidates[i].image = outcomes[i].image;
    if (!scoring[i].valid()) continue;
    try {
      candidates[i].score = scoring[i].get();
    } catch (...) {
      if (!scoring_error) scoring_error = std::current_exception();
      continue;
    }
    // Strict '<' keeps the earlier (lower-seed) candidate on ties.
    if (!best || candidates[i].score->total < candidates[*best].score->total) best = i;
  }
  if (scoring_error) std::rethrow_exception(scoring_error);
  if (!best) {
    throw ProviderError(ProviderErrorKind::kUnavailable,
                        "all " + std::to_string(n) + " keyframe candidates failed; first error: " +
                            candidates.front().error);
  }

  EndFrameResult result{*candidates[*best].image, *candidates[*best].score, std::move(key_masks),
                        std::move(detections), std::move(candidates), *best};
  return result;
}

}  // namespace keyweave::keyframe
