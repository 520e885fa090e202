// Copyright (C) 2026 The keyweave Authors
// SPDX-License-Identifier: Apache-2.0

#include <csignal>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "keyweave/config.hpp"
#include "keyweave/diffusion.hpp"
#include "keyweave/error.hpp"
#include "keyweave/mock_providers.hpp"
#include "keyweave/pipeline.hpp"
#include "keyweave/png_io.hpp"
#include "keyweave/preferences.hpp"
#include "keyweave/provider_server.hpp"
#include "keyweave/remote_providers.hpp"
#include "keyweave/report.hpp"

namespace {

namespace fs = std::filesystem;
using namespace keyweave;

pipeline::PipelineConfig config_or_defaults(const std::string& path) {
  return path.empty() ? pipeline::PipelineConfig::defaults() : pipeline::load_config(path);
}

providers::RemoteOptions remote_options() {
  providers::RemoteOptions o;
  o.bearer_token = providers::token_from_env();
  return o;
}

void print_nested(const std::exception& e, int depth = 0) {
  std::cerr << (depth == 0 ? "error: " : "  caused by: ") << e.what() << "\n";
  if (const auto* stage = dynamic_cast<const StageError*>(&e); stage && !stage->payload().empty()) {
    std::cerr << "  provider payload: " << stage->payload() << "\n";
  }
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& inner) {
    print_nested(inner, depth + 1);
  } catch (...) {
  }
}

providers::ProviderServer* g_server = nullptr;

extern "C" void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"keyweave: keyframe-bracketed image+text to video pipeline"};
  app.require_subcommand(1);

  std::string config_path;

  auto* run = app.add_subcommand("run", "Generate a video for one image and prompt");
  std::string image_path, text;
  std::optional<int> frames;
  std::optional<std::uint64_t> seed;
  run->add_option("--image", image_path, "Input PNG")->required()->check(CLI::ExistingFile);
  run->add_option("--text", text, "Prompt text")->required();
  run->add_option("--frames", frames, "Frame count (>= 2)");
  run->add_option("--seed", seed, "Base seed");
  run->add_option("--config", config_path, "TOML config")->check(CLI::ExistingFile);

  auto* eval = app.add_subcommand("eval", "Run a dataset manifest and write report.json / report.csv");
  std::string manifest, out_dir;
  eval->add_option("--manifest", manifest, "Dataset manifest (JSON)")->required()->check(CLI::ExistingFile);
  eval->add_option("--config", config_path, "TOML config")->check(CLI::ExistingFile);
  eval->add_option("--out", out_dir, "Output directory")->required();

  auto* report = app.add_subcommand("report", "Print a stored report");
  std::string report_in, format = "json";
  report->add_option("--in", report_in, "Report directory or file")->required()->check(CLI::ExistingPath);
  report->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* prefs = app.add_subcommand("prefs", "Aggregate pairwise preference votes");
  std::string votes_path;
  prefs->add_option("--votes", votes_path, "CSV with item_id,dimension,choice")->required()->check(CLI::ExistingFile);

  auto* serve = app.add_subcommand("serve-mock", "Serve the mock providers over HTTP");
  std::string host = "127.0.0.1";
  int port = 8080;
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port (0 picks one)");

  auto* schedule = app.add_subcommand("schedule", "Print a linear noise schedule");
  double beta_start = diffusion::kDefaultBetaStart, beta_end = diffusion::kDefaultBetaEnd;
  std::size_t steps = diffusion::kDefaultSteps;
  schedule->add_option("--beta-start", beta_start);
  schedule->add_option("--beta-end", beta_end);
  schedule->add_option("--steps", steps);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto p = pipeline::Pipeline::from_config(config_or_defaults(config_path), remote_options());
      const auto request = p.make_request(read_png(image_path), text, frames, seed);
      const auto artifact = p.run(request);
      std::cout << p.artifact_dir(request).string() << "\n";
      std::cerr << "frames: " << artifact.video.size() << "  keywords:";
      for (const auto& k : artifact.prompt_bundle.keywords()) std::cerr << " " << k;
      std::cerr << (p.cache_hits() > 0 ? "  (cached)" : "") << "\n";
    } else if (*eval) {
      auto p = pipeline::Pipeline::from_config(config_or_defaults(config_path), remote_options());
      const auto r = p.evaluate(manifest, out_dir);
      std::cout << (fs::path(out_dir) / "report.json").string() << "\n";
      std::cerr << r.entries.size() << " entries evaluated\n";
    } else if (*report) {
      const auto r = eval::load_report(report_in);
      std::cout << (eval::report_format_from_string(format) == eval::ReportFormat::kCsv ? eval::evaluation_to_csv(r)
                                                                                       : eval::evaluation_to_json(r));
    } else if (*prefs) {
      const auto bytes = read_file(votes_path);
      const auto votes = eval::parse_votes_csv(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
      std::cout << eval::format_summary(eval::aggregate_preferences(votes));
    } else if (*serve) {
      providers::ProviderServer server(providers::make_mock_providers());
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "serving mock providers on " << host << ":" << port << "\n";
      server.listen(host, port);
    } else if (*schedule) {
      diffusion::write_schedule(std::cout, diffusion::make_linear_schedule(beta_start, beta_end, steps));
    }
  } catch (const Error& e) {
    print_nested(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
