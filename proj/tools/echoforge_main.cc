// Copyright 2026 The EchoForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "echoforge/audio_io.h"
#include "echoforge/compare.h"
#include "echoforge/scene.h"
#include "echoforge/simulation.h"

namespace {

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 3;

std::filesystem::path OracleWavPath(const std::filesystem::path& out) {
  std::filesystem::path p = out;
  p.replace_filename(out.stem().string() + ".oracle" +
                     out.extension().string());
  return p;
}

nlohmann::json ReadJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return nlohmann::json::parse(in);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric acoustics renderer with SH-domain reverberation"};
  app.require_subcommand(1);

  echoforge::RenderConfig config;
  std::string scene_path, out_path, metrics_path, mode = "both";
  CLI::App* render = app.add_subcommand("render", "Render a scene to WAV");
  render->add_option("--scene", scene_path, "Scene JSON")->required();
  render->add_option("--out", out_path, "Output WAV")->required();
  render->add_option("--metrics", metrics_path, "Metrics JSON output");
  render->add_option("--duration", config.duration, "Seconds")
      ->capture_default_str();
  render->add_option("--seed", config.seed)->capture_default_str();
  render->add_option("--mode", mode, "reverb, convolution or both")
      ->capture_default_str();
  render->add_option("--rays", config.rays, "Primary rays per update")
      ->capture_default_str();
  render->add_option("--oracle-rays", config.oracle_rays)
      ->capture_default_str();
  render->add_option("--max-order", config.max_order)->capture_default_str();
  render->add_option("--sample-rate", config.sample_rate)
      ->capture_default_str();
  render->add_option("--hrtf", config.hrtf, "builtin:sphere or HRTF file")
      ->capture_default_str();
  render->add_option("--panning", config.panning, "Speaker layout JSON");
  render->add_option("--sim-rate", config.sim_rate, "Updates per second")
      ->capture_default_str();
  render->add_option("--block-size", config.block_size)
      ->capture_default_str();

  std::string ours_path, oracle_path, thresholds_path, report_path;
  CLI::App* compare =
      app.add_subcommand("compare", "Compare two acoustic metric sets");
  compare->add_option("--ours", ours_path)->required();
  compare->add_option("--oracle", oracle_path)->required();
  compare->add_option("--thresholds", thresholds_path);
  compare->add_option("--report", report_path, "Report JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsageError;
  }

  if (render->parsed()) {
    try {
      config.mode = echoforge::ParseRenderMode(mode);
      config.Validate();
    } catch (const std::invalid_argument& e) {
      std::cerr << e.what() << "\n" << render->help();
      return kUsageError;
    }
    try {
      const echoforge::SceneModel scene =
          echoforge::LoadSceneFile(scene_path);
      const echoforge::RenderResult result =
          echoforge::RunRender(scene, config);
      const std::filesystem::path out(out_path);
      switch (config.mode) {
        case echoforge::RenderMode::kReverb:
          echoforge::WriteWav(out, result.reverb_audio);
          break;
        case echoforge::RenderMode::kConvolution:
          echoforge::WriteWav(out, result.oracle_audio);
          break;
        case echoforge::RenderMode::kBoth:
          echoforge::WriteWav(out, result.reverb_audio);
          echoforge::WriteWav(OracleWavPath(out), result.oracle_audio);
          break;
      }
      if (!metrics_path.empty()) {
        std::ofstream m(metrics_path);
        m << result.metrics.dump(1) << '\n';
        if (!m) throw std::runtime_error("cannot write " + metrics_path);
      }
      std::cout << result.metrics["summary"].dump(1) << '\n';
    } catch (const std::exception& e) {
      std::cerr << "render failed: " << e.what() << '\n';
      return kRuntimeError;
    }
    return 0;
  }

  try {
    const echoforge::AcousticMetrics ours =
        echoforge::ExtractMetrics(ReadJson(ours_path), "ours");
    const echoforge::AcousticMetrics oracle =
        echoforge::ExtractMetrics(ReadJson(oracle_path), "oracle");
    echoforge::CompareThresholds thresholds;
    if (!thresholds_path.empty()) {
      thresholds =
          echoforge::CompareThresholds::FromJson(ReadJson(thresholds_path));
    }
    const echoforge::ComparisonReport report =
        echoforge::CompareMetrics(ours, oracle, thresholds);
    const std::string text = report.ToJson().dump(1);
    if (report_path.empty()) {
      std::cout << text << '\n';
    } else {
      std::ofstream r(report_path);
      r << text << '\n';
    }
    return report.pass ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "compare rejected: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "compare failed: " << e.what() << '\n';
    return kRuntimeError;
  }
}
