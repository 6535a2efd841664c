#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "illusory/extraction.hpp"
#include "illusory/levelset.hpp"
#include "illusory/scene.hpp"
#include "illusory/serialization.hpp"

namespace illusory {

struct RunConfig {
  std::optional<SceneSpec> spec;  // either a generated scene ...
  std::filesystem::path scene_file;  // ... or one read from disk
  std::filesystem::path ideal_file;  // optional reference contour
  EvolutionParams params;
  EnergyWeights weights;
  std::filesystem::path out_dir;  // empty: write nothing
  int frame_interval = 0;         // 0: no frames
  std::uint64_t seed = 1;
};

struct RunOutcome {
  SceneFile scene;
  std::optional<Contour> ideal;
  SceneFields fields;
  RunResult run;
  ExtractionResult extraction;
  std::optional<double> hausdorff;
  double final_energy = 0.0;
  Json summary;
};

/// Everything a run records about its inputs.
Json run_parameters(const RunConfig& cfg, const SceneFile& scene);

/// scene -> fields -> evolution -> extraction, writing outputs when out_dir is set.
RunOutcome run_pipeline(const RunConfig& cfg);

/// Entry point of the command-line tool; returns the process exit code.
int run_main(int argc, char** argv);

}  // namespace illusory
