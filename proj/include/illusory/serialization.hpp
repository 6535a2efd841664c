#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "illusory/energy.hpp"
#include "illusory/extraction.hpp"
#include "illusory/field.hpp"
#include "illusory/levelset.hpp"
#include "illusory/scene.hpp"

namespace illusory {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

Json to_json(const Configuration& config);
Configuration configuration_from_json(const Json& j);
Json to_json(const Contour& contour);
Contour contour_from_json(const Json& j);
Json to_json(const SceneSpec& spec);
SceneSpec scene_spec_from_json(const Json& j);
Json to_json(const EvolutionParams& p);
/// Missing keys keep the values already in `base`.
EvolutionParams evolution_params_from_json(const Json& j, EvolutionParams base = {});
Json to_json(const EnergyWeights& w);
EnergyWeights energy_weights_from_json(const Json& j, EnergyWeights base = {});
Json to_json(const StructureReport& r);
Json to_json(const MinimalityReport& r);

struct SceneFile {
  Configuration config;
  int width = 128;
  int height = 128;
  Json params;  // generator parameters, informational
};

void write_scene(const std::filesystem::path& path, const SceneFile& scene);
SceneFile read_scene(const std::filesystem::path& path);

void write_contour(const std::filesystem::path& path, const Contour& contour, const Json& params = Json::object());
Contour read_contour(const std::filesystem::path& path);
/// Several closed contours plus open fragments, largest first.
void write_contours(const std::filesystem::path& path, const ExtractionResult& result, const Json& params);

void write_report(const std::filesystem::path& path, const MinimalityReport& report, const Json& params);
/// id, family, epsilon, delta per tested perturbation.
void write_samples_csv(const std::filesystem::path& path, const MinimalityReport& report, const Json& params);

/// Binary PGM (P5). Values map linearly from [lo, hi] onto 0..255, clamped;
/// row j of the grid is image row j. The comment line holds `params` as JSON.
void write_pgm(const std::filesystem::path& path, const ScalarField& f, double lo, double hi,
               const Json& params = Json::object());
/// Values come back scaled to [0, 1].
ScalarField read_pgm(const std::filesystem::path& path);
/// 255 on objects, 128 where phi > 0, 0 elsewhere.
ScalarField overlay_image(const ScalarField& u, const ScalarField& phi);

/// "ILCFIELD", uint32 width, uint32 height, then row-major little-endian
/// doubles. Parameters go to a sidecar `<path>.json`.
void write_raw(const std::filesystem::path& path, const ScalarField& f, const Json& params = Json::object());
ScalarField read_raw(const std::filesystem::path& path);

/// step,area,length,energy,increase with a leading "# params" line.
void write_history_csv(const std::filesystem::path& path, const std::vector<HistoryEntry>& history,
                       const Json& params);

void write_svg(const std::filesystem::path& path, const Configuration& config,
               const std::vector<Contour>& contours, int width, int height, const Json& params = Json::object());

}  // namespace illusory
