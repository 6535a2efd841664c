#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "illusory/extraction.hpp"
#include "illusory/field.hpp"
#include "illusory/scene.hpp"

namespace illusory {

struct EvolutionParams {
  double alpha = 0.1;
  double beta = 1.0;
  double lambda = 100.0;
  double sigma = 2.0;
  double dt = 0.0;  // non-positive selects 0.2 / (alpha + beta)
  double eps_reg = 1e-4;
  int border_margin = 4;
  int max_steps = 20000;
  int stop_window = 1000;
  double stop_threshold = 0.5;  // cells flipped across the whole window
  double clamp = 10.0;
  int max_dt_retries = 4;
  /// Steps between supervision audits in release builds; debug builds audit every step.
  int audit_interval = 100;
  /// Steps between history records; the stagnation test runs every step regardless.
  int history_interval = 1;

  [[nodiscard]] double effective_dt() const { return dt > 0.0 ? dt : 0.2 / (alpha + beta); }
  [[nodiscard]] EnergyWeights weights() const { return {alpha, beta, alpha, 1.0}; }
  [[nodiscard]] FieldParams field_params() const { return {sigma, lambda, weights()}; }
  /// Throws std::invalid_argument naming the first bad value.
  void validate() const;
};

struct LevelSetState {
  ScalarField phi;
  int step_index = 0;
  Mask supervision_mask;
  EvolutionParams params;
  double dt = 0.0;
};

class UnstableStep : public std::runtime_error {
 public:
  UnstableStep(int i, int j);
  int i;
  int j;
};

/// +1 on cells at least `border_margin` cells from the border, -1 elsewhere.
ScalarField initialize(int width, int height, int border_margin);

/// Reset phi to -1 on the mask.
void apply_supervision(ScalarField& phi, const Mask& mask);
bool supervision_holds(const ScalarField& phi, const Mask& mask);

/// One explicit update of phi_t = |grad phi| div(G grad phi / |grad phi|_eps),
/// followed by the supervision reset and the clamp.
LevelSetState evolve_step(const LevelSetState& state, const ScalarField& G);
/// In-place variant writing through a scratch buffer.
void evolve_step_into(const LevelSetState& state, const ScalarField& G, ScalarField& out);

enum class RunVerdict { stagnated, collapsed, not_converged };
std::string to_string(RunVerdict v);

struct HistoryEntry {
  int step = 0;
  std::size_t area = 0;  // positive cells
  double length = 0.0;
  double energy = 0.0;
  bool increase = false;  // energy rose by more than 1% since the previous record
};

struct RunResult {
  LevelSetState state;
  RunVerdict verdict = RunVerdict::not_converged;
  std::vector<HistoryEntry> history;
  int steps = 0;
  int dt_retries = 0;
  std::size_t audits = 0;
  std::size_t audit_failures = 0;
  double seconds = 0.0;
};

using StepObserver = std::function<void(const LevelSetState&)>;

/// Iterate until the positive region stagnates, vanishes, or max_steps pass.
RunResult run(const SceneFields& fields, const EvolutionParams& params, const StepObserver& observer = {});

/// Cells in one mask but not the other.
std::size_t symmetric_difference(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b);

}  // namespace illusory
