#include "illusory/levelset.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>

namespace illusory {

void EvolutionParams::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (alpha < 0.0) fail("alpha must be nonnegative");
  if (!(beta > 0.0)) fail("beta must be positive");
  if (!(lambda > 0.0)) fail("lambda must be positive");
  if (!(sigma > 0.0)) fail("sigma must be positive");
  if (!(effective_dt() > 0.0)) fail("dt must be positive");
  if (!(eps_reg > 0.0)) fail("eps_reg must be positive");
  if (border_margin < 2) fail("border_margin must be at least 2");
  if (max_steps < 0) fail("max_steps must be nonnegative");
  if (stop_window < 1) fail("stop_window must be positive");
  if (!(stop_threshold >= 0.0)) fail("stop_threshold must be nonnegative");
  if (!(clamp > 1.0)) fail("clamp must exceed 1");
  if (max_dt_retries < 0) fail("max_dt_retries must be nonnegative");
  if (audit_interval < 1) fail("audit_interval must be positive");
  if (history_interval < 1) fail("history_interval must be positive");
}

UnstableStep::UnstableStep(int ci, int cj)
    : std::runtime_error("unstable step at cell (" + std::to_string(ci) + ", " + std::to_string(cj) + ")"),
      i(ci),
      j(cj) {}

ScalarField initialize(int width, int height, int border_margin) {
  if (border_margin < 1) throw std::invalid_argument("border margin must be positive");
  if (border_margin >= std::min(width, height) / 4.0) {
    throw std::invalid_argument("border margin must be below a quarter of the grid size");
  }
  ScalarField phi(width, height, -1.0);
  for (int j = border_margin; j < height - border_margin; ++j) {
    for (int i = border_margin; i < width - border_margin; ++i) phi(i, j) = 1.0;
  }
  return phi;
}

void apply_supervision(ScalarField& phi, const Mask& mask) {
  for (std::size_t k = 0; k < phi.values.size(); ++k) {
    if (mask.cells[k]) phi.values[k] = -1.0;
  }
}

bool supervision_holds(const ScalarField& phi, const Mask& mask) {
  for (std::size_t k = 0; k < phi.values.size(); ++k) {
    if (mask.cells[k] && phi.values[k] != -1.0) return false;
  }
  return true;
}

void evolve_step_into(const LevelSetState& state, const ScalarField& G, ScalarField& out) {
  const ScalarField& phi = state.phi;
  const int W = phi.width;
  const int H = phi.height;
  if (!phi.same_shape(G)) throw std::invalid_argument("phi and G differ in shape");
  if (!state.supervision_mask.cells.empty() &&
      (state.supervision_mask.width != W || state.supervision_mask.height != H)) {
    throw std::invalid_argument("supervision mask differs in shape");
  }
  const double eps2 = state.params.eps_reg * state.params.eps_reg;
  const double dt = state.dt > 0.0 ? state.dt : state.params.effective_dt();
  const double M = state.params.clamp;
  // Ghost cells reflect the outermost row and column.
  auto at = [&](int i, int j) {
    i = std::clamp(i, 0, W - 1);
    j = std::clamp(j, 0, H - 1);
    return phi(i, j);
  };
  // fx(i, j): flux through the half point (i + 1/2, j); fy likewise in y.
  std::vector<double> fx(static_cast<std::size_t>(W) * H, 0.0);
  std::vector<double> fy(static_cast<std::size_t>(W) * H, 0.0);
  for (int j = 0; j < H; ++j) {
    for (int i = 0; i + 1 < W; ++i) {
      const double dx = phi(i + 1, j) - phi(i, j);
      const double dy = 0.25 * ((at(i + 1, j + 1) - at(i + 1, j - 1)) + (at(i, j + 1) - at(i, j - 1)));
      const double g = 0.5 * (G(i, j) + G(i + 1, j));
      fx[phi.index(i, j)] = g * dx / std::sqrt(dx * dx + dy * dy + eps2);
    }
  }
  for (int j = 0; j + 1 < H; ++j) {
    for (int i = 0; i < W; ++i) {
      const double dy = phi(i, j + 1) - phi(i, j);
      const double dx = 0.25 * ((at(i + 1, j + 1) - at(i - 1, j + 1)) + (at(i + 1, j) - at(i - 1, j)));
      const double g = 0.5 * (G(i, j) + G(i, j + 1));
      fy[phi.index(i, j)] = g * dy / std::sqrt(dx * dx + dy * dy + eps2);
    }
  }
  if (!out.same_shape(phi)) out = ScalarField(W, H, 0.0);
  const bool supervised = !state.supervision_mask.cells.empty();
  for (int j = 0; j < H; ++j) {
    for (int i = 0; i < W; ++i) {
      const std::size_t k = phi.index(i, j);
      const double east = fx[k];
      const double west = i > 0 ? fx[k - 1] : 0.0;
      const double north = fy[k];
      const double south = j > 0 ? fy[k - static_cast<std::size_t>(W)] : 0.0;
      const double div = (east - west) + (north - south);
      const double gx = 0.5 * (at(i + 1, j) - at(i - 1, j));
      const double gy = 0.5 * (at(i, j + 1) - at(i, j - 1));
      double v = phi.values[k] + dt * std::sqrt(gx * gx + gy * gy + eps2) * div;
      if (!std::isfinite(v)) throw UnstableStep(i, j);
      if (supervised && state.supervision_mask.cells[k]) v = -1.0;
      out.values[k] = std::clamp(v, -M, M);
    }
  }
}

LevelSetState evolve_step(const LevelSetState& state, const ScalarField& G) {
  LevelSetState next = state;
  evolve_step_into(state, G, next.phi);
  ++next.step_index;
  return next;
}

std::string to_string(RunVerdict v) {
  switch (v) {
    case RunVerdict::stagnated: return "stagnated";
    case RunVerdict::collapsed: return "collapsed";
    case RunVerdict::not_converged: return "not converged";
  }
  return "not converged";
}

std::size_t symmetric_difference(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  std::size_t n = 0;
  for (std::size_t k = 0; k < a.size(); ++k) n += (a[k] != b[k]) ? 1 : 0;
  return n;
}

namespace {

std::vector<std::uint8_t> positive_cells(const ScalarField& phi) {
  std::vector<std::uint8_t> m(phi.values.size());
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = phi.values[k] > 0.0 ? 1 : 0;
  return m;
}

HistoryEntry record(const LevelSetState& s, const ScalarField& G, std::size_t area) {
  HistoryEntry h;
  h.step = s.step_index;
  h.area = area;
  const ExtractionResult ex = zero_contour(s.phi);
  for (const ExtractedContour& c : ex.contours) {
    h.length += contour_length(c.contour);
    h.energy += relaxed_energy(c.contour, G);
  }
  for (const Polyline& f : ex.fragments) {
    h.length += polyline_length(f);
    h.energy += relaxed_energy(f, false, G);
  }
  return h;
}

}  // namespace

RunResult run(const SceneFields& fields, const EvolutionParams& params, const StepObserver& observer) {
  params.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const ScalarField& G = fields.G;
  RunResult result;
  LevelSetState& state = result.state;
  state.params = params;
  state.dt = params.effective_dt();
  state.supervision_mask = fields.mask;
  state.phi = initialize(G.width, G.height, params.border_margin);
  apply_supervision(state.phi, state.supervision_mask);

#ifdef NDEBUG
  const int audit_every = params.audit_interval;
#else
  const int audit_every = 1;
#endif

  std::deque<std::vector<std::uint8_t>> window;
  window.push_back(positive_cells(state.phi));
  auto count = [](const std::vector<std::uint8_t>& m) {
    return static_cast<std::size_t>(std::count(m.begin(), m.end(), std::uint8_t{1}));
  };
  result.history.push_back(record(state, G, count(window.back())));

  ScalarField scratch(G.width, G.height, 0.0);
  while (state.step_index < params.max_steps) {
    for (int attempt = 0;; ++attempt) {
      try {
        evolve_step_into(state, G, scratch);
        break;
      } catch (const UnstableStep&) {
        if (attempt >= params.max_dt_retries) throw;
        state.dt *= 0.5;
        ++result.dt_retries;
      }
    }
    std::swap(state.phi, scratch);
    ++state.step_index;

    if (state.step_index % audit_every == 0) {
      ++result.audits;
      if (!supervision_holds(state.phi, state.supervision_mask)) ++result.audit_failures;
    }
    if (observer) observer(state);

    window.push_back(positive_cells(state.phi));
    if (static_cast<int>(window.size()) > params.stop_window + 1) window.pop_front();
    const std::size_t area = count(window.back());

    if (state.step_index % params.history_interval == 0 || area == 0) {
      HistoryEntry h = record(state, G, area);
      const HistoryEntry& prev = result.history.back();
      h.increase = h.energy > prev.energy * 1.01 && prev.energy > 0.0;
      result.history.push_back(h);
    }
    if (area == 0) {
      result.verdict = RunVerdict::collapsed;
      break;
    }
    if (static_cast<int>(window.size()) == params.stop_window + 1) {
      const double moved = static_cast<double>(symmetric_difference(window.front(), window.back()));
      if (moved < params.stop_threshold) {
        result.verdict = RunVerdict::stagnated;
        break;
      }
    }
  }
  result.steps = state.step_index;
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace illusory
