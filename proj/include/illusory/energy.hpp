#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "illusory/geometry.hpp"

namespace illusory {

class EnergyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnergyWeights {
  double alpha = 0.1;
  double beta = 1.0;
  double alpha_o = 0.1;  // mixture: object-real weight
  double alpha_c = 1.0;  // mixture: anchor reward
};

enum class EnergyKind { object, contour_bundle, mixture };

std::string to_string(EnergyKind kind);
EnergyKind parse_energy_kind(const std::string& name);

/// alpha * |real| + beta * |imaginary| with the real part taken on dQ only.
double energy_object(const Contour& contour, const Configuration& config, const EnergyWeights& w,
                     const DecomposeOptions& options = {});
/// Number of bundle endpoints lying within tol of the contour.
std::size_t anchor_count(const Contour& contour, const Configuration& config, double tol = 1e-6);
/// -alpha * (anchored endpoints) + beta * length.
double energy_contour_bundle(const Contour& contour, const Configuration& config,
                             const EnergyWeights& w, const DecomposeOptions& options = {});
double energy_mixture(const Contour& contour, const Configuration& config, const EnergyWeights& w,
                      const DecomposeOptions& options = {});
double energy(EnergyKind kind, const Contour& contour, const Configuration& config,
              const EnergyWeights& w, const DecomposeOptions& options = {});

struct CriticalRatio {
  double r_c = 1.0;
  double r1 = 1.0;  // sin(theta*_min / 2), 1 without kinks
  double r2 = 1.0;  // cos(max turn), 1 without junctions
  bool kinks_present = false;
  std::string note;
};

CriticalRatio critical_ratio(const Contour& contour, const Configuration& config,
                             const DecomposeOptions& options = {});

struct StructureOptions {
  DecomposeOptions decompose;
  /// Hinges are allowed at bundle endpoints for the bundle and mixture
  /// energies; turn and idle conditions apply to object junctions only.
  EnergyKind kind = EnergyKind::object;
  double tau_angle = 1e-6;
  /// Interior vertices of an imaginary component may deviate from its chord
  /// by at most this fraction of the chord length.
  double straight_rel_tol = 1e-9;
};

struct StructureReport {
  bool straight = true;       // condition (i), first half
  bool hinges_distinct = true;  // condition (i), second half
  bool turns = true;          // condition (ii), turn < pi/2
  bool idle = true;           // condition (ii), idle angle >= pi/2
  double max_deviation = 0.0;  // relative chord deviation
  double max_turn = 0.0;
  double min_idle = kPi;
  /// min idle angle minus pi/2; negative values flag the relaxed variant.
  double idle_slack = kPi / 2.0;
  std::vector<std::string> failures;

  [[nodiscard]] bool condition_i() const { return straight && hinges_distinct; }
  [[nodiscard]] bool condition_ii() const { return turns && idle; }
  [[nodiscard]] bool passed() const { return condition_i() && condition_ii(); }
};

StructureReport check_structure(const Contour& contour, const Configuration& config,
                                const StructureOptions& options = {});

// Leading-order increments from the perturbation lemmas.
/// Sliding a junction with turn phi back along its real edge by `slide`.
/// Equals -beta e / tan(pi - phi) - alpha e / sin(pi - phi) with e = slide * sin(phi).
double turn_slide_increment(double alpha, double beta, double phi, double slide);
/// Sliding a junction forward along its idle edge by `slide`.
double idle_slide_increment(double alpha, double beta, double phi_idle, double slide);
/// Cutting a hinge of opening theta at distance eps along both imaginary sides.
double hinge_cut_increment(double beta, double theta, double eps);

enum class Verdict { local_minimum, refuted, inconclusive };
std::string to_string(Verdict v);

struct Perturbation {
  std::string family;
  std::string description;
  double epsilon = 0.0;
  Contour contour;
};

struct Sample {
  std::size_t id = 0;
  std::string family;
  std::string description;
  double epsilon = 0.0;
  double delta = 0.0;
};

struct Witness {
  std::string family;
  std::string description;
  double epsilon = 0.0;
  double delta = 0.0;
  /// Still negative when re-evaluated at other magnitudes.
  bool confirmed = false;
};

struct VerifyOptions {
  EnergyKind kind = EnergyKind::object;
  std::size_t budget = 500;
  std::uint64_t seed = 1;
  StructureOptions structure;
};

struct MinimalityReport {
  Verdict verdict = Verdict::inconclusive;
  EnergyKind kind = EnergyKind::object;
  StructureReport structure;
  CriticalRatio ratio;
  double energy = 0.0;
  double eta = 0.0;
  double h = 0.0;
  std::vector<double> epsilons;
  std::vector<Witness> witnesses;  // sorted by delta
  std::vector<Sample> samples;
  std::size_t samples_tested = 0;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  std::string note;
};

/// Deterministic perturbations from the proofs at magnitude eps.
std::vector<Perturbation> structured_perturbations(const Contour& contour,
                                                   const Configuration& config, double eps,
                                                   const DecomposeOptions& options = {});

MinimalityReport verify_local_minimum(const Contour& contour, const Configuration& config,
                                      const EnergyWeights& w, const VerifyOptions& options = {});

}  // namespace illusory
