#include "illusory/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

namespace illusory {

std::string to_string(EnergyKind kind) {
  switch (kind) {
    case EnergyKind::object: return "object";
    case EnergyKind::contour_bundle: return "contour-bundle";
    case EnergyKind::mixture: return "mixture";
  }
  return "object";
}

EnergyKind parse_energy_kind(const std::string& name) {
  if (name == "object") return EnergyKind::object;
  if (name == "contour-bundle" || name == "bundle") return EnergyKind::contour_bundle;
  if (name == "mixture") return EnergyKind::mixture;
  throw EnergyError("unknown energy kind: " + name);
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::local_minimum: return "local-minimum";
    case Verdict::refuted: return "refuted";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace {

void check_weights(const EnergyWeights& w) {
  if (!(w.beta > 0.0)) throw EnergyError("beta must be positive");
  if (w.alpha < 0.0 || w.alpha_o < 0.0 || w.alpha_c < 0.0) {
    throw EnergyError("alpha weights must be nonnegative");
  }
}

void require_admissible(const Contour& contour, const Configuration& config, double tol) {
  const Admissibility a = is_admissible(contour, config, tol);
  if (!a) throw EnergyError("inadmissible contour: " + a.diagnostic);
}

DecomposeOptions objects_only(DecomposeOptions o) {
  o.include_bundle = false;
  return o;
}

}  // namespace

double energy_object(const Contour& contour, const Configuration& config, const EnergyWeights& w,
                     const DecomposeOptions& options) {
  check_weights(w);
  require_admissible(contour, config, options.tol);
  const Decomposition d = decompose(contour, config, objects_only(options));
  return w.alpha * d.real_length + w.beta * d.imaginary_length;
}

std::size_t anchor_count(const Contour& contour, const Configuration& config, double tol) {
  std::size_t n = 0;
  for (Point e : bundle_endpoints(config)) {
    if (distance_to_polygon_boundary(e, contour.vertices) <= tol) ++n;
  }
  return n;
}

double energy_contour_bundle(const Contour& contour, const Configuration& config,
                             const EnergyWeights& w, const DecomposeOptions& options) {
  check_weights(w);
  require_admissible(contour, config, options.tol);
  return -w.alpha * static_cast<double>(anchor_count(contour, config, options.tol)) +
         w.beta * contour_length(contour);
}

double energy_mixture(const Contour& contour, const Configuration& config, const EnergyWeights& w,
                      const DecomposeOptions& options) {
  check_weights(w);
  require_admissible(contour, config, options.tol);
  const Decomposition d = decompose(contour, config, objects_only(options));
  return w.alpha_o * d.real_length -
         w.alpha_c * static_cast<double>(anchor_count(contour, config, options.tol)) +
         w.beta * d.imaginary_length;
}

double energy(EnergyKind kind, const Contour& contour, const Configuration& config,
              const EnergyWeights& w, const DecomposeOptions& options) {
  switch (kind) {
    case EnergyKind::object: return energy_object(contour, config, w, options);
    case EnergyKind::contour_bundle: return energy_contour_bundle(contour, config, w, options);
    case EnergyKind::mixture: return energy_mixture(contour, config, w, options);
  }
  throw EnergyError("unknown energy kind");
}

CriticalRatio critical_ratio(const Contour& contour, const Configuration& config,
                             const DecomposeOptions& options) {
  CriticalRatio r;
  const std::vector<KinkRecord> kinks = kink_set(config);
  if (!kinks.empty()) {
    r.kinks_present = true;
    double inner = kPi;
    for (const KinkRecord& k : kinks) inner = std::min(inner, k.inner_span);
    r.r1 = std::sin(inner / 2.0);
    r.note = "r1 = sin(theta*_min / 2) over all kinks of the configuration";
  } else {
    r.note = "no kinks; r1 taken as 1";
  }
  const Decomposition d = decompose(contour, config, options);
  if (!d.imaginary_loop && !d.components.empty()) {
    double worst = 0.0;
    for (const JunctionRecord& j : junction_set(d, config, options)) {
      if (!j.hinge) worst = std::max(worst, j.turn);
    }
    r.r2 = std::cos(worst);
  }
  r.r_c = std::min({r.r1, r.r2, 1.0});
  return r;
}

namespace {

bool near_bundle_endpoint(Point p, const Configuration& config, double tol) {
  for (Point e : bundle_endpoints(config)) {
    if (distance(p, e) <= tol) return true;
  }
  return false;
}

}  // namespace

StructureReport check_structure(const Contour& contour, const Configuration& config,
                                const StructureOptions& options) {
  StructureReport rep;
  const double tol = options.decompose.tol;
  Decomposition d;
  try {
    d = decompose(contour, config, options.decompose);
  } catch (const GeometryError& e) {
    rep.straight = false;
    rep.failures.push_back(e.what());
    return rep;
  }
  if (d.imaginary_loop) {
    rep.straight = false;
    rep.failures.push_back("closed imaginary loop");
    return rep;
  }
  const Contour& lab = d.labeled;
  for (std::size_t c = 0; c < d.components.size(); ++c) {
    const ImaginaryComponent& comp = d.components[c];
    const Point a = lab.vertex(comp.start_vertex);
    const Point b = lab.vertex(comp.end_vertex);
    const double chord = std::max(distance(a, b), std::numeric_limits<double>::min());
    for (std::size_t q = 1; q < comp.edge_count; ++q) {
      const std::size_t v = (comp.start_vertex + q) % lab.size();
      const double dev = distance_point_segment(lab.vertex(v), a, b) / chord;
      rep.max_deviation = std::max(rep.max_deviation, dev);
      if (dev > options.straight_rel_tol) {
        rep.straight = false;
        rep.failures.push_back("component " + std::to_string(c) + " bent at vertex " + std::to_string(v));
      }
    }
  }

  std::vector<JunctionRecord> junctions;
  try {
    junctions = junction_set(d, config, options.decompose);
  } catch (const GeometryError& e) {
    rep.hinges_distinct = false;
    rep.failures.push_back(e.what());
    return rep;
  }
  const double tau = options.tau_angle;
  for (const JunctionRecord& j : junctions) {
    const bool anchored = near_bundle_endpoint(j.point, config, tol);
    if (j.hinge) {
      // Each hinge shows up twice, once per component; report it once.
      if (!j.at_start) continue;
      if (options.kind == EnergyKind::object || !anchored) {
        rep.hinges_distinct = false;
        rep.failures.push_back("components share a hinge at vertex " + std::to_string(j.vertex));
      }
      continue;
    }
    if (options.kind == EnergyKind::contour_bundle) continue;
    if (options.kind == EnergyKind::mixture && anchored) continue;
    rep.max_turn = std::max(rep.max_turn, j.turn);
    rep.min_idle = std::min(rep.min_idle, j.idle_angle);
    if (!(j.turn < kPi / 2.0 - tau)) {
      rep.turns = false;
      rep.failures.push_back("turn at vertex " + std::to_string(j.vertex) + " is not below pi/2");
    }
    if (!(j.idle_angle >= kPi / 2.0 - tau)) {
      rep.idle = false;
      rep.failures.push_back("idle angle at vertex " + std::to_string(j.vertex) + " is below pi/2");
    }
  }
  rep.idle_slack = rep.min_idle - kPi / 2.0;
  return rep;
}

double turn_slide_increment(double alpha, double beta, double phi, double slide) {
  return slide * (beta * std::cos(phi) - alpha);
}

double idle_slide_increment(double alpha, double beta, double phi_idle, double slide) {
  return slide * (alpha - beta * std::cos(phi_idle));
}

double hinge_cut_increment(double beta, double theta, double eps) {
  return beta * (2.0 * eps * std::sin(theta / 2.0) - 2.0 * eps);
}

namespace {

Contour with_vertices(std::vector<Point> v) {
  Contour c;
  c.vertices = std::move(v);
  return c;
}

Point pushed_out(Point p, const Configuration& config, double tol) {
  return in_region_interior(p, config, tol) ? project_to_region_boundary(p, config) : p;
}

// Points met when walking from z along the boundary of a region in direction
// `dir`, ending `length` further along. Empty when z is not on a region edge
// aligned with dir.
std::vector<Point> walk_boundary(const Configuration& config, Point z, Point dir, double length, double tol) {
  for (const Region& r : config.regions) {
    const std::size_t n = r.vertices.size();
    for (std::size_t e = 0; e < n; ++e) {
      const Point a = r.vertices[e];
      const Point b = r.vertices[(e + 1) % n];
      if (distance_point_segment(z, a, b) > tol) continue;
      const Point t = unit(b - a);
      const int step = dot(t, dir) > 1.0 - 1e-9 ? 1 : (dot(t, dir) < -1.0 + 1e-9 ? -1 : 0);
      if (step == 0) continue;
      std::vector<Point> out;
      Point cur = z;
      double left = length;
      std::size_t idx = step == 1 ? (e + 1) % n : e;  // next polygon vertex in walking order
      for (std::size_t guard = 0; guard <= n; ++guard) {
        const Point target = r.vertices[idx];
        const double seg = distance(cur, target);
        if (seg >= left) {
          out.push_back(cur + (left / seg) * (target - cur));
          return out;
        }
        left -= seg;
        out.push_back(target);
        cur = target;
        idx = step == 1 ? (idx + 1) % n : (idx + n - 1) % n;
      }
      return {};
    }
  }
  return {};
}

std::vector<Point> insert_after(const std::vector<Point>& v, std::size_t k, const std::vector<Point>& pts) {
  std::vector<Point> out(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k + 1));
  out.insert(out.end(), pts.begin(), pts.end());
  out.insert(out.end(), v.begin() + static_cast<std::ptrdiff_t>(k + 1), v.end());
  return out;
}

}  // namespace

std::vector<Perturbation> structured_perturbations(const Contour& contour, const Configuration& config,
                                                   double eps, const DecomposeOptions& options) {
  const double tol = options.tol;
  const Decomposition d = decompose(contour, config, options);
  const Contour& lab = d.labeled;
  const std::vector<Point>& v = lab.vertices;
  const std::size_t n = v.size();
  std::vector<Perturbation> out;
  auto add = [&](std::string family, std::string description, std::vector<Point> pts) {
    out.push_back({std::move(family), std::move(description), eps, with_vertices(std::move(pts))});
  };
  auto moved = [&](std::size_t k, Point p) {
    std::vector<Point> w = v;
    w[k] = p;
    return w;
  };

  // (a) displace imaginary vertices, or bump a single imaginary edge.
  for (std::size_t c = 0; c < d.components.size(); ++c) {
    const ImaginaryComponent& comp = d.components[c];
    const std::string tag = "component " + std::to_string(c);
    if (comp.edge_count == 1) {
      const std::size_t k = comp.start_vertex % n;
      const Point a = v[k];
      const Point b = v[(k + 1) % n];
      const Point m = 0.5 * (a + b);
      const Point nrm = perp(unit(b - a));
      for (double s : {1.0, -1.0}) {
        add("bend", tag + (s > 0 ? " bumped left" : " bumped right"),
            insert_after(v, k, {m + (s * eps) * nrm}));
      }
      continue;
    }
    for (std::size_t q = 1; q < comp.edge_count; ++q) {
      const std::size_t k = (comp.start_vertex + q) % n;
      const Point p = v[(k + n - 1) % n];
      const Point x = v[k];
      const Point nx = v[(k + 1) % n];
      const Point foot = p + dot(x - p, unit(nx - p)) * unit(nx - p);
      const double dev = distance(x, foot);
      const std::string at = tag + " vertex " + std::to_string(k);
      if (dev > 1e-12) add("bend", at + " toward chord", moved(k, x + std::min(1.0, eps / dev) * (foot - x)));
      const Point nrm = perp(unit(nx - p));
      add("bend", at + " left", moved(k, x + eps * nrm));
      add("bend", at + " right", moved(k, x - eps * nrm));
    }
  }

  // (b) cut hinges and contact points.
  if (!lab.on_boundary.empty()) {
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t pk = (k + n - 1) % n;
      if (!lab.on_boundary[k] || lab.labels[pk] != EdgeLabel::imaginary ||
          lab.labels[k] != EdgeLabel::imaginary) {
        continue;
      }
      const double e = std::min(eps, 0.45 * std::min(lab.edge_length(pk), lab.edge_length(k)));
      const Point a = v[k] + e * unit(v[pk] - v[k]);
      const Point b = v[k] + e * unit(v[(k + 1) % n] - v[k]);
      std::vector<Point> w = v;
      w[k] = a;
      w.insert(w.begin() + static_cast<std::ptrdiff_t>(k + 1), b);
      add("hinge-cut", "cut vertex " + std::to_string(k), std::move(w));
    }
  }

  // (c) and (d) slide junction roots.
  if (!d.imaginary_loop) {
    std::vector<JunctionRecord> junctions;
    try {
      junctions = junction_set(d, config, options);
    } catch (const GeometryError&) {
    }
    for (const JunctionRecord& j : junctions) {
      if (j.hinge) continue;
      const std::size_t k = j.vertex % n;
      const std::size_t real_edge = j.at_start ? (k + n - 1) % n : k;
      const std::string at = "junction at vertex " + std::to_string(k);
      const double slide = std::min(eps, 0.45 * lab.edge_length(real_edge));
      add("turn-slide", at, moved(k, v[k] - slide * j.t_re));
      if (j.has_idle && j.idle_angle < kPi) {
        std::vector<Point> walk = walk_boundary(config, v[k], j.t_idle, eps, tol);
        if (walk.empty()) continue;
        std::vector<Point> w;
        if (j.at_start) {
          w = insert_after(v, k, walk);
        } else {
          std::reverse(walk.begin(), walk.end());
          w = insert_after(v, (k + n - 1) % n, walk);
        }
        add("idle-slide", at, std::move(w));
      }
    }
  }

  // (e) lift a piece of a real edge off the boundary.
  if (!lab.labels.empty()) {
    for (std::size_t k = 0; k < n; ++k) {
      if (lab.labels[k] != EdgeLabel::real) continue;
      const Point a = v[k];
      const Point b = v[(k + 1) % n];
      const double len = distance(a, b);
      if (len <= 4.0 * tol) continue;
      const double e = std::min(eps, 0.25 * len);
      const Point m = 0.5 * (a + b);
      const Point t = unit(b - a);
      for (double s : {1.0, -1.0}) {
        const Point nrm = s * perp(t);
        if (in_region_interior(m + e * nrm, config, tol)) continue;
        add("drift", "lift real edge " + std::to_string(k), insert_after(v, k, {m - e * t, m + e * nrm, m + e * t}));
        break;
      }
    }
  }

  // (f) displace kinks traversed by the real part.
  if (!lab.labels.empty()) {
    const std::vector<KinkRecord> kinks = kink_set(config);
    for (std::size_t k = 0; k < n; ++k) {
      const bool real_side = lab.labels[k] == EdgeLabel::real || lab.labels[(k + n - 1) % n] == EdgeLabel::real;
      if (!real_side) continue;
      const bool at_kink = std::any_of(kinks.begin(), kinks.end(),
                                       [&](const KinkRecord& r) { return distance(r.point, v[k]) <= tol; });
      if (!at_kink) continue;
      for (int q = 0; q < 8; ++q) {
        const double ang = q * kPi / 4.0;
        const Point p = pushed_out(v[k] + eps * Point{std::cos(ang), std::sin(ang)}, config, tol);
        add("kink", "kink at vertex " + std::to_string(k) + " direction " + std::to_string(q), moved(k, p));
      }
    }
  }

  // Uniform shrink of a contour that never touches the configuration.
  const bool touches = std::any_of(lab.on_boundary.begin(), lab.on_boundary.end(), [](bool b) { return b; });
  if (d.imaginary_loop || !touches) {
    Point c;
    for (Point p : v) c = c + p;
    c = (1.0 / static_cast<double>(n)) * c;
    double rmax = 0.0;
    for (Point p : v) rmax = std::max(rmax, distance(p, c));
    if (rmax > 0.0) {
      const double s = std::min(0.5, eps / rmax);
      std::vector<Point> w = v;
      for (Point& p : w) p = c + (1.0 - s) * (p - c);
      add("loop-shrink", "shrink toward centroid", std::move(w));
    }
  }
  return out;
}

MinimalityReport verify_local_minimum(const Contour& contour, const Configuration& config,
                                      const EnergyWeights& w, const VerifyOptions& options) {
  check_weights(w);
  if (options.kind == EnergyKind::object && !(w.alpha / w.beta < 1.0)) {
    throw EnergyError("object energy needs alpha/beta < 1");
  }
  if (options.kind == EnergyKind::mixture && !(w.alpha_o / w.beta < 1.0)) {
    throw EnergyError("mixture energy needs alpha_o/beta < 1");
  }
  const DecomposeOptions& dopt = options.structure.decompose;
  const double tol = dopt.tol;
  require_admissible(contour, config, tol);

  MinimalityReport rep;
  rep.kind = options.kind;
  rep.budget = options.budget;
  rep.seed = options.seed;
  StructureOptions sopt = options.structure;
  sopt.kind = options.kind;
  rep.structure = check_structure(contour, config, sopt);
  try {
    rep.ratio = critical_ratio(contour, config, dopt);
  } catch (const GeometryError& e) {
    rep.ratio.note = e.what();
  }
  const double e0 = energy(options.kind, contour, config, w, dopt);
  rep.energy = e0;
  rep.eta = 1e-9 * contour_length(contour) * w.beta;

  const Decomposition d = decompose(contour, config, dopt);
  const Contour& lab = d.labeled;
  double h = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < contour.size(); ++k) h = std::min(h, contour.edge_length(k));
  // Anchors are worth a fixed reward; keep moves small enough not to trade one away.
  if (options.kind == EnergyKind::contour_bundle) h = std::min(h, w.alpha / (2.0 * w.beta));
  if (options.kind == EnergyKind::mixture) h = std::min(h, w.alpha_c / (2.0 * w.beta));
  rep.h = h;
  rep.epsilons = {h / 8.0, h / 4.0, h / 2.0};

  // Returns nullopt-like NaN for inadmissible perturbations.
  auto delta_of = [&](const Contour& c) {
    if (!is_admissible(c, config, tol)) return std::numeric_limits<double>::quiet_NaN();
    try {
      return energy(options.kind, c, config, w, dopt) - e0;
    } catch (const std::exception&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  auto record = [&](const std::string& family, const std::string& description, double eps, double delta) {
    Sample s;
    s.id = rep.samples.size();
    s.family = family;
    s.description = description;
    s.epsilon = eps;
    s.delta = delta;
    rep.samples.push_back(s);
    ++rep.samples_tested;
  };

  const bool structured = options.budget > 0 || !rep.structure.passed();
  // family/description -> (negative count, admissible count)
  std::map<std::pair<std::string, std::string>, std::pair<int, int>> tally;
  if (structured && h > 0.0) {
    for (double eps : rep.epsilons) {
      for (const Perturbation& p : structured_perturbations(contour, config, eps, dopt)) {
        const double delta = delta_of(p.contour);
        if (std::isnan(delta)) continue;
        record(p.family, p.description, eps, delta);
        auto& t = tally[{p.family, p.description}];
        ++t.second;
        if (delta < -rep.eta) {
          ++t.first;
          rep.witnesses.push_back({p.family, p.description, eps, delta, false});
        }
      }
    }
    for (Witness& wit : rep.witnesses) {
      const auto& t = tally[{wit.family, wit.description}];
      wit.confirmed = t.first >= 2 && t.first == t.second;
    }
  }

  if (options.budget > 0 && h > 0.0) {
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> magnitude(rep.epsilons.front(), rep.epsilons.back());
    std::uniform_int_distribution<std::size_t> pick(0, lab.size() - 1);
    const std::vector<Point>& v = lab.vertices;
    for (std::size_t s = 0; s < options.budget; ++s) {
      for (int attempt = 0; attempt < 32; ++attempt) {
        const std::size_t k = pick(rng);
        const double a = angle(rng);
        const double m = magnitude(rng);
        const Point dir{std::cos(a), std::sin(a)};
        auto candidate = [&](double mag) {
          std::vector<Point> u = v;
          u[k] = pushed_out(v[k] + mag * dir, config, tol);
          return with_vertices(std::move(u));
        };
        const double delta = delta_of(candidate(m));
        if (std::isnan(delta)) continue;
        const std::string desc = "vertex " + std::to_string(k) + " angle " + std::to_string(a);
        record("random", desc, m, delta);
        if (delta < -rep.eta) {
          const double half = delta_of(candidate(0.5 * m));
          rep.witnesses.push_back({"random", desc, m, delta, !std::isnan(half) && half < -rep.eta});
        }
        break;
      }
    }
  }

  std::stable_sort(rep.witnesses.begin(), rep.witnesses.end(),
                   [](const Witness& a, const Witness& b) { return a.delta < b.delta; });
  const bool confirmed = std::any_of(rep.witnesses.begin(), rep.witnesses.end(),
                                     [](const Witness& x) { return x.confirmed; });
  if (confirmed) {
    rep.verdict = Verdict::refuted;
    rep.note = "energy decreases under a perturbation confirmed at a second magnitude";
  } else if (!rep.witnesses.empty()) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "descent seen at a single magnitude only";
  } else if (options.budget == 0) {
    rep.verdict = Verdict::inconclusive;
    rep.note = rep.structure.passed() ? "budget 0: structural check only" : "structure fails but no descent found";
  } else if (!rep.structure.passed()) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "structure fails but no descent found";
  } else {
    rep.verdict = Verdict::local_minimum;
    rep.note = "sampled certificate: no tested perturbation lowers the energy; not a proof";
  }
  return rep;
}

}  // namespace illusory
