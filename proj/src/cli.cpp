#include "illusory/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "illusory/energy.hpp"

namespace illusory {

namespace fs = std::filesystem;

namespace {

SceneFile scene_from_spec(const SceneSpec& spec, std::optional<Contour>* ideal) {
  const GeneratedScene g = generate(spec);
  if (ideal != nullptr) *ideal = g.ideal;
  return SceneFile{g.config, spec.width, spec.height, to_json(spec)};
}

void apply_scene_overrides(SceneSpec& s, const Json& j) {
  if (j.contains("kind")) s.kind = parse_scene_kind(j["kind"].get<std::string>());
  if (j.contains("size")) s.width = s.height = j["size"].get<int>();
  s.width = j.value("width", s.width);
  s.height = j.value("height", s.height);
  s.radius = j.value("radius", s.radius);
  s.mouth_angle = j.value("mouth_angle", s.mouth_angle);
  s.side = j.value("side", s.side);
  s.bundle_length = j.value("bundle_length", s.bundle_length);
  s.anchor_offset = j.value("anchor_offset", s.anchor_offset);
  s.arc_vertices = j.value("arc_vertices", s.arc_vertices);
  if (j.contains("custom")) {
    s.kind = SceneKind::custom;
    s.custom = configuration_from_json(j["custom"]);
  }
}

Json load_config(const std::string& path) {
  if (path.empty()) return Json::object();
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read config " + path);
  try {
    Json j = Json::parse(in);
    if (!j.is_object()) throw FormatError("config must be a JSON object");
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("config " + path + ": " + e.what());
  }
}

std::string frame_name(const char* stem, int step, const char* ext) {
  return fmt::format("{}_{:06d}.{}", stem, step, ext);
}

}  // namespace

Json run_parameters(const RunConfig& cfg, const SceneFile& scene) {
  Json j;
  j["scene"] = scene.params;
  if (!cfg.scene_file.empty()) j["scene_file"] = cfg.scene_file.string();
  j["width"] = scene.width;
  j["height"] = scene.height;
  j["evolution"] = to_json(cfg.params);
  j["weights"] = to_json(cfg.weights);
  j["frame_interval"] = cfg.frame_interval;
  j["seed"] = cfg.seed;
  return j;
}

RunOutcome run_pipeline(const RunConfig& cfg) {
  RunOutcome out;
  if (cfg.spec) {
    out.scene = scene_from_spec(*cfg.spec, &out.ideal);
  } else if (!cfg.scene_file.empty()) {
    out.scene = read_scene(cfg.scene_file);
  } else {
    throw std::invalid_argument("run needs a scene kind or a scene file");
  }
  if (!cfg.ideal_file.empty()) out.ideal = read_contour(cfg.ideal_file);
  const Json params = run_parameters(cfg, out.scene);

  out.fields = compute_fields(out.scene.config, out.scene.width, out.scene.height, cfg.params.field_params());

  const bool writing = !cfg.out_dir.empty();
  if (writing) fs::create_directories(cfg.out_dir);
  StepObserver observer;
  if (writing && cfg.frame_interval > 0) {
    fs::create_directories(cfg.out_dir / "frames");
    observer = [&](const LevelSetState& s) {
      if (s.step_index % cfg.frame_interval != 0) return;
      Json fp = params;
      fp["step"] = s.step_index;
      write_pgm(cfg.out_dir / "frames" / frame_name("frame", s.step_index, "pgm"), overlay_image(out.fields.u, s.phi),
                0.0, 255.0, fp);
      write_raw(cfg.out_dir / "frames" / frame_name("phi", s.step_index, "raw"), s.phi, fp);
    };
  }

  out.run = run(out.fields, cfg.params, observer);
  out.extraction = zero_contour(out.run.state.phi);
  for (const ExtractedContour& c : out.extraction.contours) {
    out.final_energy += relaxed_energy(c.contour, out.fields.G);
  }
  std::string classify_note;
  try {
    annotate(out.extraction, out.scene.config, 1.0);
  } catch (const std::exception& e) {
    classify_note = e.what();
  }
  if (out.ideal && !out.extraction.contours.empty()) {
    out.hausdorff = hausdorff(out.extraction.contours.front().contour, *out.ideal);
  }

  Json& s = out.summary;
  s = Json::object();
  s["format"] = "illusory-summary";
  s["version"] = kFormatVersion;
  s["params"] = params;
  s["verdict"] = to_string(out.run.verdict);
  s["steps"] = out.run.steps;
  s["dt"] = out.run.state.dt;
  s["dt_retries"] = out.run.dt_retries;
  s["audits"] = out.run.audits;
  s["audit_failures"] = out.run.audit_failures;
  s["final_energy"] = out.final_energy;
  s["hausdorff"] = out.hausdorff ? Json(*out.hausdorff) : Json(nullptr);
  s["contours"] = out.extraction.contours.size();
  s["fragments"] = out.extraction.fragments.size();
  if (!out.extraction.contours.empty()) {
    const ExtractedContour& c = out.extraction.contours.front();
    s["area"] = std::abs(c.signed_area);
    s["real_length"] = c.real_length;
    s["imaginary_length"] = c.imaginary_length;
  }
  if (!classify_note.empty()) s["classification_error"] = classify_note;

  if (writing) {
    write_history_csv(cfg.out_dir / "history.csv", out.run.history, params);
    write_contours(cfg.out_dir / "contours.json", out.extraction, params);
    if (!out.extraction.contours.empty()) {
      write_contour(cfg.out_dir / "contour.json", out.extraction.contours.front().contour, params);
    }
    write_raw(cfg.out_dir / "phi.raw", out.run.state.phi, params);
    write_pgm(cfg.out_dir / "final.pgm", overlay_image(out.fields.u, out.run.state.phi), 0.0, 255.0, params);
    std::vector<Contour> cs;
    for (const ExtractedContour& c : out.extraction.contours) cs.push_back(c.contour);
    if (out.ideal) cs.push_back(*out.ideal);
    write_svg(cfg.out_dir / "overlay.svg", out.scene.config, cs, out.scene.width, out.scene.height, params);
    std::ofstream(cfg.out_dir / "summary.json") << s.dump(2) << "\n";
  }
  return out;
}

namespace {

struct SceneFlags {
  std::string kind;
  int size = 0;
  int width = 0;
  int height = 0;
  double radius = 0.0;
  double mouth_deg = 0.0;
  double side = 0.0;
  double bundle_length = 0.0;
  double anchor_offset = 0.0;
  int arc_vertices = 64;

  void add(CLI::App* app) {
    app->add_option("--size", size, "grid width and height");
    app->add_option("--width", width, "grid width");
    app->add_option("--height", height, "grid height");
    app->add_option("--radius", radius, "pac-man radius (cells)");
    app->add_option("--mouth-deg", mouth_deg, "pac-man mouth angle in degrees");
    app->add_option("--side", side, "inducer spacing / square side (cells)");
    app->add_option("--bundle-length", bundle_length, "bundle-square spoke length");
    app->add_option("--anchor-offset", anchor_offset, "bundle-square corner spoke offset");
    app->add_option("--arc-vertices", arc_vertices, "vertices per pac-man arc");
  }

  SceneSpec spec() const {
    SceneSpec s;
    s.kind = parse_scene_kind(kind);
    if (size > 0) s.width = s.height = size;
    if (width > 0) s.width = width;
    if (height > 0) s.height = height;
    s.radius = radius;
    s.mouth_angle = mouth_deg * kPi / 180.0;
    s.side = side;
    s.bundle_length = bundle_length;
    s.anchor_offset = anchor_offset;
    s.arc_vertices = arc_vertices;
    return s;
  }
};

struct EvolutionFlags {
  EvolutionParams p;
  void add(CLI::App* app) {
    app->add_option("--alpha", p.alpha, "real-part weight")->capture_default_str();
    app->add_option("--beta", p.beta, "imaginary-part weight")->capture_default_str();
    app->add_option("--lambda", p.lambda, "edge indicator contrast")->capture_default_str();
    app->add_option("--sigma", p.sigma, "mollifier radius")->capture_default_str();
    app->add_option("--dt", p.dt, "time step; 0 selects 0.2/(alpha+beta)")->capture_default_str();
    app->add_option("--eps-reg", p.eps_reg, "gradient regularization")->capture_default_str();
    app->add_option("--border-margin", p.border_margin, "initial contraction in cells")->capture_default_str();
    app->add_option("--max-steps", p.max_steps, "step limit")->capture_default_str();
    app->add_option("--stop-window", p.stop_window, "stagnation window in steps")->capture_default_str();
    app->add_option("--stop-threshold", p.stop_threshold, "cells flipped across the window")->capture_default_str();
    app->add_option("--history-interval", p.history_interval, "steps between history rows")->capture_default_str();
  }
};

int cmd_generate(const SceneFlags& flags, const std::string& out_dir, const std::string& config) {
  SceneSpec spec = flags.spec();
  const Json cj = load_config(config);
  apply_scene_overrides(spec, cj.value("scene", cj));
  std::optional<Contour> ideal;
  const SceneFile scene = scene_from_spec(spec, &ideal);
  const fs::path dir = cj.value("out", out_dir);
  fs::create_directories(dir);
  const std::string stem = to_string(spec.kind);
  write_scene(dir / (stem + ".scene.json"), scene);
  write_pgm(dir / (stem + ".pgm"), rasterize(scene.config, scene.width, scene.height), 0.0, 1.0, scene.params);
  if (ideal) write_contour(dir / (stem + ".ideal.json"), *ideal, scene.params);
  std::cout << fmt::format("wrote {} scene to {}{}\n", stem, dir.string(), ideal ? " (with ideal contour)" : "");
  return 0;
}

int cmd_run(RunConfig cfg, const SceneFlags& flags, const std::string& scene_file, const std::string& ideal_file,
            const std::string& out_dir, const std::string& config) {
  if (!flags.kind.empty()) cfg.spec = flags.spec();
  cfg.scene_file = scene_file;
  cfg.ideal_file = ideal_file;
  cfg.out_dir = out_dir;
  const Json cj = load_config(config);
  if (cj.contains("scene")) {
    SceneSpec s = cfg.spec.value_or(SceneSpec{});
    apply_scene_overrides(s, cj["scene"]);
    cfg.spec = s;
  }
  if (cj.contains("scene_file")) {
    cfg.scene_file = cj["scene_file"].get<std::string>();
    cfg.spec.reset();
  }
  if (cj.contains("ideal_file")) cfg.ideal_file = cj["ideal_file"].get<std::string>();
  if (cj.contains("params")) cfg.params = evolution_params_from_json(cj["params"], cfg.params);
  if (cj.contains("out")) cfg.out_dir = cj["out"].get<std::string>();
  cfg.frame_interval = cj.value("frame_interval", cfg.frame_interval);
  cfg.seed = cj.value("seed", cfg.seed);
  cfg.weights = EnergyWeights{cfg.params.alpha, cfg.params.beta, cfg.params.alpha, 1.0};
  if (!cfg.spec && cfg.scene_file.empty()) throw CLI::ValidationError("run", "give --scene-kind or --scene");

  const RunOutcome out = run_pipeline(cfg);
  std::cout << fmt::format("verdict {} steps {} energy {:.6g}", out.summary["verdict"].get<std::string>(),
                           out.run.steps, out.final_energy);
  if (out.hausdorff) std::cout << fmt::format(" hausdorff {:.4f}", *out.hausdorff);
  std::cout << fmt::format(" seconds {:.2f}\n", out.run.seconds);
  return 0;
}

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::local_minimum: return 0;
    case Verdict::refuted: return 2;
    case Verdict::inconclusive: return 3;
  }
  return 3;
}

int cmd_verify(const SceneFlags& flags, std::string scene_file, std::string contour_file, std::string energy_kind,
               EnergyWeights w, std::size_t budget, std::uint64_t seed, std::string out, std::string csv,
               const std::string& config) {
  const Json cj = load_config(config);
  scene_file = cj.value("scene_file", scene_file);
  contour_file = cj.value("contour", contour_file);
  energy_kind = cj.value("energy", energy_kind);
  if (cj.contains("weights")) w = energy_weights_from_json(cj["weights"], w);
  budget = cj.value("budget", budget);
  seed = cj.value("seed", seed);
  out = cj.value("out", out);
  csv = cj.value("csv", csv);

  SceneFile scene;
  std::optional<Contour> ideal;
  if (!scene_file.empty()) {
    scene = read_scene(scene_file);
  } else if (!flags.kind.empty() || cj.contains("scene")) {
    SceneSpec s = flags.kind.empty() ? SceneSpec{} : flags.spec();
    if (cj.contains("scene")) apply_scene_overrides(s, cj["scene"]);
    scene = scene_from_spec(s, &ideal);
  } else {
    throw CLI::ValidationError("verify", "give --scene or --scene-kind");
  }
  Contour contour;
  if (!contour_file.empty()) {
    contour = read_contour(contour_file);
  } else if (ideal) {
    contour = *ideal;
  } else {
    throw CLI::ValidationError("verify", "give --contour (the scene has no ideal contour)");
  }

  VerifyOptions opts;
  opts.kind = parse_energy_kind(energy_kind);
  opts.budget = budget;
  opts.seed = seed;
  const MinimalityReport rep = verify_local_minimum(contour, scene.config, w, opts);
  Json params;
  params["scene"] = scene.params;
  if (!scene_file.empty()) params["scene_file"] = scene_file;
  if (!contour_file.empty()) params["contour_file"] = contour_file;
  params["energy"] = to_string(opts.kind);
  params["weights"] = to_json(w);
  params["budget"] = budget;
  params["seed"] = seed;
  if (!out.empty()) write_report(out, rep, params);
  if (!csv.empty()) write_samples_csv(csv, rep, params);
  std::cout << fmt::format("verdict {} structure {} r_c {:.4f} samples {} witnesses {}\n", to_string(rep.verdict),
                           rep.structure.passed() ? "pass" : "fail", rep.ratio.r_c, rep.samples_tested,
                           rep.witnesses.size());
  for (const std::string& f : rep.structure.failures) std::cout << "  structure: " << f << "\n";
  if (!rep.witnesses.empty()) {
    const Witness& b = rep.witnesses.front();
    std::cout << fmt::format("  best witness: {} ({}) eps {:.4g} delta {:.6g}\n", b.family, b.description, b.epsilon,
                             b.delta);
  }
  return verdict_exit(rep.verdict);
}

Contour first_contour(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read " + path.string());
  const Json j = Json::parse(in);
  if (j.value("format", std::string{}) == "illusory-contours") {
    if (j.at("contours").empty()) throw FormatError(path.string() + ": no closed contours");
    return contour_from_json(j["contours"][0]);
  }
  return read_contour(path);
}

int cmd_metrics(const std::string& contour_file, const std::string& reference, const std::string& scene_file,
                const SceneFlags& flags, double tol, const EvolutionParams& p, const std::string& out) {
  const Contour c = first_contour(contour_file);
  Json j;
  j["format"] = "illusory-metrics";
  j["version"] = kFormatVersion;
  j["contour_file"] = contour_file;
  j["vertices"] = c.size();
  j["length"] = contour_length(c);
  j["signed_area"] = signed_area(c.vertices);
  std::optional<Contour> ideal;
  std::optional<SceneFile> scene;
  if (!scene_file.empty()) {
    scene = read_scene(scene_file);
  } else if (!flags.kind.empty()) {
    scene = scene_from_spec(flags.spec(), &ideal);
  }
  if (!reference.empty()) ideal = first_contour(reference);
  if (ideal) j["hausdorff"] = hausdorff(c, *ideal);
  if (scene) {
    j["tol"] = tol;
    try {
      const Classification k = classify(c, scene->config, tol);
      j["real_length"] = k.real_length;
      j["imaginary_length"] = k.imaginary_length;
      j["imaginary_components"] = k.decomposition.components.size();
      j["max_chord_deviation"] = max_chord_deviation(k.decomposition);
    } catch (const std::exception& e) {
      j["classification_error"] = e.what();
    }
    const SceneFields f = compute_fields(scene->config, scene->width, scene->height, p.field_params());
    j["relaxed_energy"] = relaxed_energy(c, f.G);
    j["evolution"] = to_json(p);
  }
  const std::string text = j.dump(2);
  if (!out.empty()) std::ofstream(out) << text << "\n";
  std::cout << text << "\n";
  return 0;
}

}  // namespace

int run_main(int argc, char** argv) {
  CLI::App app{"Illusory contours as stable local minima of first-order contour energies"};
  app.require_subcommand(1);

  CLI::App* gen = app.add_subcommand("generate", "write a scene file, its binary image and the ideal contour");
  SceneFlags gen_scene;
  gen->add_option("kind", gen_scene.kind, "kanizsa-triangle | kanizsa-square | bundle-square | complex-bar")
      ->required();
  gen_scene.add(gen);
  std::string gen_out = ".";
  std::string gen_config;
  gen->add_option("--out", gen_out, "output directory")->capture_default_str();
  gen->add_option("--config", gen_config, "JSON file whose keys override the flags");

  CLI::App* runc = app.add_subcommand("run", "evolve the supervised level set and extract the contour");
  SceneFlags run_scene;
  runc->add_option("--scene-kind", run_scene.kind, "generate this scene");
  run_scene.add(runc);
  EvolutionFlags evo;
  evo.add(runc);
  RunConfig run_cfg;
  std::string run_scene_file;
  std::string run_ideal;
  std::string run_out;
  std::string run_config;
  runc->add_option("--scene", run_scene_file, "scene file");
  runc->add_option("--ideal", run_ideal, "reference contour file");
  runc->add_option("--out", run_out, "output directory (omit to write nothing)");
  runc->add_option("--frame-interval", run_cfg.frame_interval, "steps between frame dumps, 0 for none")
      ->capture_default_str();
  runc->add_option("--seed", run_cfg.seed, "recorded in every output")->capture_default_str();
  runc->add_option("--config", run_config, "JSON file whose keys override the flags");

  CLI::App* ver = app.add_subcommand("verify", "check the structure and sample perturbations of a contour");
  SceneFlags ver_scene;
  ver->add_option("--scene-kind", ver_scene.kind, "generate this scene (its ideal contour is the default)");
  ver_scene.add(ver);
  std::string ver_scene_file;
  std::string ver_contour;
  std::string ver_energy = "object";
  EnergyWeights ver_w;
  std::size_t ver_budget = 500;
  std::uint64_t ver_seed = 1;
  std::string ver_out;
  std::string ver_csv;
  std::string ver_config;
  ver->add_option("--scene", ver_scene_file, "scene file");
  ver->add_option("--contour", ver_contour, "contour file");
  ver->add_option("--energy", ver_energy, "object | contour-bundle | mixture")->capture_default_str();
  ver->add_option("--alpha", ver_w.alpha, "real weight / anchor reward")->capture_default_str();
  ver->add_option("--beta", ver_w.beta, "imaginary weight")->capture_default_str();
  ver->add_option("--alpha-o", ver_w.alpha_o, "mixture object weight")->capture_default_str();
  ver->add_option("--alpha-c", ver_w.alpha_c, "mixture anchor reward")->capture_default_str();
  ver->add_option("--budget", ver_budget, "random perturbations")->capture_default_str();
  ver->add_option("--seed", ver_seed, "random seed")->capture_default_str();
  ver->add_option("--out", ver_out, "report file");
  ver->add_option("--csv", ver_csv, "per-perturbation CSV");
  ver->add_option("--config", ver_config, "JSON file whose keys override the flags");

  CLI::App* met = app.add_subcommand("metrics", "measure a contour against a reference and a scene");
  std::string met_contour;
  std::string met_reference;
  std::string met_scene_file;
  SceneFlags met_scene;
  double met_tol = 1.0;
  EvolutionFlags met_evo;
  std::string met_out;
  met->add_option("--contour", met_contour, "contour or contours file")->required();
  met->add_option("--reference", met_reference, "reference contour for the Hausdorff distance");
  met->add_option("--scene", met_scene_file, "scene file");
  met->add_option("--scene-kind", met_scene.kind, "generate this scene; its ideal contour is the reference");
  met_scene.add(met);
  met->add_option("--tol", met_tol, "classification tolerance in cells")->capture_default_str();
  met_evo.add(met);
  met->add_option("--out", met_out, "write the metrics here as well");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*gen) return cmd_generate(gen_scene, gen_out, gen_config);
    if (*runc) {
      run_cfg.params = evo.p;
      return cmd_run(run_cfg, run_scene, run_scene_file, run_ideal, run_out, run_config);
    }
    if (*ver) {
      return cmd_verify(ver_scene, ver_scene_file, ver_contour, ver_energy, ver_w, ver_budget, ver_seed, ver_out,
                        ver_csv, ver_config);
    }
    if (*met) return cmd_metrics(met_contour, met_reference, met_scene_file, met_scene, met_tol, met_evo.p, met_out);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const UnstableStep& e) {
    std::cerr << "error: " << e.what() << " after the last time-step retry\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace illusory
