#include "illusory/serialization.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace illusory {

namespace {

Json points_json(std::span<const Point> pts) {
  Json a = Json::array();
  for (Point p : pts) a.push_back({p.x, p.y});
  return a;
}

std::vector<Point> points_from(const Json& a) {
  if (!a.is_array()) throw FormatError("expected a list of points");
  std::vector<Point> out;
  out.reserve(a.size());
  for (const Json& p : a) {
    if (!p.is_array() || p.size() != 2) throw FormatError("a point must be [x, y]");
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

void check_header(const Json& j, const std::string& format) {
  if (!j.is_object() || j.value("format", std::string{}) != format) {
    throw FormatError("not an " + format + " file");
  }
  if (j.value("version", 0) != kFormatVersion) throw FormatError("unsupported " + format + " version");
}

Json header(const std::string& format) {
  Json j;
  j["format"] = format;
  j["version"] = kFormatVersion;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
  if (!out) throw FormatError("write failed: " + path.string());
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(e.what());
  }
}

}  // namespace

Json to_json(const Configuration& config) {
  Json j;
  j["domain"] = {config.domain.x_min, config.domain.y_min, config.domain.x_max, config.domain.y_max};
  Json regions = Json::array();
  for (const Region& r : config.regions) {
    Json rj;
    rj["vertices"] = points_json(r.vertices);
    Json smooth = Json::array();
    for (std::size_t k = 0; k < r.smooth.size(); ++k) {
      if (r.smooth[k]) smooth.push_back(k);
    }
    rj["smooth"] = smooth;
    regions.push_back(rj);
  }
  j["regions"] = regions;
  Json bundle = Json::array();
  for (const Polyline& line : config.bundle) bundle.push_back(points_json(line));
  j["bundle"] = bundle;
  return j;
}

Configuration configuration_from_json(const Json& j) {
  return guarded([&] {
    Configuration c;
    const Json& d = j.at("domain");
    if (!d.is_array() || d.size() != 4) throw FormatError("domain must be [x_min, y_min, x_max, y_max]");
    c.domain = {d[0].get<double>(), d[1].get<double>(), d[2].get<double>(), d[3].get<double>()};
    for (const Json& rj : j.value("regions", Json::array())) {
      Region r;
      r.vertices = points_from(rj.at("vertices"));
      r.smooth.assign(r.vertices.size(), false);
      for (const Json& k : rj.value("smooth", Json::array())) {
        const auto idx = k.get<std::size_t>();
        if (idx >= r.smooth.size()) throw FormatError("smooth index out of range");
        r.smooth[idx] = true;
      }
      c.regions.push_back(std::move(r));
    }
    for (const Json& lj : j.value("bundle", Json::array())) c.bundle.push_back(points_from(lj));
    return c;
  });
}

Json to_json(const Contour& contour) {
  Json j;
  j["vertices"] = points_json(contour.vertices);
  return j;
}

Contour contour_from_json(const Json& j) {
  return guarded([&] {
    Contour c;
    c.vertices = points_from(j.at("vertices"));
    return c;
  });
}

Json to_json(const SceneSpec& s) {
  Json j;
  j["kind"] = to_string(s.kind);
  j["width"] = s.width;
  j["height"] = s.height;
  j["radius"] = s.radius;
  j["mouth_angle"] = s.mouth_angle;
  j["side"] = s.side;
  j["bundle_length"] = s.bundle_length;
  j["anchor_offset"] = s.anchor_offset;
  j["arc_vertices"] = s.arc_vertices;
  if (s.kind == SceneKind::custom) j["custom"] = to_json(s.custom);
  return j;
}

SceneSpec scene_spec_from_json(const Json& j) {
  return guarded([&] {
    SceneSpec s;
    s.kind = parse_scene_kind(j.at("kind").get<std::string>());
    s.width = j.value("width", s.width);
    s.height = j.value("height", s.height);
    s.radius = j.value("radius", s.radius);
    s.mouth_angle = j.value("mouth_angle", s.mouth_angle);
    s.side = j.value("side", s.side);
    s.bundle_length = j.value("bundle_length", s.bundle_length);
    s.anchor_offset = j.value("anchor_offset", s.anchor_offset);
    s.arc_vertices = j.value("arc_vertices", s.arc_vertices);
    if (j.contains("custom")) s.custom = configuration_from_json(j["custom"]);
    return s;
  });
}

Json to_json(const EvolutionParams& p) {
  Json j;
  j["alpha"] = p.alpha;
  j["beta"] = p.beta;
  j["lambda"] = p.lambda;
  j["sigma"] = p.sigma;
  j["dt"] = p.effective_dt();
  j["eps_reg"] = p.eps_reg;
  j["border_margin"] = p.border_margin;
  j["max_steps"] = p.max_steps;
  j["stop_window"] = p.stop_window;
  j["stop_threshold"] = p.stop_threshold;
  j["clamp"] = p.clamp;
  j["max_dt_retries"] = p.max_dt_retries;
  j["audit_interval"] = p.audit_interval;
  j["history_interval"] = p.history_interval;
  return j;
}

EvolutionParams evolution_params_from_json(const Json& j, EvolutionParams p) {
  return guarded([&] {
    p.alpha = j.value("alpha", p.alpha);
    p.beta = j.value("beta", p.beta);
    p.lambda = j.value("lambda", p.lambda);
    p.sigma = j.value("sigma", p.sigma);
    p.dt = j.value("dt", p.dt);
    p.eps_reg = j.value("eps_reg", p.eps_reg);
    p.border_margin = j.value("border_margin", p.border_margin);
    p.max_steps = j.value("max_steps", p.max_steps);
    p.stop_window = j.value("stop_window", p.stop_window);
    p.stop_threshold = j.value("stop_threshold", p.stop_threshold);
    p.clamp = j.value("clamp", p.clamp);
    p.max_dt_retries = j.value("max_dt_retries", p.max_dt_retries);
    p.audit_interval = j.value("audit_interval", p.audit_interval);
    p.history_interval = j.value("history_interval", p.history_interval);
    return p;
  });
}

Json to_json(const EnergyWeights& w) {
  Json j;
  j["alpha"] = w.alpha;
  j["beta"] = w.beta;
  j["alpha_o"] = w.alpha_o;
  j["alpha_c"] = w.alpha_c;
  return j;
}

EnergyWeights energy_weights_from_json(const Json& j, EnergyWeights w) {
  return guarded([&] {
    w.alpha = j.value("alpha", w.alpha);
    w.beta = j.value("beta", w.beta);
    w.alpha_o = j.value("alpha_o", w.alpha_o);
    w.alpha_c = j.value("alpha_c", w.alpha_c);
    return w;
  });
}

Json to_json(const StructureReport& r) {
  Json j;
  j["condition_i"] = r.condition_i();
  j["condition_ii"] = r.condition_ii();
  j["straight"] = r.straight;
  j["hinges_distinct"] = r.hinges_distinct;
  j["turns"] = r.turns;
  j["idle"] = r.idle;
  j["max_deviation"] = r.max_deviation;
  j["max_turn"] = r.max_turn;
  j["min_idle"] = r.min_idle;
  j["idle_slack"] = r.idle_slack;
  j["failures"] = r.failures;
  return j;
}

Json to_json(const MinimalityReport& r) {
  Json j;
  j["verdict"] = to_string(r.verdict);
  j["energy_kind"] = to_string(r.kind);
  j["structure"] = to_json(r.structure);
  j["critical_ratio"] = {{"r_c", r.ratio.r_c}, {"r1", r.ratio.r1}, {"r2", r.ratio.r2},
                         {"kinks_present", r.ratio.kinks_present}, {"note", r.ratio.note}};
  j["energy"] = r.energy;
  j["eta"] = r.eta;
  j["h"] = r.h;
  j["epsilons"] = r.epsilons;
  Json wit = Json::array();
  for (const Witness& w : r.witnesses) {
    wit.push_back({{"family", w.family}, {"description", w.description}, {"epsilon", w.epsilon},
                   {"delta", w.delta}, {"confirmed", w.confirmed}});
  }
  j["witnesses"] = wit;
  j["samples_tested"] = r.samples_tested;
  j["budget"] = r.budget;
  j["seed"] = r.seed;
  j["note"] = r.note;
  return j;
}

void write_scene(const std::filesystem::path& path, const SceneFile& scene) {
  Json j = header("illusory-scene");
  j["width"] = scene.width;
  j["height"] = scene.height;
  j["params"] = scene.params.is_null() ? Json::object() : scene.params;
  j["configuration"] = to_json(scene.config);
  write_text(path, j.dump(2) + "\n");
}

SceneFile read_scene(const std::filesystem::path& path) {
  const Json j = read_json(path);
  check_header(j, "illusory-scene");
  return guarded([&] {
    SceneFile s;
    s.width = j.at("width").get<int>();
    s.height = j.at("height").get<int>();
    s.params = j.value("params", Json::object());
    s.config = configuration_from_json(j.at("configuration"));
    return s;
  });
}

void write_contour(const std::filesystem::path& path, const Contour& contour, const Json& params) {
  Json j = header("illusory-contour");
  j["params"] = params;
  j["vertices"] = points_json(contour.vertices);
  write_text(path, j.dump(2) + "\n");
}

Contour read_contour(const std::filesystem::path& path) {
  const Json j = read_json(path);
  check_header(j, "illusory-contour");
  return contour_from_json(j);
}

void write_contours(const std::filesystem::path& path, const ExtractionResult& result, const Json& params) {
  Json j = header("illusory-contours");
  j["params"] = params;
  Json cs = Json::array();
  for (const ExtractedContour& c : result.contours) {
    cs.push_back({{"signed_area", c.signed_area},
                  {"real_length", c.real_length},
                  {"imaginary_length", c.imaginary_length},
                  {"vertices", points_json(c.contour.vertices)}});
  }
  j["contours"] = cs;
  Json fs = Json::array();
  for (const Polyline& f : result.fragments) fs.push_back(points_json(f));
  j["fragments"] = fs;
  write_text(path, j.dump(2) + "\n");
}

void write_report(const std::filesystem::path& path, const MinimalityReport& report, const Json& params) {
  Json j = header("illusory-report");
  j["params"] = params;
  j["report"] = to_json(report);
  write_text(path, j.dump(2) + "\n");
}

void write_samples_csv(const std::filesystem::path& path, const MinimalityReport& report, const Json& params) {
  std::string out = "# params " + params.dump() + "\n";
  out += "id,family,epsilon,delta\n";
  for (const Sample& s : report.samples) {
    out += fmt::format("{},{},{:.17g},{:.17g}\n", s.id, s.family, s.epsilon, s.delta);
  }
  write_text(path, out);
}

void write_pgm(const std::filesystem::path& path, const ScalarField& f, double lo, double hi, const Json& params) {
  if (!(hi > lo)) throw FormatError("pgm scaling needs hi > lo");
  std::string out = fmt::format("P5\n# {}\n{} {}\n255\n", params.dump(), f.width, f.height);
  out.reserve(out.size() + f.values.size());
  for (double v : f.values) {
    const double t = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t))));
  }
  write_text(path, out);
}

ScalarField read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P5") throw FormatError(path.string() + ": not a binary PGM");
  auto next_int = [&]() {
    for (;;) {
      in >> std::ws;
      if (in.peek() == '#') {
        std::string line;
        std::getline(in, line);
        continue;
      }
      int v = 0;
      if (!(in >> v)) throw FormatError(path.string() + ": malformed PGM header");
      return v;
    }
  };
  const int w = next_int();
  const int h = next_int();
  const int maxval = next_int();
  if (maxval <= 0 || maxval > 255) throw FormatError(path.string() + ": only 8-bit PGM is supported");
  in.get();
  ScalarField f(w, h, 0.0);
  std::vector<char> buf(f.values.size());
  if (!in.read(buf.data(), static_cast<std::streamsize>(buf.size()))) {
    throw FormatError(path.string() + ": truncated PGM data");
  }
  for (std::size_t k = 0; k < buf.size(); ++k) {
    f.values[k] = static_cast<unsigned char>(buf[k]) / static_cast<double>(maxval);
  }
  return f;
}

ScalarField overlay_image(const ScalarField& u, const ScalarField& phi) {
  if (!u.same_shape(phi)) throw FormatError("overlay fields differ in shape");
  ScalarField out(u.width, u.height, 0.0);
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    out.values[k] = u.values[k] > 0.5 ? 255.0 : (phi.values[k] > 0.0 ? 128.0 : 0.0);
  }
  return out;
}

void write_raw(const std::filesystem::path& path, const ScalarField& f, const Json& params) {
  std::string out = "ILCFIELD";
  auto put32 = [&](std::uint32_t v) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
  };
  put32(static_cast<std::uint32_t>(f.width));
  put32(static_cast<std::uint32_t>(f.height));
  out.reserve(out.size() + 8 * f.values.size());
  for (double v : f.values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
  }
  write_text(path, out);
  Json side = header("illusory-raw-field");
  side["width"] = f.width;
  side["height"] = f.height;
  side["params"] = params;
  write_text(path.string() + ".json", side.dump(2) + "\n");
}

ScalarField read_raw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() < 16 || data.compare(0, 8, "ILCFIELD") != 0) {
    throw FormatError(path.string() + ": bad raw field magic");
  }
  auto byte = [&](std::size_t k) { return static_cast<std::uint64_t>(static_cast<unsigned char>(data[k])); };
  auto get32 = [&](std::size_t at) {
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(byte(at + b) << (8 * b));
    return v;
  };
  const std::uint32_t w = get32(8);
  const std::uint32_t h = get32(12);
  const std::size_t count = static_cast<std::size_t>(w) * h;
  if (data.size() != 16 + 8 * count) throw FormatError(path.string() + ": raw field size mismatch");
  ScalarField f(static_cast<int>(w), static_cast<int>(h), 0.0);
  for (std::size_t k = 0; k < count; ++k) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= byte(16 + 8 * k + b) << (8 * b);
    f.values[k] = std::bit_cast<double>(bits);
  }
  return f;
}

void write_history_csv(const std::filesystem::path& path, const std::vector<HistoryEntry>& history,
                       const Json& params) {
  std::string out = "# params " + params.dump() + "\n";
  out += "step,area,length,energy,increase\n";
  for (const HistoryEntry& h : history) {
    out += fmt::format("{},{},{:.17g},{:.17g},{}\n", h.step, h.area, h.length, h.energy, h.increase ? 1 : 0);
  }
  write_text(path, out);
}

void write_svg(const std::filesystem::path& path, const Configuration& config, const std::vector<Contour>& contours,
               int width, int height, const Json& params) {
  auto pts = [](std::span<const Point> v) {
    std::string s;
    for (Point p : v) s += fmt::format("{:.6g},{:.6g} ", p.x, p.y);
    if (!s.empty()) s.pop_back();
    return s;
  };
  std::string esc = params.dump();
  std::string safe;
  for (char c : esc) {
    if (c == '-' && !safe.empty() && safe.back() == '-') safe += ' ';
    safe += c;
  }
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<!-- {2} -->\n<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
      width, height, safe);
  for (const Region& r : config.regions) {
    out += fmt::format("<polygon points=\"{}\" fill=\"black\"/>\n", pts(r.vertices));
  }
  for (const Polyline& l : config.bundle) {
    out += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n", pts(l));
  }
  for (const Contour& c : contours) {
    out += fmt::format("<polygon points=\"{}\" fill=\"none\" stroke=\"red\" stroke-width=\"0.5\"/>\n",
                       pts(c.vertices));
  }
  out += "</svg>\n";
  write_text(path, out);
}

}  // namespace illusory
