#include "transverse/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "transverse/log.hpp"
#include "transverse/perturb.hpp"

namespace transverse {

namespace {

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

struct Section {
  int line = 0;
  std::map<std::string, Entry> entries;
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_number(const std::string& tok, int line) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw ScenarioError("not a number: '" + tok + "'", line);
  }
  if (pos != tok.size() || !std::isfinite(v)) throw ScenarioError("not a number: '" + tok + "'", line);
  return v;
}

class Reader {
 public:
  Reader(std::map<std::string, Section>& sections, std::string name)
      : name_(std::move(name)), sec_(sections[name_]) {}

  bool has(const std::string& key) const { return sec_.entries.count(key) > 0; }
  int line_of(const std::string& key) const {
    return has(key) ? sec_.entries.at(key).line : sec_.line;
  }

  const Entry& entry(const std::string& key) {
    auto it = sec_.entries.find(key);
    if (it == sec_.entries.end())
      throw ScenarioError("[" + name_ + "] is missing '" + key + "'", sec_.line);
    it->second.used = true;
    return it->second;
  }

  std::string str(const std::string& key) { return entry(key).value; }
  std::string str(const std::string& key, const std::string& def) {
    return has(key) ? str(key) : def;
  }

  double num(const std::string& key) {
    const Entry& e = entry(key);
    return to_number(e.value, e.line);
  }
  double num(const std::string& key, double def) { return has(key) ? num(key) : def; }

  long integer(const std::string& key) {
    const Entry& e = entry(key);
    const double v = to_number(e.value, e.line);
    if (v != std::floor(v) || std::abs(v) > 9e15) throw ScenarioError("expected an integer for '" + key + "'", e.line);
    return static_cast<long>(v);
  }
  long integer(const std::string& key, long def) { return has(key) ? integer(key) : def; }

  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return def;
    const Entry& e = entry(key);
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    throw ScenarioError("expected true or false for '" + key + "'", e.line);
  }

  Vec vec(const std::string& key, int dim) {
    const Entry& e = entry(key);
    std::istringstream ss(e.value);
    std::vector<double> xs;
    std::string tok;
    while (ss >> tok) xs.push_back(to_number(tok, e.line));
    if (dim >= 0 && static_cast<int>(xs.size()) != dim)
      throw ScenarioError("'" + key + "' needs " + std::to_string(dim) + " components", e.line);
    Vec v(static_cast<int>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) v[i] = xs[i];
    return v;
  }

  void finish() const {
    for (const auto& [k, e] : sec_.entries)
      if (!e.used) throw ScenarioError("unknown key '" + k + "' in [" + name_ + "]", e.line);
  }

 private:
  std::string name_;
  Section& sec_;
};

SmoothMap build_map(Reader& r, int m) {
  const std::string family = r.str("family");
  const int fam_line = r.line_of("family");
  try {
    if (family == "point") return SmoothMap::point(r.vec("p", m));
    if (family == "line")
      return SmoothMap::line(r.vec("origin", m), r.vec("direction", m), r.num("a", 0.0), r.num("b", 1.0));
    if (family == "circle") {
      const Vec c = r.vec("center", m);
      const double radius = r.num("radius");
      if (m == 2 && !r.has("u")) return SmoothMap::circle(c, radius);
      return SmoothMap::circle(c, radius, r.vec("u", m), r.vec("w", m));
    }
    if (family == "polynomial") {
      std::vector<Vec> coeffs;
      for (int k = 0; r.has("c" + std::to_string(k)); ++k) coeffs.push_back(r.vec("c" + std::to_string(k), m));
      if (coeffs.empty()) throw ScenarioError("polynomial needs coefficients c0, c1, ...", fam_line);
      return SmoothMap::polynomial_curve(std::move(coeffs), r.num("a", 0.0), r.num("b", 1.0));
    }
    if (family == "torus_knot") {
      if (m != 3) throw ScenarioError("torus_knot needs ambient_dim = 3", fam_line);
      return SmoothMap::torus_knot(static_cast<int>(r.integer("p")), static_cast<int>(r.integer("q")),
                                   r.num("major"), r.num("minor"), r.vec("center", 3));
    }
    if (family == "surface_patch")
      return SmoothMap::surface_patch(r.vec("origin", m), r.vec("du", m), r.vec("dv", m),
                                      r.vec("normal", m), r.num("c_uu", 0.0), r.num("c_uv", 0.0),
                                      r.num("c_vv", 0.0), r.vec("uv_min", 2), r.vec("uv_max", 2));
  } catch (const SmoothMapError& e) {
    throw ScenarioError(e.what(), fam_line);
  }
  throw ScenarioError("unknown map family '" + family + "'", fam_line);
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& base_dir) {
  static const std::set<std::string> kSections = {"scenario", "mesh", "map", "pipeline", "output"};
  std::map<std::string, Section> sections;
  std::istringstream in(text);
  std::string raw;
  std::string current;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto p = raw.find('#'); p != std::string::npos) raw.erase(p);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ScenarioError("unterminated section header", lineno);
      current = trim(line.substr(1, line.size() - 2));
      if (!kSections.count(current)) throw ScenarioError("unknown section [" + current + "]", lineno);
      if (sections.count(current)) throw ScenarioError("duplicate section [" + current + "]", lineno);
      sections[current].line = lineno;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ScenarioError("expected 'key = value'", lineno);
    if (current.empty()) throw ScenarioError("key outside of any section", lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ScenarioError("empty key", lineno);
    if (value.empty()) throw ScenarioError("empty value for '" + key + "'", lineno);
    auto& entries = sections[current].entries;
    if (entries.count(key)) throw ScenarioError("duplicate key '" + key + "'", lineno);
    entries[key] = {value, lineno};
  }
  for (const char* required : {"scenario", "mesh", "map"})
    if (!sections.count(required)) throw ScenarioError(std::string("missing section [") + required + "]", 0);

  Scenario sc;
  {
    Reader r(sections, "scenario");
    sc.name = r.str("name", sc.name);
    sc.ambient_dim = static_cast<int>(r.integer("ambient_dim"));
    if (sc.ambient_dim != 2 && sc.ambient_dim != 3)
      throw ScenarioError("ambient_dim must be 2 or 3", r.line_of("ambient_dim"));
    r.finish();
  }
  const int m = sc.ambient_dim;
  {
    Reader r(sections, "mesh");
    sc.mesh.generator = r.str("generator");
    if (sc.mesh.generator == "grid") {
      sc.mesh.box.lo = r.vec("box_min", m);
      sc.mesh.box.hi = r.vec("box_max", m);
      if (!(sc.mesh.box.lo.array() < sc.mesh.box.hi.array()).all())
        throw ScenarioError("box_min must be below box_max", r.line_of("box_max"));
      sc.mesh.resolution = static_cast<int>(r.integer("resolution"));
      if (sc.mesh.resolution < 1 || sc.mesh.resolution > 64)
        throw ScenarioError("resolution must be in 1..64", r.line_of("resolution"));
    } else if (sc.mesh.generator == "file") {
      sc.mesh.path = (std::filesystem::path(base_dir) / r.str("path")).string();
    } else {
      throw ScenarioError("generator must be grid or file", r.line_of("generator"));
    }
    r.finish();
  }
  {
    Reader r(sections, "map");
    sc.map = build_map(r, m);
    r.finish();
  }
  {
    Reader r(sections, "pipeline");
    auto& p = sc.pipeline;
    const long seed = r.integer("seed", 1);
    if (seed < 0) throw ScenarioError("seed must be nonnegative", r.line_of("seed"));
    p.seed = static_cast<std::uint64_t>(seed);
    p.max_retries = static_cast<int>(r.integer("max_retries", p.max_retries));
    p.containment_density = static_cast<int>(r.integer("containment_density", p.containment_density));
    p.tol_rank = r.num("tol_rank", p.tol_rank);
    p.epsilon_max = r.num("epsilon_max", p.epsilon_max);
    p.verify_density = static_cast<int>(r.integer("verify_density", p.verify_density));
    p.surface_density = static_cast<int>(r.integer("surface_density", p.surface_density));
    p.residual_tol = r.num("residual_tol", p.residual_tol);
    p.dedupe_radius = r.num("dedupe_radius", p.dedupe_radius);
    p.vertex_delta = r.num("vertex_delta", p.vertex_delta);
    p.max_shrinks = static_cast<int>(r.integer("max_shrinks", p.max_shrinks));
    p.preserve_coverage = r.boolean("preserve_coverage", p.preserve_coverage);
    p.warp_rate = r.num("warp_rate", p.warp_rate);
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(e.what(), sections["pipeline"].line);
    }
    r.finish();
  }
  {
    Reader r(sections, "output");
    sc.output.svg = r.boolean("svg", sc.output.svg);
    sc.output.obj = r.boolean("obj", sc.output.obj);
    sc.output.curve_samples = static_cast<int>(r.integer("curve_samples", sc.output.curve_samples));
    if (sc.output.curve_samples < 2) throw ScenarioError("curve_samples must be at least 2", r.line_of("curve_samples"));
    r.finish();
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path, 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), std::filesystem::path(path).parent_path().string());
}

Mesh Scenario::build_mesh() const {
  Mesh out = mesh.generator == "file" ? read_mesh_file(mesh.path)
                                      : grid_triangulation(mesh.box, mesh.resolution);
  if (out.realization.ambient_dim() != ambient_dim)
    throw ScenarioError("mesh dimension differs from ambient_dim", 0);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Vec> curve_params(const SmoothMap& h, int samples) {
  const Domain& d = h.domain();
  std::vector<Vec> out;
  if (d.dim() == 0) {
    out.push_back(Vec(0));
  } else if (d.dim() == 1) {
    for (int i = 0; i < samples; ++i) {
      const double f = d.periodic ? double(i) / samples : double(i) / (samples - 1);
      out.push_back(Vec::Constant(1, d.lo[0] + f * (d.hi[0] - d.lo[0])));
    }
  } else {
    const int side = std::max(2, static_cast<int>(std::sqrt(double(samples))));
    for (int j = 0; j < side; ++j)
      for (int i = 0; i < side; ++i) {
        Vec y(2);
        y[0] = d.lo[0] + (d.hi[0] - d.lo[0]) * i / (side - 1);
        y[1] = d.lo[1] + (d.hi[1] - d.lo[1]) * j / (side - 1);
        out.push_back(y);
      }
  }
  return out;
}

}  // namespace

std::string render_svg(const TriangulationState& state, const SmoothMap& h,
                       const TransversalityReport& report, int curve_samples) {
  Box box = state.base().bounding_box();
  const double pad = 0.05 * (box.hi - box.lo).maxCoeff();
  box.inflate(pad);
  const double w = box.hi[0] - box.lo[0];
  const double ht = box.hi[1] - box.lo[1];
  const double scale = 800.0 / std::max(w, ht);
  auto px = [&](const Vec& x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f,%.3f", (x[0] - box.lo[0]) * scale, (box.hi[1] - x[1]) * scale);
    return std::string(buf);
  };
  auto dot = [&](const Vec& x, double r, const char* color) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"%g\" fill=\"%s\"/>\n",
                  (x[0] - box.lo[0]) * scale, (box.hi[1] - x[1]) * scale, r, color);
    return std::string(buf);
  };
  std::ostringstream ss;
  char head[160];
  std::snprintf(head, sizeof head,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\">\n",
                w * scale, ht * scale);
  ss << head << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<g fill=\"none\" stroke=\"#555\" stroke-width=\"1\">\n";
  const auto& k = state.complex();
  for (SimplexId e : k.of_dim(1)) {
    ss << "<polyline points=\"";
    for (int i = 0; i < 16; ++i) {
      if (i) ss << ' ';
      ss << px(state.simplex_point(e, Vec::Constant(1, i / 15.0)));
    }
    ss << "\"/>\n";
  }
  ss << "</g>\n";
  const auto params = curve_params(h, curve_samples);
  if (h.domain_dim() == 1) {
    ss << "<" << (h.domain().periodic ? "polygon" : "polyline")
       << " fill=\"none\" stroke=\"#1f6fd1\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < params.size(); ++i) ss << (i ? " " : "") << px(h.eval(params[i]));
    ss << "\"/>\n";
  } else {
    for (const Vec& y : params) ss << dot(h.eval(y), 3, "#1f6fd1");
  }
  for (const auto& r : report.records) {
    const char* color = r.classification == Classification::kTransverse ? "#2a9d3a"
                        : r.classification == Classification::kTangent  ? "#e08a00"
                                                                        : "#d62728";
    ss << dot(r.point, 4, color);
  }
  ss << "</svg>\n";
  return ss.str();
}

std::string render_obj(const TriangulationState& state) {
  std::ostringstream ss;
  const auto& k = state.complex();
  for (SimplexId v : k.of_dim(0)) {
    const Vec x = state.simplex_point(v, Vec(0));
    ss << 'v';
    for (int a = 0; a < 3; ++a) ss << ' ' << format_double(a < x.size() ? x[a] : 0.0);
    ss << '\n';
  }
  for (SimplexId f : k.of_dim(2)) {
    ss << 'f';
    for (int v : k.simplex(f).vertices) ss << ' ' << v + 1;
    ss << '\n';
  }
  if (k.dim() == 1)
    for (SimplexId e : k.of_dim(1)) ss << "l " << k.simplex(e).vertices[0] + 1 << ' ' << k.simplex(e).vertices[1] + 1 << '\n';
  return ss.str();
}

std::string curve_csv(const SmoothMap& h, int samples) {
  std::ostringstream ss;
  const int n = h.domain_dim();
  for (int i = 0; i < n; ++i) ss << 'y' << i << ',';
  static const char* axes[] = {"x", "y", "z"};
  for (int a = 0; a < h.ambient_dim(); ++a) ss << (a ? "," : "") << (a < 3 ? axes[a] : "w");
  ss << '\n';
  for (const Vec& y : curve_params(h, samples)) {
    for (int i = 0; i < n; ++i) ss << format_double(y[i]) << ',';
    const Vec x = h.eval(y);
    for (int a = 0; a < x.size(); ++a) ss << (a ? "," : "") << format_double(x[a]);
    ss << '\n';
  }
  return ss.str();
}

RunOutcome run_scenario(const Scenario& sc, const std::string& out_dir, bool verify_only) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const Mesh mesh = sc.build_mesh();
  const SmoothMap& h = sc.h();
  if (h.ambient_dim() != sc.ambient_dim) throw ScenarioError("map codomain differs from ambient_dim", 0);

  RunOutcome out;
  std::optional<TriangulationState> state;
  std::vector<PerturbationLog> logs;
  if (verify_only) {
    state.emplace(mesh);
    out.report = verify_triangulation(*state, h, sc.pipeline);
  } else {
    try {
      PipelineResult r = make_transverse(mesh, h, sc.pipeline);
      state.emplace(std::move(r.state));
      out.report = std::move(r.report);
      logs = std::move(r.logs);
    } catch (const PipelineError& e) {
      const PipelineResult& r = e.result();
      state.emplace(r.state);
      out.report = r.report;
      logs = r.logs;
      out.failures = r.failures;
    }
  }
  out.links = state->chain().size();
  out.exit_code = out.report.pass && out.failures.empty() ? 0 : 1;

  auto emit = [&](const std::string& name, const std::string& content) {
    const std::string path = (fs::path(out_dir) / name).string();
    write_file_atomic(path, content);
    out.files.push_back(path);
  };
  emit("report.csv", report_csv(out.report));
  emit("chain.txt", chain_dump(state->chain()));
  std::string perturbations;
  for (const auto& l : logs)
    if (l.perturbed) perturbations += to_string(l) + '\n';
  emit("perturbations.txt", perturbations);
  if (sc.ambient_dim == 2 && sc.output.svg)
    emit("scene.svg", render_svg(*state, h, out.report, sc.output.curve_samples));
  if (sc.ambient_dim == 3 && sc.output.obj) {
    emit("mesh.obj", render_obj(*state));
    emit("curve.csv", curve_csv(h, sc.output.curve_samples));
  }
  std::string summary = "scenario " + sc.name + "\nmode " + (verify_only ? "verify-only" : "run") +
                        "\nseed " + std::to_string(sc.pipeline.seed) + "\nlinks " +
                        std::to_string(out.links) + '\n';
  for (const auto& f : out.failures) summary += "level_failure " + f + '\n';
  summary += report_summary(out.report, state->complex());
  // Written last: a summary on disk means every other artifact is complete.
  emit("summary.txt", summary);
  return out;
}

}  // namespace transverse
