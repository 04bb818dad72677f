#include "transverse/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace transverse {

namespace {

// Returns the next non-empty line with comments removed.
bool next_line(std::istream& in, std::string& line, int& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    if (auto p = line.find('#'); p != std::string::npos) line.erase(p);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

template <class T>
std::vector<T> parse_numbers(const std::string& line, int lineno) {
  std::istringstream ss(line);
  std::vector<T> out;
  T v;
  while (ss >> v) out.push_back(v);
  if (!ss.eof()) throw FormatError("malformed number", lineno);
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_vec(const Vec& v) {
  std::string s;
  for (int i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += format_double(v[i]);
  }
  return s;
}

Mesh read_mesh(std::istream& in) {
  std::string line;
  int lineno = 0;
  if (!next_line(in, line, lineno)) throw FormatError("empty mesh file", 0);
  {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag != "SOFF") throw FormatError("expected SOFF header", lineno);
  }
  if (!next_line(in, line, lineno)) throw FormatError("missing size line", lineno);
  const auto sizes = parse_numbers<long>(line, lineno);
  if (sizes.size() != 3) throw FormatError("size line needs ambient_dim vertex_count simplex_count", lineno);
  const int m = static_cast<int>(sizes[0]);
  if (m < 1 || m > 3) throw FormatError("ambient dimension must be 1, 2 or 3", lineno);
  if (sizes[1] < 1 || sizes[2] < 1) throw FormatError("counts must be positive", lineno);

  std::vector<Vec> coords;
  for (long i = 0; i < sizes[1]; ++i) {
    if (!next_line(in, line, lineno)) throw FormatError("unexpected end of vertex list", lineno);
    const auto xs = parse_numbers<double>(line, lineno);
    if (static_cast<int>(xs.size()) != m) throw FormatError("vertex needs " + std::to_string(m) + " coordinates", lineno);
    Vec p(m);
    for (int a = 0; a < m; ++a) p[a] = xs[a];
    coords.push_back(p);
  }
  std::vector<std::vector<int>> tops;
  for (long i = 0; i < sizes[2]; ++i) {
    if (!next_line(in, line, lineno)) throw FormatError("unexpected end of simplex list", lineno);
    const auto ids = parse_numbers<long>(line, lineno);
    if (ids.empty() || ids[0] < 1 || static_cast<long>(ids.size()) != ids[0] + 1)
      throw FormatError("simplex line must be: k v_0 ... v_{k-1}", lineno);
    std::vector<int> s(ids.begin() + 1, ids.end());
    for (int v : s)
      if (v < 0 || v >= sizes[1]) throw FormatError("vertex id out of range", lineno);
    tops.push_back(std::move(s));
  }
  if (next_line(in, line, lineno)) throw FormatError("trailing data", lineno);
  try {
    Mesh mesh{SimplicialComplex::build(static_cast<int>(coords.size()), tops),
              GeometricRealization(m, std::move(coords))};
    mesh.realization.validate(mesh.complex);
    return mesh;
  } catch (const std::exception& e) {
    throw FormatError(e.what(), 0);
  }
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open mesh file " + path, 0);
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  const auto tops = mesh.complex.maximal();
  const auto& r = mesh.realization;
  out << "SOFF\n" << r.ambient_dim() << ' ' << r.vertex_count() << ' ' << tops.size() << '\n';
  for (const Vec& p : r.coords()) out << format_vec(p) << '\n';
  for (SimplexId id : tops) {
    const auto& vs = mesh.complex.simplex(id).vertices;
    out << vs.size();
    for (int v : vs) out << ' ' << v;
    out << '\n';
  }
}

std::string mesh_to_string(const Mesh& mesh) {
  std::ostringstream ss;
  write_mesh(ss, mesh);
  return ss.str();
}

std::string chain_dump(const Chain& chain) {
  std::ostringstream ss;
  ss << "chain " << chain.size() << '\n';
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const LinkMetadata md = chain[i]->metadata();
    ss << "link " << i << '\n'
       << "  simplex " << md.simplex << '\n'
       << "  dim " << md.dim << '\n'
       << "  c_sigma " << format_double(md.c_sigma) << '\n'
       << "  epsilon " << format_double(md.epsilon) << '\n'
       << "  regular_value " << format_vec(md.regular_value) << '\n'
       << "  retries " << md.retries << '\n'
       << "  shrinks " << md.shrinks << '\n'
       << "  support_lo " << format_vec(md.support.lo) << '\n'
       << "  support_hi " << format_vec(md.support.hi) << '\n'
       << "  max_displacement " << format_double(chain[i]->max_displacement()) << '\n';
  }
  return ss.str();
}

std::string report_csv(const TransversalityReport& report) {
  std::ostringstream ss;
  ss << "simplex,dim,classification,residual,margin,y,t,point\n";
  for (const auto& r : report.records) {
    ss << r.simplex << ',' << r.dim << ',' << to_string(r.classification) << ','
       << format_double(r.residual) << ',' << format_double(r.margin) << ',' << format_vec(r.y)
       << ',' << format_vec(r.t) << ',' << format_vec(r.point) << '\n';
  }
  return ss.str();
}

std::string report_summary(const TransversalityReport& report, const SimplicialComplex& k) {
  std::ostringstream ss;
  int failing = 0;
  for (const auto& s : report.simplices) failing += s.pass ? 0 : 1;
  ss << "pass " << (report.pass ? "true" : "false") << '\n'
     << "simplices " << report.simplices.size() << '\n'
     << "failing_simplices " << failing << '\n'
     << "records " << report.records.size() << '\n'
     << "transverse " << report.transverse_count << '\n'
     << "tangent " << report.tangent_count << '\n'
     << "skeleton_hits " << report.skeleton_hits << '\n'
     << "min_margin " << format_double(report.min_margin) << '\n'
     << "min_vertex_distance " << format_double(report.min_vertex_distance) << '\n';
  for (const auto& s : report.simplices) {
    if (s.pass) continue;
    ss << "fail " << s.simplex << " dim " << s.dim << " [" << to_string(k.simplex(s.simplex))
       << "] records " << s.records << '\n';
  }
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace transverse
