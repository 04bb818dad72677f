#pragma once

#include <optional>
#include <string>
#include <vector>

#include "transverse/config.hpp"
#include "transverse/io.hpp"
#include "transverse/smoothmap.hpp"

/// Scenario files are flat `key = value` lines grouped under [scenario],
/// [mesh], [map], [pipeline] and [output] headers; '#' starts a comment and
/// vectors are space-separated numbers. See scenarios/ for one file per map
/// family.
namespace transverse {

class ScenarioError : public FormatError {
 public:
  using FormatError::FormatError;
};

struct MeshSpec {
  std::string generator = "grid";  // grid | file
  Box box;
  int resolution = 1;
  std::string path;  // resolved against the scenario file's directory
};

struct OutputSpec {
  bool svg = true;
  bool obj = true;
  int curve_samples = 256;
};

struct Scenario {
  std::string name = "scenario";
  int ambient_dim = 2;
  MeshSpec mesh;
  std::optional<SmoothMap> map;
  PipelineConfig pipeline;
  OutputSpec output;

  Mesh build_mesh() const;
  const SmoothMap& h() const { return *map; }
};

Scenario parse_scenario(const std::string& text, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);

struct RunOutcome {
  int exit_code = 1;
  TransversalityReport report;
  std::size_t links = 0;
  std::vector<std::string> failures;
  std::vector<std::string> files;
};

/// `run` (verify_only = false) or `verify-only`; writes every artifact into
/// out_dir, which is created if needed. Exit code 0 iff the report passes.
RunOutcome run_scenario(const Scenario& scenario, const std::string& out_dir, bool verify_only);

std::string render_svg(const TriangulationState& state, const SmoothMap& h,
                       const TransversalityReport& report, int curve_samples);
std::string render_obj(const TriangulationState& state);
std::string curve_csv(const SmoothMap& h, int samples);

}  // namespace transverse
