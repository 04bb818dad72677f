#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "transverse/charts.hpp"
#include "transverse/perturb.hpp"
#include "transverse/simplicial.hpp"
#include "transverse/verify.hpp"

/// Text formats.
///
/// Mesh files ("SOFF"):
///
///     SOFF
///     <ambient_dim> <vertex_count> <simplex_count>
///     x y [z]                  one line per vertex
///     k v_0 ... v_{k-1}        one line per listed simplex
///
/// Listed simplices are closed under faces on load. '#' starts a comment.
namespace transverse {

class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

Mesh read_mesh(std::istream& in);
Mesh read_mesh_file(const std::string& path);
/// Writes the maximal simplices only.
void write_mesh(std::ostream& out, const Mesh& mesh);
std::string mesh_to_string(const Mesh& mesh);

/// Chain metadata at full precision: one block per link.
std::string chain_dump(const Chain& chain);

/// One row per intersection record.
std::string report_csv(const TransversalityReport& report);
std::string report_summary(const TransversalityReport& report, const SimplicialComplex& k);

/// `%.17g` formatting of one number and of a space-separated vector.
std::string format_double(double x);
std::string format_vec(const Vec& v);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace transverse
