#pragma once

#include <string>

#include "uniformizer/graph_space.hpp"
#include "uniformizer/transform.hpp"

namespace uniformizer {

enum class DomainKind { half_strip, slit_cone, cantor_slit, plane_minus_cantor_square };

const char* to_string(DomainKind kind);
DomainKind parse_domain_kind(const std::string& name);

struct GeneratorSpec {
  DomainKind kind = DomainKind::half_strip;
  /// Mesh width; 1/h must be an integer.
  double h = 0.25;
  /// Truncation: vertices with d_Omega <= H are kept. Power of two, >= 8.
  double H = 64.0;
  /// Cantor construction depth (cantor_slit, plane_minus_cantor_square).
  int level = 1;
};

struct GeneratedDomain {
  GeneratorSpec spec;
  GraphSpace space;
  double theta = 1.0;
  BoundaryMeasure nu;
};

/// [-1,1] x [0,H] grid, boundary = bottom row.
GeneratedDomain half_strip(double h, double H);
/// {y >= max(0, |x| - 1)} with the slit [-1,1] x {0} as boundary.
GeneratedDomain slit_cone(double h, double H);
/// Cone region whose boundary is the level-l Cantor approximation on the slit
/// (gaps stay interior); nu = 2^-l per cell.
GeneratedDomain cantor_slit(double h, double H, int level);
/// Plane minus the level-l approximation of K x K in [0,1]^2; nu = 4^-l per cell.
GeneratedDomain plane_minus_cantor_square(double h, double H, int level);

GeneratedDomain generate(const GeneratorSpec& spec);

}  // namespace uniformizer
