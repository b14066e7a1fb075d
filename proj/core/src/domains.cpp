#include "uniformizer/domains.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "uniformizer/error.hpp"

namespace uniformizer {
namespace {

constexpr double kLog2Over3 = 0.63092975357145743710;  // log 2 / log 3

struct LatticeSpec {
  long N = 4;  // 1/h
  long i0 = 0, i1 = 0, j0 = 0, j1 = 0;
  long max_steps = 0;  // H / h
  std::function<bool(long, long)> in_region;
  // Boundary cell of a lattice point, -1 for non-boundary points.
  std::function<int(long, long)> cell_of;
};

struct Lattice {
  std::vector<GraphSpace::VertexRecord> vertices;
  std::vector<GraphSpace::EdgeRecord> edges;
  std::vector<int> cell;
};

std::string vertex_id(long i, long j) { return "v" + std::to_string(i) + "_" + std::to_string(j); }

Lattice build_lattice(const LatticeSpec& s) {
  const long nx = s.i1 - s.i0 + 1, ny = s.j1 - s.j0 + 1;
  const auto flat = [&](long i, long j) { return static_cast<std::size_t>((i - s.i0) * ny + (j - s.j0)); };
  const std::size_t total = static_cast<std::size_t>(nx * ny);
  std::vector<char> region(total, 0);
  std::vector<int> cell(total, -1);
  std::vector<long> steps(total, std::numeric_limits<long>::max());
  std::vector<std::size_t> queue;
  for (long i = s.i0; i <= s.i1; ++i) {
    for (long j = s.j0; j <= s.j1; ++j) {
      if (!s.in_region(i, j)) continue;
      const auto k = flat(i, j);
      region[k] = 1;
      cell[k] = s.cell_of(i, j);
      if (cell[k] >= 0) {
        steps[k] = 0;
        queue.push_back(k);
      }
    }
  }
  const long di[] = {1, -1, 0, 0}, dj[] = {0, 0, 1, -1};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t k = queue[head];
    const long i = s.i0 + static_cast<long>(k) / ny, j = s.j0 + static_cast<long>(k) % ny;
    for (int d = 0; d < 4; ++d) {
      const long a = i + di[d], b = j + dj[d];
      if (a < s.i0 || a > s.i1 || b < s.j0 || b > s.j1) continue;
      const auto q = flat(a, b);
      if (!region[q] || steps[q] <= steps[k] + 1) continue;
      steps[q] = steps[k] + 1;
      queue.push_back(q);
    }
  }

  Lattice out;
  const double h = 1.0 / static_cast<double>(s.N);
  const auto kept = [&](long i, long j) {
    if (i < s.i0 || i > s.i1 || j < s.j0 || j > s.j1) return false;
    const auto k = flat(i, j);
    return region[k] && steps[k] <= s.max_steps;
  };
  for (long i = s.i0; i <= s.i1; ++i) {
    for (long j = s.j0; j <= s.j1; ++j) {
      if (!kept(i, j)) continue;
      bool frontier = false;
      for (int d = 0; d < 4; ++d) {
        const long a = i + di[d], b = j + dj[d];
        const bool neighbour_in_region =
            a >= s.i0 && a <= s.i1 && b >= s.j0 && b <= s.j1 ? region[flat(a, b)] != 0 : s.in_region(a, b);
        if (neighbour_in_region && !kept(a, b)) frontier = true;
      }
      const auto k = flat(i, j);
      GraphSpace::VertexRecord rec;
      rec.id = vertex_id(i, j);
      rec.boundary = cell[k] >= 0;
      rec.measure = rec.boundary ? 0.0 : h * h;
      rec.coords = {static_cast<double>(i) / static_cast<double>(s.N), static_cast<double>(j) / static_cast<double>(s.N)};
      rec.frontier = frontier && !rec.boundary;
      out.vertices.push_back(std::move(rec));
      out.cell.push_back(cell[k]);
      if (kept(i + 1, j)) out.edges.push_back({vertex_id(i, j), vertex_id(i + 1, j), h});
      if (kept(i, j + 1)) out.edges.push_back({vertex_id(i, j), vertex_id(i, j + 1), h});
    }
  }
  return out;
}

long mesh_count(double h) {
  if (!(h > 0.0) || h > 1.0) throw PreconditionError("mesh width must lie in (0, 1]");
  const double inv = 1.0 / h;
  const long n = std::lround(inv);
  if (std::abs(inv - static_cast<double>(n)) > 1e-9 * inv) throw PreconditionError("mesh width must divide 1");
  return n;
}

long extent_steps(double H, long N) {
  const double log2H = std::log2(H);
  if (!(H >= 8.0) || std::abs(log2H - std::round(log2H)) > 1e-12) {
    throw PreconditionError("truncation extent must be a power of two >= 8");
  }
  return std::lround(H) * N;
}

void check_level(int level, double h) {
  if (level < 1) throw PreconditionError("cantor level must be >= 1");
  if (std::pow(3.0, -level) < h * (1.0 - 1e-12)) {
    throw PreconditionError("cantor level not resolvable: 3^-level < h");
  }
}

// Left endpoints, in [0, 1], of the 2^level Cantor cells of length 3^-level.
std::vector<double> cantor_cells(int level) {
  std::vector<double> cells{0.0};
  double len = 1.0;
  for (int k = 0; k < level; ++k) {
    len /= 3.0;
    std::vector<double> next;
    for (const double a : cells) {
      next.push_back(a);
      next.push_back(a + 2.0 * len);
    }
    cells.swap(next);
  }
  return cells;
}

BoundaryMeasure per_cell_measure(const Lattice& lat, std::size_t num_cells, double cell_mass, double theta, double h) {
  std::vector<std::size_t> count(num_cells, 0);
  for (const int c : lat.cell) {
    if (c >= 0) ++count[c];
  }
  BoundaryMeasure nu;
  nu.theta = theta;
  nu.mesh_scale = h;
  nu.nu.assign(lat.vertices.size(), 0.0);
  for (std::size_t v = 0; v < lat.vertices.size(); ++v) {
    const int c = lat.cell[v];
    if (c >= 0) nu.nu[v] = cell_mass / static_cast<double>(count[c]);
  }
  return nu;
}

}  // namespace

const char* to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::half_strip: return "half_strip";
    case DomainKind::slit_cone: return "slit_cone";
    case DomainKind::cantor_slit: return "cantor_slit";
    case DomainKind::plane_minus_cantor_square: return "plane_minus_cantor_square";
  }
  return "?";
}

DomainKind parse_domain_kind(const std::string& name) {
  for (const auto k : {DomainKind::half_strip, DomainKind::slit_cone, DomainKind::cantor_slit,
                       DomainKind::plane_minus_cantor_square}) {
    if (name == to_string(k)) return k;
  }
  throw DomainError("unknown example domain '" + name + "'");
}

GeneratedDomain half_strip(double h, double H) {
  LatticeSpec s;
  s.N = mesh_count(h);
  s.max_steps = extent_steps(H, s.N);
  s.i0 = -s.N;
  s.i1 = s.N;
  s.j0 = 0;
  s.j1 = s.max_steps + 1;
  s.in_region = [N = s.N](long i, long j) { return j >= 0 && i >= -N && i <= N; };
  s.cell_of = [](long, long j) { return j == 0 ? 0 : -1; };
  auto lat = build_lattice(s);
  GraphSpace space(std::move(lat.vertices), std::move(lat.edges));
  auto nu = codimensional_measure(space, 1.0, 1.0 / s.N);
  return {{DomainKind::half_strip, h, H, 0}, std::move(space), 1.0, std::move(nu)};
}

namespace {

LatticeSpec cone_lattice(double h, double H) {
  LatticeSpec s;
  s.N = mesh_count(h);
  s.max_steps = extent_steps(H, s.N);
  s.i0 = -(s.max_steps + s.N + 1);
  s.i1 = s.max_steps + s.N + 1;
  s.j0 = 0;
  s.j1 = s.max_steps + 1;
  s.in_region = [N = s.N](long i, long j) { return j >= 0 && j >= std::abs(i) - N; };
  return s;
}

}  // namespace

GeneratedDomain slit_cone(double h, double H) {
  auto s = cone_lattice(h, H);
  s.cell_of = [N = s.N](long i, long j) { return j == 0 && std::abs(i) <= N ? 0 : -1; };
  auto lat = build_lattice(s);
  GraphSpace space(std::move(lat.vertices), std::move(lat.edges));
  auto nu = codimensional_measure(space, 1.0, 1.0 / s.N);
  return {{DomainKind::slit_cone, h, H, 0}, std::move(space), 1.0, std::move(nu)};
}

GeneratedDomain cantor_slit(double h, double H, int level) {
  check_level(level, h);
  auto s = cone_lattice(h, H);
  const auto cells = cantor_cells(level);
  const double len = 2.0 * std::pow(3.0, -level);
  const double tol = 0.5 / static_cast<double>(s.N) + 1e-12;
  s.cell_of = [N = s.N, cells, len, tol](long i, long j) {
    if (j != 0) return -1;
    const double x = static_cast<double>(i) / static_cast<double>(N);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const double a = 2.0 * cells[c] - 1.0;
      if (x >= a - tol && x <= a + len + tol) return static_cast<int>(c);
    }
    return -1;
  };
  auto lat = build_lattice(s);
  const double theta = 2.0 - kLog2Over3;
  auto nu = per_cell_measure(lat, cells.size(), std::ldexp(1.0, -level), theta, 1.0 / s.N);
  GraphSpace space(std::move(lat.vertices), std::move(lat.edges));
  return {{DomainKind::cantor_slit, h, H, level}, std::move(space), theta, std::move(nu)};
}

GeneratedDomain plane_minus_cantor_square(double h, double H, int level) {
  check_level(level, h);
  LatticeSpec s;
  s.N = mesh_count(h);
  s.max_steps = extent_steps(H, s.N);
  s.i0 = s.j0 = -(s.max_steps + 1);
  s.i1 = s.j1 = s.N + s.max_steps + 1;
  s.in_region = [](long, long) { return true; };
  const auto cells = cantor_cells(level);
  const double len = std::pow(3.0, -level);
  const double tol = 1e-9 / static_cast<double>(s.N);
  const auto cell_index = [cells, len, tol](double x) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (x >= cells[c] - tol && x <= cells[c] + len + tol) return static_cast<int>(c);
    }
    return -1;
  };
  s.cell_of = [N = s.N, cell_index, m = static_cast<int>(cells.size())](long i, long j) {
    const int a = cell_index(static_cast<double>(i) / static_cast<double>(N));
    if (a < 0) return -1;
    const int b = cell_index(static_cast<double>(j) / static_cast<double>(N));
    return b < 0 ? -1 : a * m + b;
  };
  auto lat = build_lattice(s);
  const double theta = 2.0 * (1.0 - kLog2Over3);
  auto nu = per_cell_measure(lat, cells.size() * cells.size(), std::ldexp(1.0, -2 * level), theta, 1.0 / s.N);
  GraphSpace space(std::move(lat.vertices), std::move(lat.edges));
  return {{DomainKind::plane_minus_cantor_square, h, H, level}, std::move(space), theta, std::move(nu)};
}

GeneratedDomain generate(const GeneratorSpec& spec) {
  switch (spec.kind) {
    case DomainKind::half_strip: return half_strip(spec.h, spec.H);
    case DomainKind::slit_cone: return slit_cone(spec.h, spec.H);
    case DomainKind::cantor_slit: return cantor_slit(spec.h, spec.H, spec.level);
    case DomainKind::plane_minus_cantor_square: return plane_minus_cantor_square(spec.h, spec.H, spec.level);
  }
  throw DomainError("unknown generator");
}

}  // namespace uniformizer
