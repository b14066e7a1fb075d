#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uniformizer/energy.hpp"
#include "uniformizer/graph_space.hpp"
#include "uniformizer/transform.hpp"

namespace uniformizer {

struct SolverOptions {
  /// Stage stop: relative energy decrease or halved Newton decrement below tol.
  double tol = 1e-12;
  /// Newton iterations per epsilon stage.
  int max_iter = 400;
  /// Epsilon schedule: eps0 = eps0_scale * range, eps <- eps * eps_factor,
  /// floor eps_floor * range.
  double eps0_scale = 1.0;
  double eps_factor = 0.1;
  double eps_floor = 1e-10;
  /// Start field; empty means the harmonic (p = 2) warm start.
  ScalarField initial;
  /// Require every boundary vertex of the graph to be pinned.
  bool require_boundary_pins = true;
};

struct Pin {
  VertexIndex vertex;
  double value;
};

struct DirichletProblem {
  const MeasuredGraph* graph = nullptr;
  double p = 2.0;
  std::vector<Pin> pins;
  SolverOptions options;
};

struct SolveResult {
  ScalarField u;
  /// Unregularized energy sum_e m(e) (|du| / len(e))^p.
  double energy = 0.0;
  int iterations = 0;
  /// Relative energy decrease at termination.
  double residual = 0.0;
  int stages = 0;
  bool converged = true;
  std::vector<std::string> flags;
  /// Regularized energy after every accepted step; one entry per iteration.
  std::vector<double> energy_history;
  /// Stage index of each history entry.
  std::vector<int> history_stage;
};

/// Minimizes sum_e m(e) (du^2 + eps^2)^{p/2} / len(e)^p over fields matching the pins.
/// p = 2 is a single sparse LDLT solve; otherwise damped Newton along an
/// epsilon-continuation. Free vertices whose every incident edge has zero mass
/// take the len^-p weighted p-mean of their neighbours.
SolveResult solve_p_harmonic(const DirichletProblem& problem);

struct Condenser {
  std::vector<VertexIndex> E;
  std::vector<VertexIndex> F;
  /// Vertex mask of U; empty means the whole graph.
  std::vector<char> U;
};

struct CapacityResult {
  double value = 0.0;
  ScalarField potential;
  SolveResult solve;
};

/// Capacity of (E, F; U): energy of the minimizer with E pinned to 1 and F to 0.
/// Free vertices not joined to a pin through positive-mass edges get 0.
CapacityResult capacity(const MeasuredGraph& g, const Condenser& cond, double p,
                        const SolverOptions& options = {});

struct ModulusOptions {
  /// Stop once every E-F path has rho-length >= 1 - tol.
  double tol = 1e-6;
  double kkt_tol = 1e-12;
  std::size_t max_paths = 20000;
  int max_newton = 200;
};

struct ModulusResult {
  double value = 0.0;
  std::vector<double> rho;
  std::size_t paths_used = 0;
  double shortest = 0.0;
  bool converged = true;
  std::vector<std::string> flags;
};

/// p-modulus of the E-F path family inside U by constraint generation over paths.
ModulusResult modulus(const MeasuredGraph& g, const Condenser& cond, double p,
                      const ModulusOptions& options = {});

/// Capacity of (closed B_phi(inf, r), complement of the open B_phi(inf, R)).
CapacityResult capacity_of_infinity(const TransformedSpace& t, double r, double R,
                                    const SolverOptions& options = {});

struct UnboundedSolve {
  SolveResult result;
  double at_infinity = 0.0;
};

/// Pins f on the boundary (and optionally infinity) and solves on the
/// transformed truncation with infinity attached. `f` is vertex-indexed over the base.
UnboundedSolve solve_dirichlet_unbounded(const TransformedSpace& t, std::span<const double> f,
                                         std::optional<double> at_infinity,
                                         const SolverOptions& options = {});
UnboundedSolve solve_dirichlet_unbounded(const GraphSpace& space, const Dampening& phi, double p,
                                         std::span<const double> f, std::optional<double> at_infinity,
                                         const SolverOptions& options = {});

}  // namespace uniformizer
