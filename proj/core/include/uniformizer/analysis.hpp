#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uniformizer/graph_space.hpp"
#include "uniformizer/solver.hpp"
#include "uniformizer/transform.hpp"

namespace uniformizer {

inline constexpr std::uint64_t kDefaultSeed = 20240611;

/// `count` distinct entries of `pool`, drawn with a fixed-seed generator and
/// returned sorted (all of them when count >= pool size).
std::vector<VertexIndex> sample_vertices(std::span<const VertexIndex> pool, std::size_t count,
                                         std::uint64_t seed = kDefaultSeed);

/// Dyadic radii r_k = r_max / 2^k that stay >= r_min, largest first.
std::vector<double> dyadic_radii(double r_min, double r_max);

struct DoublingScale {
  double r = 0.0;
  VertexIndex worst_center = kNoVertex;
  double ratio = 0.0;
};

struct DoublingReport {
  double max_ratio = 1.0;
  std::vector<DoublingScale> per_scale;
  double bound = 0.0;
  std::size_t skipped = 0;
  bool pass = true;
};

/// max mu(B(x, 2r)) / mu(B(x, r)) over centers and radii, open balls.
DoublingReport doubling_constant(const MeasuredGraph& g, std::span<const VertexIndex> centers,
                                 std::span<const double> radii, double bound = kInfinity);

struct ExponentFit {
  double Q_minus = 0.0;
  double Q_plus = 0.0;
  /// Raw envelope before the slack.
  double slope_max = 0.0;
  double slope_min = 0.0;
  double slack = 0.05;
  /// Least-squares slope of log mu(B_r) against log r, pooled over centers.
  double slope = 0.0;
  /// RMS residual of that regression divided by the spread of log mu.
  double fit_residual = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  std::size_t pairs = 0;
  std::size_t skipped = 0;
};

/// Envelope exponents from log(mu(B_R) / mu(B_r)) / log(R / r) over all
/// radius pairs r < R. The slack widens the envelope: Q_minus = max * (1 + slack),
/// Q_plus = min * (1 - slack). Balls touching a vertex flagged in `blocked`
/// are skipped.
ExponentFit mass_exponents(const MeasuredGraph& g, std::span<const VertexIndex> centers,
                           std::span<const double> radii, std::span<const char> blocked = {},
                           double slack = 0.05);

struct QBeta {
  double minus = 0.0;
  double plus = 0.0;
};

/// Q_beta^- = (beta p - Q_plus) / (beta - 1), Q_beta^+ = (beta p - Q_minus) / (beta - 1).
QBeta q_beta(double p, double beta, double q_mu_minus, double q_mu_plus);
inline QBeta q_beta(double p, double beta, const ExponentFit& fit) {
  return q_beta(p, beta, fit.Q_minus, fit.Q_plus);
}

struct BandRatio {
  int band = 0;
  std::size_t count = 0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};

struct DistInfinityReport {
  std::vector<BandRatio> bands;
  double kappa = 1.0;
};

/// d_phi(v, inf) / (2^m phi(2^m)) per band m >= 1.
DistInfinityReport dist_infinity_check(const TransformedSpace& t, int first_band = 1, int last_band = -1);

/// d_phi distance from the boundary to infinity.
double boundary_to_infinity(const TransformedSpace& t);

/// Radii for balls centred at infinity: dyadic in [4 L_min, R / 2] where L_min is
/// the shortest infinity edge and R = d_phi(boundary, infinity).
std::vector<double> infinity_radii(const TransformedSpace& t);

enum class Verdict { parabolic, hyperbolic, indeterminate };
const char* to_string(Verdict v);

struct ClassifyOptions {
  double hyperbolic_floor = 0.1;
  double decay_factor = 4.0;
  double max_fit_residual = 0.2;
  std::size_t min_shells = 4;
  /// Mass exponents of the base measure for the theory cross-check; defaults to
  /// the end growth exponent recorded when infinity was attached.
  std::optional<std::pair<double, double>> q_mu;
  SolverOptions solver;
};

struct DecayFit {
  std::string form;  // "power" or "log-power"
  double exponent = 0.0;
  double residual = 0.0;
  /// Slope of log cap against log(R / r).
  double loglog_slope = 0.0;
  /// Slope of log cap against log log(R / r).
  double logpower_slope = 0.0;
};

struct Classification {
  Verdict verdict = Verdict::indeterminate;
  double R = 0.0;
  std::vector<double> radii;
  std::vector<double> caps;
  DecayFit fit;
  QBeta q_beta;
  double q_mu_minus = 0.0;
  double q_mu_plus = 0.0;
  Verdict predicted = Verdict::indeterminate;
  bool near_threshold = false;
  std::vector<std::string> notes;
};

/// Shell capacities cap(B(inf, r_k), complement of B(inf, R)) for r_k = R / 2^k,
/// k = 2..K, R = d_phi(boundary, inf) / 2, then thresholds.
Classification classify_parabolicity(const TransformedSpace& t, const ClassifyOptions& options = {});

struct UniformityReport {
  double max_length_ratio = 0.0;
  double max_cigar_ratio = 0.0;
  double constant = 0.0;
  std::size_t pairs = 0;
};

/// Shortest-path witness of the uniformity constant. `boundary_dist` is the
/// distance to the boundary in the metric of g; vertices flagged in `excluded`
/// are removed from the admissible paths.
UniformityReport uniformity_spot_check(const MeasuredGraph& g, std::span<const double> boundary_dist,
                                       std::span<const std::pair<VertexIndex, VertexIndex>> pairs,
                                       std::span<const char> excluded = {});

struct FatnessSample {
  VertexIndex center = kNoVertex;
  double r = 0.0;
  double ratio = 0.0;
  bool unresolved = false;
};

struct FatnessReport {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  /// Floor the minimum must clear: max_ratio / spread_bound.
  double floor = 0.0;
  double spread_bound = 16.0;
  std::size_t unresolved = 0;
  std::vector<FatnessSample> samples;
  bool pass = false;
};

/// min over samples of cap_p(B[z, r] cap boundary, complement of B(z, 2r)) r^{p - theta} / nu(B[z, r]).
/// Radii below twice the mesh scale are flagged unresolved and not scored.
FatnessReport boundary_fatness(const TransformedSpace& t, const BoundaryMeasure& nu,
                               std::span<const VertexIndex> centers, std::span<const double> radii,
                               double spread_bound = 16.0, const SolverOptions& solver = {});

}  // namespace uniformizer
