#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "uniformizer/graph_space.hpp"

namespace uniformizer {

/// Dampening function phi: (0, inf) -> (0, 1], non-increasing, phi = 1 on (0, 1].
class Dampening {
 public:
  enum class Kind { power, log_power, tabulated };

  /// phi(t) = min{1, t^-beta}
  static Dampening power(double beta);
  /// phi(t) = min{1, t^-beta log(e - 1 + t)}
  static Dampening log_power(double beta);
  /// Log-log linear interpolation between samples (t_i, phi_i), t strictly increasing.
  static Dampening tabulated(std::vector<std::pair<double, double>> samples);
  /// "power:2", "log_power:1.5", "tabulated:t1/v1,t2/v2,...".
  static Dampening parse(const std::string& spec);

  Kind kind() const noexcept { return kind_; }
  double beta() const noexcept { return beta_; }
  const std::vector<std::pair<double, double>>& samples() const noexcept { return samples_; }
  std::string spec() const;

  double operator()(double t) const;

 private:
  Dampening(Kind kind, double beta, std::vector<std::pair<double, double>> samples = {});

  Kind kind_;
  double beta_ = 0.0;
  std::vector<std::pair<double, double>> samples_;
};

inline double evaluate(const Dampening& phi, double t) { return phi(t); }

/// Integral of phi over [a, b], 0 < a <= b.
double integral(const Dampening& phi, double a, double b);

/// Integral of phi over [t, inf). Throws DomainError "condition (2) violated" on
/// a divergent tail.
double tail_integral(const Dampening& phi, double t);

enum class CheckStatus { pass, fail, range_limited, skipped };
const char* to_string(CheckStatus status);

struct PhiValidationReport {
  double tail_integral_estimate = 0.0;
  double C_phi_emp = 0.0;
  double tau_emp = 0.0;
  double cond5_implied_constant = 0.0;
  double cond6_implied_constant = 0.0;
  /// Index k - 1 holds condition (k).
  std::array<CheckStatus, 6> status{};
  std::vector<std::string> notes;

  bool pass(int condition) const { return status.at(condition - 1) == CheckStatus::pass; }
};

/// Checks the six conditions over dyadic t = 2^k, 0 <= k <= n_max. `band_measure`
/// may be empty, in which case condition (6) is skipped.
PhiValidationReport validate(const Dampening& phi, double p, std::span<const double> band_measure,
                             int n_max);

inline PhiValidationReport validate(const Dampening& phi, double p, const BandDecomposition& bands,
                                    int n_max) {
  return validate(phi, p, bands.band_measure, n_max);
}

}  // namespace uniformizer
