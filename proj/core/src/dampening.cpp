#include "uniformizer/dampening.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "uniformizer/error.hpp"

namespace uniformizer {
namespace {

constexpr double kRombergTol = 1e-13;
constexpr int kRombergLevels = 22;
constexpr double kTailTol = 1e-12;
constexpr int kMaxPanels = 4000;

double romberg(const Dampening& phi, double a, double b) {
  std::vector<double> prev(1), cur;
  double h = b - a;
  prev[0] = 0.5 * h * (phi(a) + phi(b));
  for (int k = 1; k < kRombergLevels; ++k) {
    h *= 0.5;
    double sum = 0.0;
    const long count = 1L << (k - 1);
    for (long i = 0; i < count; ++i) sum += phi(a + (2 * i + 1) * h);
    cur.assign(k + 1, 0.0);
    cur[0] = 0.5 * prev[0] + h * sum;
    double factor = 1.0;
    for (int j = 1; j <= k; ++j) {
      factor *= 4.0;
      cur[j] = cur[j - 1] + (cur[j - 1] - prev[j - 1]) / (factor - 1.0);
    }
    if (k >= 4 && std::abs(cur[k] - prev[k - 1]) <= kRombergTol * std::abs(cur[k])) return cur[k];
    prev.swap(cur);
  }
  return prev.back();
}

// Exact integral of the log-log interpolant through (t0, v0), (t1, v1) over [a, b].
double power_segment(double t0, double v0, double t1, double v1, double a, double b) {
  const double slope = std::log(v1 / v0) / std::log(t1 / t0);
  const double e = slope + 1.0;
  if (std::abs(e) < 1e-14) return v0 * t0 * std::log(b / a);
  return v0 * t0 / e * (std::pow(b / t0, e) - std::pow(a / t0, e));
}

double smooth_integral(const Dampening& phi, double a, double b) {
  // phi is smooth on [1, inf); integrate dyadic panels.
  double total = 0.0;
  for (double s = a; s < b;) {
    const double e = std::min(2.0 * s, b);
    total += romberg(phi, s, e);
    s = e;
  }
  return total;
}

[[noreturn]] void divergent(const std::string& why) {
  throw DomainError("condition (2) violated: " + why);
}

}  // namespace

Dampening::Dampening(Kind kind, double beta, std::vector<std::pair<double, double>> samples)
    : kind_(kind), beta_(beta), samples_(std::move(samples)) {}

Dampening Dampening::power(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive");
  return Dampening(Kind::power, beta);
}

Dampening Dampening::log_power(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive");
  return Dampening(Kind::log_power, beta);
}

Dampening Dampening::tabulated(std::vector<std::pair<double, double>> samples) {
  if (samples.size() < 2) throw DomainError("tabulated phi needs at least two samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto [t, v] = samples[i];
    if (!(t > 0.0) || !(v > 0.0) || v > 1.0) throw DomainError("tabulated phi samples must lie in (0,inf) x (0,1]");
    if (i > 0 && !(t > samples[i - 1].first)) throw DomainError("tabulated phi sample abscissae must increase");
    if (i > 0 && v > samples[i - 1].second) throw DomainError("tabulated phi must be non-increasing");
  }
  return Dampening(Kind::tabulated, 0.0, std::move(samples));
}

Dampening Dampening::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw DomainError("phi spec must look like kind:value, got '" + spec + "'");
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  try {
    if (kind == "power") return power(std::stod(rest));
    if (kind == "log_power") return log_power(std::stod(rest));
    if (kind == "tabulated") {
      std::vector<std::pair<double, double>> samples;
      std::stringstream ss(rest);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const auto slash = item.find('/');
        if (slash == std::string::npos) throw DomainError("tabulated sample must be t/value");
        samples.emplace_back(std::stod(item.substr(0, slash)), std::stod(item.substr(slash + 1)));
      }
      return tabulated(std::move(samples));
    }
  } catch (const std::logic_error&) {
    throw DomainError("malformed phi spec '" + spec + "'");
  }
  throw DomainError("unknown phi kind '" + kind + "'");
}

std::string Dampening::spec() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind_) {
    case Kind::power: out << "power:" << beta_; break;
    case Kind::log_power: out << "log_power:" << beta_; break;
    case Kind::tabulated:
      out << "tabulated:";
      for (std::size_t i = 0; i < samples_.size(); ++i) {
        out << (i ? "," : "") << samples_[i].first << '/' << samples_[i].second;
      }
      break;
  }
  return out.str();
}

double Dampening::operator()(double t) const {
  if (!(t > 0.0)) throw DomainError("phi is defined for t > 0");
  switch (kind_) {
    case Kind::power:
      return t <= 1.0 ? 1.0 : std::pow(t, -beta_);
    case Kind::log_power:
      return t <= 1.0 ? 1.0 : std::min(1.0, std::pow(t, -beta_) * std::log(std::numbers::e - 1.0 + t));
    case Kind::tabulated: {
      if (t < samples_.front().first || t > samples_.back().first) {
        throw RangeError("t outside tabulated range");
      }
      auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                                 [](double x, const auto& s) { return x < s.first; });
      if (it == samples_.end()) return samples_.back().second;
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      const double w = std::log(t / lo.first) / std::log(hi.first / lo.first);
      return std::exp((1.0 - w) * std::log(lo.second) + w * std::log(hi.second));
    }
  }
  return 1.0;
}

double integral(const Dampening& phi, double a, double b) {
  if (!(a > 0.0) || b < a) throw DomainError("integral needs 0 < a <= b");
  if (a == b) return 0.0;
  if (phi.kind() == Dampening::Kind::tabulated) {
    const auto& s = phi.samples();
    if (a < s.front().first || b > s.back().first) throw RangeError("integral outside tabulated range");
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      const double lo = std::max(a, s[i].first);
      const double hi = std::min(b, s[i + 1].first);
      if (lo < hi) total += power_segment(s[i].first, s[i].second, s[i + 1].first, s[i + 1].second, lo, hi);
    }
    return total;
  }
  double total = 0.0;
  if (a < 1.0) total += std::min(b, 1.0) - a;
  if (b > 1.0) total += smooth_integral(phi, std::max(a, 1.0), b);
  return total;
}

double tail_integral(const Dampening& phi, double t) {
  if (!(t > 0.0)) throw DomainError("tail integral needs t > 0");
  switch (phi.kind()) {
    case Dampening::Kind::power: {
      const double beta = phi.beta();
      if (beta <= 1.0) divergent("integral of t^-beta diverges for beta <= 1");
      if (t >= 1.0) return std::pow(t, 1.0 - beta) / (beta - 1.0);
      return (1.0 - t) + 1.0 / (beta - 1.0);
    }
    case Dampening::Kind::tabulated: {
      const auto& s = phi.samples();
      const std::size_t n = s.size();
      const double slope = std::log(s[n - 1].second / s[n - 2].second) / std::log(s[n - 1].first / s[n - 2].first);
      if (slope >= -1.0) divergent("tabulated tail extrapolates with log-log slope >= -1");
      const double far = s[n - 1].second * s[n - 1].first / (-slope - 1.0);
      if (t >= s[n - 1].first) return s[n - 1].second * std::pow(t / s[n - 1].first, slope) * t / (-slope - 1.0);
      return integral(phi, t, s[n - 1].first) + far;
    }
    case Dampening::Kind::log_power: {
      double total = t < 1.0 ? 1.0 - t : 0.0;
      double s = std::max(t, 1.0);
      double prev = 0.0;
      for (int k = 0; k < kMaxPanels; ++k, s *= 2.0) {
        const double panel = romberg(phi, s, 2.0 * s);
        total += panel;
        if (k >= 4) {
          const double q = panel / prev;
          if (q < 1.0) {
            const double rest = panel * q / (1.0 - q);
            if (rest <= kTailTol * total) return total + rest;
          } else if (k > 64) {
            divergent("dyadic panels do not decay");
          }
        }
        prev = panel;
      }
      divergent("tail quadrature did not converge");
    }
  }
  return 0.0;
}

const char* to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::range_limited: return "range-limited";
    case CheckStatus::skipped: return "skipped";
  }
  return "?";
}

PhiValidationReport validate(const Dampening& phi, double p, std::span<const double> band_measure, int n_max) {
  if (n_max < 2) throw PreconditionError("validate needs n_max >= 2");
  if (!(p >= 1.0)) throw DomainError("p must be >= 1");
  PhiValidationReport rep;
  const bool tab = phi.kind() == Dampening::Kind::tabulated;
  const auto in_range = [&](double t) {
    return !tab || (t >= phi.samples().front().first && t <= phi.samples().back().first);
  };
  const auto verdict = [&](bool ok) {
    if (!ok) return CheckStatus::fail;
    return tab ? CheckStatus::range_limited : CheckStatus::pass;
  };

  // (1)
  bool one = true;
  for (int k = 0; k <= 10; ++k) {
    const double t = std::ldexp(1.0, -k);
    if (in_range(t) && phi(t) != 1.0) one = false;
  }
  rep.status[0] = verdict(one);

  // (2)
  try {
    if (tab) {
      const double t0 = phi.samples().front().first;
      rep.tail_integral_estimate = tail_integral(phi, t0) + t0 * phi(t0);
    } else {
      rep.tail_integral_estimate = 1.0 + tail_integral(phi, 1.0);
    }
    rep.status[1] = verdict(true);
  } catch (const DomainError& e) {
    rep.tail_integral_estimate = kInfinity;
    rep.status[1] = CheckStatus::fail;
    rep.notes.emplace_back(e.what());
  }

  // (3), (4)
  double cmax = 0.0, tmin = kInfinity;
  for (int k = 0; k <= n_max; ++k) {
    const double t = std::ldexp(1.0, k);
    if (!in_range(t) || !in_range(2.0 * t)) continue;
    const double ratio = phi(t) / phi(2.0 * t);
    cmax = std::max(cmax, ratio);
    tmin = std::min(tmin, ratio);
  }
  if (cmax == 0.0) {
    rep.status[2] = rep.status[3] = CheckStatus::skipped;
    rep.notes.emplace_back("no dyadic points inside the tabulated range");
  } else {
    rep.C_phi_emp = cmax;
    rep.tau_emp = tmin;
    rep.status[2] = verdict(std::isfinite(cmax) && cmax >= 1.0 && cmax >= tmin);
    rep.status[3] = verdict(tmin > 2.0);
  }

  // (5): sum_{n>=m} 2^n phi(2^n) against 2^m phi(2^m).
  {
    std::vector<double> a;
    int top = 0;
    for (int n = 1; n <= n_max && in_range(std::ldexp(1.0, n)); ++n) {
      a.push_back(std::ldexp(phi(std::ldexp(1.0, n)), n));
      top = n;
    }
    if (a.size() < 2) {
      rep.status[4] = CheckStatus::skipped;
    } else {
      double rest;
      if (phi.kind() == Dampening::Kind::power) {
        const double r = std::pow(2.0, 1.0 - phi.beta());
        rest = r < 1.0 ? std::pow(r, top + 1) / (1.0 - r) : kInfinity;
      } else {
        const double q = a.back() / a[a.size() - 2];
        rest = q < 1.0 ? a.back() * q / (1.0 - q) : kInfinity;
      }
      double tail = rest, worst = 1.0;
      for (std::size_t i = a.size(); i-- > 0;) {
        tail += a[i];
        worst = std::max(worst, tail / a[i]);
      }
      rep.cond5_implied_constant = worst;
      rep.status[4] = verdict(std::isfinite(worst));
    }
  }

  // (6): sum_{n>=m} phi(2^n)^p mu(Omega_n) against phi(2^m)^p mu(Omega_m).
  {
    std::vector<double> b;
    const int last = std::min<int>(n_max, static_cast<int>(band_measure.size()) - 1);
    for (int n = 1; n <= last && in_range(std::ldexp(1.0, n)); ++n) {
      b.push_back(std::pow(phi(std::ldexp(1.0, n)), p) * band_measure[n]);
    }
    if (b.size() < 2) {
      rep.status[5] = CheckStatus::skipped;
      if (band_measure.empty()) rep.notes.emplace_back("condition (6) needs band measures");
    } else {
      const double q = b.back() / b[b.size() - 2];
      double tail = q < 1.0 ? b.back() * q / (1.0 - q) : kInfinity;
      double worst = 1.0;
      for (std::size_t i = b.size(); i-- > 0;) {
        tail += b[i];
        worst = b[i] > 0.0 ? std::max(worst, tail / b[i]) : kInfinity;
      }
      rep.cond6_implied_constant = worst;
      rep.status[5] = verdict(std::isfinite(worst));
      rep.notes.emplace_back(
          "condition (6) holds when beta*p exceeds the lower mass exponent, which is itself estimated from the same bands");
    }
  }
  return rep;
}

}  // namespace uniformizer
