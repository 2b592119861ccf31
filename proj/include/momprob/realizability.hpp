#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "momprob/config_space.hpp"
#include "momprob/errors.hpp"
#include "momprob/lp.hpp"
#include "momprob/moment_algebra.hpp"
#include "momprob/poly_algebra.hpp"
#include "momprob/rational.hpp"

namespace momprob {

// Witness that no representing measure exists: a function
//   f(eta) = f0 + sum_x f1[x] k_x + sum_{x,y} f2[x][y] k_x k_y
//            [+ f3 * (sum_x gamma[x] k_x)^3]
// that is nonnegative on every admissible configuration while pairing
// negatively with the prescribed moments. f3 appears only for instances
// carrying a cubic mass bound and is then nonnegative, with gamma recording
// the weights the bound uses.
struct PositivityCertificate {
  Rat f0;
  RatVec f1;
  RatMat f2;
  std::optional<Rat> f3;
  std::optional<RatVec> gamma;
};

inline Rat evaluate_certificate(const PositivityCertificate& cert, const Configuration& eta) {
  const std::size_t n = cert.f1.size();
  if (eta.counts.size() != n)
    throw std::invalid_argument("configuration size does not match certificate");
  Rat value = cert.f0;
  for (std::size_t x = 0; x < n; ++x) value += cert.f1[x] * eta.counts[x];
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      value += cert.f2[x][y] * eta.counts[x] * eta.counts[y];
  if (cert.f3) {
    const Rat mass = weighted_mass(*cert.gamma, eta);
    value += *cert.f3 * mass * mass * mass;
  }
  return value;
}

// Value of the pairing <cert, L>; for cubic certificates the f3 coefficient
// pairs with the mass bound r_max instead of a genuine third moment.
inline Rat certificate_pairing(const PositivityCertificate& cert, const MomentFunctional& L,
                               const std::optional<Rat>& r_max) {
  const std::size_t n = cert.f1.size();
  if (L.sites() != n) throw std::invalid_argument("functional size does not match certificate");
  Rat value = cert.f0 * L.moment(0).value();
  for (std::size_t x = 0; x < n; ++x) value += cert.f1[x] * L.moment(1).at({x});
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) value += cert.f2[x][y] * L.moment(2).at({x, y});
  if (cert.f3) {
    if (!r_max) throw std::invalid_argument("cubic certificate needs the mass bound it refutes");
    value += *cert.f3 * *r_max;
  }
  return value;
}

// Scale so the largest coefficient magnitude is 1; gamma is left alone.
inline PositivityCertificate normalized(PositivityCertificate cert) {
  Rat scale = rat_abs(cert.f0);
  for (const Rat& v : cert.f1) scale = std::max(scale, rat_abs(v));
  for (const auto& row : cert.f2)
    for (const Rat& v : row) scale = std::max(scale, rat_abs(v));
  if (cert.f3) scale = std::max(scale, rat_abs(*cert.f3));
  if (scale == 0) return cert;
  cert.f0 /= scale;
  for (Rat& v : cert.f1) v /= scale;
  for (auto& row : cert.f2)
    for (Rat& v : row) v /= scale;
  if (cert.f3) *cert.f3 /= scale;
  return cert;
}

struct RealizabilityInstance {
  SiteSpace space;
  KSpec kspec;
  MomentFunctional L;
  std::optional<RatVec> gamma;
  std::optional<Rat> r_max;
  std::size_t enumeration_cap = kDefaultEnumerationCap;

  void validate() const {
    kspec.validate(space);
    if (L.sites() != space.size())
      throw std::invalid_argument("moment data does not match the number of sites");
    if (gamma) {
      if (gamma->size() != space.size())
        throw std::invalid_argument("gamma length does not match the number of sites");
      for (const Rat& g : *gamma)
        if (g <= 0) throw std::invalid_argument("gamma weights must be positive");
    }
    if (r_max && !gamma)
      throw std::invalid_argument("a cubic mass bound needs gamma weights");
  }
};

struct RepresentingMeasure {
  FiniteMeasure measure;
  std::optional<Rat> realized_r;  // third gamma-mass moment, when gamma is given
};

using Verdict = std::variant<RepresentingMeasure, PositivityCertificate>;

struct KPositivityResult {
  bool positive;
  Verdict evidence;
};

struct CubicMinimum {
  Rat r_star;
  FiniteMeasure minimizer;
};

using CubicOutcome = std::variant<CubicMinimum, PositivityCertificate>;

namespace detail {

inline Rat cubic_mass(const RatVec& gamma, const Configuration& eta) {
  const Rat mass = weighted_mass(gamma, eta);
  return mass * mass * mass;
}

struct RealizabilityLp {
  LinearProgram lp;
  std::vector<Configuration> configs;
  bool has_cubic_row = false;
};

// Columns are admissible configurations; equality rows prescribe the moments
// of order 0, 1 and 2 (the order-2 block lists all ordered site pairs), and
// an optional trailing <= row caps the cubic gamma-mass.
inline RealizabilityLp build_lp(const RealizabilityInstance& inst, bool cubic_row,
                                bool cubic_objective) {
  RealizabilityLp out;
  out.configs = enumerate_configurations(inst.space, inst.kspec, inst.enumeration_cap);
  out.has_cubic_row = cubic_row;
  const std::size_t n = inst.space.size();
  const std::size_t m = 1 + n + n * n + (cubic_row ? 1 : 0);
  const std::size_t cols = out.configs.size();

  out.lp.a.assign(m, RatVec(cols, Rat(0)));
  out.lp.b.assign(m, Rat(0));
  out.lp.sense.assign(m, RowSense::kEq);
  for (std::size_t c = 0; c < cols; ++c) {
    const auto& k = out.configs[c].counts;
    out.lp.a[0][c] = 1;
    for (std::size_t x = 0; x < n; ++x) out.lp.a[1 + x][c] = k[x];
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) out.lp.a[1 + n + x * n + y][c] = Rat(k[x]) * k[y];
  }
  out.lp.b[0] = inst.L.moment(0).value();
  for (std::size_t x = 0; x < n; ++x) out.lp.b[1 + x] = inst.L.moment(1).at({x});
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) out.lp.b[1 + n + x * n + y] = inst.L.moment(2).at({x, y});

  if (cubic_row) {
    const std::size_t r = m - 1;
    out.lp.sense[r] = RowSense::kLe;
    for (std::size_t c = 0; c < cols; ++c) out.lp.a[r][c] = cubic_mass(*inst.gamma, out.configs[c]);
    out.lp.b[r] = *inst.r_max;
  }
  if (cubic_objective) {
    RatVec obj(cols);
    for (std::size_t c = 0; c < cols; ++c) obj[c] = cubic_mass(*inst.gamma, out.configs[c]);
    out.lp.objective = std::move(obj);
  }
  return out;
}

inline RepresentingMeasure measure_from_point(const RealizabilityInstance& inst,
                                              const std::vector<Configuration>& configs,
                                              const RatVec& weights) {
  std::vector<std::pair<Configuration, Rat>> atoms;
  for (std::size_t c = 0; c < configs.size(); ++c)
    if (weights[c] > 0) atoms.emplace_back(configs[c], weights[c]);
  RepresentingMeasure out{FiniteMeasure(inst.space.size(), std::move(atoms)), std::nullopt};
  if (inst.gamma) {
    Rat r(0);
    for (const auto& [config, weight] : out.measure.atoms())
      r += weight * cubic_mass(*inst.gamma, config);
    out.realized_r = r;
  }
  return out;
}

inline PositivityCertificate certificate_from_farkas(const RealizabilityInstance& inst,
                                                     const RatVec& y, bool has_cubic_row) {
  const std::size_t n = inst.space.size();
  PositivityCertificate cert;
  cert.f0 = y[0];
  cert.f1.assign(y.begin() + 1, y.begin() + 1 + static_cast<std::ptrdiff_t>(n));
  cert.f2.assign(n, RatVec(n));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t z = 0; z < n; ++z)
      cert.f2[x][z] = (y[1 + n + x * n + z] + y[1 + n + z * n + x]) / 2;
  if (has_cubic_row) {
    cert.f3 = y[1 + n + n * n];
    cert.gamma = *inst.gamma;
  }
  return normalized(std::move(cert));
}

}  // namespace detail

// Certificate soundness against an instance, re-derived from scratch:
// nonnegative on every admissible configuration and negative pairing.
inline bool certificate_refutes(const PositivityCertificate& cert,
                                const RealizabilityInstance& inst) {
  if (cert.f3 && !inst.r_max) return false;
  for (const auto& eta : enumerate_configurations(inst.space, inst.kspec, inst.enumeration_cap))
    if (evaluate_certificate(cert, eta) < 0) return false;
  return certificate_pairing(cert, inst.L, inst.r_max) < 0;
}

// Decide whether (ell0, ell1, ell2) are the power moments of a measure on
// the admissible configurations; the instance's cubic data is ignored here.
inline Verdict find_representing_measure(const RealizabilityInstance& inst,
                                         const SolveOptions& options = {}) {
  inst.validate();
  auto built = detail::build_lp(inst, /*cubic_row=*/false, /*cubic_objective=*/false);
  LpOutcome outcome = solve(built.lp, options);
  if (const auto* feasible = std::get_if<LpFeasible>(&outcome))
    return detail::measure_from_point(inst, built.configs, feasible->x);
  PositivityCertificate cert =
      detail::certificate_from_farkas(inst, std::get<LpInfeasible>(outcome).farkas, false);
  if (!certificate_refutes(cert, inst))
    throw std::logic_error("extracted certificate failed internal verification");
  return cert;
}

// L is K-positive exactly when a representing measure exists at this
// truncation; the evidence is a measure or a refuting certificate.
inline KPositivityResult check_K_positivity(const RealizabilityInstance& inst,
                                            const SolveOptions& options = {}) {
  Verdict verdict = find_representing_measure(inst, options);
  const bool positive = std::holds_alternative<RepresentingMeasure>(verdict);
  return {positive, std::move(verdict)};
}

// Representing measure whose cubic gamma-mass moment additionally stays
// within r_max; certificates gain an f3 term refuting the pair (L, r_max).
inline Verdict extend_with_cubic(const RealizabilityInstance& inst,
                                 const SolveOptions& options = {}) {
  inst.validate();
  if (!inst.gamma || !inst.r_max)
    throw std::invalid_argument("cubic extension needs gamma weights and a mass bound");
  auto built = detail::build_lp(inst, /*cubic_row=*/true, /*cubic_objective=*/false);
  LpOutcome outcome = solve(built.lp, options);
  if (const auto* feasible = std::get_if<LpFeasible>(&outcome))
    return detail::measure_from_point(inst, built.configs, feasible->x);
  PositivityCertificate cert =
      detail::certificate_from_farkas(inst, std::get<LpInfeasible>(outcome).farkas, true);
  if (!certificate_refutes(cert, inst))
    throw std::logic_error("extracted certificate failed internal verification");
  return cert;
}

// Smallest cubic gamma-mass moment over all representing measures, together
// with a minimizer; the cubic extension with bound r_max is feasible exactly
// when r_max >= r_star.
inline CubicOutcome minimal_third_moment(const RealizabilityInstance& inst,
                                         const SolveOptions& options = {}) {
  inst.validate();
  if (!inst.gamma) throw std::invalid_argument("cubic minimization needs gamma weights");
  auto built = detail::build_lp(inst, /*cubic_row=*/false, /*cubic_objective=*/true);
  LpOutcome outcome = solve(built.lp, options);
  if (const auto* feasible = std::get_if<LpFeasible>(&outcome)) {
    RepresentingMeasure measure = detail::measure_from_point(inst, built.configs, feasible->x);
    return CubicMinimum{*feasible->objective_value, std::move(measure.measure)};
  }
  PositivityCertificate cert =
      detail::certificate_from_farkas(inst, std::get<LpInfeasible>(outcome).farkas, false);
  if (!certificate_refutes(cert, inst))
    throw std::logic_error("extracted certificate failed internal verification");
  return cert;
}

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

struct VerificationReport {
  std::vector<Check> checks;
  bool all_pass = true;

  void add(std::string name, bool pass, std::string detail = "") {
    all_pass = all_pass && pass;
    checks.push_back({std::move(name), pass, std::move(detail)});
  }
};

namespace detail {

inline std::string config_string(const SiteSpace& space, const Configuration& eta) {
  std::string out = "(";
  for (std::size_t x = 0; x < eta.counts.size(); ++x) {
    if (x) out += ", ";
    out += space.labels()[x] + ":" + std::to_string(eta.counts[x]);
  }
  return out + ")";
}

inline void verify_measure(const RealizabilityInstance& inst, const RepresentingMeasure& rep,
                           VerificationReport& report) {
  const auto& labels = inst.space.labels();
  {
    std::string bad;
    for (const auto& [config, weight] : rep.measure.atoms())
      if (!contains(inst.space, inst.kspec, config)) {
        bad = config_string(inst.space, config);
        break;
      }
    report.add("support-in-K", bad.empty(),
               bad.empty() ? "" : "configuration " + bad + " is not admissible");
  }
  {
    bool ok = rep.measure.sites() == inst.space.size();
    for (const auto& [config, weight] : rep.measure.atoms()) ok = ok && weight > 0;
    report.add("weights-positive", ok, ok ? "" : "a support atom has a nonpositive weight");
  }
  const auto moments = power_moments(rep.measure, 2);
  {
    const Rat got = moments[0].value(), want = inst.L.moment(0).value();
    report.add("moment-ell0", got == want,
               got == want ? "" : "ell0: expected " + format_rat(want) + ", measure gives " + format_rat(got));
  }
  {
    std::string bad;
    for (std::size_t x = 0; x < inst.space.size() && bad.empty(); ++x) {
      const Rat got = moments[1].at({x}), want = inst.L.moment(1).at({x});
      if (got != want)
        bad = "ell1[" + labels[x] + "]: expected " + format_rat(want) + ", measure gives " +
              format_rat(got);
    }
    report.add("moment-ell1", bad.empty(), bad);
  }
  {
    std::string bad;
    for (std::size_t x = 0; x < inst.space.size() && bad.empty(); ++x)
      for (std::size_t y = 0; y < inst.space.size() && bad.empty(); ++y) {
        const Rat got = moments[2].at({x, y}), want = inst.L.moment(2).at({x, y});
        if (got != want)
          bad = "ell2[" + labels[x] + "][" + labels[y] + "]: expected " + format_rat(want) +
                ", measure gives " + format_rat(got);
      }
    report.add("moment-ell2", bad.empty(), bad);
  }
  if (inst.gamma) {
    Rat realized(0);
    for (const auto& [config, weight] : rep.measure.atoms())
      realized += weight * cubic_mass(*inst.gamma, config);
    if (rep.realized_r)
      report.add("realized-r", realized == *rep.realized_r,
                 realized == *rep.realized_r
                     ? ""
                     : "reported " + format_rat(*rep.realized_r) + ", recomputed " + format_rat(realized));
    if (inst.r_max)
      report.add("cubic-bound", realized <= *inst.r_max,
                 realized <= *inst.r_max ? ""
                                         : "cubic mass moment " + format_rat(realized) +
                                               " exceeds bound " + format_rat(*inst.r_max));
  }
}

inline void verify_certificate(const RealizabilityInstance& inst, const PositivityCertificate& cert,
                               VerificationReport& report) {
  const std::size_t n = inst.space.size();
  bool shape = cert.f1.size() == n && cert.f2.size() == n;
  for (const auto& row : cert.f2) shape = shape && row.size() == n;
  report.add("certificate-shape", shape, shape ? "" : "coefficient sizes do not match the sites");
  if (!shape) return;

  if (cert.f3) {
    report.add("f3-nonnegative", *cert.f3 >= 0,
               *cert.f3 >= 0 ? "" : "f3 = " + format_rat(*cert.f3));
    const bool has_gamma = cert.gamma && cert.gamma->size() == n;
    report.add("cubic-data", has_gamma && inst.r_max.has_value(),
               has_gamma && inst.r_max ? "" : "cubic certificate lacks gamma weights or a bound");
    if (!has_gamma || !inst.r_max) return;
    bool positive = true;
    for (const Rat& g : *cert.gamma) positive = positive && g > 0;
    report.add("gamma-positive", positive, positive ? "" : "a gamma weight is nonpositive");
    if (!positive) return;
  }

  {
    std::string bad;
    for (const auto& eta : enumerate_configurations(inst.space, inst.kspec, inst.enumeration_cap)) {
      const Rat value = evaluate_certificate(cert, eta);
      if (value < 0) {
        bad = "f" + config_string(inst.space, eta) + " = " + format_rat(value);
        break;
      }
    }
    report.add("nonnegative-on-K", bad.empty(), bad);
  }
  {
    const Rat pairing = certificate_pairing(cert, inst.L, inst.r_max);
    report.add("negative-pairing", pairing < 0, "pairing value " + format_rat(pairing));
  }
}

}  // namespace detail

// Re-derive every claim a verdict makes, from the instance data alone.
inline VerificationReport verify_verdict(const RealizabilityInstance& inst, const Verdict& verdict) {
  inst.validate();
  VerificationReport report;
  if (const auto* rep = std::get_if<RepresentingMeasure>(&verdict))
    detail::verify_measure(inst, *rep, report);
  else
    detail::verify_certificate(inst, std::get<PositivityCertificate>(verdict), report);
  return report;
}

}  // namespace momprob
