// Acceptance gate: end-to-end properties at desk scale, one line per
// criterion, nonzero exit if any fails or overruns its time budget.

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "test_support.hpp"

using namespace momprob;

namespace {

struct Gate {
  int index = 0;
  int failures = 0;

  // body() returns an empty string on success, else the failure reason.
  void criterion(const std::string& description, long budget_ms,
                 const std::function<std::string()>& body) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    std::string problem;
    try {
      problem = body();
    } catch (const std::exception& e) {
      problem = std::string("unexpected exception: ") + e.what();
    }
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    if (problem.empty() && elapsed <= budget_ms) {
      std::cout << "PASS " << index << "/8 " << description << " (" << elapsed << " ms < "
                << budget_ms << " ms)\n";
      return;
    }
    ++failures;
    if (problem.empty()) problem = "time budget exceeded";
    std::cout << "FAIL " << index << "/8 " << description << " (" << elapsed << " ms: " << problem
              << ")\n";
  }
};

Polynomial random_polynomial(support::Rng& rng, std::size_t n, int degree) {
  std::vector<MomentTensor> coeffs;
  for (int order = 0; order <= degree; ++order) {
    RatVec raw(detail::pow_size(n, order));
    for (auto& v : raw) v = rng.rat(-3, 3);
    coeffs.push_back(MomentTensor::symmetrized(order, n, std::move(raw)));
  }
  return Polynomial(std::move(coeffs));
}

Configuration random_config(support::Rng& rng, std::size_t n, int max_count) {
  std::vector<int> counts(n);
  for (auto& c : counts) c = rng.int_in(0, max_count);
  return Configuration{std::move(counts)};
}

LinearProgram random_lp(support::Rng& rng, bool with_objective) {
  const std::size_t m = 1 + rng.below(4);
  const std::size_t n = 1 + rng.below(4);
  LinearProgram lp;
  lp.a.assign(m, RatVec(n));
  lp.b.assign(m, Rat(0));
  lp.sense.assign(m, RowSense::kEq);
  for (std::size_t i = 0; i < m; ++i) {
    for (auto& v : lp.a[i]) v = rng.rat(-3, 3);
    lp.b[i] = rng.rat(-3, 3);
    if (rng.below(2) == 0) lp.sense[i] = RowSense::kLe;
  }
  if (with_objective) {
    RatVec c(n);
    for (auto& v : c) v = rng.positive_rat(3);  // c >= 0 keeps the minimum at a vertex
    lp.objective = std::move(c);
  }
  return lp;
}

// Second statement of the moment system, fed to the vertex-enumeration
// oracle: weights w >= 0 per configuration reproducing orders 0..2.
LinearProgram moment_system(const RealizabilityInstance& inst,
                            const std::vector<Configuration>& configs) {
  const std::size_t n = inst.space.size();
  const std::size_t cols = configs.size();
  LinearProgram lp;
  lp.a.assign(1 + n + n * n, RatVec(cols, Rat(0)));
  lp.b.assign(1 + n + n * n, Rat(0));
  lp.sense.assign(1 + n + n * n, RowSense::kEq);
  for (std::size_t c = 0; c < cols; ++c) {
    const auto& k = configs[c].counts;
    lp.a[0][c] = 1;
    for (std::size_t x = 0; x < n; ++x) lp.a[1 + x][c] = k[x];
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) lp.a[1 + n + x * n + y][c] = Rat(k[x]) * k[y];
  }
  lp.b[0] = inst.L.moment(0).value();
  for (std::size_t x = 0; x < n; ++x) lp.b[1 + x] = inst.L.moment(1).at({x});
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) lp.b[1 + n + x * n + y] = inst.L.moment(2).at({x, y});
  return lp;
}

std::string dichotomy_on_random_instances() {
  support::Rng rng(101);
  int measures = 0;
  int certificates = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(3);
    const RealizabilityInstance inst = (trial % 2 == 0)
                                           ? support::planted_instance(rng, n, 2, false)
                                           : support::random_instance(rng, n, 2);
    const Verdict verdict = find_representing_measure(inst);
    const bool is_measure = std::holds_alternative<RepresentingMeasure>(verdict);
    (is_measure ? measures : certificates) += 1;
    const VerificationReport report = verify_verdict(inst, verdict);
    if (!report.all_pass) {
      for (const auto& check : report.checks)
        if (!check.pass)
          return "trial " + std::to_string(trial) + ": check " + check.name + " failed (" +
                 check.detail + ")";
    }
    // Independent dichotomy oracle on the small cases: vertex enumeration
    // of a separately assembled moment system.
    if (n <= 2 && trial % 5 == 0) {
      const auto configs = enumerate_configurations(inst.space, inst.kspec);
      if (support::brute_force_lp(moment_system(inst, configs)).feasible != is_measure)
        return "trial " + std::to_string(trial) + ": verdict disagrees with vertex enumeration";
    }
  }
  if (measures <= 400 || certificates <= 400)
    return "branch starvation: " + std::to_string(measures) + " measures, " +
           std::to_string(certificates) + " certificates";
  return "";
}

std::string measures_round_trip() {
  support::Rng rng(202);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.below(3);
    const SiteSpace space = support::random_space(rng, n, true);
    const KSpec kspec = support::random_kspec(rng, space, 2);
    const FiniteMeasure mu = random_measure(space, kspec, rng.u64());
    const RealizabilityInstance inst = instance_from_measure(mu, space, kspec);
    Verdict verdict = find_representing_measure(inst);
    const auto* rep = std::get_if<RepresentingMeasure>(&verdict);
    if (!rep) return "trial " + std::to_string(trial) + ": planted moments were refuted";
    const auto moments = power_moments(rep->measure, 2);
    for (int order = 0; order <= 2; ++order)
      if (!(moments[static_cast<std::size_t>(order)] == inst.L.moment(order)))
        return "trial " + std::to_string(trial) + ": order-" + std::to_string(order) +
               " moments differ";
  }
  return "";
}

std::string products_evaluate_multiplicatively() {
  support::Rng rng(303);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(3);
    const int dp = rng.int_in(0, 3);
    const int dq = rng.int_in(0, 3 - dp);
    const Polynomial p = random_polynomial(rng, n, dp);
    const Polynomial q = random_polynomial(rng, n, dq);
    const Configuration eta = random_config(rng, n, 3);
    if (evaluate(multiply(p, q), eta) != evaluate(p, eta) * evaluate(q, eta))
      return "trial " + std::to_string(trial) + ": product value differs";
  }
  return "";
}

std::string factorial_powers_match_oracle() {
  for (std::size_t n = 1; n <= 3; ++n) {
    std::vector<int> counts(n, 0);
    while (true) {
      const Configuration eta{counts};
      std::vector<MomentTensor> powers;
      for (int order = 0; order <= 3; ++order) powers.push_back(tensor_power(eta, order));
      const auto factorial = power_to_factorial(powers);
      for (int order = 0; order <= 3; ++order) {
        const auto& converted = factorial[static_cast<std::size_t>(order)];
        if (!(converted == factorial_power(eta, order)))
          return "converted power differs from the factorial power at order " +
                 std::to_string(order);
        if (!(converted == support::labeled_factorial_oracle(eta, order)))
          return "factorial power disagrees with the labeled-particle count at order " +
                 std::to_string(order);
      }
      std::size_t pos = 0;
      while (pos < n && counts[pos] == 3) counts[pos++] = 0;
      if (pos == n) break;
      ++counts[pos];
    }
  }
  return "";
}

std::string cubic_extension_thresholds() {
  support::Rng rng(505);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(3);
    RealizabilityInstance inst = support::planted_instance(rng, n, 2, true);
    CubicOutcome outcome = minimal_third_moment(inst);
    const auto* minimum = std::get_if<CubicMinimum>(&outcome);
    if (!minimum) return "trial " + std::to_string(trial) + ": planted instance had no minimum";
    const Rat r_star = minimum->r_star;
    if (r_star < 0) return "trial " + std::to_string(trial) + ": negative minimum";

    Rat realized(0);  // the minimizer must attain its own optimum
    for (const auto& [config, weight] : minimum->minimizer.atoms()) {
      const Rat mass = weighted_mass(*inst.gamma, config);
      realized += weight * mass * mass * mass;
    }
    if (realized != r_star)
      return "trial " + std::to_string(trial) + ": minimizer misses the reported minimum";

    std::vector<Rat> feasible_bounds = {r_star, r_star + 1};
    std::vector<Rat> infeasible_bounds = {r_star - 1};
    if (r_star > 0) infeasible_bounds.push_back(r_star * Rat(6, 7));

    for (const Rat& bound : feasible_bounds) {
      inst.r_max = bound;
      Verdict verdict = extend_with_cubic(inst);
      const auto* rep = std::get_if<RepresentingMeasure>(&verdict);
      if (!rep)
        return "trial " + std::to_string(trial) + ": infeasible at bound " + format_rat(bound);
      if (!rep->realized_r || *rep->realized_r > bound)
        return "trial " + std::to_string(trial) + ": realized mass exceeds the bound";
      if (!verify_verdict(inst, verdict).all_pass)
        return "trial " + std::to_string(trial) + ": measure failed verification";
    }
    for (const Rat& bound : infeasible_bounds) {
      inst.r_max = bound;
      Verdict verdict = extend_with_cubic(inst);
      const auto* cert = std::get_if<PositivityCertificate>(&verdict);
      if (!cert)
        return "trial " + std::to_string(trial) + ": feasible below the minimum at bound " +
               format_rat(bound);
      if (!verify_verdict(inst, verdict).all_pass)
        return "trial " + std::to_string(trial) + ": certificate failed verification";
      if (!support::certificate_valid_on(inst, *cert))
        return "trial " + std::to_string(trial) + ": certificate failed the exhaustive re-check";
    }
  }
  return "";
}

std::string ratio_bound_dominates() {
  support::Rng rng(606);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(3);
    const Polynomial b = random_polynomial(rng, n, rng.int_in(0, 2));
    RatVec gamma;
    for (std::size_t i = 0; i < n; ++i) gamma.push_back(rng.positive_rat(3, 3));
    const Rat lambda = ratio_bound(b, gamma);
    const SiteSpace space = support::random_space(rng, n, false);
    for (const auto& eta : enumerate_configurations(space, KSpec::at_most(6))) {
      const Rat mass = weighted_mass(gamma, eta);
      if (rat_abs(evaluate(b, eta)) > lambda * (1 + mass * mass * mass))
        return "trial " + std::to_string(trial) + ": bound violated";
    }
  }
  return "";
}

std::string hardcore_pair_separates() {
  const SiteSpace space({"a", "b"}, {{Rat(0), Rat(1)}, {Rat(1), Rat(0)}});
  const MomentFunctional L = MomentFunctional::from_parts(
      2, Rat(1), RatVec{Rat(1, 2), Rat(1, 2)},
      RatMat{{Rat(1, 2), Rat(1, 4)}, {Rat(1, 4), Rat(1, 2)}});

  const RealizabilityInstance excluded{space, KSpec::hard_core(Rat(2), 2), L, std::nullopt,
                                       std::nullopt};
  Verdict refusal = find_representing_measure(excluded);
  const auto* cert = std::get_if<PositivityCertificate>(&refusal);
  if (!cert) return "the exclusion instance was not refuted";
  if (!verify_verdict(excluded, refusal).all_pass) return "certificate failed verification";
  if (!support::certificate_valid_on(excluded, *cert))
    return "certificate failed the exhaustive re-check";

  const RealizabilityInstance relaxed{space, KSpec::at_most(2), L, std::nullopt, std::nullopt};
  Verdict grant = find_representing_measure(relaxed);
  if (!std::holds_alternative<RepresentingMeasure>(grant))
    return "the relaxed instance was not realized";
  if (!verify_verdict(relaxed, grant).all_pass) return "measure failed verification";
  return "";
}

std::string lp_matches_vertex_enumeration() {
  support::Rng rng(808);
  int infeasible_seen = 0;
  int optimized = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const LinearProgram lp = random_lp(rng, rng.below(2) == 0);
    const support::BruteLpResult oracle = support::brute_force_lp(lp);
    const LpOutcome outcome = solve(lp);
    if (const auto* feasible = std::get_if<LpFeasible>(&outcome)) {
      if (!oracle.feasible)
        return "trial " + std::to_string(trial) + ": solver feasible, oracle infeasible";
      if (!satisfies_constraints(lp, feasible->x))
        return "trial " + std::to_string(trial) + ": returned point violates a constraint";
      if (lp.objective) {
        ++optimized;
        if (!feasible->objective_value || *feasible->objective_value != *oracle.min_value)
          return "trial " + std::to_string(trial) + ": optimum differs from the oracle";
      }
      continue;
    }
    ++infeasible_seen;
    if (oracle.feasible)
      return "trial " + std::to_string(trial) + ": solver infeasible, oracle feasible";
    const RatVec& y = std::get<LpInfeasible>(outcome).farkas;
    if (!farkas_certificate_valid(lp, y))
      return "trial " + std::to_string(trial) + ": library rejects its own farkas vector";
    Rat yb(0);  // manual re-check: y' A >= 0, y >= 0 on <= rows, y' b < 0
    for (std::size_t i = 0; i < lp.rows(); ++i) {
      if (lp.sense[i] == RowSense::kLe && y[i] < 0)
        return "trial " + std::to_string(trial) + ": negative multiplier on a <= row";
      yb += y[i] * lp.b[i];
    }
    for (std::size_t j = 0; j < lp.cols(); ++j) {
      Rat col(0);
      for (std::size_t i = 0; i < lp.rows(); ++i) col += y[i] * lp.a[i][j];
      if (col < 0) return "trial " + std::to_string(trial) + ": y'A has a negative entry";
    }
    if (!(yb < 0)) return "trial " + std::to_string(trial) + ": y'b is not negative";
  }
  if (infeasible_seen <= 100 || optimized <= 100)
    return "branch starvation: " + std::to_string(infeasible_seen) + " infeasible, " +
           std::to_string(optimized) + " optimized";
  return "";
}

}  // namespace

int main() {
  Gate gate;
  gate.criterion("moment decision returns one verified verdict on 1000 random instances", 60000,
                 dichotomy_on_random_instances);
  gate.criterion("measures round trip through their moment data on 500 draws", 60000,
                 measures_round_trip);
  gate.criterion("polynomial products evaluate multiplicatively on 200 draws", 5000,
                 products_evaluate_multiplicatively);
  gate.criterion("factorial powers match the labeled-particle count on all small configurations",
                 10000, factorial_powers_match_oracle);
  gate.criterion("cubic extension is feasible exactly above the minimal third moment", 120000,
                 cubic_extension_thresholds);
  gate.criterion("the ratio bound dominates every configuration up to total mass 6", 10000,
                 ratio_bound_dominates);
  gate.criterion("the hard-core pair splits: certificate under exclusion, measure without", 1000,
                 hardcore_pair_separates);
  gate.criterion("LP verdicts and optima match vertex enumeration on 1000 programs", 60000,
                 lp_matches_vertex_enumeration);

  if (gate.failures == 0) {
    std::cout << "all 8 criteria passed\n";
    return 0;
  }
  std::cout << gate.failures << " criteria failed\n";
  return 1;
}
