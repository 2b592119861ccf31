#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <momprob/momprob.hpp>

namespace support {

// Deterministic rationals and integers for property tests, built on the
// library's documented LCG so failures reproduce from the seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : lcg_(seed) {}

  std::uint64_t u64() { return lcg_.next(); }
  // Multiply-shift keeps the draw in the congruential sequence's strong high
  // bits; the raw low bits cycle with tiny periods.
  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>((static_cast<unsigned __int128>(u64()) * n) >> 64);
  }
  int int_in(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::size_t>(hi - lo + 1))); }

  momprob::Rat rat(int lo, int hi, int max_den = 4) {
    return momprob::make_rat(int_in(lo, hi), int_in(1, max_den));
  }
  momprob::Rat positive_rat(int hi = 4, int max_den = 4) {
    return momprob::make_rat(int_in(1, hi), int_in(1, max_den));
  }

 private:
  momprob::Lcg64 lcg_;
};

// Counts ordered tuples of pairwise distinct labeled particles placed at the
// indexed sites -- the combinatorial definition the factorial power encodes.
inline momprob::MomentTensor labeled_factorial_oracle(const momprob::Configuration& eta,
                                                      int order) {
  using momprob::Rat;
  std::vector<std::size_t> site_of;
  for (std::size_t x = 0; x < eta.counts.size(); ++x)
    for (int c = 0; c < eta.counts[x]; ++c) site_of.push_back(x);
  const std::size_t n = eta.counts.size();
  const std::size_t particles = site_of.size();
  momprob::RatVec entries(momprob::detail::pow_size(n, order), Rat(0));
  std::vector<std::size_t> tuple(static_cast<std::size_t>(order));
  std::vector<bool> used(particles, false);
  std::function<void(int)> rec = [&](int pos) {
    if (pos == order) {
      std::size_t flat = 0;
      for (int k = 0; k < order; ++k) flat = flat * n + site_of[tuple[static_cast<std::size_t>(k)]];
      entries[flat] += 1;
      return;
    }
    for (std::size_t p = 0; p < particles; ++p) {
      if (used[p]) continue;
      used[p] = true;
      tuple[static_cast<std::size_t>(pos)] = p;
      rec(pos + 1);
      used[p] = false;
    }
  };
  rec(0);
  return momprob::MomentTensor::from_entries(order, n, std::move(entries));
}

inline std::optional<momprob::RatVec> solve_square(momprob::RatMat a, momprob::RatVec rhs) {
  using momprob::Rat;
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col] == 0) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(rhs[piv], rhs[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const Rat f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  momprob::RatVec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rhs[i] / a[i][i];
  return x;
}

struct BruteLpResult {
  bool feasible = false;
  std::optional<momprob::Rat> min_value;
};

// Brute-force LP oracle by vertex enumeration: the feasible region lies in
// x >= 0, hence is pointed, so it is nonempty exactly when some choice of
// cols() tight constraints (problem rows or x_j = 0) solves to a feasible
// point; a bounded objective attains its minimum at such a vertex.
inline BruteLpResult brute_force_lp(const momprob::LinearProgram& lp) {
  using momprob::Rat;
  const std::size_t m = lp.rows(), n = lp.cols();
  BruteLpResult result;

  std::vector<std::size_t> pick(n);
  std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t start, std::size_t depth) {
    if (depth == n) {
      momprob::RatMat a(n, momprob::RatVec(n, Rat(0)));
      momprob::RatVec rhs(n, Rat(0));
      for (std::size_t k = 0; k < n; ++k) {
        if (pick[k] < m) {
          a[k] = lp.a[pick[k]];
          rhs[k] = lp.b[pick[k]];
        } else {
          a[k][pick[k] - m] = 1;  // x_j = 0
        }
      }
      const auto x = solve_square(std::move(a), std::move(rhs));
      if (!x || !momprob::satisfies_constraints(lp, *x)) return;
      result.feasible = true;
      if (lp.objective) {
        Rat value(0);
        for (std::size_t j = 0; j < n; ++j) value += (*lp.objective)[j] * (*x)[j];
        if (!result.min_value || value < *result.min_value) result.min_value = value;
      }
      return;
    }
    for (std::size_t c = start; c + (n - depth) <= m + n; ++c) {
      pick[depth] = c;
      choose(c + 1, depth + 1);
    }
  };
  if (n == 0) {
    momprob::RatVec empty;
    result.feasible = momprob::satisfies_constraints(lp, empty);
    if (result.feasible && lp.objective) result.min_value = Rat(0);
  } else {
    choose(0, 0);
  }
  return result;
}

// Exhaustive re-derivation of what a certificate claims, without the solver.
inline bool certificate_valid_on(const momprob::RealizabilityInstance& inst,
                                 const momprob::PositivityCertificate& cert) {
  for (const auto& eta : momprob::enumerate_configurations(inst.space, inst.kspec))
    if (momprob::evaluate_certificate(cert, eta) < 0) return false;
  return momprob::certificate_pairing(cert, inst.L, inst.r_max) < 0;
}

inline momprob::SiteSpace random_space(Rng& rng, std::size_t n, bool with_distances) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::string(1, static_cast<char>('a' + i)));
  if (!with_distances) return momprob::SiteSpace(std::move(labels));
  momprob::RatMat d(n, momprob::RatVec(n, momprob::Rat(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = rng.positive_rat(6, 2);
  return momprob::SiteSpace(std::move(labels), std::move(d));
}

inline momprob::KSpec random_kspec(Rng& rng, const momprob::SiteSpace& space, int max_q) {
  const int q = rng.int_in(0, max_q);
  switch (space.has_distances() ? rng.below(4) : rng.below(3)) {
    case 0:
      return momprob::KSpec::at_most(q);
    case 1:
      return momprob::KSpec::exactly(q);
    case 2:
      return momprob::KSpec::simple(q);
    default:
      return momprob::KSpec::hard_core(rng.positive_rat(6, 2), q);
  }
}

// Moment data of a random measure supported on K: realizable by construction.
inline momprob::RealizabilityInstance planted_instance(Rng& rng, std::size_t n, int max_q,
                                                       bool with_gamma) {
  const momprob::SiteSpace space = random_space(rng, n, true);
  const momprob::KSpec kspec = random_kspec(rng, space, max_q);
  const momprob::FiniteMeasure mu = momprob::random_measure(space, kspec, rng.u64());
  std::optional<momprob::RatVec> gamma;
  if (with_gamma) {
    momprob::RatVec g;
    for (std::size_t i = 0; i < n; ++i) g.push_back(rng.positive_rat(3, 3));
    gamma = std::move(g);
  }
  return momprob::instance_from_measure(mu, space, kspec, std::move(gamma));
}

// Random symmetric moment data, mostly unrealizable; paired with random
// K-specs this exercises both verdict branches.
inline momprob::RealizabilityInstance random_instance(Rng& rng, std::size_t n, int max_q) {
  const momprob::SiteSpace space = random_space(rng, n, true);
  const momprob::KSpec kspec = random_kspec(rng, space, max_q);
  momprob::RatVec ell1;
  for (std::size_t i = 0; i < n; ++i) ell1.push_back(rng.rat(0, 3));
  momprob::RatMat ell2(n, momprob::RatVec(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) ell2[i][j] = ell2[j][i] = rng.rat(0, 4);
  return momprob::RealizabilityInstance{
      space, kspec, momprob::MomentFunctional::from_parts(n, momprob::Rat(1), ell1, ell2),
      std::nullopt, std::nullopt};
}

}  // namespace support
