#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "momprob/config_space.hpp"
#include "momprob/moment_algebra.hpp"
#include "momprob/realizability.hpp"

namespace momprob {

// Linear congruential generator with Knuth's MMIX multiplier and increment,
//   state <- state * 6364136223846793005 + 1442695040888963407  (mod 2^64),
// spelled out so that generated fixtures are reproducible from the seed on
// any platform. The first draw already advances the state.
class Lcg64 {
 public:
  explicit Lcg64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return state_;
  }

 private:
  std::uint64_t state_;
};

namespace detail {

inline Rat rat_pow(const Rat& base, int exp) {
  Rat out(1);
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

inline Rat factorial(int k) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(k));
  return Rat(f);
}

inline FiniteMeasure normalized_measure(std::size_t sites,
                                        std::vector<std::pair<Configuration, Rat>> atoms) {
  Rat total(0);
  for (const auto& [config, weight] : atoms) total += weight;
  if (total <= 0) throw std::invalid_argument("generated measure has no mass");
  for (auto& [config, weight] : atoms) weight /= total;
  return FiniteMeasure(sites, std::move(atoms));
}

}  // namespace detail

// Product of independent site occupations: site x carries a particle with
// probability p_x, so the atom at a 0/1 configuration eta has weight
// prod_x p_x^{eta_x} (1-p_x)^{1-eta_x}. Zero-weight atoms are dropped.
inline FiniteMeasure bernoulli_field(const SiteSpace& space, const RatVec& probabilities,
                                     std::size_t cap = kDefaultEnumerationCap) {
  const std::size_t n = space.size();
  if (probabilities.size() != n)
    throw std::invalid_argument("one occupation probability per site is required");
  for (const Rat& p : probabilities)
    if (p < 0 || p > 1) throw std::invalid_argument("occupation probabilities must lie in [0, 1]");
  std::vector<std::pair<Configuration, Rat>> atoms;
  for (const auto& eta : enumerate_configurations(space, KSpec::simple(static_cast<int>(n)), cap)) {
    Rat w(1);
    for (std::size_t x = 0; x < n; ++x)
      w *= eta.counts[x] ? probabilities[x] : 1 - probabilities[x];
    if (w > 0) atoms.emplace_back(eta, std::move(w));
  }
  return FiniteMeasure(n, std::move(atoms));
}

// Independent Poisson counts truncated per site: site x holds k particles
// with weight lambda_x^k / k! for k = 0..cap, the product over sites is
// renormalized exactly to total weight 1.
inline FiniteMeasure truncated_poisson(const SiteSpace& space, const RatVec& intensities, int cap,
                                       std::size_t enumeration_cap = kDefaultEnumerationCap) {
  const std::size_t n = space.size();
  if (intensities.size() != n) throw std::invalid_argument("one intensity per site is required");
  for (const Rat& lambda : intensities)
    if (lambda <= 0) throw std::invalid_argument("intensities must be positive");
  if (cap < 0) throw std::invalid_argument("the per-site cap must be nonnegative");
  std::size_t support = 1;
  for (std::size_t x = 0; x < n; ++x) {
    support *= static_cast<std::size_t>(cap) + 1;
    if (support > enumeration_cap)
      throw CapExceeded("truncated Poisson support exceeds the enumeration cap");
  }
  std::vector<std::pair<Configuration, Rat>> atoms;
  Configuration eta;
  eta.counts.assign(n, 0);
  for (;;) {
    Rat w(1);
    for (std::size_t x = 0; x < n; ++x)
      w *= detail::rat_pow(intensities[x], eta.counts[x]) / detail::factorial(eta.counts[x]);
    atoms.emplace_back(eta, std::move(w));
    std::size_t x = n;
    while (x > 0 && eta.counts[x - 1] == cap) eta.counts[--x] = 0;
    if (x == 0) break;
    ++eta.counts[x - 1];
  }
  return detail::normalized_measure(n, std::move(atoms));
}

// Hard-core Gibbs measure with activity z: on the configurations admissible
// for HardCore(d, q) the atom at eta has weight proportional to z^{|eta|}.
inline FiniteMeasure gibbs_hardcore(const SiteSpace& space, const Rat& z, const Rat& d, int q,
                                    std::size_t cap = kDefaultEnumerationCap) {
  if (z <= 0) throw std::invalid_argument("the activity must be positive");
  const KSpec kspec = KSpec::hard_core(d, q);
  kspec.validate(space);
  std::vector<std::pair<Configuration, Rat>> atoms;
  for (const auto& eta : enumerate_configurations(space, kspec, cap))
    atoms.emplace_back(eta, detail::rat_pow(z, eta.total_mass()));
  return detail::normalized_measure(space.size(), std::move(atoms));
}

// Seed-deterministic measure on a random subset of the admissible
// configurations. Walking the configurations in enumeration order, each one
// joins the support when the upper half of the next draw is odd, with raw
// weight 1 + (upper half of the next draw mod 16); if nothing was selected,
// one configuration indexed by a final draw is used. Raw weights are
// normalized to total mass 1. Decisions read the upper 32 bits because the
// low bits of a power-of-two-modulus congruential sequence cycle rapidly.
inline FiniteMeasure random_measure(const SiteSpace& space, const KSpec& kspec, std::uint64_t seed,
                                    std::size_t cap = kDefaultEnumerationCap) {
  const auto configs = enumerate_configurations(space, kspec, cap);
  Lcg64 rng(seed);
  const auto upper = [&rng] { return rng.next() >> 32; };
  std::vector<std::pair<Configuration, Rat>> atoms;
  for (const auto& eta : configs) {
    if (upper() % 2 == 0) continue;
    atoms.emplace_back(eta, Rat(1 + static_cast<long>(upper() % 16)));
  }
  if (atoms.empty())
    atoms.emplace_back(configs[upper() % configs.size()], Rat(1));
  return detail::normalized_measure(space.size(), std::move(atoms));
}

// Planted-feasible instance: the moments of mu become the prescribed data,
// so the instance is realizable by construction (by mu itself). The support
// of mu must be admissible.
inline RealizabilityInstance instance_from_measure(const FiniteMeasure& mu, SiteSpace space,
                                                   KSpec kspec,
                                                   std::optional<RatVec> gamma = std::nullopt) {
  kspec.validate(space);
  if (mu.sites() != space.size())
    throw std::invalid_argument("measure site count does not match the space");
  for (const auto& [config, weight] : mu.atoms())
    if (!contains(space, kspec, config))
      throw std::invalid_argument("measure support is not admissible for the constraint");
  auto moments = power_moments(mu, 2);
  RealizabilityInstance inst{std::move(space), kspec, MomentFunctional(std::move(moments)),
                             std::move(gamma), std::nullopt};
  inst.validate();
  return inst;
}

}  // namespace momprob
