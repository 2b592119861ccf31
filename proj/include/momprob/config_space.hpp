#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "momprob/errors.hpp"
#include "momprob/rational.hpp"

namespace momprob {

// Refusing to enumerate more configurations than this is an error, not a
// silent truncation. Callers (and the CLI via an environment variable) can
// override per call.
inline constexpr std::size_t kDefaultEnumerationCap = 2'000'000;

// Finite set of labeled sites, optionally equipped with a symmetric rational
// distance matrix. This is the discretized underlying space.
class SiteSpace {
 public:
  explicit SiteSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
    check_labels();
  }

  SiteSpace(std::vector<std::string> labels, RatMat distances)
      : labels_(std::move(labels)), distances_(std::move(distances)) {
    check_labels();
    const std::size_t n = labels_.size();
    if (distances_->size() != n)
      throw std::invalid_argument("distance matrix must be square with one row per site");
    for (std::size_t i = 0; i < n; ++i) {
      if ((*distances_)[i].size() != n)
        throw std::invalid_argument("distance matrix must be square with one row per site");
      if ((*distances_)[i][i] != 0)
        throw std::invalid_argument("distance matrix must have zero diagonal");
      for (std::size_t j = 0; j < n; ++j) {
        if ((*distances_)[i][j] < 0)
          throw std::invalid_argument("distances must be nonnegative");
        if ((*distances_)[i][j] != (*distances_)[j][i])
          throw std::invalid_argument("distance matrix must be symmetric");
      }
    }
  }

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  bool has_distances() const { return distances_.has_value(); }
  const RatMat& distances() const {
    if (!distances_) throw std::invalid_argument("site space carries no distance matrix");
    return *distances_;
  }
  const Rat& distance(std::size_t i, std::size_t j) const { return distances()[i][j]; }

 private:
  void check_labels() const {
    if (labels_.empty()) throw std::invalid_argument("site space needs at least one site");
    std::vector<std::string> sorted = labels_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("site labels must be distinct");
  }

  std::vector<std::string> labels_;
  std::optional<RatMat> distances_;
};

// A point configuration: one nonnegative particle count per site.
struct Configuration {
  std::vector<int> counts;

  int total_mass() const { return std::accumulate(counts.begin(), counts.end(), 0); }

  auto operator<=>(const Configuration&) const = default;
};

inline int total_mass(const Configuration& config) { return config.total_mass(); }

// The supported configuration sets K. Every variant carries a cap Q on the
// total mass; the hard-core variant additionally requires pairwise site
// distances strictly greater than D (which rules out multiply occupied
// sites, whose particles are at distance 0).
struct KSpec {
  enum class Kind { kAtMostQ, kExactlyQ, kSimple, kHardCore };

  Kind kind = Kind::kAtMostQ;
  int q = 0;
  std::optional<Rat> d;

  static KSpec at_most(int q) { return {Kind::kAtMostQ, q, std::nullopt}; }
  static KSpec exactly(int q) { return {Kind::kExactlyQ, q, std::nullopt}; }
  static KSpec simple(int q) { return {Kind::kSimple, q, std::nullopt}; }
  static KSpec hard_core(Rat d, int q) { return {Kind::kHardCore, q, std::move(d)}; }

  void validate(const SiteSpace& space) const {
    if (q < 0) throw std::invalid_argument("K-spec total-mass cap Q must be nonnegative");
    if (kind == Kind::kHardCore) {
      if (!d || *d <= 0) throw std::invalid_argument("hard-core exclusion distance D must be positive");
      if (!space.has_distances())
        throw std::invalid_argument("hard-core K-spec requires a distance matrix");
    }
  }
};

inline bool contains(const SiteSpace& space, const KSpec& kspec, const Configuration& config) {
  kspec.validate(space);
  if (config.counts.size() != space.size())
    throw std::invalid_argument("configuration length does not match site count");
  for (int c : config.counts)
    if (c < 0) throw std::invalid_argument("configuration counts must be nonnegative");

  const int mass = config.total_mass();
  switch (kspec.kind) {
    case KSpec::Kind::kAtMostQ:
      return mass <= kspec.q;
    case KSpec::Kind::kExactlyQ:
      return mass == kspec.q;
    case KSpec::Kind::kSimple: {
      if (mass > kspec.q) return false;
      return std::all_of(config.counts.begin(), config.counts.end(), [](int c) { return c <= 1; });
    }
    case KSpec::Kind::kHardCore: {
      if (mass > kspec.q) return false;
      for (std::size_t i = 0; i < config.counts.size(); ++i) {
        if (config.counts[i] > 1) return false;
        if (config.counts[i] == 0) continue;
        for (std::size_t j = i + 1; j < config.counts.size(); ++j)
          if (config.counts[j] == 1 && !(space.distance(i, j) > *kspec.d)) return false;
      }
      return true;
    }
  }
  return false;
}

namespace detail {

inline mpz_class binomial(unsigned long n, unsigned long k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

// Count of count-vectors visited by the enumeration, or an upper bound for
// the hard-core variant (whose exact count has no closed form).
inline mpz_class predicted_count(const SiteSpace& space, const KSpec& kspec) {
  const unsigned long n = space.size();
  const unsigned long q = static_cast<unsigned long>(kspec.q);
  switch (kspec.kind) {
    case KSpec::Kind::kAtMostQ:
      return binomial(n + q, q);
    case KSpec::Kind::kExactlyQ:
      return binomial(n + q - 1, q);
    case KSpec::Kind::kSimple:
    case KSpec::Kind::kHardCore: {
      mpz_class total = 0;
      for (unsigned long k = 0; k <= std::min<unsigned long>(q, n); ++k) total += binomial(n, k);
      return total;
    }
  }
  return 0;
}

inline void check_cap(const SiteSpace& space, const KSpec& kspec, std::size_t cap) {
  mpz_class predicted = predicted_count(space, kspec);
  if (predicted > cap)
    throw CapExceeded("enumeration of " + predicted.get_str() +
                      " configurations exceeds the cap of " + std::to_string(cap));
}

template <typename Visit>
void enumerate_recursive(const SiteSpace& space, const KSpec& kspec, std::vector<int>& counts,
                         std::size_t site, int budget, Visit&& visit) {
  const std::size_t n = space.size();
  if (site == n) {
    if (kspec.kind == KSpec::Kind::kExactlyQ && budget != 0) return;
    visit(counts);
    return;
  }
  const bool zero_one = kspec.kind == KSpec::Kind::kSimple || kspec.kind == KSpec::Kind::kHardCore;
  const int hi = zero_one ? std::min(budget, 1) : budget;
  for (int c = 0; c <= hi; ++c) {
    if (c == 1 && kspec.kind == KSpec::Kind::kHardCore) {
      bool excluded = false;
      for (std::size_t j = 0; j < site && !excluded; ++j)
        if (counts[j] == 1 && !(space.distance(site, j) > *kspec.d)) excluded = true;
      if (excluded) continue;
    }
    counts[site] = c;
    enumerate_recursive(space, kspec, counts, site + 1, budget - c, visit);
  }
  counts[site] = 0;
}

}  // namespace detail

// All configurations satisfying the K-spec, in strictly increasing
// lexicographic order of their count vectors.
inline std::vector<Configuration> enumerate_configurations(
    const SiteSpace& space, const KSpec& kspec, std::size_t cap = kDefaultEnumerationCap) {
  kspec.validate(space);
  detail::check_cap(space, kspec, cap);
  std::vector<Configuration> out;
  std::vector<int> counts(space.size(), 0);
  detail::enumerate_recursive(space, kspec, counts, 0, kspec.q,
                              [&](const std::vector<int>& c) { out.push_back(Configuration{c}); });
  return out;
}

inline std::size_t count_configurations(const SiteSpace& space, const KSpec& kspec,
                                        std::size_t cap = kDefaultEnumerationCap) {
  kspec.validate(space);
  if (kspec.kind == KSpec::Kind::kHardCore) {
    // No closed form; walk the enumeration without storing it.
    detail::check_cap(space, kspec, cap);
    std::size_t total = 0;
    std::vector<int> counts(space.size(), 0);
    detail::enumerate_recursive(space, kspec, counts, 0, kspec.q,
                                [&](const std::vector<int>&) { ++total; });
    return total;
  }
  mpz_class predicted = detail::predicted_count(space, kspec);
  if (!predicted.fits_ulong_p())
    throw CapExceeded("configuration count " + predicted.get_str() + " does not fit a machine word");
  return static_cast<std::size_t>(predicted.get_ui());
}

}  // namespace momprob
