#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <map>
#include <utility>
#include <vector>

#include "momprob/config_space.hpp"
#include "momprob/rational.hpp"

namespace momprob {

// The algebra works with data of degree at most 2 plus one cubic extension
// term, so tensor orders stop at 3.
inline constexpr int kMaxTensorOrder = 3;

namespace detail {

inline std::size_t pow_size(std::size_t n, int order) {
  std::size_t s = 1;
  for (int i = 0; i < order; ++i) s *= n;
  return s;
}

template <typename Visit>
void for_each_index(int order, std::size_t n, Visit&& visit) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(order), 0);
  std::size_t flat = 0;
  const std::size_t total = pow_size(n, order);
  while (flat < total) {
    visit(idx, flat);
    ++flat;
    for (int pos = order - 1; pos >= 0; --pos) {
      if (++idx[static_cast<std::size_t>(pos)] < n) break;
      idx[static_cast<std::size_t>(pos)] = 0;
    }
  }
}

inline std::size_t flat_index(const std::vector<std::size_t>& idx, std::size_t n) {
  std::size_t flat = 0;
  for (std::size_t i : idx) flat = flat * n + i;
  return flat;
}

}  // namespace detail

// Dense symmetric tensor of rationals over the site set; order 0 is a
// scalar. Symmetry is enforced at construction: `from_entries` rejects
// asymmetric data, `symmetrized` projects onto the symmetric part.
class MomentTensor {
 public:
  MomentTensor(int order, std::size_t sites)
      : order_(order), sites_(sites), entries_(checked_size(order, sites), Rat(0)) {}

  static MomentTensor scalar(std::size_t sites, Rat value) {
    MomentTensor t(0, sites);
    t.entries_[0] = std::move(value);
    return t;
  }

  static MomentTensor from_entries(int order, std::size_t sites, RatVec entries) {
    MomentTensor t(order, sites);
    if (entries.size() != t.entries_.size())
      throw std::invalid_argument("tensor entry count does not match order and site count");
    t.entries_ = std::move(entries);
    if (!t.is_symmetric()) throw std::invalid_argument("tensor entries are not symmetric");
    return t;
  }

  // Average over all index permutations; the only part observable through
  // pairings with symmetric data.
  static MomentTensor symmetrized(int order, std::size_t sites, RatVec entries) {
    MomentTensor t(order, sites);
    if (entries.size() != t.entries_.size())
      throw std::invalid_argument("tensor entry count does not match order and site count");
    if (order <= 1) {
      t.entries_ = std::move(entries);
      return t;
    }
    std::map<std::vector<std::size_t>, std::pair<Rat, long>> buckets;
    detail::for_each_index(order, sites, [&](const std::vector<std::size_t>& idx, std::size_t flat) {
      std::vector<std::size_t> key = idx;
      std::sort(key.begin(), key.end());
      auto& [sum, count] = buckets[key];
      sum += entries[flat];
      ++count;
    });
    detail::for_each_index(order, sites, [&](const std::vector<std::size_t>& idx, std::size_t flat) {
      std::vector<std::size_t> key = idx;
      std::sort(key.begin(), key.end());
      const auto& [sum, count] = buckets[key];
      t.entries_[flat] = sum / count;
    });
    return t;
  }

  int order() const { return order_; }
  std::size_t sites() const { return sites_; }
  const RatVec& entries() const { return entries_; }

  const Rat& value() const { return entries_[0]; }  // order-0 scalar

  const Rat& at(std::initializer_list<std::size_t> idx) const {
    return entries_[flat(idx)];
  }

  std::size_t flat(std::initializer_list<std::size_t> idx) const {
    if (static_cast<int>(idx.size()) != order_)
      throw std::invalid_argument("tensor index arity does not match order");
    std::size_t f = 0;
    for (std::size_t i : idx) {
      if (i >= sites_) throw std::invalid_argument("tensor index out of range");
      f = f * sites_ + i;
    }
    return f;
  }

  bool is_symmetric() const {
    if (order_ <= 1) return true;
    bool ok = true;
    detail::for_each_index(order_, sites_, [&](const std::vector<std::size_t>& idx, std::size_t flat) {
      std::vector<std::size_t> sorted = idx;
      std::sort(sorted.begin(), sorted.end());
      if (entries_[flat] != entries_[detail::flat_index(sorted, sites_)]) ok = false;
    });
    return ok;
  }

  // this += scale * other; preserves symmetry.
  void plus_scaled(const MomentTensor& other, const Rat& scale) {
    if (other.order_ != order_ || other.sites_ != sites_)
      throw std::invalid_argument("inconsistent tensor dimensions");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += scale * other.entries_[i];
  }

  void scale_by(const Rat& scale) {
    for (auto& e : entries_) e *= scale;
  }

  bool operator==(const MomentTensor&) const = default;

 private:
  static std::size_t checked_size(int order, std::size_t sites) {
    if (order < 0 || order > kMaxTensorOrder)
      throw std::invalid_argument("tensor order out of supported range");
    if (sites == 0) throw std::invalid_argument("tensor needs at least one site");
    return detail::pow_size(sites, order);
  }

  int order_;
  std::size_t sites_;
  RatVec entries_;
};

// Finitely supported measure on configurations: pairwise distinct atoms with
// strictly positive rational weights, kept in lexicographic order.
class FiniteMeasure {
 public:
  FiniteMeasure(std::size_t sites, std::vector<std::pair<Configuration, Rat>> atoms)
      : sites_(sites), atoms_(std::move(atoms)) {
    if (sites_ == 0) throw std::invalid_argument("measure needs at least one site");
    for (const auto& [config, weight] : atoms_) {
      if (config.counts.size() != sites_)
        throw std::invalid_argument("measure atom length does not match site count");
      for (int c : config.counts)
        if (c < 0) throw std::invalid_argument("configuration counts must be nonnegative");
      if (weight <= 0) throw std::invalid_argument("measure weights must be strictly positive");
    }
    std::sort(atoms_.begin(), atoms_.end(),
              [](const auto& a, const auto& b) { return a.first.counts < b.first.counts; });
    for (std::size_t i = 1; i < atoms_.size(); ++i)
      if (atoms_[i].first == atoms_[i - 1].first)
        throw std::invalid_argument("measure atoms must be pairwise distinct");
  }

  std::size_t sites() const { return sites_; }
  const std::vector<std::pair<Configuration, Rat>>& atoms() const { return atoms_; }

  Rat total_weight() const {
    Rat w(0);
    for (const auto& [config, weight] : atoms_) w += weight;
    return w;
  }

 private:
  std::size_t sites_;
  std::vector<std::pair<Configuration, Rat>> atoms_;
};

// eta^{(x) n}: entry (i_1,...,i_n) = prod_j counts(i_j). Order 0 is the
// scalar 1.
inline MomentTensor tensor_power(const Configuration& config, int order) {
  if (order < 0 || order > kMaxTensorOrder)
    throw std::invalid_argument("tensor order out of supported range");
  const std::size_t n = config.counts.size();
  RatVec entries(detail::pow_size(n, order));
  detail::for_each_index(order, n, [&](const std::vector<std::size_t>& idx, std::size_t flat) {
    Rat v(1);
    for (std::size_t i : idx) v *= config.counts[i];
    entries[flat] = std::move(v);
  });
  return MomentTensor::from_entries(order, n, std::move(entries));
}

// Factorial power: entry counts the ordered n-tuples of pairwise distinct
// particles of the configuration located at the indexed sites, i.e. a
// product of per-site falling factorials.
inline MomentTensor factorial_power(const Configuration& config, int order) {
  if (order < 0 || order > kMaxTensorOrder)
    throw std::invalid_argument("tensor order out of supported range");
  const std::size_t n = config.counts.size();
  RatVec entries(detail::pow_size(n, order));
  detail::for_each_index(order, n, [&](const std::vector<std::size_t>& idx, std::size_t flat) {
    std::vector<int> used(n, 0);
    Rat v(1);
    for (std::size_t i : idx) {
      v *= config.counts[i] - used[i];
      ++used[i];
    }
    entries[flat] = std::move(v);
  });
  return MomentTensor::from_entries(order, n, std::move(entries));
}

// Power moments m_0..m_N of the measure: m_n = sum_atoms w * eta^{(x) n}.
inline std::vector<MomentTensor> power_moments(const FiniteMeasure& mu, int max_order) {
  if (max_order < 0 || max_order > kMaxTensorOrder)
    throw std::invalid_argument("tensor order out of supported range");
  std::vector<MomentTensor> out;
  for (int n = 0; n <= max_order; ++n) {
    MomentTensor m(n, mu.sites());
    for (const auto& [config, weight] : mu.atoms()) m.plus_scaled(tensor_power(config, n), weight);
    out.push_back(std::move(m));
  }
  return out;
}

// Correlation functions rho^(0)..rho^(N): expectations of factorial powers.
inline std::vector<MomentTensor> correlation_functions(const FiniteMeasure& mu, int max_order) {
  if (max_order < 0 || max_order > kMaxTensorOrder)
    throw std::invalid_argument("tensor order out of supported range");
  std::vector<MomentTensor> out;
  for (int n = 0; n <= max_order; ++n) {
    MomentTensor m(n, mu.sites());
    for (const auto& [config, weight] : mu.atoms())
      m.plus_scaled(factorial_power(config, n), weight);
    out.push_back(std::move(m));
  }
  return out;
}

namespace detail {

inline void check_tensor_ladder(const std::vector<MomentTensor>& tensors) {
  if (tensors.empty()) throw std::invalid_argument("empty tensor list");
  if (tensors.size() > static_cast<std::size_t>(kMaxTensorOrder) + 1)
    throw std::invalid_argument("tensor order out of supported range");
  const std::size_t n = tensors[0].sites();
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    if (tensors[k].order() != static_cast<int>(k))
      throw std::invalid_argument("tensor list must carry orders 0..N in order");
    if (tensors[k].sites() != n) throw std::invalid_argument("inconsistent tensor dimensions");
  }
}

}  // namespace detail

// Set-partition conversion between power moments and factorial moments,
// order by order:
//   m2(x,y)   = r2(x,y) + [x=y] r1(x)
//   m3(x,y,z) = r3(x,y,z) + [x=y] r2(x,z) + [x=z] r2(x,y) + [y=z] r2(y,x)
//               + [x=y=z] r1(x)
// The two directions are mutually inverse.
inline std::vector<MomentTensor> power_to_factorial(const std::vector<MomentTensor>& moments) {
  detail::check_tensor_ladder(moments);
  const std::size_t n = moments[0].sites();
  std::vector<MomentTensor> rho;
  rho.push_back(moments[0]);
  if (moments.size() > 1) rho.push_back(moments[1]);
  if (moments.size() > 2) {
    RatVec e(detail::pow_size(n, 2));
    detail::for_each_index(2, n, [&](const std::vector<std::size_t>& idx, std::size_t flat) {
      e[flat] = moments[2].at({idx[0], idx[1]});
      if (idx[0] == idx[1]) e[flat] -= moments[1].at({idx[0]});
    });
    rho.push_back(MomentTensor::from_entries(2, n, std::move(e)));
  }
  if (moments.size() > 3) {
    const MomentTensor& r2 = rho[2];
    RatVec e(detail::pow_size(n, 3));
    detail::for_each_index(3, n, [&](const std::vector<std::size_t>& idx, std::size_t flat) {
      const std::size_t x = idx[0], y = idx[1], z = idx[2];
      e[flat] = moments[3].at({x, y, z});
      if (x == y) e[flat] -= r2.at({x, z});
      if (x == z) e[flat] -= r2.at({x, y});
      if (y == z) e[flat] -= r2.at({y, x});
      if (x == y && y == z) e[flat] -= moments[1].at({x});
    });
    rho.push_back(MomentTensor::from_entries(3, n, std::move(e)));
  }
  return rho;
}

inline std::vector<MomentTensor> factorial_to_power(const std::vector<MomentTensor>& rho) {
  detail::check_tensor_ladder(rho);
  const std::size_t n = rho[0].sites();
  std::vector<MomentTensor> moments;
  moments.push_back(rho[0]);
  if (rho.size() > 1) moments.push_back(rho[1]);
  if (rho.size() > 2) {
    RatVec e(detail::pow_size(n, 2));
    detail::for_each_index(2, n, [&](const std::vector<std::size_t>& idx, std::size_t flat) {
      e[flat] = rho[2].at({idx[0], idx[1]});
      if (idx[0] == idx[1]) e[flat] += rho[1].at({idx[0]});
    });
    moments.push_back(MomentTensor::from_entries(2, n, std::move(e)));
  }
  if (rho.size() > 3) {
    RatVec e(detail::pow_size(n, 3));
    detail::for_each_index(3, n, [&](const std::vector<std::size_t>& idx, std::size_t flat) {
      const std::size_t x = idx[0], y = idx[1], z = idx[2];
      e[flat] = rho[3].at({x, y, z});
      if (x == y) e[flat] += rho[2].at({x, z});
      if (x == z) e[flat] += rho[2].at({x, y});
      if (y == z) e[flat] += rho[2].at({y, x});
      if (x == y && y == z) e[flat] += rho[1].at({x});
    });
    moments.push_back(MomentTensor::from_entries(3, n, std::move(e)));
  }
  return moments;
}

}  // namespace momprob
