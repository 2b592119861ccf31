#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "momprob/moment_algebra.hpp"

namespace momprob {

// Element of the polynomial algebra on configurations, stored as one
// symmetric coefficient tensor per order:
//   p(eta) = f0 + sum_x f1(x) k_x + sum_{x,y} f2(x,y) k_x k_y + ...
// Coefficient tensors are symmetrized at construction; only the symmetric
// part is observable, so equality is decidable by coefficient comparison.
class Polynomial {
 public:
  explicit Polynomial(std::vector<MomentTensor> coefficients)
      : coefficients_(std::move(coefficients)) {
    detail::check_tensor_ladder(coefficients_);
  }

  static Polynomial constant(std::size_t sites, Rat f0) {
    std::vector<MomentTensor> c;
    c.push_back(MomentTensor::scalar(sites, std::move(f0)));
    return Polynomial(std::move(c));
  }

  // Builder from raw coefficient data; trailing levels may be omitted by
  // passing fewer arguments. f2 and f3 are symmetrized.
  static Polynomial from_coefficients(std::size_t sites, Rat f0,
                                      std::optional<RatVec> f1 = std::nullopt,
                                      std::optional<RatMat> f2 = std::nullopt,
                                      std::optional<RatVec> f3_flat = std::nullopt) {
    std::vector<MomentTensor> c;
    c.push_back(MomentTensor::scalar(sites, std::move(f0)));
    if (f1) c.push_back(MomentTensor::from_entries(1, sites, std::move(*f1)));
    if (f2) {
      if (!f1) throw std::invalid_argument("coefficient levels must be contiguous from order 0");
      RatVec flat;
      flat.reserve(sites * sites);
      if (f2->size() != sites) throw std::invalid_argument("f2 must be a #sites x #sites matrix");
      for (auto& row : *f2) {
        if (row.size() != sites) throw std::invalid_argument("f2 must be a #sites x #sites matrix");
        for (auto& v : row) flat.push_back(std::move(v));
      }
      c.push_back(MomentTensor::symmetrized(2, sites, std::move(flat)));
    }
    if (f3_flat) {
      if (!f2) throw std::invalid_argument("coefficient levels must be contiguous from order 0");
      c.push_back(MomentTensor::symmetrized(3, sites, std::move(*f3_flat)));
    }
    return Polynomial(std::move(c));
  }

  int degree() const { return static_cast<int>(coefficients_.size()) - 1; }
  std::size_t sites() const { return coefficients_[0].sites(); }
  const MomentTensor& coefficient(int order) const {
    return coefficients_[static_cast<std::size_t>(order)];
  }
  const std::vector<MomentTensor>& coefficients() const { return coefficients_; }

  bool operator==(const Polynomial&) const = default;

 private:
  std::vector<MomentTensor> coefficients_;
};

inline Rat evaluate(const Polynomial& p, const Configuration& eta) {
  if (eta.counts.size() != p.sites())
    throw std::invalid_argument("configuration length does not match polynomial site count");
  Rat total(0);
  for (int order = 0; order <= p.degree(); ++order) {
    const MomentTensor& f = p.coefficient(order);
    detail::for_each_index(order, p.sites(), [&](const std::vector<std::size_t>& idx, std::size_t flat) {
      const Rat& coeff = f.entries()[flat];
      if (coeff == 0) return;
      Rat term = coeff;
      for (std::size_t i : idx) term *= eta.counts[i];
      total += term;
    });
  }
  return total;
}

// Product in the algebra: the order n+m coefficient accumulates the
// symmetrization of f_n (x) g_m. Pointwise, evaluate(p*q) = evaluate(p) *
// evaluate(q) on every configuration.
inline Polynomial multiply(const Polynomial& p, const Polynomial& q) {
  if (p.sites() != q.sites())
    throw std::invalid_argument("polynomial site counts do not match");
  if (p.degree() + q.degree() > kMaxTensorOrder)
    throw std::invalid_argument("product degree exceeds supported maximum");
  const std::size_t n = p.sites();
  std::vector<MomentTensor> out;
  for (int order = 0; order <= p.degree() + q.degree(); ++order) {
    RatVec raw(detail::pow_size(n, order), Rat(0));
    for (int a = std::max(0, order - q.degree()); a <= std::min(order, p.degree()); ++a) {
      const int b = order - a;
      const MomentTensor& fa = p.coefficient(a);
      const MomentTensor& gb = q.coefficient(b);
      detail::for_each_index(order, n, [&](const std::vector<std::size_t>& idx, std::size_t flat) {
        std::size_t ia = 0, ib = 0;
        for (int k = 0; k < a; ++k) ia = ia * n + idx[static_cast<std::size_t>(k)];
        for (int k = a; k < order; ++k) ib = ib * n + idx[static_cast<std::size_t>(k)];
        raw[flat] += fa.entries()[ia] * gb.entries()[ib];
      });
    }
    out.push_back(MomentTensor::symmetrized(order, n, std::move(raw)));
  }
  return Polynomial(std::move(out));
}

// Moment data (ell_0, ell_1, ell_2[, ell_3]) acting on polynomials as the
// linear functional L(p) = sum_n <f_n, ell_n>. Input tensors must already be
// symmetric; asymmetric moment data is rejected, not repaired.
class MomentFunctional {
 public:
  explicit MomentFunctional(std::vector<MomentTensor> moments) : moments_(std::move(moments)) {
    detail::check_tensor_ladder(moments_);
    if (moments_.size() < 3)
      throw std::invalid_argument("moment functional needs orders 0..2 at least");
  }

  static MomentFunctional from_parts(std::size_t sites, Rat ell0, RatVec ell1, RatMat ell2,
                                     std::optional<RatVec> ell3_flat = std::nullopt) {
    std::vector<MomentTensor> m;
    m.push_back(MomentTensor::scalar(sites, std::move(ell0)));
    m.push_back(MomentTensor::from_entries(1, sites, std::move(ell1)));
    RatVec flat;
    flat.reserve(sites * sites);
    if (ell2.size() != sites) throw std::invalid_argument("ell2 must be a #sites x #sites matrix");
    for (auto& row : ell2) {
      if (row.size() != sites) throw std::invalid_argument("ell2 must be a #sites x #sites matrix");
      for (auto& v : row) flat.push_back(std::move(v));
    }
    m.push_back(MomentTensor::from_entries(2, sites, std::move(flat)));
    if (ell3_flat) m.push_back(MomentTensor::from_entries(3, sites, std::move(*ell3_flat)));
    return MomentFunctional(std::move(m));
  }

  std::size_t sites() const { return moments_[0].sites(); }
  int max_order() const { return static_cast<int>(moments_.size()) - 1; }
  const MomentTensor& moment(int order) const { return moments_[static_cast<std::size_t>(order)]; }
  const std::vector<MomentTensor>& moments() const { return moments_; }

  bool operator==(const MomentFunctional&) const = default;

 private:
  std::vector<MomentTensor> moments_;
};

inline Rat apply_functional(const MomentFunctional& L, const Polynomial& p) {
  if (L.sites() != p.sites())
    throw std::invalid_argument("functional and polynomial site counts do not match");
  if (p.degree() > L.max_order())
    throw std::invalid_argument("polynomial degree exceeds moment data in the functional");
  Rat total(0);
  for (int order = 0; order <= p.degree(); ++order) {
    const RatVec& f = p.coefficient(order).entries();
    const RatVec& ell = L.moment(order).entries();
    for (std::size_t i = 0; i < f.size(); ++i) total += f[i] * ell[i];
  }
  return total;
}

// Degree-2 polynomial plus a scalar multiple of the cubed gamma-weighted
// total mass:
//   q(eta) = f0 + f1.k + <f2, k(x)k> + f3 (sum_x gamma(x) k_x)^3
// gamma == 1 realizes the unweighted cubic term.
class RestrictedCubic {
 public:
  RestrictedCubic(Rat f0, RatVec f1, RatMat f2, Rat f3, RatVec gamma)
      : f0_(std::move(f0)), f1_(std::move(f1)), f3_(std::move(f3)), gamma_(std::move(gamma)) {
    const std::size_t n = gamma_.size();
    if (n == 0) throw std::invalid_argument("gamma must have one entry per site");
    if (f1_.size() != n) throw std::invalid_argument("f1 length does not match gamma");
    for (const Rat& g : gamma_)
      if (g <= 0) throw std::invalid_argument("gamma entries must be strictly positive");
    RatVec flat;
    flat.reserve(n * n);
    if (f2.size() != n) throw std::invalid_argument("f2 must be a #sites x #sites matrix");
    for (auto& row : f2) {
      if (row.size() != n) throw std::invalid_argument("f2 must be a #sites x #sites matrix");
      for (auto& v : row) flat.push_back(std::move(v));
    }
    f2_ = MomentTensor::symmetrized(2, n, std::move(flat));
  }

  const Rat& f0() const { return f0_; }
  const RatVec& f1() const { return f1_; }
  const MomentTensor& f2() const { return *f2_; }
  const Rat& f3() const { return f3_; }
  const RatVec& gamma() const { return gamma_; }
  std::size_t sites() const { return gamma_.size(); }

  // The degree-2 part as a Polynomial, for pairing with a functional.
  Polynomial quadratic_part() const {
    std::vector<MomentTensor> c;
    c.push_back(MomentTensor::scalar(sites(), f0_));
    c.push_back(MomentTensor::from_entries(1, sites(), f1_));
    c.push_back(*f2_);
    return Polynomial(std::move(c));
  }

 private:
  Rat f0_;
  RatVec f1_;
  std::optional<MomentTensor> f2_;
  Rat f3_;
  RatVec gamma_;
};

inline Rat weighted_mass(const RatVec& gamma, const Configuration& eta) {
  if (eta.counts.size() != gamma.size())
    throw std::invalid_argument("configuration length does not match gamma");
  Rat m(0);
  for (std::size_t i = 0; i < gamma.size(); ++i) m += gamma[i] * eta.counts[i];
  return m;
}

inline Rat evaluate_restricted_cubic(const RestrictedCubic& q, const Configuration& eta) {
  if (eta.counts.size() != q.sites())
    throw std::invalid_argument("configuration length does not match polynomial site count");
  Rat total = q.f0();
  for (std::size_t i = 0; i < q.sites(); ++i) total += q.f1()[i] * eta.counts[i];
  detail::for_each_index(2, q.sites(), [&](const std::vector<std::size_t>& idx, std::size_t flat) {
    const Rat& coeff = q.f2().entries()[flat];
    if (coeff == 0) return;
    total += coeff * eta.counts[idx[0]] * eta.counts[idx[1]];
  });
  Rat wm = weighted_mass(q.gamma(), eta);
  total += q.f3() * wm * wm * wm;
  return total;
}

// Closed-form bound lambda_b = |f0| + max_x |f1(x)|/gamma(x)
//                            + max_{x,y} |f2(x,y)|/(gamma(x)gamma(y)),
// which dominates |b(eta)| / (1 + (sum_x gamma(x) k_x)^3) over all
// configurations: each of 1, t, t^2 is at most 1 + t^3 for t >= 0. An
// overestimate of the exact supremum, never an underestimate.
inline Rat ratio_bound(const Polynomial& b, const RatVec& gamma) {
  if (b.degree() > 2) throw std::invalid_argument("ratio bound takes polynomials of degree <= 2");
  if (gamma.size() != b.sites())
    throw std::invalid_argument("gamma length does not match polynomial site count");
  for (const Rat& g : gamma)
    if (g <= 0) throw std::invalid_argument("gamma entries must be strictly positive");

  Rat bound = rat_abs(b.coefficient(0).value());
  if (b.degree() >= 1) {
    Rat lambda1(0);
    for (std::size_t x = 0; x < gamma.size(); ++x) {
      Rat r = rat_abs(b.coefficient(1).at({x})) / gamma[x];
      lambda1 = std::max(lambda1, r);
    }
    bound += lambda1;
  }
  if (b.degree() >= 2) {
    Rat lambda2(0);
    for (std::size_t x = 0; x < gamma.size(); ++x)
      for (std::size_t y = 0; y < gamma.size(); ++y) {
        Rat r = rat_abs(b.coefficient(2).at({x, y})) / (gamma[x] * gamma[y]);
        lambda2 = std::max(lambda2, r);
      }
    bound += lambda2;
  }
  return bound;
}

}  // namespace momprob
