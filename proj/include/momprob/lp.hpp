#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "momprob/errors.hpp"
#include "momprob/rational.hpp"

namespace momprob {

enum class RowSense { kEq, kLe };

// Feasibility / optimization problem over x >= 0 in exact rational
// arithmetic:
//   row i:  a_i . x  =  b_i   (kEq)   or   a_i . x <= b_i   (kLe)
//   optional objective: minimize c . x
struct LinearProgram {
  RatMat a;
  RatVec b;
  std::vector<RowSense> sense;
  std::optional<RatVec> objective;

  std::size_t rows() const { return a.size(); }
  std::size_t cols() const { return a.empty() ? 0 : a[0].size(); }
};

struct LpFeasible {
  RatVec x;
  std::optional<Rat> objective_value;
};

// Farkas certificate of infeasibility, reported in the original row space:
//   y^T A >= 0 componentwise,  y_i >= 0 on <= rows (free on = rows),
//   y^T b < 0.
// Any feasible x >= 0 would give 0 <= (y^T A) x <= y^T b < 0, so no feasible
// point exists.
struct LpInfeasible {
  RatVec farkas;
};

using LpOutcome = std::variant<LpFeasible, LpInfeasible>;

struct SolveOptions {
  std::size_t max_pivots = 200'000;
  std::size_t size_cap = 10'000'000;  // limit on rows*cols
  // When set, every pivot dumps the tableau: one line per row with the
  // basic column index, the row entries and the right-hand side, then the
  // reduced-cost row prefixed with "z".
  std::ostream* debug = nullptr;
};

inline bool satisfies_constraints(const LinearProgram& lp, const RatVec& x) {
  if (x.size() != lp.cols()) return false;
  for (const Rat& v : x)
    if (v < 0) return false;
  for (std::size_t i = 0; i < lp.rows(); ++i) {
    Rat lhs(0);
    for (std::size_t j = 0; j < lp.cols(); ++j) lhs += lp.a[i][j] * x[j];
    if (lp.sense[i] == RowSense::kEq ? lhs != lp.b[i] : lhs > lp.b[i]) return false;
  }
  return true;
}

inline bool farkas_certificate_valid(const LinearProgram& lp, const RatVec& y) {
  if (y.size() != lp.rows()) return false;
  for (std::size_t i = 0; i < lp.rows(); ++i)
    if (lp.sense[i] == RowSense::kLe && y[i] < 0) return false;
  for (std::size_t j = 0; j < lp.cols(); ++j) {
    Rat col(0);
    for (std::size_t i = 0; i < lp.rows(); ++i) col += y[i] * lp.a[i][j];
    if (col < 0) return false;
  }
  Rat yb(0);
  for (std::size_t i = 0; i < lp.rows(); ++i) yb += y[i] * lp.b[i];
  return yb < 0;
}

namespace detail {

// Dense two-phase primal simplex with Bland's anti-cycling rule. Columns:
// structural, then one slack per <= row, then one artificial per row; the
// right-hand side is kept as the last tableau column.
class SimplexTableau {
 public:
  SimplexTableau(const LinearProgram& lp, const SolveOptions& options)
      : lp_(lp), options_(options), n_(lp.cols()), m_(lp.rows()) {
    n_slack_ = 0;
    slack_col_.assign(m_, kNone);
    for (std::size_t i = 0; i < m_; ++i)
      if (lp.sense[i] == RowSense::kLe) slack_col_[i] = n_ + n_slack_++;
    art_col_.assign(m_, kNone);
    for (std::size_t i = 0; i < m_; ++i) art_col_[i] = n_ + n_slack_ + i;
    n_cols_ = n_ + n_slack_ + m_;

    row_sign_.assign(m_, 1);
    rows_.assign(m_, RatVec(n_cols_ + 1, Rat(0)));
    basis_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      const int s = lp.b[i] < 0 ? -1 : 1;
      row_sign_[i] = s;
      for (std::size_t j = 0; j < n_; ++j) rows_[i][j] = s * lp.a[i][j];
      if (slack_col_[i] != kNone) rows_[i][slack_col_[i]] = s;
      rows_[i][art_col_[i]] = 1;
      rows_[i][n_cols_] = s * lp.b[i];
      basis_[i] = art_col_[i];
    }

    // Phase-1 reduced costs for cost 1 on artificials, 0 elsewhere.
    zrow_.assign(n_cols_ + 1, Rat(0));
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j <= n_cols_; ++j)
        if (j != art_col_[i]) zrow_[j] -= rows_[i][j];
  }

  LpOutcome solve() {
    run_phase(/*ban_artificials=*/false);
    if (objective_value() > 0) return LpInfeasible{extract_farkas()};
    drive_out_artificials();
    if (lp_.objective) run_phase_two();
    LpFeasible feasible{extract_point(), std::nullopt};
    if (lp_.objective) feasible.objective_value = objective_value();
    return feasible;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  Rat objective_value() const { return -zrow_[n_cols_]; }

  bool column_allowed(std::size_t j, bool ban_artificials) const {
    return !(ban_artificials && j >= n_ + n_slack_);
  }

  void run_phase(bool ban_artificials) {
    for (;;) {
      std::size_t enter = kNone;
      for (std::size_t j = 0; j < n_cols_; ++j) {
        if (!column_allowed(j, ban_artificials)) continue;
        if (zrow_[j] < 0) {
          enter = j;
          break;  // Bland: smallest eligible column index
        }
      }
      if (enter == kNone) return;

      std::size_t leave = kNone;
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (rows_[i][enter] <= 0) continue;
        if (leave == kNone) {
          leave = i;
          continue;
        }
        const Rat lhs = rows_[i][n_cols_] * rows_[leave][enter];
        const Rat rhs = rows_[leave][n_cols_] * rows_[i][enter];
        if (lhs < rhs || (lhs == rhs && basis_[i] < basis_[leave])) leave = i;
      }
      if (leave == kNone) {
        if (!ban_artificials)
          throw std::logic_error("phase-1 objective unbounded; tableau corrupted");
        throw UnboundedError("objective is unbounded below over the feasible region");
      }
      pivot(leave, enter);
    }
  }

  void pivot(std::size_t r, std::size_t jc) {
    if (++pivots_ > options_.max_pivots)
      throw PivotLimitError("pivot limit of " + std::to_string(options_.max_pivots) + " reached");
    RatVec& prow = rows_[r];
    const Rat inv = 1 / prow[jc];
    for (auto& v : prow) v *= inv;
    prow[jc] = 1;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i == r || rows_[i][jc] == 0) continue;
      const Rat factor = rows_[i][jc];
      for (std::size_t j = 0; j <= n_cols_; ++j) rows_[i][j] -= factor * prow[j];
      rows_[i][jc] = 0;
    }
    if (zrow_[jc] != 0) {
      const Rat factor = zrow_[jc];
      for (std::size_t j = 0; j <= n_cols_; ++j) zrow_[j] -= factor * prow[j];
      zrow_[jc] = 0;
    }
    basis_[r] = jc;
    if (options_.debug) dump(*options_.debug, r, jc);
  }

  // After a zero-objective phase 1, pivot basic artificials onto structural
  // or slack columns; rows with no such column are redundant and dropped.
  void drive_out_artificials() {
    for (std::size_t r = 0; r < rows_.size();) {
      if (basis_[r] < n_ + n_slack_) {
        ++r;
        continue;
      }
      std::size_t jc = kNone;
      for (std::size_t j = 0; j < n_ + n_slack_; ++j)
        if (rows_[r][j] != 0) {
          jc = j;
          break;
        }
      if (jc != kNone) {
        pivot(r, jc);
        ++r;
      } else {
        rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(r));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
      }
    }
  }

  void run_phase_two() {
    const RatVec& c = *lp_.objective;
    auto cost = [&](std::size_t j) { return j < n_ ? c[j] : Rat(0); };
    zrow_.assign(n_cols_ + 1, Rat(0));
    for (std::size_t j = 0; j < n_; ++j) zrow_[j] = c[j];
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Rat cb = cost(basis_[i]);
      if (cb == 0) continue;
      for (std::size_t j = 0; j <= n_cols_; ++j) zrow_[j] -= cb * rows_[i][j];
    }
    run_phase(/*ban_artificials=*/true);
  }

  RatVec extract_point() const {
    RatVec x(n_, Rat(0));
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (basis_[i] < n_) x[basis_[i]] = rows_[i][n_cols_];
    return x;
  }

  // Phase-1 duals off the artificial reduced costs, mapped back through the
  // row sign flips and negated so that y^T A >= 0 and y^T b < 0.
  RatVec extract_farkas() const {
    RatVec y(m_);
    for (std::size_t i = 0; i < m_; ++i) y[i] = -row_sign_[i] * (1 - zrow_[art_col_[i]]);
    return y;
  }

  void dump(std::ostream& os, std::size_t r, std::size_t jc) const {
    os << "pivot " << pivots_ << ": column " << jc << " enters, row " << r << "\n";
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      os << "  b" << basis_[i] << " |";
      for (std::size_t j = 0; j <= n_cols_; ++j) os << ' ' << format_rat(rows_[i][j]);
      os << "\n";
    }
    os << "  z  |";
    for (std::size_t j = 0; j <= n_cols_; ++j) os << ' ' << format_rat(zrow_[j]);
    os << "\n";
  }

  const LinearProgram& lp_;
  const SolveOptions& options_;
  std::size_t n_, m_, n_slack_ = 0, n_cols_ = 0;
  std::vector<std::size_t> slack_col_, art_col_;
  std::vector<int> row_sign_;
  std::vector<RatVec> rows_;
  std::vector<std::size_t> basis_;
  RatVec zrow_;
  std::size_t pivots_ = 0;
};

inline void validate_lp(const LinearProgram& lp, const SolveOptions& options) {
  if (lp.a.empty()) throw std::invalid_argument("linear program needs at least one row");
  const std::size_t n = lp.a[0].size();
  for (const auto& row : lp.a)
    if (row.size() != n) throw std::invalid_argument("ragged constraint matrix");
  if (lp.b.size() != lp.a.size() || lp.sense.size() != lp.a.size())
    throw std::invalid_argument("row count mismatch between A, b and senses");
  if (lp.objective && lp.objective->size() != n)
    throw std::invalid_argument("objective length does not match column count");
  if (lp.a.size() * std::max<std::size_t>(n, 1) > options.size_cap)
    throw CapExceeded("linear program of size " + std::to_string(lp.a.size()) + "x" +
                      std::to_string(n) + " exceeds the size cap");
}

}  // namespace detail

// Exact feasibility / optimization. Exactly one outcome variant is returned
// and it is re-verified against the input before returning; a violation
// indicates an internal error and throws std::logic_error.
inline LpOutcome solve(const LinearProgram& lp, const SolveOptions& options = {}) {
  detail::validate_lp(lp, options);
  detail::SimplexTableau tableau(lp, options);
  LpOutcome outcome = tableau.solve();
  if (const auto* feasible = std::get_if<LpFeasible>(&outcome)) {
    if (!satisfies_constraints(lp, feasible->x))
      throw std::logic_error("simplex produced an invalid feasible point");
  } else {
    if (!farkas_certificate_valid(lp, std::get<LpInfeasible>(outcome).farkas))
      throw std::logic_error("simplex produced an invalid Farkas certificate");
  }
  return outcome;
}

}  // namespace momprob
