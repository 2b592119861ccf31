#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace momprob {

// Exact rational scalar. All arithmetic in the library is carried out in
// mpq_class; floating point never enters any computation or file format.
using Rat = mpq_class;

using RatVec = std::vector<Rat>;
using RatMat = std::vector<RatVec>;

inline Rat make_rat(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

// Parses "p", "-p" or "p/q" (base 10). Lowest terms are not required on
// input; the result is canonical with positive denominator.
inline Rat parse_rat(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  std::size_t i = 0;
  if (text[i] == '-') ++i;
  bool digits = false, slash = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c >= '0' && c <= '9') {
      digits = true;
    } else if (c == '/' && !slash && digits) {
      slash = true;
      digits = false;
    } else {
      throw std::invalid_argument("malformed rational literal: " + text);
    }
  }
  if (!digits) throw std::invalid_argument("malformed rational literal: " + text);
  Rat r;
  if (mpq_set_str(r.get_mpq_t(), text.c_str(), 10) != 0)
    throw std::invalid_argument("malformed rational literal: " + text);
  if (r.get_den() == 0)
    throw std::invalid_argument("rational with zero denominator: " + text);
  r.canonicalize();
  return r;
}

// "p/q" in lowest terms with q > 0; plain "p" when q == 1.
inline std::string format_rat(const Rat& r) { return r.get_str(); }

}  // namespace momprob
