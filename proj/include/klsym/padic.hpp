#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "klsym/zmod.hpp"

namespace klsym {

// Valuation in the totally ramified extension of degree p-1: values live in
// (1/(p-1)) * Z.  `num` counts pi-steps; `den` is always p-1.  Valuations at
// the precision horizon are lower bounds only, never equalities.
struct Valuation {
  long num = 0;
  int den = 1;
  bool infinite = false;
  bool lower_bound = false;

  static Valuation infinity(int den_) { return Valuation{0, den_, true, false}; }
  static Valuation at_least(long n, int den_) { return Valuation{n, den_, false, true}; }
  static Valuation exact(long n, int den_) { return Valuation{n, den_, false, false}; }

  bool operator==(const Valuation& o) const {
    if (infinite || o.infinite) return infinite == o.infinite;
    return num * (long)o.den == o.num * (long)den;
  }
  bool operator<(const Valuation& o) const {
    if (infinite) return false;
    if (o.infinite) return true;
    return num * (long)o.den < o.num * (long)den;
  }
  Valuation operator+(const Valuation& o) const {
    if (infinite || o.infinite) return infinity(den);
    Valuation r = *this;
    r.num = num + o.num;  // dens agree within one ring
    r.lower_bound = lower_bound || o.lower_bound;
    return r;
  }
  double approx() const { return infinite ? 1e300 : (double)num / den; }
};

// Working-precision and truncation-window parameters shared by a run.
struct PrecisionProfile {
  uint32_t p = 5;
  uint32_t a = 1;          // q = p^a
  uint32_t n_padic = 40;   // absolute p-adic working precision
  uint32_t n_t = 24;       // t-degree window of the symmetric-power space
  uint32_t u_x = 0;        // x-exponent window (0 = derive from n_padic)
  uint32_t m_w = 24;       // w-degree window
  uint32_t m_t = 4;        // T-degree of reported L-series

  void validate() const;
  uint32_t effective_u_x() const {
    if (u_x) return u_x;
    return (n_padic * p * p + (p - 2)) / (p - 1) + 4;
  }
};

class PadicElem;

// Arithmetic context for Omega = Q_p(pi), pi^{p-1} = -p.  Elements are
// immutable after construction; the context is shared read-only.
class Omega {
 public:
  static constexpr int kMaxCoords = 12;
  static constexpr int32_t kExactPrec = std::numeric_limits<int32_t>::max() / 4;

  Omega(uint32_t p, uint32_t n_store);

  uint32_t p() const { return p_; }
  uint32_t n_store() const { return n_store_; }
  int coords() const { return coords_; }
  int32_t max_pi() const { return max_pi_; }
  const ZqCtx& zq() const { return zq_; }

  PadicElem zero() const;
  PadicElem one() const;
  PadicElem pi() const;
  PadicElem from_int(long long v) const;
  PadicElem from_mpz(const mpz_class& v) const;
  PadicElem from_mpq(const mpq_class& v) const;  // denominator a p-unit times p^e
  // coordinates in the basis 1, pi, ..., pi^{p-2}
  PadicElem from_pi_coords(const std::vector<mpz_class>& c) const;

 private:
  uint32_t p_, n_store_;
  int coords_;
  int32_t max_pi_;
  ZqCtx zq_;
  friend class PadicElem;
};

// Element of Omega: value = pi^shift * (c_0 + c_1 pi + ... + c_{p-2} pi^{p-2}),
// known modulo pi^prec (absolute pi-adic precision).  shift <= 0 in normal
// form; dividing by pi only moves the shift, so the division itself is exact
// and the precision loss is explicit in `prec`.
class PadicElem {
 public:
  PadicElem() = default;

  const Omega* ring() const { return ring_; }
  bool is_null() const { return ring_ == nullptr; }  // default state: exact 0
  int32_t shift() const { return shift_; }

  // Absolute precision in pi-units, after storage capping.
  int32_t prec() const {
    if (!ring_) return Omega::kExactPrec;
    int64_t cap = (int64_t)shift_ + ring_->max_pi_;
    return (int32_t)std::min<int64_t>(prec_, cap);
  }

  Valuation valuation() const;
  bool is_zero_at_prec() const { return valuation().lower_bound || valuation().infinite; }

  PadicElem operator+(const PadicElem& o) const;
  PadicElem operator-(const PadicElem& o) const;
  PadicElem operator-() const;
  PadicElem operator*(const PadicElem& o) const;
  PadicElem& operator+=(const PadicElem& o) { return *this = *this + o; }
  PadicElem& operator-=(const PadicElem& o) { return *this = *this - o; }
  PadicElem& operator*=(const PadicElem& o) { return *this = *this * o; }

  PadicElem mul_small(long long c) const;
  PadicElem pi_mul(int k) const;  // multiply by pi^k (k may be negative)
  PadicElem pi_div(int k) const { return pi_mul(-k); }

  // Exact division by an integer u * p^v (u a p-unit): multiplies by u^{-1}
  // and lowers precision by v*(p-1) pi-steps.
  PadicElem div_exact_mpz(const mpz_class& d) const;

  PadicElem invert_unit() const;               // requires valuation 0
  PadicElem pow_mpz(const mpz_class& e) const; // integer exponent (unit if e<0)
  // x^kappa for x a 1-unit and kappa a p-adic integer given modulo p^digits.
  PadicElem pow_zp(const mpz_class& kappa, int known_digits, bool exact_int) const;

  PadicElem with_prec(int32_t pi_prec) const;  // cap precision
  PadicElem reduced_shift() const;             // fold shift to 0 (needs val >= 0)

  // val(*this - o) >= pi_k ?
  bool congruent(const PadicElem& o, int32_t pi_k) const;

  std::vector<mpz_class> pi_coords_at_shift0() const;  // canonical, needs val >= 0
  std::string str() const;

  static PadicElem make(const Omega* ring, const std::array<Zq, Omega::kMaxCoords>& c,
                        int32_t shift, int32_t prec);

 private:
  void normalize();

  const Omega* ring_ = nullptr;
  std::array<Zq, Omega::kMaxCoords> c_{};
  int32_t shift_ = 0;
  int32_t prec_ = Omega::kExactPrec;

  friend class Omega;
  friend PadicElem fused_dot(const PadicElem* a, const PadicElem* b, int len);
};

// Sum of a[i]*b[i]; coordinate-level accumulation for the hot loops.
PadicElem fused_dot(const PadicElem* a, const PadicElem* b, int len);

// Unique unit root of X^2 - s X + c (val s = 0, val c > 0) by Newton
// iteration seeded at s; the cofactor c/root is the non-unit root.
PadicElem hensel_quadratic_unit_root(const PadicElem& s, const PadicElem& c);

// Teichmuller lift of a nonzero residue mod p: the (p-1)-st root of unity
// congruent to c.
PadicElem teichmuller(const Omega& ring, uint32_t c);

}  // namespace klsym
