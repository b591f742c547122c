#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace klsym {

// Residue modulo p^N in Montgomery form (R = 2^128).  Two 64-bit limbs,
// little endian.  Montgomery form is transparent to everything we care
// about besides printing: p-divisibility, exact division by p, equality
// and zero tests all commute with multiplication by the unit R.
struct Zq {
  uint64_t v[2] = {0, 0};

  bool operator==(const Zq& o) const { return v[0] == o.v[0] && v[1] == o.v[1]; }
  bool is_zero() const { return v[0] == 0 && v[1] == 0; }
};

// Arithmetic context for a fixed modulus m = p^N, m odd, m < 2^126.
class ZqCtx {
 public:
  ZqCtx() = default;

  ZqCtx(uint32_t p, uint32_t n) : p_(p), n_(n) {
    if (p < 3 || (p & 1) == 0) throw std::invalid_argument("ZqCtx: p must be an odd prime");
    mpz_class m = 1;
    for (uint32_t i = 0; i < n; ++i) m *= p;
    if (mpz_sizeinbase(m.get_mpz_t(), 2) > 126)
      throw std::invalid_argument("ZqCtx: p^N exceeds the 126-bit residue capacity");
    m_[0] = limb(m, 0);
    m_[1] = limb(m, 1);
    m_mpz_ = m;

    // minv = -m^{-1} mod 2^64 by Newton lifting (m odd).
    uint64_t inv = m_[0];
    for (int i = 0; i < 6; ++i) inv *= 2 - m_[0] * inv;
    minv_ = ~inv + 1;

    mpz_class r2 = 1;
    r2 <<= 256;
    r2 %= m;
    r2_.v[0] = limb(r2, 0);
    r2_.v[1] = limb(r2, 1);
    one_ = from_mpz(1);
  }

  uint32_t p() const { return p_; }
  uint32_t n() const { return n_; }
  const mpz_class& modulus() const { return m_mpz_; }
  Zq one() const { return one_; }

  Zq add(Zq a, Zq b) const {
    Zq r;
    unsigned __int128 s = (unsigned __int128)a.v[0] + b.v[0];
    r.v[0] = (uint64_t)s;
    s = (s >> 64) + a.v[1] + b.v[1];
    r.v[1] = (uint64_t)s;
    bool overflow = (s >> 64) != 0;
    if (overflow || geq_m(r)) sub_m(r);
    return r;
  }

  Zq sub(Zq a, Zq b) const {
    Zq r;
    unsigned __int128 d = (unsigned __int128)a.v[0] - b.v[0];
    r.v[0] = (uint64_t)d;
    bool borrow = (d >> 64) != 0;
    d = (unsigned __int128)a.v[1] - b.v[1] - (borrow ? 1 : 0);
    r.v[1] = (uint64_t)d;
    if ((d >> 64) != 0) {  // borrowed past zero: add m back
      unsigned __int128 s = (unsigned __int128)r.v[0] + m_[0];
      r.v[0] = (uint64_t)s;
      r.v[1] += m_[1] + (uint64_t)(s >> 64);
    }
    return r;
  }

  Zq neg(Zq a) const { return a.is_zero() ? a : sub(Zq{}, a); }

  // Montgomery product: returns a*b*R^{-1} mod m (CIOS, word size 64).
  Zq mul(Zq a, Zq b) const {
    uint64_t t0 = 0, t1 = 0, t2 = 0;
    for (int i = 0; i < 2; ++i) {
      unsigned __int128 c = (unsigned __int128)a.v[i] * b.v[0] + t0;
      uint64_t u0 = (uint64_t)c;
      unsigned __int128 c2 = (unsigned __int128)a.v[i] * b.v[1] + t1 + (uint64_t)(c >> 64);
      uint64_t u1 = (uint64_t)c2;
      uint64_t u2 = t2 + (uint64_t)(c2 >> 64);

      uint64_t q = u0 * minv_;
      c = (unsigned __int128)q * m_[0] + u0;
      c2 = (unsigned __int128)q * m_[1] + u1 + (uint64_t)(c >> 64);
      t0 = (uint64_t)c2;
      unsigned __int128 c3 = (unsigned __int128)u2 + (uint64_t)(c2 >> 64);
      t1 = (uint64_t)c3;
      t2 = (uint64_t)(c3 >> 64);
    }
    Zq r{{t0, t1}};
    if (t2 != 0 || geq_m(r)) sub_m(r);
    return r;
  }

  Zq from_mpz(const mpz_class& x) const {
    mpz_class r = x % m_mpz_;
    if (r < 0) r += m_mpz_;
    Zq plain{{limb(r, 0), limb(r, 1)}};
    return mul(plain, r2_);
  }

  Zq from_i64(long long x) const { return from_mpz(mpz_class((long)x)); }

  mpz_class to_mpz(Zq a) const {
    Zq plain = mul(a, Zq{{1, 0}});  // strip the R factor
    mpz_class r = plain.v[1];
    r <<= 64;
    r += plain.v[0];
    return r;
  }

  // p-adic valuation of the residue, capped at `cap`.  Valid on Montgomery
  // forms since R is a unit mod p.
  int val_p(Zq a, int cap) const {
    if (a.is_zero()) return cap;
    int v = 0;
    while (v < cap) {
      uint64_t rem;
      Zq q = divmod_small(a, p_, rem);
      if (rem != 0) break;
      a = q;
      ++v;
    }
    return v;
  }

  // Exact integer division by p; caller guarantees divisibility.
  Zq div_p_exact(Zq a) const {
    uint64_t rem;
    Zq q = divmod_small(a, p_, rem);
    if (rem != 0) throw std::domain_error("div_p_exact: residue not divisible by p");
    return q;
  }

  // Inverse of a unit (val_p = 0) by Newton iteration.
  Zq inv_unit(Zq a) const {
    mpz_class av = to_mpz(a);
    mpz_class a_mod_p = av % p_;
    if (a_mod_p == 0) throw std::domain_error("inv_unit: argument is not a unit");
    mpz_class b0;
    if (mpz_invert(b0.get_mpz_t(), a_mod_p.get_mpz_t(), mpz_class(p_).get_mpz_t()) == 0)
      throw std::domain_error("inv_unit: no inverse mod p");
    Zq b = from_mpz(b0);
    Zq two = from_i64(2);
    for (int i = 0; i < 8; ++i) b = mul(b, sub(two, mul(a, b)));
    return b;
  }

 private:
  static uint64_t limb(const mpz_class& x, int i) {
    mpz_class t = x >> (64 * i);
    mpz_class lo = t & mpz_class("18446744073709551615");
    uint64_t r = 0;
    for (int b = 1; b >= 0; --b) {
      r <<= 32;
      r |= mpz_class((lo >> (32 * b)) & 0xffffffff).get_ui();
    }
    return r;
  }

  bool geq_m(const Zq& a) const {
    if (a.v[1] != m_[1]) return a.v[1] > m_[1];
    return a.v[0] >= m_[0];
  }

  void sub_m(Zq& a) const {
    unsigned __int128 d = (unsigned __int128)a.v[0] - m_[0];
    a.v[0] = (uint64_t)d;
    a.v[1] = a.v[1] - m_[1] - (((d >> 64) != 0) ? 1 : 0);
  }

  Zq divmod_small(Zq a, uint64_t d, uint64_t& rem) const {
    Zq q;
    q.v[1] = a.v[1] / d;
    unsigned __int128 cur = ((unsigned __int128)(a.v[1] % d) << 64) | a.v[0];
    q.v[0] = (uint64_t)(cur / d);
    rem = (uint64_t)(cur % d);
    return q;
  }

  uint32_t p_ = 0, n_ = 0;
  uint64_t m_[2] = {0, 0};
  uint64_t minv_ = 0;
  mpz_class m_mpz_;
  Zq r2_, one_;
};

}  // namespace klsym
