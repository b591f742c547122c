#include "klsym/padic.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace klsym {

namespace {

bool is_prime_u32(uint32_t n) {
  if (n < 2) return false;
  for (uint32_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace

void PrecisionProfile::validate() const {
  if (!is_prime_u32(p) || p < 5)
    throw std::invalid_argument("profile: p must be a prime >= 5");
  if (a < 1) throw std::invalid_argument("profile: a >= 1 required");
  if (n_padic < 1 || n_t < 1 || m_w < 1 || m_t < 1)
    throw std::invalid_argument("profile: all window bounds must be positive");
}

Omega::Omega(uint32_t p, uint32_t n_store) : p_(p), n_store_(n_store) {
  if (!is_prime_u32(p) || p < 5) throw std::invalid_argument("Omega: p must be a prime >= 5");
  if ((int)p - 1 > kMaxCoords) throw std::invalid_argument("Omega: p too large for coordinate capacity");
  coords_ = (int)p - 1;
  max_pi_ = (int32_t)((p - 1) * n_store);
  zq_ = ZqCtx(p, n_store);
}

PadicElem PadicElem::make(const Omega* ring, const std::array<Zq, Omega::kMaxCoords>& c,
                          int32_t shift, int32_t prec) {
  PadicElem e;
  e.ring_ = ring;
  e.c_ = c;
  e.shift_ = shift;
  e.prec_ = prec;
  e.normalize();
  return e;
}

PadicElem Omega::zero() const {
  PadicElem e;
  e.ring_ = this;
  return e;
}

PadicElem Omega::one() const { return from_int(1); }

PadicElem Omega::pi() const {
  PadicElem e;
  e.ring_ = this;
  e.c_[1] = zq_.one();
  return e;
}

PadicElem Omega::from_int(long long v) const {
  PadicElem e;
  e.ring_ = this;
  e.c_[0] = zq_.from_i64(v);
  return e;
}

PadicElem Omega::from_mpz(const mpz_class& v) const {
  PadicElem e;
  e.ring_ = this;
  e.c_[0] = zq_.from_mpz(v);
  return e;
}

PadicElem Omega::from_mpq(const mpq_class& v) const {
  mpz_class num = v.get_num(), den = v.get_den();
  int vden = 0;
  while (den % p_ == 0) {
    den /= p_;
    ++vden;
  }
  PadicElem e = from_mpz(num);
  if (den != 1) {
    mpz_class dinv;
    if (mpz_invert(dinv.get_mpz_t(), den.get_mpz_t(), zq_.modulus().get_mpz_t()) == 0)
      throw std::domain_error("from_mpq: denominator not invertible");
    e = e * from_mpz(dinv);
  }
  if (vden) {
    // dividing by p^vden = (-1)^vden pi^{(p-1) vden}
    e = e.pi_div(vden * (coords_));
    if (vden & 1) e = -e;
  }
  return e;
}

PadicElem Omega::from_pi_coords(const std::vector<mpz_class>& c) const {
  if ((int)c.size() > coords_) throw std::invalid_argument("from_pi_coords: too many coordinates");
  PadicElem e;
  e.ring_ = this;
  for (size_t j = 0; j < c.size(); ++j) e.c_[j] = zq_.from_mpz(c[j]);
  return e;
}

void PadicElem::normalize() {
  if (!ring_) return;
  const ZqCtx& z = ring_->zq_;
  const int k = ring_->coords_;
  // Fold positive shifts into the mantissa: multiply by pi rotates the
  // coordinate vector up, the wrapped top coordinate re-enters times -p.
  while (shift_ > 0) {
    Zq top = c_[k - 1];
    for (int j = k - 1; j > 0; --j) c_[j] = c_[j - 1];
    Zq mp = z.neg(top);
    Zq acc{};
    for (uint32_t i = 0; i < ring_->p_; ++i) acc = z.add(acc, mp);
    c_[0] = acc;
    --shift_;
  }
  // Compact mantissas divisible by p: m = -p m' means value = pi^{s+p-1} m'.
  while (shift_ <= -k) {
    bool all_div = true;
    bool any = false;
    for (int j = 0; j < k; ++j) {
      if (c_[j].is_zero()) continue;
      any = true;
      if (z.val_p(c_[j], 1) < 1) {
        all_div = false;
        break;
      }
    }
    if (!all_div || !any) break;
    for (int j = 0; j < k; ++j)
      if (!c_[j].is_zero()) c_[j] = z.neg(z.div_p_exact(c_[j]));
    shift_ += k;
  }
}

Valuation PadicElem::valuation() const {
  if (!ring_) return Valuation::infinity(1);
  const ZqCtx& z = ring_->zq_;
  const int k = ring_->coords_;
  int32_t pr = prec();
  bool all_zero = true;
  long best = 0;
  bool found = false;
  for (int j = 0; j < k; ++j) {
    if (c_[j].is_zero()) continue;
    all_zero = false;
    int cap = (int)ring_->n_store_;
    int vp = z.val_p(c_[j], cap);
    long v = (long)vp * k + j + shift_;
    if (!found || v < best) best = v, found = true;
  }
  if (all_zero && prec_ >= Omega::kExactPrec) return Valuation::infinity(k);
  if (!found || best >= pr) return Valuation::at_least(pr, k);
  return Valuation::exact(best, k);
}

PadicElem PadicElem::operator+(const PadicElem& o) const {
  if (!ring_) return o;
  if (!o.ring_) return *this;
  if (ring_ != o.ring_) throw std::invalid_argument("PadicElem: mixed rings");
  const ZqCtx& z = ring_->zq_;
  const int k = ring_->coords_;
  PadicElem a = *this, b = o;
  // align shifts downward (pi-multiplying the mantissa of the higher one)
  int32_t s = std::min(a.shift_, b.shift_);
  auto align = [&](PadicElem& x) {
    while (x.shift_ > s) {
      Zq top = x.c_[k - 1];
      for (int j = k - 1; j > 0; --j) x.c_[j] = x.c_[j - 1];
      Zq mp = z.neg(top);
      Zq acc{};
      for (uint32_t i = 0; i < ring_->p_; ++i) acc = z.add(acc, mp);
      x.c_[0] = acc;
      --x.shift_;
    }
  };
  align(a);
  align(b);
  PadicElem r;
  r.ring_ = ring_;
  r.shift_ = s;
  for (int j = 0; j < k; ++j) r.c_[j] = z.add(a.c_[j], b.c_[j]);
  r.prec_ = std::min(prec(), o.prec());
  r.normalize();
  return r;
}

PadicElem PadicElem::operator-() const {
  if (!ring_) return *this;
  PadicElem r = *this;
  for (int j = 0; j < ring_->coords_; ++j) r.c_[j] = ring_->zq_.neg(r.c_[j]);
  return r;
}

PadicElem PadicElem::operator-(const PadicElem& o) const { return *this + (-o); }

PadicElem PadicElem::operator*(const PadicElem& o) const {
  if (!ring_ || !o.ring_) return PadicElem{};  // exact zero
  if (ring_ != o.ring_) throw std::invalid_argument("PadicElem: mixed rings");
  const ZqCtx& z = ring_->zq_;
  const int k = ring_->coords_;
  // schoolbook product in Z_p[pi]/(pi^{p-1}+p)
  std::array<Zq, 2 * Omega::kMaxCoords> t{};
  for (int i = 0; i < k; ++i) {
    if (c_[i].is_zero()) continue;
    for (int j = 0; j < k; ++j) {
      if (o.c_[j].is_zero()) continue;
      t[i + j] = z.add(t[i + j], z.mul(c_[i], o.c_[j]));
    }
  }
  PadicElem r;
  r.ring_ = ring_;
  for (int d = 2 * k - 2; d >= k; --d) {
    if (t[d].is_zero()) continue;
    Zq mp{};
    for (uint32_t i = 0; i < ring_->p_; ++i) mp = z.add(mp, t[d]);
    t[d - k] = z.sub(t[d - k], mp);
    t[d] = Zq{};
  }
  for (int j = 0; j < k; ++j) r.c_[j] = t[j];
  r.shift_ = shift_ + o.shift_;
  // precision: err = x e2 + y e1, val(x) >= shift
  int64_t p1 = (int64_t)prec() + o.shift_;
  int64_t p2 = (int64_t)o.prec() + shift_;
  r.prec_ = (int32_t)std::min<int64_t>({p1, p2, Omega::kExactPrec});
  r.normalize();
  return r;
}

PadicElem PadicElem::mul_small(long long c) const {
  if (!ring_) return *this;
  return *this * ring_->from_int(c);
}

PadicElem PadicElem::pi_mul(int k) const {
  if (!ring_ || k == 0) return *this;
  PadicElem r = *this;
  r.shift_ += k;
  if (r.prec_ < Omega::kExactPrec) r.prec_ += k;
  r.normalize();
  return r;
}

PadicElem PadicElem::div_exact_mpz(const mpz_class& d) const {
  if (!ring_) return *this;
  if (d == 0) throw std::domain_error("div_exact_mpz: zero divisor");
  mpz_class u = d;
  int v = 0;
  while (u % ring_->p_ == 0) {
    u /= ring_->p_;
    ++v;
  }
  mpz_class uinv;
  if (mpz_invert(uinv.get_mpz_t(), u.get_mpz_t(), ring_->zq_.modulus().get_mpz_t()) == 0)
    throw std::domain_error("div_exact_mpz: unit part not invertible");
  PadicElem r = *this * ring_->from_mpz(uinv);
  if (v) {
    r = r.pi_div(v * ring_->coords_);
    if (v & 1) r = -r;
  }
  return r;
}

PadicElem PadicElem::invert_unit() const {
  if (!ring_) throw std::domain_error("invert_unit: zero");
  Valuation v = valuation();
  if (v.infinite || v.lower_bound || v.num != 0)
    throw std::domain_error("invert_unit: element is not a unit");
  const ZqCtx& z = ring_->zq_;
  const int k = ring_->coords_;
  // strip the shift from the mantissa by exact rotations
  PadicElem a = *this;
  while (a.shift_ < 0) {
    // mantissa has val >= 1 pi-step here: rotate down
    Zq c0 = a.c_[0];
    for (int j = 0; j < k - 1; ++j) a.c_[j] = a.c_[j + 1];
    a.c_[k - 1] = z.neg(z.div_p_exact(c0));
    ++a.shift_;
  }
  // Newton: y <- y (2 - a y), seeded with the inverse of c_0 mod p
  PadicElem y = ring_->from_mpz([&] {
    mpz_class c0 = z.to_mpz(a.c_[0]) % ring_->p_;
    mpz_class r;
    if (mpz_invert(r.get_mpz_t(), c0.get_mpz_t(), mpz_class(ring_->p_).get_mpz_t()) == 0)
      throw std::domain_error("invert_unit: not invertible mod p");
    return r;
  }());
  PadicElem two = ring_->from_int(2);
  int iters = 1;
  while ((1 << iters) < ring_->max_pi_ + 2) ++iters;
  for (int i = 0; i <= iters; ++i) y = y * (two - a * y);
  y.prec_ = prec();
  return y;
}

PadicElem PadicElem::pow_mpz(const mpz_class& e) const {
  if (!ring_) {
    if (e == 0) throw std::domain_error("pow: 0^0 at null ring");
    return *this;
  }
  mpz_class n = e;
  PadicElem base = *this;
  if (n < 0) {
    base = base.invert_unit();
    n = -n;
  }
  PadicElem acc = ring_->one();
  while (n > 0) {
    if (mpz_odd_p(n.get_mpz_t())) acc = acc * base;
    base = base * base;
    n >>= 1;
  }
  return acc;
}

PadicElem PadicElem::pow_zp(const mpz_class& kappa, int known_digits, bool exact_int) const {
  if (!ring_) throw std::domain_error("pow_zp: zero base");
  if (exact_int) return pow_mpz(kappa);
  // digit peeling: x^kappa = prod_s (x^{p^s})^{d_s}; requires val(x-1) > 0
  const uint32_t p = ring_->p_;
  PadicElem xs = *this;
  PadicElem acc = ring_->one();
  mpz_class k = kappa;
  mpz_class pz = p;
  // normalize kappa into [0, p^digits)
  mpz_class mod = 1;
  for (int i = 0; i < known_digits; ++i) mod *= pz;
  k %= mod;
  if (k < 0) k += mod;
  for (int s = 0; s < known_digits; ++s) {
    unsigned long d = mpz_class(k % pz).get_ui();
    for (unsigned long i = 0; i < d; ++i) acc = acc * xs;
    k /= pz;
    if (s + 1 >= known_digits) break;
    xs = xs.pow_mpz(p);
    Valuation turn = (xs - ring_->one()).valuation();
    // once x^{p^s} == 1 within precision the remaining digits are inert
    if (turn.infinite || turn.num >= acc.prec()) return acc;
  }
  // unknown digits beyond known_digits contribute a factor x^{p^digits * t}
  xs = xs.pow_mpz(p);
  Valuation tail = (xs - ring_->one()).valuation();
  PadicElem r = acc;
  int32_t cap = tail.infinite ? r.prec() : (int32_t)tail.num;
  r.prec_ = std::min(r.prec(), cap);
  return r;
}

PadicElem PadicElem::with_prec(int32_t pi_prec) const {
  PadicElem r = *this;
  r.prec_ = std::min(r.prec(), pi_prec);
  return r;
}

PadicElem PadicElem::reduced_shift() const {
  if (!ring_ || shift_ == 0) return *this;
  const ZqCtx& z = ring_->zq_;
  const int k = ring_->coords_;
  Valuation v = valuation();
  if (!v.infinite && !v.lower_bound && v.num < 0)
    throw std::domain_error("reduced_shift: negative valuation cannot be canonicalized");
  PadicElem a = *this;
  while (a.shift_ < 0) {
    Zq c0 = a.c_[0];
    if (!c0.is_zero() && z.val_p(c0, 1) < 1) {
      // value below precision horizon but mantissa not divisible: clamp
      for (int j = 0; j < k; ++j) a.c_[j] = Zq{};
      a.prec_ = std::min(a.prec(), (int32_t)0) + 0;
      a.shift_ = 0;
      return a;
    }
    for (int j = 0; j < k - 1; ++j) a.c_[j] = a.c_[j + 1];
    a.c_[k - 1] = c0.is_zero() ? Zq{} : z.neg(z.div_p_exact(c0));
    ++a.shift_;
  }
  return a;
}

bool PadicElem::congruent(const PadicElem& o, int32_t pi_k) const {
  PadicElem d = *this - o;
  Valuation v = d.valuation();
  if (v.infinite) return true;
  return v.num >= pi_k;
}

std::vector<mpz_class> PadicElem::pi_coords_at_shift0() const {
  if (!ring_) return {};
  PadicElem a = reduced_shift();
  std::vector<mpz_class> out(ring_->coords_);
  for (int j = 0; j < ring_->coords_; ++j) out[j] = ring_->zq_.to_mpz(a.c_[j]);
  return out;
}

std::string PadicElem::str() const {
  if (!ring_) return "0";
  std::ostringstream os;
  Valuation v = valuation();
  if (v.infinite || v.lower_bound) {
    os << "O(pi^" << prec() << ")";
    return os.str();
  }
  auto co = pi_coords_at_shift0();
  os << "[";
  for (size_t j = 0; j < co.size(); ++j) {
    if (j) os << ",";
    os << co[j].get_str();
  }
  os << "]+O(pi^" << prec() << ")";
  return os.str();
}

PadicElem fused_dot(const PadicElem* a, const PadicElem* b, int len) {
  if (len == 0) return PadicElem{};
  const Omega* ring = nullptr;
  for (int i = 0; i < len && !ring; ++i)
    if (a[i].ring_) ring = a[i].ring_;
  if (!ring) return PadicElem{};
  const ZqCtx& z = ring->zq();
  const int k = ring->coords();
  std::array<Zq, 2 * Omega::kMaxCoords> t{};
  int32_t prec = Omega::kExactPrec;
  int32_t shift_common = 0;
  bool shift_set = false;
  for (int i = 0; i < len; ++i) {
    const PadicElem& x = a[i];
    const PadicElem& y = b[i];
    if (!x.ring_ || !y.ring_) continue;
    if (x.shift_ != 0 || y.shift_ != 0) {
      // rare path: fall back to generic ops for shifted entries
      PadicElem acc = PadicElem::make(ring, {}, 0, prec);
      for (int j = 0; j < len; ++j) acc = acc + a[j] * b[j];
      return acc;
    }
    if (!shift_set) shift_set = true;
    (void)shift_common;
    int64_t p1 = (int64_t)x.prec() + y.shift_;
    int64_t p2 = (int64_t)y.prec() + x.shift_;
    prec = (int32_t)std::min<int64_t>({(int64_t)prec, p1, p2});
    for (int ii = 0; ii < k; ++ii) {
      if (x.c_[ii].is_zero()) continue;
      for (int jj = 0; jj < k; ++jj) {
        if (y.c_[jj].is_zero()) continue;
        t[ii + jj] = z.add(t[ii + jj], z.mul(x.c_[ii], y.c_[jj]));
      }
    }
  }
  PadicElem r;
  r.ring_ = ring;
  for (int d = 2 * k - 2; d >= k; --d) {
    if (t[d].is_zero()) continue;
    Zq mp{};
    for (uint32_t i = 0; i < ring->p(); ++i) mp = z.add(mp, t[d]);
    t[d - k] = z.sub(t[d - k], mp);
  }
  for (int j = 0; j < k; ++j) r.c_[j] = t[j];
  r.shift_ = 0;
  r.prec_ = prec;
  r.normalize();
  return r;
}

PadicElem hensel_quadratic_unit_root(const PadicElem& s, const PadicElem& c) {
  if (s.is_null()) throw std::domain_error("hensel: s must be a unit");
  const Omega* ring = s.ring();
  Valuation vs = s.valuation();
  if (vs.infinite || vs.num != 0)
    throw std::domain_error("hensel: no unit root (trace is not a unit)");
  if (!c.is_null()) {
    Valuation vc = c.valuation();
    if (!vc.infinite && vc.num <= 0)
      throw std::invalid_argument("hensel: constant term must have positive valuation");
  }
  // f(x) = x^2 - s x + c, x0 = s: f'(x0) = s unit
  PadicElem x = s;
  int guard = 0;
  while (true) {
    PadicElem f = x * x - s * x + c;
    Valuation vf = f.valuation();
    if (vf.infinite || vf.num >= x.prec()) break;
    PadicElem fp = x.mul_small(2) - s;
    x = x - f * fp.invert_unit();
    if (++guard > 200) throw std::runtime_error("hensel: no convergence");
  }
  return x;
}

PadicElem teichmuller(const Omega& ring, uint32_t c) {
  c %= ring.p();
  if (c == 0) throw std::domain_error("teichmuller: zero residue");
  PadicElem x = ring.from_int(c);
  int guard = 0;
  while (true) {
    PadicElem xp = x.pow_mpz(ring.p());
    if (xp.congruent(x, x.prec())) {
      x = xp;
      break;
    }
    x = xp;
    if (++guard > 300) throw std::runtime_error("teichmuller: no convergence");
  }
  return x;
}

}  // namespace klsym
