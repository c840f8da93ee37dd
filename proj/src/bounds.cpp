#include "collatz/bounds.hpp"

#include <stdexcept>

namespace collatz {

namespace {

unsigned long as_ulong(const Natural& n, const char* what) {
  if (!n.fits_ulong_p())
    throw std::domain_error(std::string(what) + " too large for exact exponentiation");
  return n.get_ui();
}

// Exact q-th root or nothing.
std::optional<Natural> exact_root(const Natural& n, unsigned long q) {
  Natural r;
  const int exact = mpz_root(r.get_mpz_t(), n.get_mpz_t(), q);
  if (!exact) return std::nullopt;
  return r;
}

}  // namespace

BoundFunction::BoundFunction(Rational coefficient, Rational exponent)
    : coefficient_(std::move(coefficient)), exponent_(std::move(exponent)) {
  coefficient_.canonicalize();
  exponent_.canonicalize();
  if (coefficient_ <= 0 || exponent_ <= 0)
    throw std::invalid_argument("bound function needs positive coefficient and exponent");
}

BoundCompare BoundFunction::compare(const Natural& y, const Natural& v) const {
  if (y < 1) throw std::invalid_argument("bound comparison needs y >= 1");
  const unsigned long p = as_ulong(exponent_.get_num(), "exponent numerator");
  const unsigned long q = as_ulong(exponent_.get_den(), "exponent denominator");
  // v < (u/w) * y^(p/q)  <=>  w^q * v^q < u^q * y^p
  const Natural lhs = natural_pow(coefficient_.get_den(), q) * natural_pow(v, q);
  const Natural rhs = natural_pow(coefficient_.get_num(), q) * natural_pow(y, p);
  return lhs < rhs ? BoundCompare::Less : BoundCompare::Geq;
}

Natural BoundFunction::threshold_below(const Natural& y) const {
  if (y < 1) throw std::invalid_argument("bound threshold needs y >= 1");
  const unsigned long p = as_ulong(exponent_.get_num(), "exponent numerator");
  const unsigned long q = as_ulong(exponent_.get_den(), "exponent denominator");
  // t < (u/w) * y^(p/q)  <=>  t^q * w^q < u^q * y^p  <=>  t^q <= (u^q*y^p - 1) / w^q,
  // so t is the floor q-th root of that quotient.
  const Natural rhs = natural_pow(coefficient_.get_num(), q) * natural_pow(y, p);
  const Natural cap = (rhs - 1) / natural_pow(coefficient_.get_den(), q);
  Natural t;
  mpz_root(t.get_mpz_t(), cap.get_mpz_t(), q);
  return t;
}

bool BoundFunction::at_most_one_at(const Natural& y) const {
  return threshold_below(y) == 0;
}

int BoundFunction::compare_at(const BoundFunction& f, const BoundFunction& g,
                              const Natural& y) {
  if (y < 1) throw std::invalid_argument("bound comparison needs y >= 1");
  const Natural qf = f.exponent_.get_den(), qg = g.exponent_.get_den();
  Natural l;
  mpz_lcm(l.get_mpz_t(), qf.get_mpz_t(), qg.get_mpz_t());
  const unsigned long L = as_ulong(l, "exponent lcm");
  // Raise both sides to the L-th power and cross multiply:
  // f(y)^L = (u_f/w_f)^L * y^(p_f*L/q_f).
  const unsigned long ef = as_ulong(f.exponent_.get_num() * (l / qf), "exponent");
  const unsigned long eg = as_ulong(g.exponent_.get_num() * (l / qg), "exponent");
  const Natural lhs = natural_pow(f.coefficient_.get_num(), L) *
                      natural_pow(g.coefficient_.get_den(), L) * natural_pow(y, ef);
  const Natural rhs = natural_pow(g.coefficient_.get_num(), L) *
                      natural_pow(f.coefficient_.get_den(), L) * natural_pow(y, eg);
  return lhs < rhs ? -1 : (lhs == rhs ? 0 : 1);
}

BoundFunction compose(const BoundFunction& f, const BoundFunction& g) {
  // f(g(y)) = a_f * (a_g * y^{b_g})^{b_f} = (a_f * a_g^{b_f}) * y^{b_f*b_g}
  const unsigned long p = f.exponent().get_num().fits_ulong_p()
                              ? f.exponent().get_num().get_ui()
                              : throw std::domain_error("exponent numerator too large");
  const unsigned long q = f.exponent().get_den().get_ui();
  const auto num_root = [&](const Natural& n) {
    auto r = exact_root(natural_pow(n, p), q);
    if (!r)
      throw std::domain_error("composition coefficient " + g.str() + "^" +
                              render_rational(f.exponent()) +
                              " is irrational; not in the a*y^b family");
    return *r;
  };
  const Natural cn = num_root(g.coefficient().get_num());
  const Natural cd = num_root(g.coefficient().get_den());
  Rational coeff = f.coefficient() * Rational(cn, cd);
  coeff.canonicalize();
  return {coeff, f.exponent() * g.exponent()};
}

BoundFunction BoundFunction::self_power(unsigned k) const {
  BoundFunction acc = BoundFunction::identity();
  for (unsigned i = 0; i < k; ++i) acc = compose(*this, acc);
  return acc;
}

std::string BoundFunction::str() const {
  return render_rational(coefficient_) + "*y^" + render_rational(exponent_);
}

}  // namespace collatz
