#include "normct/poly.hpp"

#include <sstream>

namespace normct {

Poly Poly::constant(const Rat& c, std::vector<std::string> vars) {
  Poly p(std::move(vars));
  if (c != 0) p.terms_[Exponents(p.vars_.size(), 0)] = c;
  return p;
}

Poly Poly::variable(size_t i, std::vector<std::string> vars) {
  Poly p(std::move(vars));
  if (i >= p.vars_.size()) throw domain_error("Poly::variable: index out of range");
  Exponents e(p.vars_.size(), 0);
  e[i] = 1;
  p.terms_[e] = 1;
  return p;
}

Poly Poly::univariate(const std::vector<Rat>& coeffs, const std::string& var) {
  Poly p({var});
  for (size_t i = 0; i < coeffs.size(); ++i)
    if (coeffs[i] != 0) p.terms_[{static_cast<unsigned>(i)}] = coeffs[i];
  return p;
}

unsigned Poly::total_degree() const {
  unsigned d = 0;
  for (const auto& [e, c] : terms_) {
    unsigned t = 0;
    for (unsigned x : e) t += x;
    d = std::max(d, t);
  }
  return d;
}

Rat Poly::coefficient(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rat(0) : it->second;
}

void Poly::set_coefficient(const Exponents& e, const Rat& c) {
  if (e.size() != vars_.size()) throw domain_error("Poly: exponent arity mismatch");
  if (c == 0)
    terms_.erase(e);
  else
    terms_[e] = c;
}

Rat Poly::eval(const std::vector<Rat>& point) const {
  if (point.size() != vars_.size()) throw domain_error("Poly::eval: arity mismatch");
  Rat acc = 0;
  for (const auto& [e, c] : terms_) {
    Rat term = c;
    for (size_t i = 0; i < e.size(); ++i)
      for (unsigned k = 0; k < e[i]; ++k) term *= point[i];
    acc += term;
  }
  return acc;
}

Poly Poly::derivative(size_t var) const {
  Poly out(vars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponents d = e;
    d[var] -= 1;
    out.set_coefficient(d, out.coefficient(d) + c * Rat(e[var]));
  }
  return out;
}

std::vector<Rat> Poly::univariate_coeffs() const {
  if (vars_.size() != 1) throw domain_error("Poly: not univariate");
  std::vector<Rat> out(total_degree() + 1, Rat(0));
  for (const auto& [e, c] : terms_) out[e[0]] = c;
  return out;
}

std::vector<Int> Poly::univariate_int_coeffs() const {
  std::vector<Rat> cs = univariate_coeffs();
  Int lcm = 1;
  for (const auto& c : cs) {
    Int d(c.get_den());
    Int g;
    mpz_gcd(g.get_mpz_t(), lcm.get_mpz_t(), d.get_mpz_t());
    lcm = lcm / g * d;
  }
  std::vector<Int> out;
  out.reserve(cs.size());
  for (const auto& c : cs) {
    Rat scaled = c * Rat(lcm);
    out.push_back(Int(scaled.get_num()));
  }
  return out;
}

void Poly::check_compatible(const Poly& a, const Poly& b) {
  if (a.vars_ != b.vars_) throw domain_error("Poly: variable lists differ");
}

Poly Poly::operator+(const Poly& o) const {
  check_compatible(*this, o);
  Poly out = *this;
  for (const auto& [e, c] : o.terms_) out.set_coefficient(e, out.coefficient(e) + c);
  return out;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator-() const {
  Poly out(vars_);
  for (const auto& [e, c] : terms_) out.terms_[e] = -c;
  return out;
}

Poly Poly::operator*(const Rat& c) const {
  Poly out(vars_);
  if (c == 0) return out;
  for (const auto& [e, k] : terms_) out.terms_[e] = k * c;
  return out;
}

Poly Poly::operator*(const Poly& o) const {
  check_compatible(*this, o);
  Poly out(vars_);
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : o.terms_) {
      Exponents e(ea.size());
      for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      out.set_coefficient(e, out.coefficient(e) + ca * cb);
    }
  return out;
}

bool Poly::operator==(const Poly& o) const {
  return vars_ == o.vars_ && terms_ == o.terms_;
}

std::string Poly::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Highest total degree first.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    if (!first) os << (c > 0 ? " + " : " - ");
    Rat ac = first ? c : Rat(abs(c));
    first = false;
    bool has_var = false;
    for (unsigned x : e) has_var = has_var || x > 0;
    if (!has_var || ac != 1) {
      os << ac.get_str();
      if (has_var) os << "*";
    }
    bool firstv = true;
    for (size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!firstv) os << "*";
      firstv = false;
      os << vars_[i];
      if (e[i] > 1) os << "^" << e[i];
    }
  }
  return os.str();
}

}  // namespace normct
