#include "normct/quadform.hpp"

#include <algorithm>
#include <set>

namespace normct {

QuadForm::QuadForm(std::vector<std::vector<Rat>> gram) : gram_(std::move(gram)) {
  size_t n = gram_.size();
  for (const auto& row : gram_)
    if (row.size() != n) throw domain_error("QuadForm: matrix not square");
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      if (gram_[i][j] != gram_[j][i]) throw domain_error("QuadForm: matrix not symmetric");
}

QuadForm QuadForm::diagonal(const std::vector<Rat>& entries) {
  size_t n = entries.size();
  std::vector<std::vector<Rat>> g(n, std::vector<Rat>(n, Rat(0)));
  for (size_t i = 0; i < n; ++i) g[i][i] = entries[i];
  return QuadForm(g);
}

Rat QuadForm::eval(const std::vector<Rat>& x) const {
  if (x.size() != dim()) throw domain_error("QuadForm::eval: arity mismatch");
  Rat acc = 0;
  for (size_t i = 0; i < dim(); ++i)
    for (size_t j = 0; j < dim(); ++j) acc += gram_[i][j] * x[i] * x[j];
  return acc;
}

Rat QuadForm::det() const {
  // Fraction-free style Gaussian elimination on a rational copy.
  auto m = gram_;
  size_t n = m.size();
  Rat d = 1;
  for (size_t i = 0; i < n; ++i) {
    size_t piv = i;
    while (piv < n && m[piv][i] == 0) ++piv;
    if (piv == n) return Rat(0);
    if (piv != i) {
      std::swap(m[piv], m[i]);
      d = -d;
    }
    d *= m[i][i];
    for (size_t r = i + 1; r < n; ++r) {
      Rat f = m[r][i] / m[i][i];
      for (size_t c = i; c < n; ++c) m[r][c] -= f * m[i][c];
    }
  }
  return d;
}

QuadForm QuadForm::direct_sum(const QuadForm& o) const {
  size_t n = dim(), m = o.dim();
  std::vector<std::vector<Rat>> g(n + m, std::vector<Rat>(n + m, Rat(0)));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) g[i][j] = gram_[i][j];
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < m; ++j) g[n + i][n + j] = o.gram_[i][j];
  return QuadForm(g);
}

QuadForm QuadForm::extend_diagonal(const Rat& c) const {
  return direct_sum(QuadForm::diagonal({c}));
}

namespace {

int hilbert_sign(const Rat& a, const Rat& b, const Place& v) {
  if (a == 0 || b == 0) throw domain_error("hilbert_symbol: zero argument");
  if (v.is_infinite()) return (a < 0 && b < 0) ? -1 : 1;
  const Int& p = v.prime();
  long alpha = valuation(a, p), beta = valuation(b, p);
  if (p == 2) {
    Int u = unit_mod(a, p, 3), w = unit_mod(b, p, 3);
    auto eps = [](const Int& x) { return ((x - 1) / 2) % 2 != 0; };     // (x-1)/2 mod 2
    auto omega = [](const Int& x) { return ((x * x - 1) / 8) % 2 != 0; };  // (x^2-1)/8 mod 2
    bool neg = (eps(u) && eps(w)) ^ ((alpha % 2 != 0) && omega(w)) ^
               ((beta % 2 != 0) && omega(u));
    return neg ? -1 : 1;
  }
  Int u = unit_mod(a, p, 1), w = unit_mod(b, p, 1);
  int s = 1;
  if (beta % 2 != 0) s *= legendre(u, p);
  if (alpha % 2 != 0) s *= legendre(w, p);
  if (alpha % 2 != 0 && beta % 2 != 0 && legendre(Int(-1), p) == -1) s = -s;
  return s;
}

}  // namespace

InvariantValue hilbert_symbol(const Rat& a, const Rat& b, const Place& v) {
  return hilbert_sign(a, b, v) == 1 ? InvariantValue::zero() : InvariantValue::half();
}

std::vector<Rat> diagonalize(const QuadForm& q) {
  auto g = q.gram();
  size_t n = g.size();
  for (size_t i = 0; i < n; ++i) {
    if (g[i][i] == 0) {
      // Bring a nonzero entry onto the diagonal: swap with a later
      // diagonal entry, or mix in a row with a nonzero off-diagonal.
      size_t piv = n;
      for (size_t j = i + 1; j < n; ++j)
        if (g[j][j] != 0) {
          piv = j;
          break;
        }
      if (piv < n) {
        std::swap(g[i], g[piv]);
        for (auto& row : g) std::swap(row[i], row[piv]);
      } else {
        size_t k = n;
        for (size_t j = i + 1; j < n; ++j)
          if (g[i][j] != 0) {
            k = j;
            break;
          }
        if (k == n) continue;  // zero row: degenerate part
        // basis change x_i := x_i + x_k makes the new (i,i) entry 2*g[i][k]
        for (size_t c = 0; c < n; ++c) g[i][c] += g[k][c];
        for (size_t r = 0; r < n; ++r) g[r][i] += g[r][k];
      }
    }
    if (g[i][i] == 0) continue;
    for (size_t r = i + 1; r < n; ++r) {
      Rat f = g[r][i] / g[i][i];
      if (f == 0) continue;
      for (size_t c = 0; c < n; ++c) g[r][c] -= f * g[i][c];
      for (size_t c = 0; c < n; ++c) g[c][r] -= f * g[c][i];
    }
  }
  std::vector<Rat> out(n);
  for (size_t i = 0; i < n; ++i) {
    if (g[i][i] == 0) throw domain_error("diagonalize: degenerate form");
    out[i] = g[i][i];
  }
  return out;
}

InvariantValue hasse_invariant(const std::vector<Rat>& diag, const Place& v) {
  InvariantValue acc;
  for (size_t i = 0; i < diag.size(); ++i) {
    if (diag[i] == 0) throw domain_error("hasse_invariant: zero entry");
    for (size_t j = i + 1; j < diag.size(); ++j)
      acc += hilbert_symbol(diag[i], diag[j], v);
  }
  return acc;
}

std::pair<int, int> signature(const QuadForm& q) {
  int np = 0, nm = 0;
  for (const Rat& d : diagonalize(q)) {
    if (d > 0)
      ++np;
    else
      ++nm;
  }
  return {np, nm};
}

bool is_isotropic_local(const QuadForm& q, const Place& v) {
  if (!q.nondegenerate()) throw domain_error("is_isotropic_local: degenerate form");
  size_t n = q.dim();
  if (n <= 1) return false;
  if (v.is_infinite()) {
    auto [np, nm] = signature(q);
    return np > 0 && nm > 0;
  }
  std::vector<Rat> diag = diagonalize(q);
  Rat d = 1;
  for (const Rat& e : diag) d *= e;
  if (n == 2) return is_square_in_Qp(-d, v);
  InvariantValue eps = hasse_invariant(diag, v);
  if (n == 3) return hilbert_symbol(Rat(-1), -d, v) == eps;
  if (n == 4) {
    bool aniso =
        is_square_in_Qp(d, v) && !(eps == hilbert_symbol(Rat(-1), Rat(-1), v));
    return !aniso;
  }
  return true;  // rank >= 5 over Q_p
}

bool represents_local(const QuadForm& q, const Rat& c, const Place& v) {
  if (c == 0) throw domain_error("represents_local: c = 0");
  return is_isotropic_local(q.extend_diagonal(-c), v);
}

namespace {

// Integer Gram matrix scaled by the positive lcm of denominators.
std::vector<std::vector<Int>> integer_gram(const QuadForm& q, Int& scale) {
  scale = 1;
  for (const auto& row : q.gram())
    for (const Rat& e : row) {
      Int d(e.get_den());
      Int g;
      mpz_gcd(g.get_mpz_t(), scale.get_mpz_t(), d.get_mpz_t());
      scale = scale / g * d;
    }
  std::vector<std::vector<Int>> m(q.dim(), std::vector<Int>(q.dim()));
  for (size_t i = 0; i < q.dim(); ++i)
    for (size_t j = 0; j < q.dim(); ++j) {
      Rat s = q.entry(i, j) * Rat(scale);
      m[i][j] = Int(s.get_num());
    }
  return m;
}

Int eval_int(const std::vector<std::vector<Int>>& g, const std::vector<Int>& x) {
  Int acc = 0;
  for (size_t i = 0; i < g.size(); ++i)
    for (size_t j = 0; j < g.size(); ++j) acc += g[i][j] * x[i] * x[j];
  return acc;
}

std::vector<Int> gradient_int(const std::vector<std::vector<Int>>& g,
                              const std::vector<Int>& x) {
  std::vector<Int> out(g.size(), Int(0));
  for (size_t i = 0; i < g.size(); ++i)
    for (size_t j = 0; j < g.size(); ++j) out[i] += 2 * g[i][j] * x[j];
  return out;
}

bool lift_certificate(const std::vector<std::vector<Int>>& g,
                      const std::vector<Int>& x, const Int& p, unsigned k) {
  // Newton condition: some gradient entry with v_p = e and k >= 2e+1.
  for (const Int& ge : gradient_int(g, x)) {
    if (ge == 0) continue;
    long e = valuation(ge, p);
    if (k >= 2 * static_cast<unsigned>(e) + 1) return true;
  }
  return false;
}

}  // namespace

bool isotropic_by_enumeration(const QuadForm& q, const Int& p, unsigned kmax) {
  Int scale;
  auto g = integer_gram(q, scale);
  size_t n = g.size();

  // Strip the content: isotropy is invariant under nonzero scaling, and
  // a p-divisible content would make every residue a spurious solution.
  Int content = 0;
  for (const auto& row : g)
    for (const Int& e : row) mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), e.get_mpz_t());
  if (content > 1)
    for (auto& row : g)
      for (Int& e : row) e /= content;

  // Primitive solutions mod p, then level-by-level lifting. A certified
  // witness (Newton-liftable) decides isotropy; an empty survivor set
  // decides anisotropy.
  std::vector<std::vector<Int>> level;
  {
    std::vector<Int> x(n, Int(0));
    for (;;) {
      bool zero = std::all_of(x.begin(), x.end(), [](const Int& c) { return c == 0; });
      if (!zero && mod_floor(eval_int(g, x), p) == 0) level.push_back(x);
      size_t i = 0;
      while (i < n && ++x[i] == p) x[i++] = 0;
      if (i == n) break;
    }
  }
  for (unsigned k = 1; k <= kmax; ++k) {
    if (level.empty()) return false;
    for (const auto& x : level)
      if (lift_certificate(g, x, p, k)) return true;
    if (k == kmax) break;
    Int pk1 = pow_int(p, k + 1), step = pow_int(p, k);
    std::vector<std::vector<Int>> next;
    for (const auto& x : level) {
      std::vector<Int> d(n, Int(0));
      for (;;) {
        std::vector<Int> y(n);
        for (size_t i = 0; i < n; ++i) y[i] = x[i] + d[i] * step;
        if (mod_floor(eval_int(g, y), pk1) == 0) next.push_back(y);
        size_t i = 0;
        while (i < n && ++d[i] == p) d[i++] = 0;
        if (i == n) break;
      }
      if (next.size() > 2000000)
        throw budget_exceeded("isotropic_by_enumeration: survivor set too large");
    }
    level = std::move(next);
  }
  throw budget_exceeded("isotropic_by_enumeration: undecided at depth kmax");
}

}  // namespace normct
