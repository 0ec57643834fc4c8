#include "normct/counting.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>

namespace normct {

namespace {

constexpr int kZDim = 2;  // z-coordinates per factor

struct NormCoeffs {
  long long B, C;  // N(x, y) = x^2 + Bxy + Cy^2, positive definite
};

NormCoeffs norm_coeffs(const QuadraticField& K) {
  long long d = K.d().get_si();
  if (K.basis_mode() == BasisMode::Power) return {0, -d};
  return {1, (1 - d) / 4};
}

long long isqrt_ll(long long v) {
  if (v < 0) return -1;
  auto r = static_cast<long long>(std::sqrt(static_cast<double>(v)));
  while (r > 0 && r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

long long fdiv_ll(long long a, long long b) {
  long long q = a / b, r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}

long long cdiv_ll(long long a, long long b) { return -fdiv_ll(-a, b); }

long long mod_ll(long long a, long long m) { return ((a % m) + m) % m; }

long long rat_floor(Rat q) {
  q.canonicalize();
  Int f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return f.get_si();
}

long long rat_ceil(Rat q) {
  q.canonicalize();
  Int f;
  mpz_cdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return f.get_si();
}

// Visits every z = (x, y) with 0 <= N(z) <= X and z = z' mod M.
template <class F>
void for_norm_points(const QuadraticField& K, long long X, long long M,
                     long long z0, long long z1, F&& fn) {
  if (X < 0) return;
  auto [B, C] = norm_coeffs(K);
  long long denom = 4 * C - B * B;
  long long ylim = isqrt_ll(4 * X / denom);
  for (long long y = -ylim + mod_ll(z1 + ylim, M); y <= ylim; y += M) {
    long long D = 4 * X - denom * y * y;
    if (D < 0) continue;
    long long sD = isqrt_ll(D);
    long long xlo = cdiv_ll(-B * y - sD, 2), xhi = fdiv_ll(-B * y + sD, 2);
    for (long long x = xlo + mod_ll(z0 - xlo, M); x <= xhi; x += M)
      fn(x, y, x * x + B * x * y + C * y * y);
  }
}

struct LinearForm {
  long long c0;
  std::vector<long long> a;
};

LinearForm linear_form(const Poly& f, size_t s) {
  std::vector<Rat> zero(s, Rat(0));
  Rat c0 = f.eval(zero);
  LinearForm out;
  out.c0 = 0;
  if (f.total_degree() > 1) throw domain_error("counting: f_i must be linear");
  for (size_t j = 0; j < s; ++j) {
    std::vector<Rat> e = zero;
    e[j] = Rat(1);
    Rat aj = f.eval(e) - c0;
    aj.canonicalize();
    if (aj.get_den() != 1) throw domain_error("counting: f_i must have integer coefficients");
    out.a.push_back(Int(aj.get_num()).get_si());
  }
  Rat c = c0;
  c.canonicalize();
  if (c.get_den() != 1) throw domain_error("counting: f_i must have integer coefficients");
  out.c0 = Int(c.get_num()).get_si();
  return out;
}

}  // namespace

void validate_problem(const CountingProblem& prob) {
  if (!prob.field.imaginary())
    throw domain_error("counting: field must be imaginary quadratic");
  size_t s = prob.s(), r = prob.r();
  if (s < 2) throw domain_error("counting: s >= 2 required");
  if (r == 0) throw domain_error("counting: at least one linear form");
  if (prob.t_prime.size() != s || prob.z_prime.size() != r)
    throw domain_error("counting: residue data sized to s and r");
  for (const auto& z : prob.z_prime)
    if (z.size() != kZDim) throw domain_error("counting: z' has 2 coords");
  if (prob.M < 1) throw domain_error("counting: M >= 1");
  for (const auto& [lo, hi] : prob.box)
    if (lo > hi || lo < -1 || hi > 1) throw domain_error("counting: box inside [-1, 1]");

  std::vector<LinearForm> forms;
  for (const Poly& f : prob.f) forms.push_back(linear_form(f, s));
  for (size_t i = 0; i < r; ++i) {
    bool nonzero = false;
    for (long long aj : forms[i].a) nonzero = nonzero || aj != 0;
    if (!nonzero) throw domain_error("counting: f_i must be non-constant");
    for (size_t j = i + 1; j < r; ++j) {
      bool independent = false;
      for (size_t k = 0; k < s && !independent; ++k)
        for (size_t l = k + 1; l < s && !independent; ++l)
          independent = forms[i].a[k] * forms[j].a[l] != forms[i].a[l] * forms[j].a[k];
      if (!independent)
        throw domain_error("counting: f_i pairwise affinely independent");
    }
  }
  // Closure of the box must sit inside {0 < f_i(t) - f_i(0) < 1}:
  // linear forms take their extrema at the vertices.
  for (const auto& form : forms)
    for (size_t mask = 0; mask < (size_t(1) << s); ++mask) {
      Rat lin(0);
      for (size_t j = 0; j < s; ++j)
        lin += Rat(static_cast<long>(form.a[j])) *
               (mask >> j & 1 ? prob.box[j].second : prob.box[j].first);
      if (lin <= 0 || lin >= 1)
        throw domain_error("counting: box must satisfy 0 < f_i(t) - f_i(0) < 1");
    }
}

Int rep_count(const QuadraticField& K, const Int& m, const std::vector<Int>& z_prime,
              const Int& M) {
  if (z_prime.size() != kZDim) throw domain_error("rep_count: z' has 2 coords");
  if (M < 1) throw domain_error("rep_count: M >= 1");
  if (m <= 0) return 0;
  if (!m.fits_slong_p()) throw budget_exceeded("rep_count: m too large");

  using Key = std::tuple<long, int, long long, long long, long long, long long>;
  static std::map<Key, long long> memo;
  long long mm = m.get_si(), MM = M.get_si();
  long long z0 = mod_ll(z_prime[0].get_si(), MM), z1 = mod_ll(z_prime[1].get_si(), MM);
  Key key{K.d().get_si(), K.basis_mode() == BasisMode::Power ? 0 : 1, mm, MM, z0, z1};
  auto it = memo.find(key);
  if (it != memo.end()) return Int(static_cast<long>(it->second));

  long long count = 0;
  for_norm_points(K, mm, MM, z0, z1, [&](long long, long long, long long N) {
    if (N == mm) ++count;
  });
  memo.emplace(key, count);
  return Int(static_cast<long>(count));
}

Int count_N(const CountingProblem& prob, const Int& T, uint64_t budget) {
  validate_problem(prob);
  if (T < 1) throw domain_error("count_N: T >= 1");
  size_t s = prob.s(), r = prob.r();
  long long M = prob.M.get_si();

  std::vector<long long> lo(s), hi(s);
  uint64_t grid = 1;
  for (size_t j = 0; j < s; ++j) {
    lo[j] = rat_ceil(prob.box[j].first * Rat(T));
    hi[j] = rat_floor(prob.box[j].second * Rat(T));
    lo[j] += mod_ll(prob.t_prime[j].get_si() - lo[j], M);
    if (lo[j] > hi[j]) return Int(0);
    grid *= static_cast<uint64_t>((hi[j] - lo[j]) / M + 1);
  }
  if (grid > budget / (r + 1)) throw budget_exceeded("count_N: lattice box too large");

  std::vector<LinearForm> forms;
  for (const Poly& f : prob.f) forms.push_back(linear_form(f, s));

  std::vector<std::vector<int32_t>> tables;
  for (size_t i = 0; i < r; ++i) {
    long long maxval = forms[i].c0;
    for (size_t j = 0; j < s; ++j)
      maxval += std::max(forms[i].a[j] * lo[j], forms[i].a[j] * hi[j]);
    maxval = std::max(maxval, 0LL);
    if (static_cast<uint64_t>(maxval) > budget / 8)
      throw budget_exceeded("count_N: representation table too large");
    std::vector<int32_t> tab(maxval + 1, 0);
    for_norm_points(prob.field, maxval, M, prob.z_prime[i][0].get_si(),
                    prob.z_prime[i][1].get_si(), [&](long long, long long, long long N) {
                      if (N > 0) ++tab[N];
                    });
    tables.push_back(std::move(tab));
  }

  Int total(0);
  std::vector<long long> t = lo;
  for (;;) {
    long long prod = 1;
    for (size_t i = 0; i < r && prod != 0; ++i) {
      long long val = forms[i].c0;
      for (size_t j = 0; j < s; ++j) val += forms[i].a[j] * t[j];
      prod *= val > 0 && val < static_cast<long long>(tables[i].size())
                  ? tables[i][val]
                  : 0;
    }
    if (prod != 0) total += static_cast<long>(prod);
    size_t j = 0;
    while (j < s && (t[j] += M) > hi[j]) t[j++] = lo[j];
    if (j == s) break;
  }
  return total;
}

Int rho_count(const QuadraticField& K, const Int& p, unsigned m, const Int& A,
              const std::vector<Int>& z_prime, unsigned e, uint64_t budget) {
  if (z_prime.size() != kZDim) throw domain_error("rho_count: z' has 2 coords");
  Place::finite(p);  // validates primality
  if (m < e) throw domain_error("rho_count: m >= e required");
  long long pp = p.get_si();
  double cost = std::pow(static_cast<double>(pp), 2.0 * (m - e));
  if (cost > static_cast<double>(budget)) throw budget_exceeded("rho_count: p^m too large");

  long long pm = 1;
  for (unsigned i = 0; i < m; ++i) pm *= pp;
  long long pe = 1;
  for (unsigned i = 0; i < e; ++i) pe *= pp;
  long long count_per = pm / pe;
  auto [B, C] = norm_coeffs(K);
  long long target = mod_ll(Int(mod_floor(A, Int(static_cast<long>(pm)))).get_si(), pm);
  long long z0 = mod_ll(z_prime[0].get_si(), pe), z1 = mod_ll(z_prime[1].get_si(), pe);

  long long count = 0;
  for (long long k0 = 0; k0 < count_per; ++k0) {
    long long x = z0 + pe * k0;
    for (long long k1 = 0; k1 < count_per; ++k1) {
      long long y = z1 + pe * k1;
      auto N = static_cast<long long>(
          (static_cast<__int128>(x) * x + static_cast<__int128>(B) * x * y +
           static_cast<__int128>(C) * y * y) %
          pm);
      if (mod_ll(N, pm) == target) ++count;
    }
  }
  return Int(static_cast<long>(count));
}

unsigned stabilization_threshold(const CountingProblem& prob, const Int& p) {
  validate_problem(prob);
  long e = valuation(prob.M, p);
  long vmax = 0;
  // t' only matters through its class mod p^e.
  for (const Poly& f : prob.f) {
    if (e == 0) break;
    std::vector<Rat> tp;
    for (const Int& c : prob.t_prime) tp.emplace_back(c);
    Rat val = f.eval(tp);
    if (val == 0) throw domain_error("beta_p: f_i(t') = 0");
    vmax = std::max(vmax, valuation(val, p));
  }
  long v2 = p == 2 ? 1 : 0;  // v_p of n = 2
  return static_cast<unsigned>(2 * (e + vmax + v2) + 1);
}

BetaResult beta_p(const CountingProblem& prob, const Int& p, unsigned m_max) {
  unsigned m_min = stabilization_threshold(prob, p);  // also validates
  if (m_max < m_min) throw domain_error("beta_p: m_max below the stabilization threshold");
  size_t s = prob.s(), r = prob.r();
  long e = valuation(prob.M, p);
  long long pp = p.get_si();

  std::vector<LinearForm> forms;
  for (const Poly& f : prob.f) forms.push_back(linear_form(f, s));

  BetaResult out;
  Rat prev;
  bool have_prev = false;
  for (unsigned m = std::max<unsigned>(e, 1); m <= m_max; ++m) {
    double zcost = std::pow(static_cast<double>(pp), 2.0 * (m - e));
    double tcost = std::pow(static_cast<double>(pp), static_cast<double>((m - e) * s));
    if (zcost > 2e8 || tcost > 2e8) break;

    long long pm = 1;
    for (unsigned i = 0; i < m; ++i) pm *= pp;
    long long pe = 1;
    for (long i = 0; i < e; ++i) pe *= pp;
    long long per = pm / pe;

    auto [B, C] = norm_coeffs(prob.field);
    std::vector<std::vector<long long>> rho(r);
    for (size_t i = 0; i < r; ++i) {
      rho[i].assign(pm, 0);
      long long z0 = mod_ll(prob.z_prime[i][0].get_si(), pe);
      long long z1 = mod_ll(prob.z_prime[i][1].get_si(), pe);
      for (long long k0 = 0; k0 < per; ++k0) {
        long long x = z0 + pe * k0;
        for (long long k1 = 0; k1 < per; ++k1) {
          long long y = z1 + pe * k1;
          auto N = static_cast<long long>(
              (static_cast<__int128>(x) * x + static_cast<__int128>(B) * x * y +
               static_cast<__int128>(C) * y * y) %
              pm);
          ++rho[i][mod_ll(N, pm)];
        }
      }
    }

    Int sum(0);
    __int128 chunk = 0;
    std::vector<long long> k(s, 0);
    std::vector<long long> t(s);
    for (;;) {
      for (size_t j = 0; j < s; ++j)
        t[j] = mod_ll(prob.t_prime[j].get_si(), pe) + pe * k[j];
      __int128 prod = 1;
      for (size_t i = 0; i < r && prod != 0; ++i) {
        long long val = forms[i].c0;
        for (size_t j = 0; j < s; ++j) val += forms[i].a[j] * t[j];
        prod *= rho[i][mod_ll(val, pm)];
      }
      chunk += prod;
      if (chunk > (static_cast<__int128>(1) << 100)) {
        unsigned long long words[2] = {static_cast<unsigned long long>(chunk),
                                       static_cast<unsigned long long>(chunk >> 64)};
        Int big;
        mpz_import(big.get_mpz_t(), 2, -1, 8, 0, 0, words);
        sum += big;
        chunk = 0;
      }
      size_t j = 0;
      while (j < s && ++k[j] == per) k[j++] = 0;
      if (j == s) break;
    }
    {
      unsigned long long words[2] = {static_cast<unsigned long long>(chunk),
                                     static_cast<unsigned long long>(chunk >> 64)};
      Int big;
      mpz_import(big.get_mpz_t(), 2, -1, 8, 0, 0, words);
      sum += big;
    }

    Rat approx(sum, pow_int(p, m * (s + r)));
    approx.canonicalize();
    out.value = approx;
    out.m_used = m;
    if (have_prev && approx == prev) {
      out.stabilized = true;
      return out;
    }
    prev = approx;
    have_prev = true;
  }
  return out;
}

CkCalibration calibrate_ck(const QuadraticField& K, const Int& T_cal) {
  if (!K.imaginary()) throw domain_error("calibrate_ck: field must be imaginary");
  if (T_cal < 1 || !T_cal.fits_slong_p())
    throw domain_error("calibrate_ck: T_cal out of range");
  long long T = T_cal.get_si();

  long long count = 0;
  for_norm_points(K, T, 1, 0, 0, [&](long long, long long, long long N) {
    if (N > 0) ++count;
  });

  // Error band from the boundary ellipse: semi-axes sqrt(T / lambda) for
  // the Gram eigenvalues lambda.
  auto [B, C] = norm_coeffs(K);
  double tr = 1.0 + C, det = C - B * B / 4.0;
  double disc = std::sqrt(tr * tr - 4 * det);
  double lmin = (tr - disc) / 2, lmax = (tr + disc) / 2;
  double a = std::sqrt(T / lmin), b = std::sqrt(T / lmax);
  auto err_num = static_cast<long>(std::ceil(4 * M_PI * (a + b)));

  Rat mid(Int(static_cast<long>(count)), T_cal);
  Rat err(Int(err_num), T_cal);
  mid.canonicalize();
  err.canonicalize();
  CkCalibration out;
  out.lo = mid - err;
  out.hi = mid + err;
  out.confident = err * 20 < mid;
  return out;
}

std::pair<Rat, Rat> beta_infinity(const CountingProblem& prob) {
  validate_problem(prob);
  if (!prob.field.ck_interval)
    throw domain_error("beta_infinity: calibrate c_K first");
  Rat vol(1);
  for (const auto& [lo, hi] : prob.box) vol *= hi - lo;
  auto [clo, chi] = *prob.field.ck_interval;
  Rat plo(1), phi(1);
  for (size_t i = 0; i < prob.r(); ++i) {
    plo *= clo;
    phi *= chi;
  }
  return {vol * plo, vol * phi};
}

DensityReport verify_asymptotic(CountingProblem prob, const std::vector<Int>& T_list,
                                const Int& P_max) {
  validate_problem(prob);
  if (!prob.field.ck_interval) {
    CkCalibration ck = calibrate_ck(prob.field, Int(1000000));
    prob.field.ck_interval = {{ck.lo, ck.hi}};
  }

  DensityReport report;
  report.P_max = P_max;
  report.beta_inf = beta_infinity(prob);

  Rat product(1);
  for (Int p(2); p <= P_max; ++p) {
    if (!is_prime(p)) continue;
    BetaResult b = beta_p(prob, p, stabilization_threshold(prob, p) + 4);
    report.beta_p[p] = b.value;
    report.beta_p_stable[p] = b.stabilized;
    product *= b.value;
  }

  bool any_points = false;
  for (const Int& T : T_list) {
    Int N = count_N(prob, T);
    report.N_samples[T] = N;
    any_points = any_points || N != 0;
    Rat Ts(1);
    for (size_t j = 0; j < prob.s(); ++j) Ts *= Rat(T);
    Rat dlo = report.beta_inf.first * product * Ts;
    Rat dhi = report.beta_inf.second * product * Ts;
    if (dlo <= 0 || dhi <= 0) continue;
    Rat rlo = Rat(N) / dhi, rhi = Rat(N) / dlo;
    rlo.canonicalize();
    rhi.canonicalize();
    report.ratios[T] = {rlo, rhi};
  }
  report.empty_box = !any_points;
  if (!report.ratios.empty()) {
    auto [rlo, rhi] = report.ratios.rbegin()->second;
    Rat mid = (rlo + rhi) / 2;
    report.converging = mid > Rat(9, 10) && mid < Rat(11, 10);
  }
  return report;
}

std::string report_csv(const DensityReport& report) {
  std::string out = "T,N,beta_inf_lo,beta_inf_hi,beta_product,ratio_lo,ratio_hi\n";
  Rat product(1);
  for (const auto& [p, b] : report.beta_p) product *= b;
  char buf[256];
  for (const auto& [T, N] : report.N_samples) {
    Rat rlo(0), rhi(0);
    auto it = report.ratios.find(T);
    if (it != report.ratios.end()) {
      rlo = it->second.first;
      rhi = it->second.second;
    }
    std::snprintf(buf, sizeof(buf), "%s,%s,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                  T.get_str().c_str(), N.get_str().c_str(),
                  report.beta_inf.first.get_d(), report.beta_inf.second.get_d(),
                  product.get_d(), rlo.get_d(), rhi.get_d());
    out += buf;
  }
  return out;
}

}  // namespace normct
