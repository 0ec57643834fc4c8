#include "normct/descent.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <tuple>

namespace normct {

namespace {

Rat rat_pow(const Rat& x, unsigned e) {
  Rat out(1);
  for (unsigned i = 0; i < e; ++i) out *= x;
  return out;
}

std::vector<Rat> field_pow(const QuadraticField& F, const std::vector<Rat>& z,
                           unsigned e) {
  std::vector<Rat> out{Rat(1), Rat(0)};
  for (unsigned i = 0; i < e; ++i) out = field_mul(F, out, z);
  return out;
}

}  // namespace

TorsorVariety::TorsorVariety(QuarticTorsorSpec spec, QuadForm g0, QuadForm g1,
                             QuadForm l0, QuadForm l1)
    : spec_(std::move(spec)),
      g0_(std::move(g0)),
      g1_(std::move(g1)),
      l0_(std::move(l0)),
      l1_(std::move(l1)) {}

bool TorsorVariety::on_torsor(const std::vector<Rat>& x,
                              const std::vector<Rat>& y) const {
  return g0_.eval(x) * l1_.eval(y) + g1_.eval(x) * l0_.eval(y) == Rat(-1);
}

std::pair<Rat, std::vector<Rat>> TorsorVariety::map_to_X(
    const std::vector<Rat>& x, const std::vector<Rat>& y) const {
  if (!on_torsor(x, y)) throw domain_error("map_to_X: point is not on the torsor");
  Rat t = g0_.eval(x) * l0_.eval(y) + spec_.tower.a() * g1_.eval(x) * l1_.eval(y);
  std::vector<Rat> z = field_mul(spec_.tower, field_mul(spec_.tower, spec_.xi, x), y);
  if (spec_.c * (t * t - spec_.tower.a()) != spec_.tower.norm(z))
    throw domain_error("map_to_X: image is not on X");
  return {t, z};
}

TorsorVariety build_quartic_torsor(const QuarticTorsorSpec& spec) {
  if (spec.xi.size() != 4) throw domain_error("build_quartic_torsor: xi has 4 coords");
  if (spec.c == 0) throw domain_error("build_quartic_torsor: c = 0");
  Rat nrho = spec.norm_rho();
  if (nrho == 0) throw domain_error("build_quartic_torsor: N_L(rho) = 0");
  if (spec.c * nrho != spec.tower.norm(spec.xi))
    throw domain_error("build_quartic_torsor: c * N_L(rho) != N_K(xi)");
  auto [g0, g1] = spec.tower.g_forms();
  auto [l0, l1] = lambda_forms(spec.tower, spec.rho0, spec.rho1);
  return TorsorVariety(spec, g0, g1, l0, l1);
}

FiberQuadric fiber_quadric(const TorsorVariety& Y, const std::vector<Rat>& y) {
  const QuarticTower& K = Y.spec().tower;
  Rat ny = K.norm(y);
  if (ny == 0) throw domain_error("fiber_quadric: N_K(y) = 0, degenerate fiber");
  const Rat &a = K.a(), &u = K.u(), &v = K.v();
  Rat l0 = Y.l0().eval(y), l1 = Y.l1().eval(y);

  FiberQuadric out;
  out.q0 = QuadForm({{l1, l0}, {l0, a * l1}});
  Rat p = -(u * l1 + v * l0), q = -(a * v * l1 + u * l0);
  out.q1 = QuadForm({{p, q}, {q, a * p}});
  out.q = out.q0.direct_sum(out.q1);

  out.disc0 = a * l1 * l1 - l0 * l0;
  out.disc1 = (u * u - a * v * v) * out.disc0;
  if (out.disc0 != -Y.spec().norm_rho() * ny || out.q0.det() != out.disc0 ||
      out.q1.det() != out.disc1)
    throw domain_error("fiber_quadric: discriminant identity failed");
  return out;
}

NoncompactReport fiber_real_noncompact(const TorsorVariety& Y,
                                       const std::vector<Rat>& y, bool v0_complex) {
  if (v0_complex) return {true, "complex place"};
  FiberQuadric f = fiber_quadric(Y, y);
  if (f.disc0 < 0 || f.disc1 < 0) return {true, "indefinite"};
  // Both blocks definite; the diagonal entries carry the signs.
  bool pos0 = f.q0.entry(0, 0) > 0, pos1 = f.q1.entry(0, 0) > 0;
  if (pos0 != pos1) return {true, "opposite definite"};
  if (pos0) return {false, "empty"};
  return {false, "compact"};
}

bool fiber_locally_soluble(const TorsorVariety& Y, const std::vector<Rat>& y,
                           const Int& p) {
  FiberQuadric f = fiber_quadric(Y, y);
  return represents_local(f.q, Rat(-1), Place::finite(p));
}

std::optional<SplitTorsorSpec> split_torsor_existence(const NormVariety& V,
                                                      unsigned height_bound) {
  const auto* sp = std::get_if<SplitSpec>(&V.poly());
  const auto* F = std::get_if<QuadraticField>(&V.field());
  if (!sp || !F)
    throw domain_error("split_torsor_existence: split spec over a quadratic field");
  size_t r = sp->factors.size();
  long H = height_bound;

  std::vector<Rat> cands;
  for (long h = 1; h <= H; ++h)
    for (long den = 1; den <= h; ++den)
      for (long num = 1; num <= h; ++num) {
        if (std::max(num, den) != h || gcd(Int(num), Int(den)) != 1) continue;
        Rat q(num, den);
        cands.push_back(q);
        cands.push_back(-q);
      }
  std::vector<std::pair<long, long>> xis;
  for (long x0 = -H; x0 <= H; ++x0)
    for (long x1 = -H; x1 <= H; ++x1) xis.emplace_back(x0, x1);
  auto key = [](const std::pair<long, long>& p) {
    return std::tuple(std::max(std::abs(p.first), std::abs(p.second)),
                      std::abs(p.second), p.second < 0, std::abs(p.first),
                      p.first < 0);
  };
  std::sort(xis.begin(), xis.end(),
            [&](const auto& a, const auto& b) { return key(a) < key(b); });

  std::optional<SplitTorsorSpec> hit;
  std::vector<size_t> idx(r);
  auto try_tuple = [&]() {
    Rat target = sp->c;
    for (size_t i = 0; i < r; ++i)
      target *= rat_pow(cands[idx[i]], sp->factors[i].exponent);
    if (F->imaginary() && target <= 0) return false;
    for (const auto& [x0, x1] : xis) {
      if (F->norm(Rat(x0), Rat(x1)) != target) continue;
      SplitTorsorSpec spec;
      for (size_t i = 0; i < r; ++i) spec.lambdas.push_back(cands[idx[i]]);
      spec.xi = {Rat(x0), Rat(x1)};
      hit = spec;
      return true;
    }
    return false;
  };
  // Shells by the largest candidate index used, lexicographic within.
  for (size_t shell = 0; shell < cands.size(); ++shell) {
    std::function<bool(size_t, bool)> walk = [&](size_t pos, bool touched) -> bool {
      if (pos == r) return touched && try_tuple();
      for (size_t i = 0; i <= shell; ++i) {
        idx[pos] = i;
        if (walk(pos + 1, touched || i == shell)) return true;
      }
      return false;
    };
    if (walk(0, false)) return hit;
  }
  return std::nullopt;
}

SplitTorsor::SplitTorsor(NormVariety V, SplitTorsorSpec spec)
    : V_(std::move(V)), spec_(std::move(spec)) {}

bool SplitTorsor::on_torsor(const std::vector<Rat>& t,
                            const std::vector<std::vector<Rat>>& zs) const {
  const auto& sp = std::get<SplitSpec>(V_.poly());
  const auto& F = std::get<QuadraticField>(V_.field());
  if (zs.size() != sp.factors.size()) return false;
  for (size_t i = 0; i < zs.size(); ++i)
    if (spec_.lambdas[i] * F.norm(zs[i][0], zs[i][1]) != sp.factors[i].g.eval(t))
      return false;
  return true;
}

std::pair<std::vector<Rat>, std::vector<Rat>> SplitTorsor::map_to_X(
    const std::vector<Rat>& t, const std::vector<std::vector<Rat>>& zs) const {
  if (!on_torsor(t, zs)) throw domain_error("map_to_X: point is not on the torsor");
  const auto& sp = std::get<SplitSpec>(V_.poly());
  const auto& F = std::get<QuadraticField>(V_.field());
  std::vector<Rat> z = spec_.xi;
  for (size_t i = 0; i < zs.size(); ++i)
    z = field_mul(F, z, field_pow(F, zs[i], sp.factors[i].exponent));
  if (V_.eval_P(t) != F.norm(z[0], z[1]))
    throw domain_error("map_to_X: image is not on X");
  return {t, z};
}

SplitTorsor build_split_torsor(const NormVariety& V, const SplitTorsorSpec& spec) {
  const auto* sp = std::get_if<SplitSpec>(&V.poly());
  const auto* F = std::get_if<QuadraticField>(&V.field());
  if (!sp || !F)
    throw domain_error("build_split_torsor: split spec over a quadratic field");
  if (spec.lambdas.size() != sp->factors.size())
    throw domain_error("build_split_torsor: one lambda per factor");
  if (spec.xi.size() != 2) throw domain_error("build_split_torsor: xi has 2 coords");
  Rat target = sp->c;
  for (size_t i = 0; i < spec.lambdas.size(); ++i) {
    if (spec.lambdas[i] == 0) throw domain_error("build_split_torsor: lambda = 0");
    target *= rat_pow(spec.lambdas[i], sp->factors[i].exponent);
  }
  if (F->norm(spec.xi[0], spec.xi[1]) != target)
    throw domain_error("build_split_torsor: c * prod lambda^e != N(xi)");
  return SplitTorsor(V, spec);
}

}  // namespace normct
