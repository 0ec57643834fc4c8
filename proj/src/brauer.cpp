#include "normct/brauer.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace normct {

namespace {

struct SplitData {
  const SplitSpec* sp;
  Rat d;
  std::vector<Rat> roots;       // a_i, aligned with factors
  std::vector<unsigned> exps;   // e_i
  Rat C;                        // leading constant: P = C * prod (t-a_i)^{e_i}
  std::vector<std::string> var; // the t variable list
};

SplitData split_data(const NormVariety& V) {
  const auto* sp = std::get_if<SplitSpec>(&V.poly());
  if (!sp || sp->s != 1)
    throw domain_error("brauer: requires a split spec in one variable");
  SplitData sd;
  sd.sp = sp;
  sd.d = V.field_d();
  sd.roots = V.split_roots();
  sd.C = sp->c;
  sd.var = sp->factors.empty() ? std::vector<std::string>{"t"}
                               : sp->factors.front().g.vars();
  for (size_t i = 0; i < sp->factors.size(); ++i) {
    sd.exps.push_back(sp->factors[i].exponent);
    Rat lead = sp->factors[i].g.coefficient({1});
    for (unsigned k = 0; k < sp->factors[i].exponent; ++k) sd.C *= lead;
  }
  for (size_t i = 0; i < sd.roots.size(); ++i)
    for (size_t j = i + 1; j < sd.roots.size(); ++j)
      if (sd.roots[i] == sd.roots[j])
        throw domain_error("brauer: roots must be pairwise distinct");
  return sd;
}

Poly monic_linear(const Rat& a, const std::vector<std::string>& var) {
  return Poly::variable(0, var) - Poly::constant(a, var);
}

QuaternionClass make_class(const SplitData& sd, size_t i) {
  QuaternionClass beta;
  beta.numerator = monic_linear(sd.roots[i], sd.var);
  beta.d = sd.d;
  Poly comp = Poly::constant(sd.C, sd.var);
  for (size_t j = 0; j < sd.roots.size(); ++j) {
    unsigned e = sd.exps[j] - (j == i ? 1 : 0);
    for (unsigned k = 0; k < e; ++k) comp = comp * monic_linear(sd.roots[j], sd.var);
  }
  beta.complement = comp;
  return beta;
}

// Symbol (value, d) at a finite place from an approximate value known
// modulo p^m: the unit part must be determined by the approximation.
InvariantValue symbol_from_approx(const Rat& value, const Rat& d, const Int& p,
                                  unsigned m) {
  long v = valuation(value, p);
  long vd = valuation(Rat(4) * d, p);
  if (static_cast<long>(m) <= v + vd)
    throw domain_error("local_invariant: insufficient precision at p=" + p.get_str());
  return hilbert_symbol(value, d, Place::finite(p));
}

InvariantValue invariant_of_value(const QuaternionClass& beta, const Rat& t,
                                  const Place& v) {
  Rat f = beta.numerator.eval({t});
  if (f != 0) return hilbert_symbol(f, beta.d, v);
  Rat g = beta.complement.eval({t});
  if (g == 0)
    throw domain_error("local_invariant: both representatives vanish");
  return hilbert_symbol(g, beta.d, v);
}

}  // namespace

std::vector<QuaternionClass> standard_generators(const NormVariety& V) {
  SplitData sd = split_data(V);
  std::vector<QuaternionClass> out;
  if (sd.roots.empty()) return out;
  for (size_t i = 0; i + 1 < sd.roots.size(); ++i) out.push_back(make_class(sd, i));
  return out;
}

InvariantValue local_invariant(const NormVariety& V, const QuaternionClass& beta,
                               const LocalPoint& q) {
  (void)V;
  if (q.place.is_infinite()) return invariant_of_value(beta, q.t_real[0], q.place);
  const Int& p = q.place.prime();
  unsigned m = q.precision;
  Rat t(q.t_res.at(0));
  Rat f = beta.numerator.eval({t});
  if (f != 0 && valuation(f, p) < static_cast<long>(m))
    return symbol_from_approx(f, beta.d, p, m);
  // f(t) vanishes to working precision: use P(t)/f(t).
  Rat g = beta.complement.eval({t});
  if (g == 0 || valuation(g, p) >= static_cast<long>(m))
    throw domain_error("local_invariant: both representatives vanish at the point");
  return symbol_from_approx(g, beta.d, p, m);
}

std::vector<Place> bad_places(const NormVariety& V, const QuaternionClass& beta) {
  (void)beta;  // the set is shared by all standard generators
  return bad_places(V);
}

PairingReport bm_pairing(const NormVariety& V, const AdelicPointSpec& spec) {
  PairingReport rep;
  rep.classes = standard_generators(V);

  // Validate the default point exactly.
  if (spec.default_t.size() != V.s() || spec.default_z.size() != V.n())
    throw domain_error("bm_pairing: default point has wrong arity");
  if (V.eval_P(spec.default_t) != V.eval_norm(spec.default_z))
    throw domain_error("bm_pairing: default point is not on the variety");

  std::set<Place> places;
  for (const Place& v : bad_places(V)) places.insert(v);
  for (const auto& q : spec.explicit_points) places.insert(q.place);
  for (const Place& v : spec.excluded) places.erase(v);
  rep.places.assign(places.begin(), places.end());

  rep.local_invs.resize(rep.classes.size());
  rep.totals.assign(rep.classes.size(), InvariantValue::zero());
  for (size_t ci = 0; ci < rep.classes.size(); ++ci) {
    for (const Place& v : rep.places) {
      const LocalPoint* explicit_q = nullptr;
      for (const auto& q : spec.explicit_points)
        if (q.place == v) {
          explicit_q = &q;
          break;
        }
      InvariantValue inv;
      if (explicit_q) {
        if (!check_local_point(V, *explicit_q))
          throw domain_error("bm_pairing: local point fails its equation at " +
                             v.str());
        inv = local_invariant(V, rep.classes[ci], *explicit_q);
      } else {
        inv = invariant_of_value(rep.classes[ci], spec.default_t[0], v);
      }
      rep.local_invs[ci].push_back(inv);
      rep.totals[ci] += inv;
    }
  }

  size_t r1 = rep.classes.size();
  for (uint64_t mask = 0; mask < (1ULL << r1); ++mask) {
    std::vector<size_t> idx;
    InvariantValue sum;
    for (size_t i = 0; i < r1; ++i)
      if ((mask >> i) & 1) {
        idx.push_back(i);
        sum += rep.totals[i];
      }
    rep.subset_totals.emplace_back(std::move(idx), sum);
  }

  // Spot-check a few good primes: the default point must pair to zero.
  int checked = 0;
  for (Int p = 2; checked < 3; ++p) {
    if (!is_prime(p)) continue;
    Place v = Place::finite(p);
    if (places.count(v)) continue;
    ++checked;
    for (size_t ci = 0; ci < rep.classes.size(); ++ci) {
      InvariantValue inv = invariant_of_value(rep.classes[ci], spec.default_t[0], v);
      std::ostringstream os;
      os << "p=" << p.get_str() << " class " << ci << " -> " << inv.str();
      rep.spot_checks.push_back(os.str());
      if (!inv.is_zero())
        throw domain_error("bm_pairing: nonzero invariant at good prime " +
                           p.get_str());
    }
  }
  return rep;
}

std::pair<InvariantValue, InvariantValue> relation_check(const NormVariety& V,
                                                         const LocalPoint& q) {
  SplitData sd = split_data(V);
  InvariantValue lhs;
  for (size_t i = 0; i < sd.roots.size(); ++i) {
    if (sd.exps[i] % 2 == 0) continue;
    QuaternionClass beta = make_class(sd, i);
    lhs += local_invariant(V, beta, q);
  }
  InvariantValue rhs = hilbert_symbol(sd.C, sd.d, q.place);
  return {lhs, rhs};
}

CertVerdict product_formula_certificate(const Rat& lo, const Rat& hi,
                                        const std::vector<ResidueClass>& congruences) {
  if (lo > hi) return CertVerdict::Impossible;
  ResidueClass merged;
  try {
    merged = solve_congruences(congruences);
  } catch (const domain_error&) {
    return CertVerdict::Impossible;
  }
  Rat lc = lo, hc = hi;
  lc.canonicalize();
  hc.canonicalize();
  Int tlo, thi;
  mpz_cdiv_q(tlo.get_mpz_t(), lc.get_num().get_mpz_t(), lc.get_den().get_mpz_t());
  mpz_fdiv_q(thi.get_mpz_t(), hc.get_num().get_mpz_t(), hc.get_den().get_mpz_t());
  for (Int t = tlo; t <= thi; ++t)
    if (mod_floor(t, merged.modulus) == merged.value) return CertVerdict::Unknown;
  return CertVerdict::Impossible;
}

ObstructionVerdict obstruction_demo(const NormVariety& V, const AdelicPointSpec& spec,
                                    const std::vector<ResidueClass>& t_congruences,
                                    const Int& bound) {
  ObstructionVerdict out;
  out.pairing = bm_pairing(V, spec);
  out.orthogonal = out.pairing.orthogonal();
  if (!out.orthogonal) {
    out.verdict = "pairing nonzero: adelic point not in the Brauer set";
    return out;
  }

  // Which real components are compatible with the finite-place invariants?
  // At a rational point the total vanishes, so the invariant at the real
  // place is forced to equal the finite-place sum for every generator.
  size_t inf_idx = 0;
  bool has_inf = false;
  for (size_t i = 0; i < out.pairing.places.size(); ++i)
    if (out.pairing.places[i].is_infinite()) {
      inf_idx = i;
      has_inf = true;
    }
  std::vector<InvariantValue> required(out.pairing.classes.size());
  for (size_t ci = 0; ci < out.pairing.classes.size(); ++ci) {
    required[ci] = out.pairing.totals[ci];
    if (has_inf) required[ci] += out.pairing.local_invs[ci][inf_idx];
  }

  auto comps = real_components(V);
  std::vector<const RealComponent*> forced;
  for (const auto& comp : comps) {
    if (comp.kind != RealComponent::Interval) {
      forced.push_back(&comp);  // no interval sign analysis available
      out.forced_components.push_back(comp.str());
      continue;
    }
    Rat sample;
    if (comp.lo.kind == Endpoint::Rational && comp.hi.kind == Endpoint::Rational)
      sample = (comp.lo.value + comp.hi.value) / 2;
    else if (comp.lo.kind == Endpoint::Rational)
      sample = comp.lo.value + 1;
    else if (comp.hi.kind == Endpoint::Rational)
      sample = comp.hi.value - 1;
    else
      sample = 0;
    bool ok = true;
    for (size_t ci = 0; ci < out.pairing.classes.size() && ok; ++ci)
      ok = invariant_of_value(out.pairing.classes[ci], sample, Place::infinite()) ==
           required[ci];
    if (ok) {
      forced.push_back(&comp);
      out.forced_components.push_back(comp.str());
    }
  }

  // Archimedean-bound vs congruence contradiction on the forced set.
  out.certificate = CertVerdict::Impossible;
  for (const RealComponent* comp : forced) {
    if (comp->kind != RealComponent::Interval || comp->unbounded_ball ||
        comp->lo.kind != Endpoint::Rational || comp->hi.kind != Endpoint::Rational) {
      out.certificate = CertVerdict::Unknown;
      break;
    }
    if (product_formula_certificate(comp->lo.value, comp->hi.value, t_congruences) ==
        CertVerdict::Unknown) {
      out.certificate = CertVerdict::Unknown;
      break;
    }
  }

  Congruences cong;
  bool compatible = true;
  if (!t_congruences.empty()) {
    try {
      cong[0] = solve_congruences(t_congruences);
    } catch (const domain_error&) {
      compatible = false;
    }
  }
  if (compatible) out.found_points = search_points(V, bound, cong);

  if (!out.found_points.empty()) {
    std::ostringstream os;
    const auto& pt = out.found_points.front();
    os << "point found: t=" << pt.t[0].get_str() << " z=(";
    for (size_t i = 0; i < pt.z.size(); ++i)
      os << (i ? "," : "") << pt.z[i].get_str();
    os << ")";
    out.verdict = os.str();
  } else if (out.certificate == CertVerdict::Impossible) {
    out.verdict = "counterexample confirmed";
  } else {
    out.verdict = "inconclusive: no point found within bound";
  }
  return out;
}

}  // namespace normct
