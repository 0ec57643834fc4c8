#include "normct.h"

#include <json.hpp>

#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "normct/brauer.hpp"
#include "normct/counting.hpp"
#include "normct/descent.hpp"

namespace {

using nlohmann::json;
using namespace normct;

struct spec_error : std::runtime_error {
  explicit spec_error(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------- parsing

[[noreturn]] void bad_key(const std::string& path, const std::string& what) {
  throw spec_error(path + ": " + what);
}

Int parse_int(const json& j, const std::string& path) {
  if (j.is_number_integer()) return Int(static_cast<long>(j.get<long long>()));
  if (!j.is_string()) bad_key(path, "expected a decimal string");
  try {
    return Int(j.get<std::string>());
  } catch (const std::invalid_argument&) {
    bad_key(path, "not a decimal integer: " + j.get<std::string>());
  }
}

Rat parse_rat(const json& j, const std::string& path) {
  if (j.is_number_integer()) return Rat(Int(static_cast<long>(j.get<long long>())));
  if (!j.is_string()) bad_key(path, "expected a rational string");
  Rat r;
  try {
    r = Rat(j.get<std::string>());
  } catch (const std::invalid_argument&) {
    bad_key(path, "not a rational: " + j.get<std::string>());
  }
  r.canonicalize();
  if (r.get_den() == 0) bad_key(path, "zero denominator");
  return r;
}

unsigned parse_unsigned(const json& j, const std::string& path) {
  Int v = parse_int(j, path);
  if (v < 0 || !v.fits_ulong_p()) bad_key(path, "expected a small nonnegative integer");
  return static_cast<unsigned>(v.get_ui());
}

std::vector<Rat> parse_rat_list(const json& j, const std::string& path) {
  if (!j.is_array()) bad_key(path, "expected an array");
  std::vector<Rat> out;
  for (size_t i = 0; i < j.size(); ++i)
    out.push_back(parse_rat(j[i], path + "/" + std::to_string(i)));
  return out;
}

std::vector<Int> parse_int_list(const json& j, const std::string& path) {
  if (!j.is_array()) bad_key(path, "expected an array");
  std::vector<Int> out;
  for (size_t i = 0; i < j.size(); ++i)
    out.push_back(parse_int(j[i], path + "/" + std::to_string(i)));
  return out;
}

const json& need(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) bad_key(path + "/" + key, "missing");
  return j.at(key);
}

Place parse_place(const json& j, const std::string& path) {
  if (j.is_string() && j.get<std::string>() == "inf") return Place::infinite();
  Int p = parse_int(j, path);
  if (!is_prime(p)) bad_key(path, "not a prime or \"inf\"");
  return Place::finite(p);
}

QuadraticField parse_quadratic_field(const json& j, const std::string& path) {
  if (j.is_object()) {
    Int d = parse_int(need(j, "d", path), path + "/d");
    BasisMode mode = BasisMode::Power;
    if (j.contains("basis")) {
      std::string b = j.at("basis").is_string() ? j.at("basis").get<std::string>() : "";
      if (b == "maximal")
        mode = BasisMode::Maximal;
      else if (b != "power")
        bad_key(path + "/basis", "expected \"power\" or \"maximal\"");
    }
    return QuadraticField(d, mode);
  }
  return QuadraticField(parse_int(j, path));
}

FieldSpec parse_field(const json& spec) {
  const json& j = need(spec, "field", "");
  if (!j.is_object()) bad_key("/field", "expected an object");
  if (j.contains("quadratic"))
    return parse_quadratic_field(j.at("quadratic"), "/field/quadratic");
  if (j.contains("quartic")) {
    auto v = parse_rat_list(j.at("quartic"), "/field/quartic");
    if (v.size() != 3) bad_key("/field/quartic", "expected [a, u, v]");
    return QuarticTower(v[0], v[1], v[2]);
  }
  if (j.contains("norm_form")) {
    const json& m = j.at("norm_form");
    if (!m.is_array() || m.empty()) bad_key("/field/norm_form", "expected a matrix");
    std::vector<std::vector<Rat>> gram;
    for (size_t i = 0; i < m.size(); ++i) {
      auto row = parse_rat_list(m[i], "/field/norm_form/" + std::to_string(i));
      if (row.size() != m.size()) bad_key("/field/norm_form", "matrix must be square");
      gram.push_back(std::move(row));
    }
    return QuadForm(std::move(gram));
  }
  bad_key("/field", "expected quadratic, quartic or norm_form");
}

std::vector<std::string> t_vars(size_t s) {
  if (s == 1) return {"t"};
  std::vector<std::string> vars;
  for (size_t i = 1; i <= s; ++i) vars.push_back("t" + std::to_string(i));
  return vars;
}

// coeffs [c0, c1, .., cs] -> c0 + c1 t1 + .. + cs ts.
Poly affine_poly(const std::vector<Rat>& coeffs, const std::vector<std::string>& vars,
                 const std::string& path) {
  if (coeffs.size() != vars.size() + 1) bad_key(path, "expected s + 1 coefficients");
  Poly p = Poly::constant(coeffs[0], vars);
  for (size_t i = 0; i < vars.size(); ++i)
    p = p + Poly::variable(i, vars) * coeffs[i + 1];
  return p;
}

PolySpec parse_poly(const json& spec) {
  const json& j = need(spec, "poly", "");
  if (!j.is_object()) bad_key("/poly", "expected an object");
  if (j.contains("quadratic")) {
    const json& q = j.at("quadratic");
    QuadraticSpec qs;
    qs.c = parse_rat(need(q, "c", "/poly/quadratic"), "/poly/quadratic/c");
    qs.a = parse_rat(need(q, "a", "/poly/quadratic"), "/poly/quadratic/a");
    return qs;
  }
  if (!j.contains("split")) bad_key("/poly", "expected split or quadratic");
  const json& sp = j.at("split");
  SplitSpec out;
  out.c = parse_rat(need(sp, "c", "/poly/split"), "/poly/split/c");
  const json& fs = need(sp, "factors", "/poly/split");
  if (!fs.is_array() || fs.empty()) bad_key("/poly/split/factors", "expected a nonempty array");
  std::vector<std::string> vars;
  for (size_t i = 0; i < fs.size(); ++i) {
    std::string path = "/poly/split/factors/" + std::to_string(i);
    auto coeffs = parse_rat_list(need(fs[i], "coeffs", path), path + "/coeffs");
    if (coeffs.size() < 2) bad_key(path + "/coeffs", "expected at least 2 coefficients");
    if (vars.empty()) {
      out.s = coeffs.size() - 1;
      vars = t_vars(out.s);
    }
    unsigned e = 1;
    if (fs[i].contains("exponent")) e = parse_unsigned(fs[i].at("exponent"), path + "/exponent");
    if (e == 0) bad_key(path + "/exponent", "must be positive");
    out.factors.push_back({affine_poly(coeffs, vars, path + "/coeffs"), e});
  }
  return out;
}

NormVariety parse_variety(const json& spec) {
  FieldSpec field = parse_field(spec);
  return NormVariety(std::move(field), parse_poly(spec));
}

LocalPoint parse_local_point(const json& j, const std::string& path) {
  LocalPoint q;
  q.place = parse_place(need(j, "place", path), path + "/place");
  if (q.place.is_infinite()) {
    q.t_real = parse_rat_list(need(j, "t", path), path + "/t");
    q.z_real = parse_rat_list(need(j, "z", path), path + "/z");
  } else {
    q.t_res = parse_int_list(need(j, "t", path), path + "/t");
    q.z_res = parse_int_list(need(j, "z", path), path + "/z");
    q.precision = parse_unsigned(need(j, "precision", path), path + "/precision");
    if (j.contains("cert_coord")) {
      q.cert_coord = static_cast<int>(parse_int(j.at("cert_coord"), path + "/cert_coord").get_si());
      q.cert_valuation = parse_int(need(j, "cert_valuation", path), path + "/cert_valuation").get_si();
    }
  }
  return q;
}

AdelicPointSpec parse_adelic(const json& spec) {
  const json& j = need(spec, "adelic_point", "");
  AdelicPointSpec out;
  out.default_t = parse_rat_list(need(j, "default_t", "/adelic_point"), "/adelic_point/default_t");
  out.default_z = parse_rat_list(need(j, "default_z", "/adelic_point"), "/adelic_point/default_z");
  if (j.contains("points")) {
    const json& pts = j.at("points");
    if (!pts.is_array()) bad_key("/adelic_point/points", "expected an array");
    for (size_t i = 0; i < pts.size(); ++i)
      out.explicit_points.push_back(
          parse_local_point(pts[i], "/adelic_point/points/" + std::to_string(i)));
  }
  if (j.contains("excluded")) {
    const json& ex = j.at("excluded");
    if (!ex.is_array()) bad_key("/adelic_point/excluded", "expected an array");
    for (size_t i = 0; i < ex.size(); ++i)
      out.excluded.push_back(parse_place(ex[i], "/adelic_point/excluded/" + std::to_string(i)));
  }
  return out;
}

// coord -> list of residue constraints, and the flat list for coord 0.
struct CongruenceSets {
  std::map<size_t, std::vector<ResidueClass>> by_coord;
  std::vector<ResidueClass> t0;
};

CongruenceSets parse_congruences(const json& spec) {
  CongruenceSets out;
  if (!spec.contains("congruences")) return out;
  const json& j = spec.at("congruences");
  if (!j.is_array()) bad_key("/congruences", "expected an array");
  for (size_t i = 0; i < j.size(); ++i) {
    std::string path = "/congruences/" + std::to_string(i);
    size_t coord = 0;
    if (j[i].contains("coord")) coord = parse_unsigned(j[i].at("coord"), path + "/coord");
    Int value = parse_int(need(j[i], "value", path), path + "/value");
    Int modulus = parse_int(need(j[i], "modulus", path), path + "/modulus");
    if (modulus < 1) bad_key(path + "/modulus", "must be positive");
    ResidueClass rc(value, modulus);
    out.by_coord[coord].push_back(rc);
    if (coord == 0) out.t0.push_back(rc);
  }
  return out;
}

Congruences merge_congruences(const CongruenceSets& sets) {
  Congruences out;
  for (const auto& [coord, list] : sets.by_coord) out[coord] = solve_congruences(list);
  return out;
}

CountingProblem parse_counting(const json& spec) {
  const json& j = need(spec, "counting", "");
  FieldSpec field = parse_field(spec);
  auto* K = std::get_if<QuadraticField>(&field);
  if (!K) bad_key("/field", "counting requires a quadratic field");
  CountingProblem prob{*K};
  const json& box = need(j, "box", "/counting");
  if (!box.is_array() || box.empty()) bad_key("/counting/box", "expected an array of intervals");
  for (size_t i = 0; i < box.size(); ++i) {
    auto iv = parse_rat_list(box[i], "/counting/box/" + std::to_string(i));
    if (iv.size() != 2) bad_key("/counting/box/" + std::to_string(i), "expected [lo, hi]");
    prob.box.emplace_back(iv[0], iv[1]);
  }
  std::vector<std::string> vars = t_vars(prob.box.size());
  const json& fs = need(j, "f", "/counting");
  if (!fs.is_array() || fs.empty()) bad_key("/counting/f", "expected a nonempty array");
  for (size_t i = 0; i < fs.size(); ++i) {
    std::string path = "/counting/f/" + std::to_string(i);
    prob.f.push_back(affine_poly(parse_rat_list(fs[i], path), vars, path));
  }
  prob.M = j.contains("M") ? parse_int(j.at("M"), "/counting/M") : Int(1);
  if (j.contains("t_prime"))
    prob.t_prime = parse_int_list(j.at("t_prime"), "/counting/t_prime");
  else
    prob.t_prime.assign(prob.box.size(), Int(0));
  if (j.contains("z_prime")) {
    const json& zp = j.at("z_prime");
    if (!zp.is_array()) bad_key("/counting/z_prime", "expected an array");
    for (size_t i = 0; i < zp.size(); ++i)
      prob.z_prime.push_back(parse_int_list(zp[i], "/counting/z_prime/" + std::to_string(i)));
  } else {
    prob.z_prime.assign(prob.f.size(), std::vector<Int>{Int(0), Int(0)});
  }
  validate_problem(prob);
  return prob;
}

QuarticTorsorSpec parse_torsor(const json& spec) {
  FieldSpec field = parse_field(spec);
  auto* tower = std::get_if<QuarticTower>(&field);
  if (!tower) bad_key("/field", "torsor construction requires a quartic field");
  const json& j = need(spec, "torsor", "");
  auto rho = parse_rat_list(need(j, "rho", "/torsor"), "/torsor/rho");
  if (rho.size() != 2) bad_key("/torsor/rho", "expected [rho0, rho1]");
  QuarticTorsorSpec out{*tower, parse_rat(need(j, "c", "/torsor"), "/torsor/c"), rho[0],
                        rho[1], parse_rat_list(need(j, "xi", "/torsor"), "/torsor/xi")};
  return out;
}

// ------------------------------------------------------------- formatting

std::string rat_str(const Rat& x) {
  Rat c = x;
  c.canonicalize();
  return c.get_str();
}

json rat_list_json(const std::vector<Rat>& v) {
  json out = json::array();
  for (const Rat& x : v) out.push_back(rat_str(x));
  return out;
}

json int_list_json(const std::vector<Int>& v) {
  json out = json::array();
  for (const Int& x : v) out.push_back(x.get_str());
  return out;
}

json gram_json(const QuadForm& q) {
  json out = json::array();
  for (const auto& row : q.gram()) out.push_back(rat_list_json(row));
  return out;
}

json poly_json(const Poly& p) {
  if (p.nvars() <= 1) return rat_list_json(p.univariate_coeffs());
  return p.str();
}

json place_json(const Place& v) { return v.str(); }

// ------------------------------------------------------------------ flags

struct Flags {
  json raw = json::object();

  Int get_int(const std::string& key, const Int& dflt) const {
    if (!raw.contains(key)) return dflt;
    return parse_int(raw.at(key), "flag --" + key);
  }
  unsigned get_unsigned(const std::string& key, unsigned dflt) const {
    if (!raw.contains(key)) return dflt;
    return parse_unsigned(raw.at(key), "flag --" + key);
  }
  std::string get_string(const std::string& key) const {
    if (!raw.contains(key) || !raw.at(key).is_string()) return "";
    return raw.at(key).get<std::string>();
  }
};

uint64_t fnv1a(const std::string& s, uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(uint64_t h) {
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// --------------------------------------------------------------- commands

struct Outcome {
  int code = 0;
  json results;
};

std::vector<Place> symbol_places(const Rat& a, const Rat& b) {
  std::set<Int> primes{Int(2)};
  for (const Rat* x : {&a, &b}) {
    for (const Int& part : {Int(x->get_num()), Int(x->get_den())})
      for (const auto& [p, e] : factor(part)) primes.insert(p);
  }
  std::vector<Place> out{Place::infinite()};
  for (const Int& p : primes) out.push_back(Place::finite(p));
  return out;
}

Outcome cmd_hilbert(const json& spec, const Flags&) {
  const json& h = need(spec, "hilbert", "");
  const json& pairs = need(h, "pairs", "/hilbert");
  if (!pairs.is_array() || pairs.empty()) bad_key("/hilbert/pairs", "expected a nonempty array");
  json rows = json::array();
  bool all_zero = true;
  for (size_t i = 0; i < pairs.size(); ++i) {
    std::string path = "/hilbert/pairs/" + std::to_string(i);
    auto ab = parse_rat_list(pairs[i], path);
    if (ab.size() != 2) bad_key(path, "expected [a, b]");
    if (ab[0] == 0 || ab[1] == 0) bad_key(path, "entries must be nonzero");
    json invs = json::array();
    InvariantValue total;
    for (const Place& v : symbol_places(ab[0], ab[1])) {
      InvariantValue inv = hilbert_symbol(ab[0], ab[1], v);
      total += inv;
      invs.push_back({{"place", place_json(v)}, {"inv", inv.str()}});
    }
    all_zero = all_zero && total.is_zero();
    rows.push_back({{"a", rat_str(ab[0])},
                    {"b", rat_str(ab[1])},
                    {"invariants", invs},
                    {"total", total.str()}});
  }
  return {0, json{{"pairs", rows}, {"product_formula_holds", all_zero}}};
}

Outcome cmd_components(const json& spec, const Flags&) {
  NormVariety V = parse_variety(spec);
  json comps = json::array();
  for (const auto& comp : real_components(V))
    comps.push_back({{"desc", comp.str()}, {"unbounded_ball", comp.unbounded_ball}});
  return {0, json{{"components", comps}}};
}

Outcome cmd_search(const json& spec, const Flags& flags) {
  NormVariety V = parse_variety(spec);
  Int bound = flags.get_int("bound", Int(1000));
  Congruences cong = merge_congruences(parse_congruences(spec));
  auto pts = search_points(V, bound, cong);
  json rows = json::array();
  for (const auto& pt : pts)
    rows.push_back({{"t", int_list_json(pt.t)}, {"z", int_list_json(pt.z)}});
  return {0, json{{"bound", bound.get_str()},
                  {"count", static_cast<uint64_t>(pts.size())},
                  {"points", rows}}};
}

Outcome cmd_solubility(const json& spec, const Flags& flags) {
  NormVariety V = parse_variety(spec);
  auto rep = everywhere_locally_soluble(V, flags.get_unsigned("precision", 8));
  json witnesses = json::array();
  for (const auto& [v, desc] : rep.witnesses)
    witnesses.push_back({{"place", place_json(v)}, {"witness", desc}});
  json results{{"soluble", rep.soluble},
               {"inconclusive", rep.inconclusive},
               {"failure", rep.failure ? json(place_json(*rep.failure)) : json(nullptr)},
               {"witnesses", witnesses}};
  int code = rep.soluble ? 0 : (rep.inconclusive ? 3 : 2);
  return {code, results};
}

Outcome cmd_galois(const json& spec, const Flags&) {
  FieldSpec field = parse_field(spec);
  auto* tower = std::get_if<QuarticTower>(&field);
  if (!tower) bad_key("/field", "galois classification requires a quartic field");
  return {0, json{{"a", rat_str(tower->a())},
                  {"u", rat_str(tower->u())},
                  {"v", rat_str(tower->v())},
                  {"theta_min_poly", rat_list_json(tower->theta_min_poly())},
                  {"type", galois_type_str(classify_quartic_galois(*tower))},
                  {"brauer_order", brauer_order_quartic(*tower)}}};
}

Outcome cmd_brauer_gens(const json& spec, const Flags&) {
  NormVariety V = parse_variety(spec);
  json rows = json::array();
  for (const auto& g : standard_generators(V))
    rows.push_back({{"numerator", poly_json(g.numerator)},
                    {"d", rat_str(g.d)},
                    {"complement", poly_json(g.complement)}});
  return {0, json{{"generators", rows}}};
}

json pairing_json(const PairingReport& rep) {
  json classes = json::array();
  for (const auto& c : rep.classes)
    classes.push_back({{"numerator", poly_json(c.numerator)}, {"d", rat_str(c.d)}});
  json places = json::array();
  for (const auto& v : rep.places) places.push_back(place_json(v));
  json table = json::array();
  for (const auto& row : rep.local_invs) {
    json r = json::array();
    for (const auto& inv : row) r.push_back(inv.str());
    table.push_back(r);
  }
  json totals = json::array();
  for (const auto& t : rep.totals) totals.push_back(t.str());
  json subsets = json::array();
  for (const auto& [idx, sum] : rep.subset_totals)
    subsets.push_back({{"subset", idx}, {"total", sum.str()}});
  return json{{"classes", classes},       {"places", places},
              {"local_invariants", table}, {"totals", totals},
              {"orthogonal", rep.orthogonal()}, {"subset_totals", subsets},
              {"spot_checks", rep.spot_checks}};
}

Outcome cmd_pair(const json& spec, const Flags&) {
  NormVariety V = parse_variety(spec);
  auto rep = bm_pairing(V, parse_adelic(spec));
  return {rep.orthogonal() ? 0 : 2, pairing_json(rep)};
}

Outcome cmd_obstruction_demo(const json& spec, const Flags& flags) {
  NormVariety V = parse_variety(spec);
  auto cong = parse_congruences(spec);
  Int bound = flags.get_int("bound", Int(1000000));
  auto out = obstruction_demo(V, parse_adelic(spec), cong.t0, bound);
  json pts = json::array();
  for (const auto& pt : out.found_points)
    pts.push_back({{"t", int_list_json(pt.t)}, {"z", int_list_json(pt.z)}});
  json results{{"pairing", pairing_json(out.pairing)},
               {"orthogonal", out.orthogonal},
               {"forced_components", out.forced_components},
               {"certificate", out.certificate == CertVerdict::Impossible ? "impossible" : "unknown"},
               {"search_bound", bound.get_str()},
               {"found_points", pts},
               {"verdict", out.verdict}};
  int code = 3;
  if (out.verdict.rfind("point found", 0) == 0) code = 0;
  if (out.verdict == "counterexample confirmed" || out.verdict.rfind("pairing nonzero", 0) == 0)
    code = 2;
  return {code, results};
}

Outcome cmd_torsor_build(const json& spec, const Flags& flags) {
  if (spec.contains("torsor")) {
    TorsorVariety Y = build_quartic_torsor(parse_torsor(spec));
    return {0, json{{"kind", "quartic"},
                    {"c", rat_str(Y.spec().c)},
                    {"rho", rat_list_json({Y.spec().rho0, Y.spec().rho1})},
                    {"xi", rat_list_json(Y.spec().xi)},
                    {"norm_rho", rat_str(Y.spec().norm_rho())},
                    {"g0", gram_json(Y.g0())},
                    {"g1", gram_json(Y.g1())},
                    {"lambda0", gram_json(Y.l0())},
                    {"lambda1", gram_json(Y.l1())}}};
  }
  NormVariety V = parse_variety(spec);
  unsigned height = flags.get_unsigned("bound", 8);
  auto found = split_torsor_existence(V, height);
  if (!found)
    return {3, json{{"kind", "split"}, {"found", false}, {"height_bound", height}}};
  return {0, json{{"kind", "split"},
                  {"found", true},
                  {"height_bound", height},
                  {"lambdas", rat_list_json(found->lambdas)},
                  {"xi", rat_list_json(found->xi)}}};
}

Outcome cmd_torsor_fiber(const json& spec, const Flags&) {
  TorsorVariety Y = build_quartic_torsor(parse_torsor(spec));
  const json& j = spec.at("torsor");
  auto y = parse_rat_list(need(j, "y", "/torsor"), "/torsor/y");
  bool v0_complex = j.contains("v0_complex") && j.at("v0_complex").is_boolean() &&
                    j.at("v0_complex").get<bool>();
  FiberQuadric f = fiber_quadric(Y, y);
  auto real = fiber_real_noncompact(Y, y, v0_complex);
  std::vector<Int> primes{Int(2), Int(3), Int(5), Int(7)};
  if (j.contains("primes")) primes = parse_int_list(j.at("primes"), "/torsor/primes");
  json soluble = json::object();
  for (const Int& p : primes) {
    if (!is_prime(p)) bad_key("/torsor/primes", "not a prime: " + p.get_str());
    soluble[p.get_str()] = fiber_locally_soluble(Y, y, p);
  }
  return {0, json{{"y", rat_list_json(y)},
                  {"q0", gram_json(f.q0)},
                  {"q1", gram_json(f.q1)},
                  {"disc0", rat_str(f.disc0)},
                  {"disc1", rat_str(f.disc1)},
                  {"real_noncompact", real.noncompact},
                  {"real_branch", real.branch},
                  {"locally_soluble", soluble}}};
}

Outcome cmd_density_count(const json& spec, const Flags& flags) {
  CountingProblem prob = parse_counting(spec);
  Int T = flags.get_int("T", Int(10));
  Int N = count_N(prob, T);
  return {0, json{{"T", T.get_str()}, {"N", N.get_str()}}};
}

// Cache of beta_p results, one JSON object per line.
struct BetaCache {
  std::string path;
  std::map<std::string, json> entries;
  int hits = 0;

  explicit BetaCache(const std::string& dir) {
    if (dir.empty()) return;
    path = dir + "/beta_cache.jsonl";
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json row = json::parse(line, nullptr, false);
      if (!row.is_discarded() && row.contains("key")) entries[row["key"]] = row;
    }
  }

  std::string key_for(const CountingProblem& prob, const Int& p, unsigned m_max) const {
    std::ostringstream os;
    os << prob.field.d() << "|" << (prob.field.basis_mode() == BasisMode::Maximal) << "|"
       << prob.M << "|" << p << "|" << m_max << "|";
    for (const auto& t : prob.t_prime) os << t << ",";
    os << "|";
    for (const auto& z : prob.z_prime) os << z[0] << "," << z[1] << ";";
    os << "|";
    for (const auto& f : prob.f) os << f.str() << ";";
    return hex64(fnv1a(os.str()));
  }

  BetaResult get(const CountingProblem& prob, const Int& p, unsigned m_max) {
    std::string key = key_for(prob, p, m_max);
    auto it = entries.find(key);
    if (it != entries.end()) {
      ++hits;
      return {Rat(it->second.at("value").get<std::string>()),
              it->second.at("stabilized").get<bool>(),
              it->second.at("m_used").get<unsigned>()};
    }
    BetaResult res = beta_p(prob, p, m_max);
    json row{{"key", key},
             {"p", p.get_str()},
             {"value", rat_str(res.value)},
             {"stabilized", res.stabilized},
             {"m_used", res.m_used}};
    entries[key] = row;
    if (!path.empty()) {
      std::ofstream out(path, std::ios::app);
      out << row.dump() << "\n";
    }
    return res;
  }
};

std::vector<Int> primes_up_to(const Int& P_max) {
  std::vector<Int> out;
  for (Int p = 2; p <= P_max; ++p)
    if (is_prime(p)) out.push_back(p);
  return out;
}

Outcome cmd_density_beta(const json& spec, const Flags& flags) {
  CountingProblem prob = parse_counting(spec);
  Int P_max = flags.get_int("Pmax", Int(7));
  unsigned extra = flags.get_unsigned("precision", 4);
  BetaCache cache(flags.get_string("cache_dir"));
  json rows = json::object();
  bool all_stable = true;
  for (const Int& p : primes_up_to(P_max)) {
    unsigned m_max = stabilization_threshold(prob, p) + extra;
    BetaResult res = cache.get(prob, p, m_max);
    all_stable = all_stable && res.stabilized;
    rows[p.get_str()] = {{"value", rat_str(res.value)},
                         {"stabilized", res.stabilized},
                         {"m_used", res.m_used}};
  }
  return {all_stable ? 0 : 3,
          json{{"P_max", P_max.get_str()}, {"beta_p", rows}, {"cache_hits", cache.hits}}};
}

Outcome cmd_density_verify(const json& spec, const Flags& flags) {
  CountingProblem prob = parse_counting(spec);
  Int P_max = flags.get_int("Pmax", Int(7));
  std::vector<Int> T_list{Int(500), Int(1000), Int(2000)};
  if (spec.at("counting").contains("T_list"))
    T_list = parse_int_list(spec.at("counting").at("T_list"), "/counting/T_list");
  if (flags.raw.contains("T")) T_list = {flags.get_int("T", Int(0))};
  DensityReport rep = verify_asymptotic(prob, T_list, P_max);
  json beta = json::object();
  for (const auto& [p, value] : rep.beta_p)
    beta[p.get_str()] = {{"value", rat_str(value)}, {"stabilized", rep.beta_p_stable.at(p)}};
  json samples = json::object(), ratios = json::object();
  for (const auto& [T, N] : rep.N_samples) samples[T.get_str()] = N.get_str();
  for (const auto& [T, r] : rep.ratios)
    ratios[T.get_str()] = {rat_str(r.first), rat_str(r.second)};
  json results{{"beta_inf", {rat_str(rep.beta_inf.first), rat_str(rep.beta_inf.second)}},
               {"beta_p", beta},
               {"P_max", rep.P_max.get_str()},
               {"N", samples},
               {"ratios", ratios},
               {"empty_box", rep.empty_box},
               {"converging", rep.converging},
               {"csv", report_csv(rep)}};
  return {rep.converging ? 0 : 3, results};
}

Outcome cmd_calibrate_ck(const json& spec, const Flags& flags) {
  FieldSpec field = parse_field(spec);
  auto* K = std::get_if<QuadraticField>(&field);
  if (!K) bad_key("/field", "calibration requires a quadratic field");
  Int T_cal = flags.get_int("T", Int(1000000));
  CkCalibration cal = calibrate_ck(*K, T_cal);
  Rat mid = (cal.lo + cal.hi) / 2;
  return {cal.confident ? 0 : 3,
          json{{"T_cal", T_cal.get_str()},
               {"lo", rat_str(cal.lo)},
               {"hi", rat_str(cal.hi)},
               {"mid_decimal", mid.get_d()},
               {"confident", cal.confident}}};
}

Outcome dispatch(const std::string& command, const json& spec, const Flags& flags) {
  if (command == "hilbert") return cmd_hilbert(spec, flags);
  if (command == "components") return cmd_components(spec, flags);
  if (command == "search") return cmd_search(spec, flags);
  if (command == "solubility") return cmd_solubility(spec, flags);
  if (command == "galois") return cmd_galois(spec, flags);
  if (command == "brauer-gens") return cmd_brauer_gens(spec, flags);
  if (command == "pair") return cmd_pair(spec, flags);
  if (command == "obstruction-demo") return cmd_obstruction_demo(spec, flags);
  if (command == "torsor-build") return cmd_torsor_build(spec, flags);
  if (command == "torsor-fiber") return cmd_torsor_fiber(spec, flags);
  if (command == "density-count") return cmd_density_count(spec, flags);
  if (command == "density-beta") return cmd_density_beta(spec, flags);
  if (command == "density-verify") return cmd_density_verify(spec, flags);
  if (command == "calibrate-ck") return cmd_calibrate_ck(spec, flags);
  throw spec_error("unknown command: " + command);
}

}  // namespace

struct nv_ctx {
  std::string last_error;
};

extern "C" {

nv_ctx* nv_ctx_new(void) { return new nv_ctx; }

void nv_ctx_free(nv_ctx* ctx) { delete ctx; }

const char* nv_ctx_last_error(const nv_ctx* ctx) {
  return ctx ? ctx->last_error.c_str() : "";
}

int nv_run(nv_ctx* ctx, const char* command, const char* spec_json,
           const char* flags_json, char** out_json) {
  if (out_json) *out_json = nullptr;
  if (!ctx) return 4;
  ctx->last_error.clear();
  if (!command || !spec_json) {
    ctx->last_error = "command and spec must be non-null";
    return 4;
  }
  try {
    json spec = json::parse(spec_json, nullptr, false);
    if (spec.is_discarded() || !spec.is_object()) throw spec_error("spec is not a JSON object");
    Flags flags;
    if (flags_json && *flags_json) {
      flags.raw = json::parse(flags_json, nullptr, false);
      if (flags.raw.is_discarded() || !flags.raw.is_object())
        throw spec_error("flags is not a JSON object");
    }
    json hashed = flags.raw;
    hashed.erase("out");
    hashed.erase("cache_dir");
    Outcome out = dispatch(command, spec, flags);
    json report{{"command", command},
                {"config_hash", hex64(fnv1a(std::string(command) + "\n" + spec.dump() +
                                            "\n" + hashed.dump()))},
                {"exit_code", out.code},
                {"results", out.results}};
    if (out_json) {
      std::string text = report.dump(2) + "\n";
      char* buf = static_cast<char*>(malloc(text.size() + 1));
      memcpy(buf, text.c_str(), text.size() + 1);
      *out_json = buf;
    }
    return out.code;
  } catch (const spec_error& e) {
    ctx->last_error = e.what();
    return 4;
  } catch (const budget_exceeded& e) {
    ctx->last_error = e.what();
    return 3;
  } catch (const domain_error& e) {
    ctx->last_error = e.what();
    return 4;
  } catch (const std::exception& e) {
    ctx->last_error = e.what();
    return 4;
  }
}

void nv_string_free(char* s) { free(s); }

}  // extern "C"
