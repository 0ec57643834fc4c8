#pragma once

// Torsor constructions over the norm varieties: the quartic-tower torsor
// in A^8 with its quadric fibration, and the totally split torsors given
// by systems of norm equations, each with a verified map back to X.

#include "normct/variety.hpp"

namespace normct {

struct QuarticTorsorSpec {
  QuarticTower tower;
  Rat c;
  Rat rho0, rho1;        // rho = rho0 + rho1*sqrt(a) in L
  std::vector<Rat> xi;   // element of K, 4 coordinates

  Rat norm_rho() const { return rho0 * rho0 - tower.a() * rho1 * rho1; }
};

// Y: -1 = g_0(x) lambda_1(y) + g_1(x) lambda_0(y) in A^8, mapping to
// X: c(t^2 - a) = N_K(z) by t = g_0(x)lambda_0(y) + a g_1(x)lambda_1(y)
// and z = xi * x * y.
class TorsorVariety {
 public:
  TorsorVariety(QuarticTorsorSpec spec, QuadForm g0, QuadForm g1, QuadForm l0,
                QuadForm l1);

  const QuarticTorsorSpec& spec() const { return spec_; }
  const QuadForm& g0() const { return g0_; }
  const QuadForm& g1() const { return g1_; }
  const QuadForm& l0() const { return l0_; }
  const QuadForm& l1() const { return l1_; }

  bool on_torsor(const std::vector<Rat>& x, const std::vector<Rat>& y) const;
  // (t, z) of the image point.
  std::pair<Rat, std::vector<Rat>> map_to_X(const std::vector<Rat>& x,
                                            const std::vector<Rat>& y) const;

 private:
  QuarticTorsorSpec spec_;
  QuadForm g0_, g1_, l0_, l1_;
};

TorsorVariety build_quartic_torsor(const QuarticTorsorSpec& spec);

// The rank-4 form q_0 + q_1 of the fiber over y (target value -1), with
// its two discriminants.
struct FiberQuadric {
  QuadForm q0, q1, q;  // q = q0 direct_sum q1
  Rat disc0, disc1;
};

FiberQuadric fiber_quadric(const TorsorVariety& Y, const std::vector<Rat>& y);

struct NoncompactReport {
  bool noncompact = false;
  std::string branch;
};

// Real fibers: indefinite piece, or opposite-definite pieces, force
// noncompactness; a negative-definite sum gives a compact fiber.
NoncompactReport fiber_real_noncompact(const TorsorVariety& Y,
                                       const std::vector<Rat>& y,
                                       bool v0_complex = false);

bool fiber_locally_soluble(const TorsorVariety& Y, const std::vector<Rat>& y,
                           const Int& p);

struct SplitTorsorSpec {
  std::vector<Rat> lambdas;  // one nonzero lambda_i per factor
  std::vector<Rat> xi;       // element of K
};

// Bounded search for (lambda, xi) with c prod lambda_i^{e_i} = N(xi);
// nullopt is inconclusive.
std::optional<SplitTorsorSpec> split_torsor_existence(const NormVariety& V,
                                                      unsigned height_bound);

// The system N_K(z_i) = lambda_i^{-1} g_i(t), mapping to X by
// (t, xi * z_1^{e_1} ... z_r^{e_r}).
class SplitTorsor {
 public:
  SplitTorsor(NormVariety V, SplitTorsorSpec spec);

  const NormVariety& variety() const { return V_; }
  const SplitTorsorSpec& spec() const { return spec_; }

  bool on_torsor(const std::vector<Rat>& t,
                 const std::vector<std::vector<Rat>>& zs) const;
  std::pair<std::vector<Rat>, std::vector<Rat>> map_to_X(
      const std::vector<Rat>& t, const std::vector<std::vector<Rat>>& zs) const;

 private:
  NormVariety V_;
  SplitTorsorSpec spec_;
};

SplitTorsor build_split_torsor(const NormVariety& V, const SplitTorsorSpec& spec);

}  // namespace normct
