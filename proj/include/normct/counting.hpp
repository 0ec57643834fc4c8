#pragma once

// Counting for imaginary quadratic K: representation counts R, the
// counting function N(T), local densities beta_p from rho-counts over
// residue rings, and beta_infinity from a calibrated lattice constant
// c_K, assembled into an asymptotic-comparison report.

#include <cstdint>
#include <map>

#include "normct/fields.hpp"
#include "normct/poly.hpp"

namespace normct {

// N(T) = sum over t in Z^s cap T*box with t = t' mod M of
// prod_i R(f_i(t); z_i', M), with R the congruence-restricted count of
// representations by the norm form of the field.
struct CountingProblem {
  QuadraticField field;                  // imaginary
  std::vector<Poly> f;                   // r linear polys over Z in s >= 2 vars
  Int M = 1;
  std::vector<Int> t_prime;              // s coords
  std::vector<std::vector<Int>> z_prime; // r pairs
  std::vector<std::pair<Rat, Rat>> box;  // s intervals, within [-1, 1]

  size_t s() const { return box.size(); }
  size_t r() const { return f.size(); }
};

// Throws on malformed problems: non-imaginary field, nonlinear or
// pairwise affinely dependent f, box outside {0 < f_i(t) - f_i(0) < 1}.
void validate_problem(const CountingProblem& prob);

// #{z in Z^2 : N(z) = m, z = z' mod M}; 0 when m <= 0. Memoized.
Int rep_count(const QuadraticField& K, const Int& m, const std::vector<Int>& z_prime,
              const Int& M);

Int count_N(const CountingProblem& prob, const Int& T,
            uint64_t budget = 400000000ULL);

// #{z mod p^m : N(z) = A mod p^m, z = z' mod p^e}.
Int rho_count(const QuadraticField& K, const Int& p, unsigned m, const Int& A,
              const std::vector<Int>& z_prime, unsigned e,
              uint64_t budget = 200000000ULL);

struct BetaResult {
  Rat value;
  bool stabilized = false;
  unsigned m_used = 0;
};

// Threshold m' = 2(v_p(M) + max_i v_p(f_i(t')) + v_p(2)) + 1 past which
// the normalized rho-counts are constant.
unsigned stabilization_threshold(const CountingProblem& prob, const Int& p);

// The m-th approximants of the local density at p, returned at the first
// exact agreement of two consecutive values.
BetaResult beta_p(const CountingProblem& prob, const Int& p, unsigned m_max);

struct CkCalibration {
  Rat lo, hi;
  bool confident = false;
};

// Lattice-point count {0 < N(z) <= T_cal} over T_cal, with a recorded
// boundary-perimeter error band.
CkCalibration calibrate_ck(const QuadraticField& K, const Int& T_cal);

// c_K^r * vol(box) as an interval; requires field.ck_interval.
std::pair<Rat, Rat> beta_infinity(const CountingProblem& prob);

struct DensityReport {
  std::pair<Rat, Rat> beta_inf;
  std::map<Int, Rat> beta_p;            // prime -> stabilized value
  std::map<Int, bool> beta_p_stable;
  Int P_max = 0;
  std::map<Int, Int> N_samples;         // T -> N(T)
  std::map<Int, std::pair<Rat, Rat>> ratios;  // T -> N / (beta bounds * T^s)
  bool empty_box = false;
  bool converging = false;
};

// Calibrates c_K at 10^6 when the field carries no interval yet.
DensityReport verify_asymptotic(CountingProblem prob, const std::vector<Int>& T_list,
                                const Int& P_max);

std::string report_csv(const DensityReport& report);

}  // namespace normct
