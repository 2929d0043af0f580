#pragma once

#include "pik/types.hpp"

namespace pik {

/// Damping value lambda^2 in [0, inf]. The infinite state is a tag, never an
/// IEEE infinity; it must not reach matrix arithmetic.
struct DampingValue {
  double value = 0.0;
  bool infinite = false;

  static DampingValue finite(double v) { return {v, false}; }
  static DampingValue inf() { return {0.0, true}; }
  bool is_zero() const { return !infinite && value == 0.0; }
};

/// Per-task damping parameters: mu_1..mu_l >= 0 and integer nu >= 0.
struct DampingSpec {
  std::vector<double> mu;
  int nu = 1;
};

/// Default numerical-rank cutoff: max(rows, cols) * eps * sigma_max.
double default_rank_tol(const Mat& A);

/// Moore-Penrose pseudoinverse via SVD. Singular values at or below rank_tol
/// are treated as zero; rank_tol = 0 selects the default cutoff.
Mat moore_penrose(const Mat& A, double rank_tol = 0.0);

/// Damped pseudoinverse A^{*(lambda)}:
///   lambda^2 = 0    -> A^+
///   0 < lambda^2    -> A^T (A A^T + lambda^2 I)^+
///   infinite        -> zero matrix
/// Output is cols(A) x rows(A). Negative finite lambda^2 is a domain error.
Mat extended_damped_pinv(const Mat& A, const DampingValue& lambda_sq);

/// Determinant-based damping schedule, M = C_aa C_aa^T:
///   mu = 0                  -> 0
///   mu > 0, |M|^nu above det tolerance -> mu^2 / |M|^nu
///   mu > 0, |M|^nu below    -> infinite
/// nu = 0 always yields mu^2 (0^0 = 1). Non-square M is a domain error.
DampingValue damping_value(const Mat& M, double mu, int nu);

/// The two norm bounds on ||A^{*(lambda)}|| evaluated from the singular
/// values of A; extended reals, so entries may be +inf.
///   m1 = 0 if A = 0, else 1 / (smallest nonzero singular value)
///   m2 = inf if mu = 0, else (1/2mu) * prod_i sigma_i^nu over all
///        l = min(rows, cols) singular values, zeros included (0^0 = 1)
struct NormBoundPair {
  double m1;
  double m2;
};
NormBoundPair pinv_norm_bound(const Mat& A, double mu, double nu);

}  // namespace pik
