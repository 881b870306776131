// Auxiliary functions appearing in the sign proofs of the dual-kernel
// comparisons, evaluated as machine-checkable claims.
#pragma once

#include <cstddef>

namespace ifbm::audit::claims {

/// f(x|a) used for 0 <= x <= 1/2 in the sign argument for 2.1.
double f_small_x(double x, double alpha);
/// Printed closed form of 2 f(1/2 | a).
double two_f_half(double alpha);

/// (2+a)(1-a) - (2-a)(1+a) 4^{-a}; reproduces u(0.6) = 0.065.
double u_reproducing(double alpha);
/// (2-a)(1-a)(1-4^{-a}) - 2a as printed next to the critical point y*.
double u_printed(double alpha);

/// Bracketed form of w(a).
double w_bracket(double alpha);
/// The hyperbolic rewrite printed on the second line of w(a).
double w_hyperbolic(double alpha);

/// [1 - (1-y)^a] / y, with the y -> 0 limit a.
double r_hat_closed(double y, double alpha);
/// a sum_k (1-a)_k / (2)_k y^k truncated after `terms` terms (terms = 0 means
/// sum until the tail is below double precision).
double r_hat_series(double y, double alpha, std::size_t terms = 0);

/// Phi(y|b) = (R_hat - a) / (a b y) in closed form (a = 1 - b); undefined at y = 0 or b in {0, 1}.
double phi_closed(double y, double beta);
/// Phi(y|b) = sum_k (b+1)_k / (2)_{k+1} y^k.
double phi_series(double y, double beta);

/// psi(b) = (3-b)[(2^b - 1)/b - 2b] - 1 + 2 m b^2.
double psi(double beta, double m_lower);

/// (1+a)^{-1} - a/3 - 6^{-a}; the claim is that this is >= 0 on [0, 1].
double c7_gap(double alpha);

/// V(a) of the sign argument for 2.4, a = 2H.
double v_alpha(double alpha);
/// (1 - a^2) a + 3(2a - 1).
double v_lower(double alpha);

}  // namespace ifbm::audit::claims
