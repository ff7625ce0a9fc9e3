#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "brlab/decomp.hpp"
#include "brlab/tensor.hpp"

namespace brlab {

/// The n-qubit W state: unit entries exactly at Hamming-weight-1 strings.
DenseTensor w_state(int n);

/// Rank-2 symmetric decomposition of W_n^eps = (|0> + eps|1>)^(x)n / eps
/// - |0...0> / eps on the full simplex.
UnconstrainedDecomposition w_eps_unconstrained(int n, double eps);

/// Closed-form approximation error ||contract - W_n|| of the family above:
/// sqrt(sum_{k=2..n} C(n,k) eps^{2(k-1)}).
double w_eps_unconstrained_error(int n, double eps);

/// Symmetric psd family A_0 = C eps^{-1/(n-1)} [[1, e^{i pi/n}], [c.c., 1]],
/// A_1 = eps [[1,1],[1,1]], with C = (2(1 - cos(pi/n)))^{-1/(n-1)} fixed by
/// normalizing the weight-1 entries to 1.
PsdDecomposition w_eps_psd(int n, double eps);

/// The normalization constant C(n) above.
double w_eps_psd_constant(int n);

/// Translation-invariant rank-2 cycle family with diagonal transfer vectors
/// v_11 = eps^{-1/n} (1, eps), v_22 = eps^{-1/n} (e^{i pi/n}, 0).
UnconstrainedDecomposition w_eps_ti_unconstrained(int n, double eps);

/// Diagonal lifting of the symmetric psd family to the cycle:
/// (B_j)_{ab,a'b'} = delta(a,b) delta(a',b') (A_j)_{a,a'}.
PsdDecomposition w_eps_ti_psd(int n, double eps);

/// Nonnegative t.i. cycle family from the regular representation of the
/// p-cycle: A_0 = eps^{-1/(n-1)} P, A_1 = eps I_p, scaled so the contraction
/// is (1/p^2) tr(A_{j_1} ... A_{j_n}); converges to (1/p) W_n. Requires
/// p >= 2 and p | (n-1).
NonnegativeDecomposition w_eps_ti_nonneg(int n, double eps, int p);

/// Nonnegative cycle family for the two-domain state; bond k, site dimension
/// k^2; v-vectors on sites 1..n-1 and the w-vector on site n.
NonnegativeDecomposition two_domain_eps(int n, int k, double eps);

/// Entrywise limit of the family above, computed by exact integer bookkeeping
/// of the eps exponents (value 1 where #offdiagonal v-bonds equals the
/// w-bond indicator, 0 elsewhere).
DenseTensor two_domain_limit(int n, int k);

struct ConvergenceStudy {
    std::string family;
    std::vector<double> eps;     // strictly decreasing, positive
    std::vector<double> error;   // Frobenius distance to the target
    std::vector<bool> included;  // point used in the fit
    double slope = 0.0;          // log-log least squares
    double slope_stderr = 0.0;
    double coefficient = 0.0;    // error ~ coefficient * eps^slope
    double fit_residual = 0.0;   // rms residual in log space
    bool monotone = true;        // error strictly decreasing along the grid
};

/// 13 log-spaced points from 1e-1 down to 1e-4.
std::vector<double> default_eps_grid();
std::vector<double> log_grid(double hi, double lo, int points);

/// Least-squares fit of log(error) against log(eps); points below the noise
/// floor (1e3 * machine epsilon * ||target||) or with non-finite errors are
/// excluded and flagged.
ConvergenceStudy convergence_study(const std::string& family,
                                   const std::function<DenseTensor(double)>& contract_at,
                                   const std::vector<double>& eps_grid, const DenseTensor& target);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double residual_rms = 0.0;
};

LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace brlab
