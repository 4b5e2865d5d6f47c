///
/// \file foc.hpp
///
/// First-order optimality conditions for H2 reduction by one degree, written
/// as the diagonal-quadratic system x_i^2 = (M x)_i, and recovery of the
/// approximant b/a from a solution x.
///

#ifndef H2RED_FOC_HPP
#define H2RED_FOC_HPP

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "h2red/poly.hpp"
#include "h2red/tf.hpp"

namespace h2red
{

///
/// M = diag(e(p)) V(p) V(-p)^{-1} for the sorted poles p of `sys`.
/// Computed by an LU solve of the transposed system, never by forming the
/// inverse. `residual` (when non-null) receives
/// ||M V(-p) - diag(e(p)) V(p)||_F / ||diag(e(p)) V(p)||_F.
///
Eigen::MatrixXcd build_foc_matrix(const ValidatedSystem& sys,
                                  double* residual = nullptr);

struct RecoveryTolerances
{
    /// |leading coeff of q0*a| <= q0 * ||q0*a|| means degenerate.
    double q0 = 1e-10;
    /// max |Im a_k| <= real * (1 + max |a_k|) means real.
    double real = 1e-6;
    /// Roots of a need Re < -hurwitz.
    double hurwitz = 1e-9;
};

///
/// Candidate reduced model attached to one nonzero solution x of the
/// first-order system: x_i = q0 * a(-p_i), b from the least-squares fit of
/// b d = e a - q0 a(-s)^2.
///
struct CriticalPoint
{
    std::vector<Complex> xi;
    Polynomial a; // monic, degree N-1
    Polynomial b; // degree <= N-2
    Complex q0;
    Complex criterion{0.0}; // filled by the reduction driver
    bool is_real    = false;
    bool is_hurwitz = false;
    double foc_residual = 0.0;
    double ls_residual  = 0.0;
    /// max |Im a_k| / (1 + max |a_k|) before projection onto the reals.
    double imag_margin = 0.0;
    /// Largest real part among the roots of a (only meaningful when real).
    double max_pole_real = 0.0;
};

CriticalPoint recover_candidate(const ValidatedSystem& sys,
                                std::span<const Complex> xi,
                                const RecoveryTolerances& tol = {});

/// max |coeff(e a - b d - q0 a(-s)^2)| relative to the largest coefficient
/// among the three products.
double foc_residual(const ValidatedSystem& sys, const CriticalPoint& cp);

/// Same residual for an arbitrary triple.
double foc_residual(const TransferFunction& tf, const Polynomial& a,
                    const Polynomial& b, Complex q0);

} // namespace h2red

#endif // H2RED_FOC_HPP
