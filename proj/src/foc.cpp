#include "h2red/foc.hpp"

#include <algorithm>
#include <cmath>

#include "h2red/error.hpp"

namespace h2red
{

namespace
{

std::vector<Complex> negated(const std::vector<Complex>& v)
{
    std::vector<Complex> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [](const Complex& z) { return -z; });
    return out;
}

} // namespace

Eigen::MatrixXcd build_foc_matrix(const ValidatedSystem& sys, double* residual)
{
    const auto& poles = sys.poles();
    const auto minus  = negated(poles);
    check_node_separation(minus);

    const Eigen::MatrixXcd v_plus  = vandermonde_matrix(poles);
    const Eigen::MatrixXcd v_minus = vandermonde_matrix(minus);
    const auto& e = sys.e_at_poles();
    const Eigen::VectorXcd e_vec =
        Eigen::Map<const Eigen::VectorXcd>(e.data(), static_cast<Eigen::Index>(e.size()));
    const Eigen::MatrixXcd rhs = e_vec.asDiagonal() * v_plus;

    // M V(-p) = rhs  <=>  V(-p)^T M^T = rhs^T
    const Eigen::MatrixXcd m =
        v_minus.transpose().partialPivLu().solve(rhs.transpose()).transpose();

    if (residual != nullptr)
    {
        *residual = (m * v_minus - rhs).norm() / rhs.norm();
    }
    return m;
}

double foc_residual(const TransferFunction& tf, const Polynomial& a, const Polynomial& b,
                    Complex q0)
{
    const Polynomial ea  = tf.numerator * a;
    const Polynomial bd  = b * tf.denominator;
    const Polynomial ra  = reflect(a);
    const Polynomial qaa = q0 * (ra * ra);
    const Polynomial r   = ea - bd - qaa;
    const double scale =
        std::max({ea.max_abs_coeff(), bd.max_abs_coeff(), qaa.max_abs_coeff()});
    if (scale == 0.0)
    {
        return 0.0;
    }
    return r.max_abs_coeff() / scale;
}

double foc_residual(const ValidatedSystem& sys, const CriticalPoint& cp)
{
    return foc_residual(sys.tf(), cp.a, cp.b, cp.q0);
}

CriticalPoint recover_candidate(const ValidatedSystem& sys, std::span<const Complex> xi,
                                const RecoveryTolerances& tol)
{
    const int n = sys.order();
    if (static_cast<int>(xi.size()) != n)
    {
        throw Error(ErrorKind::InvalidInput, "solution vector length does not match system order");
    }

    const auto minus = negated(sys.poles());
    // ascending coefficients of q0*a
    const auto scaled_a = vandermonde_solve(minus, xi);
    double norm         = 0.0;
    for (const auto& c : scaled_a)
    {
        norm = std::max(norm, std::abs(c));
    }
    const Complex q0 = scaled_a.back();
    if (!(std::abs(q0) > tol.q0 * norm))
    {
        throw Error(ErrorKind::Numerical, "degenerate leading coefficient");
    }

    CriticalPoint cp;
    cp.xi.assign(xi.begin(), xi.end());
    cp.q0 = q0;

    std::vector<Complex> a_asc(scaled_a.size());
    std::transform(scaled_a.begin(), scaled_a.end(), a_asc.begin(),
                   [q0](const Complex& c) { return c / q0; });
    a_asc.back() = Complex(1.0);
    Polynomial a = Polynomial::from_ascending(a_asc);

    double max_imag = 0.0;
    for (const auto& c : a.coeffs())
    {
        max_imag = std::max(max_imag, std::abs(c.imag()));
    }
    cp.imag_margin = max_imag / (1.0 + a.max_abs_coeff());
    cp.is_real     = cp.imag_margin <= tol.real
                 && std::abs(q0.imag()) <= tol.real * std::abs(q0);
    if (cp.is_real)
    {
        a     = a.real_part();
        cp.q0 = Complex(q0.real(), 0.0);
        cp.max_pole_real = max_real_root(a);
        cp.is_hurwitz    = cp.max_pole_real < -tol.hurwitz;
    }
    cp.a = a;

    // b d = e a - q0 a(-s)^2, matched over degrees 0 .. 2N-2.
    const Polynomial ra  = reflect(cp.a);
    const Polynomial rhs = sys.tf().numerator * cp.a - cp.q0 * (ra * ra);
    const int rows       = 2 * n - 1;
    const int cols       = std::max(n - 1, 0);
    Eigen::VectorXcd y(rows);
    for (int k = 0; k < rows; ++k)
    {
        y(k) = rhs.coeff_of_degree(k);
    }
    if (cols == 0)
    {
        cp.b           = Polynomial();
        cp.ls_residual = y.norm() == 0.0 ? 0.0 : 1.0;
    }
    else
    {
        const auto& d = sys.tf().denominator;
        Eigen::MatrixXcd conv = Eigen::MatrixXcd::Zero(rows, cols);
        for (int j = 0; j < cols; ++j)
        {
            for (int k = 0; k <= d.degree(); ++k)
            {
                conv(j + k, j) = d.coeff_of_degree(k);
            }
        }
        const Eigen::VectorXcd b = conv.colPivHouseholderQr().solve(y);
        const double ynorm       = y.norm();
        cp.ls_residual           = ynorm == 0.0 ? 0.0 : (conv * b - y).norm() / ynorm;
        std::vector<Complex> b_asc(b.data(), b.data() + b.size());
        cp.b = Polynomial::from_ascending(b_asc);
        if (cp.is_real)
        {
            cp.b = cp.b.real_part();
        }
    }
    cp.foc_residual = foc_residual(sys, cp);
    return cp;
}

} // namespace h2red
