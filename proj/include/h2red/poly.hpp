///
/// \file poly.hpp
///
/// Dense univariate polynomials with complex coefficients, companion-matrix
/// root finding, Hurwitz testing and Vandermonde solves.
///

#ifndef H2RED_POLY_HPP
#define H2RED_POLY_HPP

#include <complex>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace h2red
{

using Complex = std::complex<double>;

///
/// Univariate polynomial stored in DESCENDING degree order: `coeffs()[0]` is
/// the leading coefficient. Leading zeros are trimmed on construction, so the
/// zero polynomial is the single coefficient 0.
///
class Polynomial
{
public:
    Polynomial() : m_coeffs{Complex(0.0)} {}
    explicit Polynomial(std::vector<Complex> descending);
    Polynomial(std::initializer_list<double> descending);

    static Polynomial from_real(std::span<const double> descending);
    static Polynomial from_ascending(std::span<const Complex> ascending);
    /// Monic polynomial with the given roots.
    static Polynomial from_roots(std::span<const Complex> roots);
    static Polynomial constant(Complex c)
    {
        return Polynomial(std::vector<Complex>{c});
    }

    int degree() const noexcept
    {
        return static_cast<int>(m_coeffs.size()) - 1;
    }
    const std::vector<Complex>& coeffs() const noexcept
    {
        return m_coeffs;
    }
    Complex leading() const noexcept
    {
        return m_coeffs.front();
    }
    /// Coefficient of s^k; zero when k exceeds the degree.
    Complex coeff_of_degree(int k) const noexcept;
    std::vector<Complex> ascending() const;

    bool is_zero() const noexcept
    {
        return m_coeffs.size() == 1 && m_coeffs[0] == Complex(0.0);
    }
    /// True when every imaginary part is at most `tol` in magnitude.
    bool is_real(double tol = 0.0) const noexcept;
    /// Largest coefficient magnitude.
    double max_abs_coeff() const noexcept;
    Polynomial real_part() const;
    std::vector<double> real_coeffs() const;

    Polynomial& operator+=(const Polynomial& rhs);
    Polynomial& operator-=(const Polynomial& rhs);
    Polynomial& operator*=(Complex c);

    friend Polynomial operator+(Polynomial lhs, const Polynomial& rhs)
    {
        return lhs += rhs;
    }
    friend Polynomial operator-(Polynomial lhs, const Polynomial& rhs)
    {
        return lhs -= rhs;
    }
    friend Polynomial operator*(Polynomial lhs, Complex c)
    {
        return lhs *= c;
    }
    friend Polynomial operator*(Complex c, Polynomial rhs)
    {
        return rhs *= c;
    }
    friend Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs);
    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    void trim();
    std::vector<Complex> m_coeffs;
};

/// Polynomial quotient and remainder; the divisor must be nonzero.
struct PolyDivision
{
    Polynomial quotient;
    Polynomial remainder;
};
PolyDivision divide(const Polynomial& num, const Polynomial& den);

Complex eval(const Polynomial& p, Complex s);
Polynomial derivative(const Polynomial& p);
/// s -> p(-s)
Polynomial reflect(const Polynomial& p);

struct RootOptions
{
    bool balance      = true;
    bool newton_polish = false;
};

struct RootSet
{
    std::vector<Complex> values;
    /// |p(root)| / ||p||_inf per root.
    std::vector<double> residuals;
};

///
/// All roots of `p` with multiplicity, as eigenvalues of the balanced
/// companion matrix of its monic normalization. Real input uses a real
/// eigensolver so that complex roots come out as exact conjugate pairs.
///
RootSet roots(const Polynomial& p, const RootOptions& opts = {});

/// Largest real part over the roots; -inf for constants.
double max_real_root(const Polynomial& p);

/// True iff p is real and every root has Re < -tol. Constants are Hurwitz.
bool is_hurwitz(const Polynomial& p, double tol = 1e-9);

/// Rows (1, z, z^2, ..., z^{n-1}) for each node.
Eigen::MatrixXcd vandermonde_matrix(std::span<const Complex> nodes);

/// Throws a Numerical error naming the offending pair when
/// min |z_i - z_j| < rel_tol * max |z|.
void check_node_separation(std::span<const Complex> nodes,
                           double rel_tol = 1e-8);

///
/// Solves V(nodes) c = rhs by LU with partial pivoting. The result is in
/// ASCENDING degree order: sum_k c_k z_i^k = rhs_i.
///
std::vector<Complex> vandermonde_solve(std::span<const Complex> nodes,
                                       std::span<const Complex> rhs,
                                       double rel_separation = 1e-8);

} // namespace h2red

#endif // H2RED_POLY_HPP
