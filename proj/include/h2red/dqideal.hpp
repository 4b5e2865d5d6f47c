///
/// \file dqideal.hpp
///
/// Diagonal-quadratic polynomial systems
///
///   x_i^2 = m_i . x + mu_i,   i = 0, ..., N-1
///
/// and normal forms modulo the ideal generated by
/// g_i = x_i^2 - m_i . x - mu_i. The g_i have pairwise coprime leading terms
/// x_i^2 under any degree-compatible order, so they already form a Groebner
/// basis and every residue class has a unique representative in the span of
/// the 2^N square-free monomials.
///
/// Variables are 0-based in code: bit i of a basis bitmask is the exponent of
/// x_i, so bitmask 0 is the monomial 1 and bitmask 0b101 is x_0 x_2.
///

#ifndef H2RED_DQIDEAL_HPP
#define H2RED_DQIDEAL_HPP

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Dense>

namespace h2red
{

using Complex    = std::complex<double>;
using MultiIndex = std::vector<int>;
using Bitmask    = std::uint32_t;

inline constexpr int kDefaultVariableCap = 14;

class DiagQuadSystem
{
public:
    DiagQuadSystem(Eigen::MatrixXcd m, Eigen::VectorXcd mu,
                   int cap = kDefaultVariableCap);
    /// Homogeneous system (mu = 0).
    explicit DiagQuadSystem(Eigen::MatrixXcd m, int cap = kDefaultVariableCap);

    int n_vars() const noexcept
    {
        return static_cast<int>(m_m.rows());
    }
    std::size_t dim() const noexcept
    {
        return std::size_t{1} << n_vars();
    }
    const Eigen::MatrixXcd& m() const noexcept
    {
        return m_m;
    }
    const Eigen::VectorXcd& mu() const noexcept
    {
        return m_mu;
    }

private:
    Eigen::MatrixXcd m_m;
    Eigen::VectorXcd m_mu;
};

/// Element of span{x^b : b in {0,1}^N}, dense over bitmasks.
class NormalFormElement
{
public:
    explicit NormalFormElement(int n_vars);
    static NormalFormElement basis(int n_vars, Bitmask mask);

    int n_vars() const noexcept
    {
        return m_n_vars;
    }
    std::size_t size() const noexcept
    {
        return m_coeffs.size();
    }
    Complex& operator[](Bitmask mask)
    {
        return m_coeffs[mask];
    }
    const Complex& operator[](Bitmask mask) const
    {
        return m_coeffs[mask];
    }
    const std::vector<Complex>& coeffs() const noexcept
    {
        return m_coeffs;
    }

    NormalFormElement& operator+=(const NormalFormElement& rhs);
    NormalFormElement& axpy(Complex alpha, const NormalFormElement& x);
    NormalFormElement& operator*=(Complex c);

    /// max |c_b - other_b|
    double max_abs_diff(const NormalFormElement& other) const;

private:
    int m_n_vars;
    std::vector<Complex> m_coeffs;
};

/// General polynomial in N variables; zero coefficients are never stored.
class SparsePoly
{
public:
    using Terms = std::map<MultiIndex, Complex>;

    explicit SparsePoly(int n_vars) : m_n_vars(n_vars) {}

    static SparsePoly constant(int n_vars, Complex c);
    static SparsePoly variable(int n_vars, int i);
    /// g_i = x_i^2 - m_i . x - mu_i
    static SparsePoly generator(const DiagQuadSystem& sys, int i);
    static SparsePoly from_normal_form(const NormalFormElement& nf);

    int n_vars() const noexcept
    {
        return m_n_vars;
    }
    const Terms& terms() const noexcept
    {
        return m_terms;
    }
    bool empty() const noexcept
    {
        return m_terms.empty();
    }
    int total_degree() const;

    void add_term(const MultiIndex& alpha, Complex c);

    SparsePoly& operator+=(const SparsePoly& rhs);
    SparsePoly& operator*=(Complex c);
    friend SparsePoly operator+(SparsePoly lhs, const SparsePoly& rhs)
    {
        return lhs += rhs;
    }
    friend SparsePoly operator*(Complex c, SparsePoly p)
    {
        return p *= c;
    }
    friend SparsePoly operator*(const SparsePoly& lhs, const SparsePoly& rhs);

    Complex evaluate(const std::vector<Complex>& x) const;

private:
    int m_n_vars;
    Terms m_terms;
};

enum class ReductionStrategy
{
    HighestDegreeFirst, // reduce a monomial of maximal total degree
    LowestVariableFirst, // reduce the first monomial reducible by x_0^2, then x_1^2, ...
};

struct ReductionOptions
{
    ReductionStrategy strategy = ReductionStrategy::HighestDegreeFirst;
    std::size_t term_budget    = 10'000'000;
};

///
/// pi(f): repeatedly rewrites one non-square-free monomial using
/// x_i^2 -> m_i . x + mu_i until only square-free monomials remain. Throws
/// a Numerical error ("reduction budget exceeded") when the number of stored
/// terms exceeds the budget.
///
NormalFormElement normal_form(const SparsePoly& f, const DiagQuadSystem& sys,
                              const ReductionOptions& opts = {});

/// Normal form of x_i * nf. Variable index is 0-based.
NormalFormElement multiply_by_variable(const NormalFormElement& nf, int i,
                                       const DiagQuadSystem& sys);

/// {0,1}^N in increasing bitmask order.
std::vector<MultiIndex> basis_monomials(int n_vars, int cap = kDefaultVariableCap);

MultiIndex to_multi_index(Bitmask mask, int n_vars);

} // namespace h2red

#endif // H2RED_DQIDEAL_HPP
