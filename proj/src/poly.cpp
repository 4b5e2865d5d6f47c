#include "h2red/poly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "balance.hpp"
#include "h2red/error.hpp"

namespace h2red
{

const char* to_string(ErrorKind kind) noexcept
{
    switch (kind)
    {
    case ErrorKind::InvalidInput:
        return "invalid input";
    case ErrorKind::Validation:
        return "validation error";
    case ErrorKind::Numerical:
        return "numerical failure";
    case ErrorKind::NoAdmissible:
        return "no admissible critical point";
    }
    return "unknown";
}

Polynomial::Polynomial(std::vector<Complex> descending)
    : m_coeffs(std::move(descending))
{
    trim();
}

Polynomial::Polynomial(std::initializer_list<double> descending)
{
    m_coeffs.assign(descending.begin(), descending.end());
    trim();
}

Polynomial Polynomial::from_real(std::span<const double> descending)
{
    return Polynomial(std::vector<Complex>(descending.begin(), descending.end()));
}

Polynomial Polynomial::from_ascending(std::span<const Complex> ascending)
{
    return Polynomial(std::vector<Complex>(ascending.rbegin(), ascending.rend()));
}

Polynomial Polynomial::from_roots(std::span<const Complex> roots)
{
    std::vector<Complex> c{Complex(1.0)};
    for (const auto& r : roots)
    {
        c.push_back(Complex(0.0));
        for (std::size_t k = c.size() - 1; k > 0; --k)
        {
            c[k] -= r * c[k - 1];
        }
    }
    return Polynomial(std::move(c));
}

void Polynomial::trim()
{
    auto first = std::find_if(m_coeffs.begin(), m_coeffs.end(),
                              [](const Complex& c) { return c != Complex(0.0); });
    if (first == m_coeffs.end())
    {
        m_coeffs.assign(1, Complex(0.0));
        return;
    }
    m_coeffs.erase(m_coeffs.begin(), first);
}

Complex Polynomial::coeff_of_degree(int k) const noexcept
{
    if (k < 0 || k > degree())
    {
        return Complex(0.0);
    }
    return m_coeffs[static_cast<std::size_t>(degree() - k)];
}

std::vector<Complex> Polynomial::ascending() const
{
    return std::vector<Complex>(m_coeffs.rbegin(), m_coeffs.rend());
}

bool Polynomial::is_real(double tol) const noexcept
{
    return std::all_of(m_coeffs.begin(), m_coeffs.end(),
                       [tol](const Complex& c) { return std::abs(c.imag()) <= tol; });
}

double Polynomial::max_abs_coeff() const noexcept
{
    double m = 0.0;
    for (const auto& c : m_coeffs)
    {
        m = std::max(m, std::abs(c));
    }
    return m;
}

Polynomial Polynomial::real_part() const
{
    std::vector<Complex> c(m_coeffs.size());
    std::transform(m_coeffs.begin(), m_coeffs.end(), c.begin(),
                   [](const Complex& z) { return Complex(z.real(), 0.0); });
    return Polynomial(std::move(c));
}

std::vector<double> Polynomial::real_coeffs() const
{
    std::vector<double> c(m_coeffs.size());
    std::transform(m_coeffs.begin(), m_coeffs.end(), c.begin(),
                   [](const Complex& z) { return z.real(); });
    return c;
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs)
{
    if (rhs.m_coeffs.size() > m_coeffs.size())
    {
        m_coeffs.insert(m_coeffs.begin(), rhs.m_coeffs.size() - m_coeffs.size(),
                        Complex(0.0));
    }
    const auto offset = m_coeffs.size() - rhs.m_coeffs.size();
    for (std::size_t k = 0; k < rhs.m_coeffs.size(); ++k)
    {
        m_coeffs[offset + k] += rhs.m_coeffs[k];
    }
    trim();
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs)
{
    return *this += rhs * Complex(-1.0);
}

Polynomial& Polynomial::operator*=(Complex c)
{
    for (auto& z : m_coeffs)
    {
        z *= c;
    }
    trim();
    return *this;
}

Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs)
{
    std::vector<Complex> c(lhs.m_coeffs.size() + rhs.m_coeffs.size() - 1,
                           Complex(0.0));
    for (std::size_t i = 0; i < lhs.m_coeffs.size(); ++i)
    {
        for (std::size_t j = 0; j < rhs.m_coeffs.size(); ++j)
        {
            c[i + j] += lhs.m_coeffs[i] * rhs.m_coeffs[j];
        }
    }
    return Polynomial(std::move(c));
}

PolyDivision divide(const Polynomial& num, const Polynomial& den)
{
    if (den.is_zero())
    {
        throw Error(ErrorKind::InvalidInput, "polynomial division by zero");
    }
    if (num.degree() < den.degree())
    {
        return {Polynomial(), num};
    }
    std::vector<Complex> rem = num.coeffs();
    const auto& d = den.coeffs();
    const std::size_t qlen = rem.size() - d.size() + 1;
    std::vector<Complex> q(qlen);
    for (std::size_t k = 0; k < qlen; ++k)
    {
        q[k] = rem[k] / d[0];
        for (std::size_t j = 0; j < d.size(); ++j)
        {
            rem[k + j] -= q[k] * d[j];
        }
        rem[k] = Complex(0.0);
    }
    return {Polynomial(std::move(q)), Polynomial(std::move(rem))};
}

Complex eval(const Polynomial& p, Complex s)
{
    Complex acc(0.0);
    for (const auto& c : p.coeffs())
    {
        acc = acc * s + c;
    }
    return acc;
}

Polynomial derivative(const Polynomial& p)
{
    const int n = p.degree();
    if (n == 0)
    {
        return Polynomial();
    }
    std::vector<Complex> c(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
    {
        c[static_cast<std::size_t>(k)] = p.coeffs()[static_cast<std::size_t>(k)]
                                         * static_cast<double>(n - k);
    }
    return Polynomial(std::move(c));
}

Polynomial reflect(const Polynomial& p)
{
    std::vector<Complex> c = p.coeffs();
    const int n = p.degree();
    for (int k = 0; k <= n; ++k)
    {
        // entry k holds degree n - k
        if ((n - k) % 2 != 0)
        {
            c[static_cast<std::size_t>(k)] = -c[static_cast<std::size_t>(k)];
        }
    }
    return Polynomial(std::move(c));
}

namespace
{

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>
companion(const std::vector<Scalar>& monic_desc)
{
    const auto n = static_cast<Eigen::Index>(monic_desc.size() - 1);
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> c =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i)
    {
        c(i, i - 1) = Scalar(1);
    }
    for (Eigen::Index i = 0; i < n; ++i)
    {
        // last column holds -a_0 ... -a_{n-1}
        c(i, n - 1) = -monic_desc[static_cast<std::size_t>(n - i)];
    }
    return c;
}

Complex newton_step(const Polynomial& p, const Polynomial& dp, Complex z)
{
    const Complex fz  = eval(p, z);
    const Complex dfz = eval(dp, z);
    if (dfz == Complex(0.0))
    {
        return z;
    }
    const Complex next = z - fz / dfz;
    return std::abs(eval(p, next)) < std::abs(fz) ? next : z;
}

} // namespace

RootSet roots(const Polynomial& p, const RootOptions& opts)
{
    if (p.degree() < 1)
    {
        throw Error(ErrorKind::InvalidInput, "no roots defined");
    }
    const Complex lead = p.leading();
    const int n        = p.degree();
    RootSet out;
    if (n == 1)
    {
        out.values.push_back(-p.coeffs()[1] / lead);
    }
    else if (p.is_real())
    {
        std::vector<double> monic(p.coeffs().size());
        for (std::size_t k = 0; k < monic.size(); ++k)
        {
            monic[k] = p.coeffs()[k].real() / lead.real();
        }
        Eigen::MatrixXd c = companion(monic);
        if (opts.balance)
        {
            detail::balance(c);
        }
        Eigen::EigenSolver<Eigen::MatrixXd> es(c, false);
        if (es.info() != Eigen::Success)
        {
            throw Error(ErrorKind::Numerical, "companion eigenvalue iteration failed");
        }
        const auto ev = es.eigenvalues();
        out.values.assign(ev.data(), ev.data() + ev.size());
    }
    else
    {
        std::vector<Complex> monic(p.coeffs().size());
        for (std::size_t k = 0; k < monic.size(); ++k)
        {
            monic[k] = p.coeffs()[k] / lead;
        }
        Eigen::MatrixXcd c = companion(monic);
        if (opts.balance)
        {
            detail::balance(c);
        }
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(c, false);
        if (es.info() != Eigen::Success)
        {
            throw Error(ErrorKind::Numerical, "companion eigenvalue iteration failed");
        }
        const auto ev = es.eigenvalues();
        out.values.assign(ev.data(), ev.data() + ev.size());
    }

    if (opts.newton_polish)
    {
        const Polynomial dp = derivative(p);
        for (auto& z : out.values)
        {
            z = newton_step(p, dp, z);
        }
    }

    const double scale = p.max_abs_coeff();
    out.residuals.reserve(out.values.size());
    for (const auto& z : out.values)
    {
        out.residuals.push_back(std::abs(eval(p, z)) / scale);
    }
    return out;
}

double max_real_root(const Polynomial& p)
{
    if (p.degree() < 1)
    {
        return -std::numeric_limits<double>::infinity();
    }
    const auto r = roots(p);
    double m     = -std::numeric_limits<double>::infinity();
    for (const auto& z : r.values)
    {
        m = std::max(m, z.real());
    }
    return m;
}

bool is_hurwitz(const Polynomial& p, double tol)
{
    if (!p.is_real())
    {
        throw Error(ErrorKind::InvalidInput, "Hurwitz test requires real polynomial");
    }
    return max_real_root(p) < -tol;
}

Eigen::MatrixXcd vandermonde_matrix(std::span<const Complex> nodes)
{
    const auto n = static_cast<Eigen::Index>(nodes.size());
    Eigen::MatrixXcd v(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        Complex z(1.0);
        for (Eigen::Index k = 0; k < n; ++k)
        {
            v(i, k) = z;
            z *= nodes[static_cast<std::size_t>(i)];
        }
    }
    return v;
}

void check_node_separation(std::span<const Complex> nodes, double rel_tol)
{
    double scale = 0.0;
    for (const auto& z : nodes)
    {
        scale = std::max(scale, std::abs(z));
    }
    for (std::size_t i = 0; i < nodes.size(); ++i)
    {
        for (std::size_t j = i + 1; j < nodes.size(); ++j)
        {
            if (std::abs(nodes[i] - nodes[j]) <= rel_tol * scale)
            {
                std::ostringstream os;
                os.precision(17);
                os << "ill-conditioned Vandermonde / nodes too close: node " << i
                   << " = " << nodes[i] << " and node " << j << " = " << nodes[j];
                throw Error(ErrorKind::Numerical, os.str());
            }
        }
    }
}

std::vector<Complex> vandermonde_solve(std::span<const Complex> nodes,
                                       std::span<const Complex> rhs,
                                       double rel_separation)
{
    if (nodes.size() != rhs.size() || nodes.empty())
    {
        throw Error(ErrorKind::InvalidInput,
                    "vandermonde_solve: nodes and rhs must have equal nonzero length");
    }
    check_node_separation(nodes, rel_separation);
    const Eigen::MatrixXcd v = vandermonde_matrix(nodes);
    const Eigen::VectorXcd b =
        Eigen::Map<const Eigen::VectorXcd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    const Eigen::VectorXcd c = v.partialPivLu().solve(b);
    return std::vector<Complex>(c.data(), c.data() + c.size());
}

} // namespace h2red
