#include "h2red/dqideal.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>

#include "h2red/error.hpp"

namespace h2red
{

namespace
{

void check_n_vars(int n_vars, int cap)
{
    if (n_vars < 1)
    {
        throw Error(ErrorKind::InvalidInput, "number of variables must be at least 1");
    }
    if (n_vars > cap || n_vars > 30)
    {
        throw Error(ErrorKind::InvalidInput,
                    "basis too large: " + std::to_string(n_vars) + " variables exceeds cap "
                        + std::to_string(cap));
    }
}

} // namespace

DiagQuadSystem::DiagQuadSystem(Eigen::MatrixXcd m, Eigen::VectorXcd mu, int cap)
    : m_m(std::move(m)), m_mu(std::move(mu))
{
    if (m_m.rows() != m_m.cols() || m_mu.size() != m_m.rows())
    {
        throw Error(ErrorKind::InvalidInput, "diagonal-quadratic system: M must be N x N and mu of length N");
    }
    check_n_vars(static_cast<int>(m_m.rows()), cap);
}

DiagQuadSystem::DiagQuadSystem(Eigen::MatrixXcd m, int cap)
    : DiagQuadSystem(m, Eigen::VectorXcd::Zero(m.rows()), cap)
{
}

NormalFormElement::NormalFormElement(int n_vars)
    : m_n_vars(n_vars), m_coeffs(std::size_t{1} << n_vars, Complex(0.0))
{
}

NormalFormElement NormalFormElement::basis(int n_vars, Bitmask mask)
{
    NormalFormElement e(n_vars);
    e[mask] = Complex(1.0);
    return e;
}

NormalFormElement& NormalFormElement::operator+=(const NormalFormElement& rhs)
{
    return axpy(Complex(1.0), rhs);
}

NormalFormElement& NormalFormElement::axpy(Complex alpha, const NormalFormElement& x)
{
    for (std::size_t k = 0; k < m_coeffs.size(); ++k)
    {
        m_coeffs[k] += alpha * x.m_coeffs[k];
    }
    return *this;
}

NormalFormElement& NormalFormElement::operator*=(Complex c)
{
    for (auto& z : m_coeffs)
    {
        z *= c;
    }
    return *this;
}

double NormalFormElement::max_abs_diff(const NormalFormElement& other) const
{
    double m = 0.0;
    for (std::size_t k = 0; k < m_coeffs.size(); ++k)
    {
        m = std::max(m, std::abs(m_coeffs[k] - other.m_coeffs[k]));
    }
    return m;
}

SparsePoly SparsePoly::constant(int n_vars, Complex c)
{
    SparsePoly p(n_vars);
    p.add_term(MultiIndex(static_cast<std::size_t>(n_vars), 0), c);
    return p;
}

SparsePoly SparsePoly::variable(int n_vars, int i)
{
    SparsePoly p(n_vars);
    MultiIndex alpha(static_cast<std::size_t>(n_vars), 0);
    alpha[static_cast<std::size_t>(i)] = 1;
    p.add_term(alpha, Complex(1.0));
    return p;
}

SparsePoly SparsePoly::generator(const DiagQuadSystem& sys, int i)
{
    const int n = sys.n_vars();
    SparsePoly g(n);
    MultiIndex alpha(static_cast<std::size_t>(n), 0);
    alpha[static_cast<std::size_t>(i)] = 2;
    g.add_term(alpha, Complex(1.0));
    for (int j = 0; j < n; ++j)
    {
        MultiIndex beta(static_cast<std::size_t>(n), 0);
        beta[static_cast<std::size_t>(j)] = 1;
        g.add_term(beta, -sys.m()(i, j));
    }
    g.add_term(MultiIndex(static_cast<std::size_t>(n), 0), -sys.mu()(i));
    return g;
}

SparsePoly SparsePoly::from_normal_form(const NormalFormElement& nf)
{
    SparsePoly p(nf.n_vars());
    for (Bitmask mask = 0; mask < nf.size(); ++mask)
    {
        p.add_term(to_multi_index(mask, nf.n_vars()), nf[mask]);
    }
    return p;
}

int SparsePoly::total_degree() const
{
    int d = 0;
    for (const auto& [alpha, c] : m_terms)
    {
        d = std::max(d, std::accumulate(alpha.begin(), alpha.end(), 0));
    }
    return d;
}

void SparsePoly::add_term(const MultiIndex& alpha, Complex c)
{
    if (c == Complex(0.0))
    {
        return;
    }
    auto [it, inserted] = m_terms.try_emplace(alpha, c);
    if (!inserted)
    {
        it->second += c;
        if (it->second == Complex(0.0))
        {
            m_terms.erase(it);
        }
    }
}

SparsePoly& SparsePoly::operator+=(const SparsePoly& rhs)
{
    for (const auto& [alpha, c] : rhs.m_terms)
    {
        add_term(alpha, c);
    }
    return *this;
}

SparsePoly& SparsePoly::operator*=(Complex c)
{
    if (c == Complex(0.0))
    {
        m_terms.clear();
        return *this;
    }
    for (auto& [alpha, coeff] : m_terms)
    {
        coeff *= c;
    }
    return *this;
}

SparsePoly operator*(const SparsePoly& lhs, const SparsePoly& rhs)
{
    SparsePoly out(lhs.m_n_vars);
    for (const auto& [a, ca] : lhs.m_terms)
    {
        for (const auto& [b, cb] : rhs.m_terms)
        {
            MultiIndex ab(a.size());
            for (std::size_t k = 0; k < a.size(); ++k)
            {
                ab[k] = a[k] + b[k];
            }
            out.add_term(ab, ca * cb);
        }
    }
    return out;
}

Complex SparsePoly::evaluate(const std::vector<Complex>& x) const
{
    Complex acc(0.0);
    for (const auto& [alpha, c] : m_terms)
    {
        Complex t = c;
        for (std::size_t k = 0; k < alpha.size(); ++k)
        {
            for (int e = 0; e < alpha[k]; ++e)
            {
                t *= x[k];
            }
        }
        acc += t;
    }
    return acc;
}

MultiIndex to_multi_index(Bitmask mask, int n_vars)
{
    MultiIndex alpha(static_cast<std::size_t>(n_vars), 0);
    for (int i = 0; i < n_vars; ++i)
    {
        alpha[static_cast<std::size_t>(i)] = static_cast<int>((mask >> i) & 1U);
    }
    return alpha;
}

std::vector<MultiIndex> basis_monomials(int n_vars, int cap)
{
    check_n_vars(n_vars, cap);
    std::vector<MultiIndex> out;
    out.reserve(std::size_t{1} << n_vars);
    for (Bitmask mask = 0; mask < (Bitmask{1} << n_vars); ++mask)
    {
        out.push_back(to_multi_index(mask, n_vars));
    }
    return out;
}

namespace
{

// First variable whose exponent is at least 2, or -1 for square-free.
int first_square(const MultiIndex& alpha)
{
    for (std::size_t i = 0; i < alpha.size(); ++i)
    {
        if (alpha[i] >= 2)
        {
            return static_cast<int>(i);
        }
    }
    return -1;
}

using TermIter = SparsePoly::Terms::const_iterator;

std::optional<TermIter> pick(const SparsePoly::Terms& terms, ReductionStrategy strategy)
{
    std::optional<TermIter> best;
    int best_key = 0;
    for (auto it = terms.begin(); it != terms.end(); ++it)
    {
        const int i = first_square(it->first);
        if (i < 0)
        {
            continue;
        }
        int key = 0;
        if (strategy == ReductionStrategy::HighestDegreeFirst)
        {
            key = std::accumulate(it->first.begin(), it->first.end(), 0);
        }
        else
        {
            key = -i;
        }
        if (!best || key > best_key)
        {
            best     = it;
            best_key = key;
        }
    }
    return best;
}

} // namespace

NormalFormElement normal_form(const SparsePoly& f, const DiagQuadSystem& sys,
                              const ReductionOptions& opts)
{
    const int n = sys.n_vars();
    if (f.n_vars() != n)
    {
        throw Error(ErrorKind::InvalidInput, "normal_form: variable count mismatch");
    }
    SparsePoly work = f;
    while (auto it = pick(work.terms(), opts.strategy))
    {
        const MultiIndex alpha = (*it)->first;
        const Complex c        = (*it)->second;
        const int i            = first_square(alpha);

        SparsePoly replacement(n);
        MultiIndex base = alpha;
        base[static_cast<std::size_t>(i)] -= 2;
        replacement.add_term(base, c * sys.mu()(i));
        for (int j = 0; j < n; ++j)
        {
            MultiIndex next = base;
            ++next[static_cast<std::size_t>(j)];
            replacement.add_term(next, c * sys.m()(i, j));
        }
        work.add_term(alpha, -c);
        work += replacement;
        if (work.terms().size() > opts.term_budget)
        {
            throw Error(ErrorKind::Numerical, "reduction budget exceeded");
        }
    }

    NormalFormElement out(n);
    for (const auto& [alpha, c] : work.terms())
    {
        Bitmask mask = 0;
        for (int k = 0; k < n; ++k)
        {
            mask |= static_cast<Bitmask>(alpha[static_cast<std::size_t>(k)]) << k;
        }
        out[mask] += c;
    }
    return out;
}

namespace
{

// x_i * x^mask reduced to normal form, memoized over (i, mask).
class MonomialProducts
{
public:
    explicit MonomialProducts(const DiagQuadSystem& sys)
        : m_sys(sys), m_cache(static_cast<std::size_t>(sys.n_vars()) * sys.dim())
    {
    }

    const NormalFormElement& times(int i, Bitmask mask)
    {
        auto& slot = m_cache[static_cast<std::size_t>(i) * m_sys.dim() + mask];
        if (slot)
        {
            return *slot;
        }
        const int n       = m_sys.n_vars();
        const Bitmask bit = Bitmask{1} << i;
        if ((mask & bit) == 0)
        {
            slot = NormalFormElement::basis(n, mask | bit);
            return *slot;
        }
        // x_i^2 x^rest = (m_i . x + mu_i) x^rest
        const Bitmask rest = mask & ~bit;
        NormalFormElement acc = NormalFormElement::basis(n, rest);
        acc *= m_sys.mu()(i);
        for (int j = 0; j < n; ++j)
        {
            const Complex mij = m_sys.m()(i, j);
            if (mij != Complex(0.0))
            {
                acc.axpy(mij, times(j, rest));
            }
        }
        slot = std::move(acc);
        return *slot;
    }

private:
    const DiagQuadSystem& m_sys;
    std::vector<std::optional<NormalFormElement>> m_cache;
};

} // namespace

NormalFormElement multiply_by_variable(const NormalFormElement& nf, int i,
                                       const DiagQuadSystem& sys)
{
    const int n = sys.n_vars();
    if (i < 0 || i >= n || nf.n_vars() != n)
    {
        throw Error(ErrorKind::InvalidInput, "multiply_by_variable: index or size mismatch");
    }
    MonomialProducts products(sys);
    NormalFormElement out(n);
    for (Bitmask mask = 0; mask < nf.size(); ++mask)
    {
        if (nf[mask] != Complex(0.0))
        {
            out.axpy(nf[mask], products.times(i, mask));
        }
    }
    return out;
}

} // namespace h2red
