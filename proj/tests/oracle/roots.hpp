// Durand-Kerner (Weierstrass) simultaneous iteration plus polynomial helpers
// on plain coefficient vectors. Independent of the library's companion-matrix
// root finder.

#ifndef H2RED_TESTS_ORACLE_ROOTS_HPP
#define H2RED_TESTS_ORACLE_ROOTS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle
{

using cplx = std::complex<double>;
using lcplx = std::complex<long double>;

// Ascending coefficient vectors.
template <typename T>
std::vector<T> conv(const std::vector<T>& a, const std::vector<T>& b)
{
    std::vector<T> c(a.size() + b.size() - 1, T(0));
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        for (std::size_t j = 0; j < b.size(); ++j)
        {
            c[i + j] += a[i] * b[j];
        }
    }
    return c;
}

template <typename T>
std::vector<T> add(std::vector<T> a, const std::vector<T>& b, T scale = T(1))
{
    if (b.size() > a.size())
    {
        a.resize(b.size(), T(0));
    }
    for (std::size_t i = 0; i < b.size(); ++i)
    {
        a[i] += scale * b[i];
    }
    return a;
}

template <typename T, typename S>
S horner(const std::vector<T>& asc, S x)
{
    S acc(0);
    for (auto it = asc.rbegin(); it != asc.rend(); ++it)
    {
        acc = acc * x + S(*it);
    }
    return acc;
}

// Roots of an ascending-coefficient polynomial; leading zeros are dropped.
inline std::vector<cplx> durand_kerner(std::vector<cplx> asc, int max_iter = 5000)
{
    while (asc.size() > 1 && std::abs(asc.back()) == 0.0)
    {
        asc.pop_back();
    }
    const std::size_t n = asc.size() - 1;
    if (n == 0)
    {
        return {};
    }
    std::vector<lcplx> p(asc.size());
    const lcplx lead(asc.back().real(), asc.back().imag());
    for (std::size_t k = 0; k < asc.size(); ++k)
    {
        p[k] = lcplx(asc[k].real(), asc[k].imag()) / lead;
    }
    // Cauchy bound for the starting circle.
    long double radius = 0.0L;
    for (std::size_t k = 0; k < n; ++k)
    {
        radius = std::max(radius, std::abs(p[k]));
    }
    radius = 1.0L + radius;
    std::vector<lcplx> z(n);
    const lcplx seed(0.4L, 0.9L);
    for (std::size_t k = 0; k < n; ++k)
    {
        z[k] = radius * std::pow(seed, static_cast<long double>(k));
    }
    for (int it = 0; it < max_iter; ++it)
    {
        long double change = 0.0L;
        for (std::size_t i = 0; i < n; ++i)
        {
            lcplx denom(1.0L);
            for (std::size_t j = 0; j < n; ++j)
            {
                if (j != i)
                {
                    denom *= z[i] - z[j];
                }
            }
            const lcplx step = horner(p, z[i]) / denom;
            z[i] -= step;
            change = std::max(change, std::abs(step) / (1.0L + std::abs(z[i])));
        }
        if (change < 1e-18L)
        {
            break;
        }
    }
    std::vector<cplx> out;
    for (const auto& w : z)
    {
        out.emplace_back(static_cast<double>(w.real()), static_cast<double>(w.imag()));
    }
    return out;
}

} // namespace oracle

#endif
