// Shared generators for randomized tests.

#ifndef H2RED_TESTS_SUPPORT_HPP
#define H2RED_TESTS_SUPPORT_HPP

#include <random>
#include <vector>

#include "h2red/poly.hpp"
#include "h2red/tf.hpp"

namespace support
{

// Stable pole set of size n, closed under conjugation, with pairwise
// separation >= sep. Real poles only when real_only.
inline std::vector<h2red::Complex> random_poles(std::mt19937_64& gen, int n, double lo, double hi,
                                                double sep, bool real_only = false)
{
    std::uniform_real_distribution<double> re(lo, hi);
    std::uniform_real_distribution<double> im(0.3, 2.0);
    std::uniform_int_distribution<int> coin(0, 1);
    for (;;)
    {
        std::vector<h2red::Complex> p;
        while (static_cast<int>(p.size()) < n)
        {
            if (!real_only && n - static_cast<int>(p.size()) >= 2 && coin(gen) == 1)
            {
                const h2red::Complex z(re(gen), im(gen));
                p.push_back(z);
                p.push_back(std::conj(z));
            }
            else
            {
                p.emplace_back(re(gen), 0.0);
            }
        }
        bool ok = true;
        for (std::size_t i = 0; i < p.size() && ok; ++i)
        {
            for (std::size_t j = i + 1; j < p.size() && ok; ++j)
            {
                ok = std::abs(p[i] - p[j]) >= sep;
            }
        }
        if (ok)
        {
            return p;
        }
    }
}

// Real monic denominator from poles and a random real numerator of degree n-1.
inline h2red::TransferFunction random_tf(std::mt19937_64& gen, const std::vector<h2red::Complex>& poles)
{
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const auto d = h2red::Polynomial::from_roots(poles).real_part();
    std::vector<double> e(poles.size());
    for (auto& x : e)
    {
        x = u(gen);
    }
    e[0] = e[0] >= 0.0 ? e[0] + 0.5 : e[0] - 0.5;
    return h2red::TransferFunction::make(h2red::Polynomial::from_real(e), d);
}

inline std::vector<double> real_desc(const h2red::Polynomial& p)
{
    return p.real_coeffs();
}

} // namespace support

#endif
