#include "h2red/tf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "h2red/error.hpp"

namespace h2red
{

namespace
{

std::string describe(Complex z)
{
    std::ostringstream os;
    os.precision(10);
    os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
    return os.str();
}

bool pole_order(const Complex& a, const Complex& b)
{
    if (a.real() != b.real())
    {
        return a.real() < b.real();
    }
    return a.imag() < b.imag();
}

// Pairs every pole with its conjugate. Real poles pair with themselves.
std::vector<std::size_t> pair_conjugates(const std::vector<Complex>& poles,
                                         double rel_tol)
{
    const std::size_t n = poles.size();
    std::vector<std::size_t> partner(n, n);
    for (std::size_t i = 0; i < n; ++i)
    {
        if (partner[i] != n)
        {
            continue;
        }
        const double scale = std::max(1.0, std::abs(poles[i]));
        if (std::abs(poles[i].imag()) <= rel_tol * scale)
        {
            partner[i] = i;
            continue;
        }
        std::size_t best = n;
        double best_gap  = 0.0;
        for (std::size_t j = 0; j < n; ++j)
        {
            if (j == i || partner[j] != n)
            {
                continue;
            }
            const double gap = std::abs(poles[j] - std::conj(poles[i]));
            if (best == n || gap < best_gap)
            {
                best     = j;
                best_gap = gap;
            }
        }
        if (best == n || best_gap > rel_tol * scale)
        {
            throw Error(ErrorKind::Validation,
                        "pole set is not closed under conjugation: " + describe(poles[i]));
        }
        partner[i]    = best;
        partner[best] = i;
    }
    return partner;
}

void check_poles(const std::vector<Complex>& poles, const ValidationTolerances& tol)
{
    double scale = 0.0;
    for (const auto& p : poles)
    {
        scale = std::max(scale, std::abs(p));
        if (p.real() >= -tol.stability * std::max(1.0, std::abs(p)))
        {
            throw Error(ErrorKind::Validation, "unstable pole at " + describe(p));
        }
    }
    for (std::size_t i = 0; i < poles.size(); ++i)
    {
        for (std::size_t j = i + 1; j < poles.size(); ++j)
        {
            if (std::abs(poles[i] - poles[j]) < tol.pole_separation * scale)
            {
                throw Error(ErrorKind::Validation,
                            "repeated pole near " + describe(poles[i])
                                + " (systems with repeated poles are not supported)");
            }
        }
    }
}

} // namespace

TransferFunction TransferFunction::make(Polynomial numerator, Polynomial denominator)
{
    if (denominator.is_zero())
    {
        throw Error(ErrorKind::InvalidInput, "denominator is the zero polynomial");
    }
    const Complex lead = denominator.leading();
    numerator *= 1.0 / lead;
    denominator *= 1.0 / lead;
    return TransferFunction{std::move(numerator), std::move(denominator)};
}

TransferFunction TransferFunction::make(std::span<const double> num_desc,
                                        std::span<const double> den_desc)
{
    return make(Polynomial::from_real(num_desc), Polynomial::from_real(den_desc));
}

TransferFunction strip_feedthrough(const TransferFunction& tf, double* feedthrough)
{
    const auto qr = divide(tf.numerator, tf.denominator);
    if (qr.quotient.degree() > 0)
    {
        throw Error(ErrorKind::Validation,
                    "improper transfer function: numerator degree exceeds denominator degree");
    }
    if (feedthrough != nullptr)
    {
        *feedthrough = qr.quotient.coeffs()[0].real();
    }
    return TransferFunction{qr.remainder, tf.denominator};
}

std::vector<Complex> ValidatedSystem::residues() const
{
    std::vector<Complex> r(m_poles.size());
    for (std::size_t i = 0; i < r.size(); ++i)
    {
        r[i] = m_e_at_poles[i] / m_dprime_at_poles[i];
    }
    return r;
}

ValidatedSystem validate(const TransferFunction& tf_in, const ValidationTolerances& tol)
{
    if (!tf_in.numerator.is_real() || !tf_in.denominator.is_real())
    {
        throw Error(ErrorKind::Validation, "transfer function coefficients must be real");
    }
    const TransferFunction tf =
        TransferFunction::make(tf_in.numerator, tf_in.denominator);
    if (tf.denominator.degree() < 1)
    {
        throw Error(ErrorKind::Validation, "denominator must have degree >= 1");
    }
    if (!tf.numerator.is_zero() && tf.numerator.degree() >= tf.denominator.degree())
    {
        throw Error(ErrorKind::Validation,
                    "not strictly proper: numerator degree must be below denominator degree");
    }

    ValidatedSystem sys;
    sys.m_tf    = tf;
    sys.m_poles = roots(tf.denominator).values;
    std::sort(sys.m_poles.begin(), sys.m_poles.end(), pole_order);
    check_poles(sys.m_poles, tol);
    sys.m_partner = pair_conjugates(sys.m_poles, tol.conjugate);

    const Polynomial dprime = derivative(tf.denominator);
    const double enorm      = tf.numerator.max_abs_coeff();
    for (const auto& p : sys.m_poles)
    {
        const Complex ep = eval(tf.numerator, p);
        if (std::abs(ep) < tol.coprime * enorm || ep == Complex(0.0))
        {
            throw Error(ErrorKind::Validation,
                        "pole-zero cancellation at pole " + describe(p));
        }
        sys.m_e_at_poles.push_back(ep);
        sys.m_dprime_at_poles.push_back(eval(dprime, p));
        sys.m_d_at_minus_poles.push_back(eval(tf.denominator, -p));
    }
    return sys;
}

ValidatedSystem validate_pole_residue(std::span<const Complex> poles_in,
                                      std::span<const Complex> residues_in,
                                      const ValidationTolerances& tol)
{
    if (poles_in.size() != residues_in.size() || poles_in.empty())
    {
        throw Error(ErrorKind::InvalidInput,
                    "poles and residues must be nonempty and of equal length");
    }
    const std::size_t n = poles_in.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pole_order(poles_in[a], poles_in[b]);
    });
    std::vector<Complex> poles(n);
    std::vector<Complex> res(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        poles[k] = poles_in[order[k]];
        res[k]   = residues_in[order[k]];
    }
    check_poles(poles, tol);
    const auto partner = pair_conjugates(poles, tol.conjugate);
    for (std::size_t i = 0; i < n; ++i)
    {
        const std::size_t j = partner[i];
        if (j == i)
        {
            poles[i] = Complex(poles[i].real(), 0.0);
            if (std::abs(res[i].imag()) > tol.conjugate * std::max(1.0, std::abs(res[i])))
            {
                throw Error(ErrorKind::Validation,
                            "residue at a real pole must be real: " + describe(res[i]));
            }
            res[i] = Complex(res[i].real(), 0.0);
        }
        else if (i < j)
        {
            if (std::abs(res[j] - std::conj(res[i]))
                > tol.conjugate * std::max(1.0, std::abs(res[i])))
            {
                throw Error(ErrorKind::Validation,
                            "residues at conjugate poles must be conjugate: "
                                + describe(res[i]) + " vs " + describe(res[j]));
            }
            poles[j] = std::conj(poles[i]);
            res[j]   = std::conj(res[i]);
        }
    }

    Polynomial den = Polynomial::from_roots(poles);
    Polynomial num;
    for (std::size_t i = 0; i < n; ++i)
    {
        std::vector<Complex> others;
        for (std::size_t j = 0; j < n; ++j)
        {
            if (j != i)
            {
                others.push_back(poles[j]);
            }
        }
        num += res[i] * Polynomial::from_roots(others);
    }

    ValidatedSystem sys;
    sys.m_tf      = TransferFunction{num.real_part(), den.real_part()};
    sys.m_poles   = poles;
    sys.m_partner = partner;
    for (std::size_t i = 0; i < n; ++i)
    {
        if (res[i] == Complex(0.0))
        {
            throw Error(ErrorKind::Validation,
                        "pole-zero cancellation at pole " + describe(poles[i]));
        }
        // d'(p_i) from the product form is exact; e(p_i) = r_i d'(p_i)
        Complex dp(1.0);
        for (std::size_t j = 0; j < n; ++j)
        {
            if (j != i)
            {
                dp *= poles[i] - poles[j];
            }
        }
        Complex dm(1.0);
        for (std::size_t j = 0; j < n; ++j)
        {
            dm *= -poles[i] - poles[j];
        }
        sys.m_dprime_at_poles.push_back(dp);
        sys.m_e_at_poles.push_back(res[i] * dp);
        sys.m_d_at_minus_poles.push_back(dm);
    }
    return sys;
}

PoleResidue partial_fractions(const TransferFunction& tf)
{
    PoleResidue pr;
    pr.poles                = roots(tf.denominator).values;
    const Polynomial dprime = derivative(tf.denominator);
    for (const auto& p : pr.poles)
    {
        pr.residues.push_back(eval(tf.numerator, p) / eval(dprime, p));
    }
    return pr;
}

Complex h2_inner(const PoleResidue& f, const PoleResidue& g)
{
    Complex acc(0.0);
    for (std::size_t i = 0; i < f.poles.size(); ++i)
    {
        for (std::size_t j = 0; j < g.poles.size(); ++j)
        {
            acc += f.residues[i] * g.residues[j] / (-f.poles[i] - g.poles[j]);
        }
    }
    return acc;
}

double h2_norm(const ValidatedSystem& sys)
{
    PoleResidue pr{sys.poles(), sys.residues()};
    const Complex sq = h2_inner(pr, pr);
    if (std::abs(sq.imag()) > 1e-8 * std::max(1e-300, std::abs(sq)))
    {
        throw Error(ErrorKind::Numerical, "H2 norm has a non-negligible imaginary part");
    }
    return std::sqrt(std::max(0.0, sq.real()));
}

double h2_distance(const ValidatedSystem& sys, const TransferFunction& approx_in)
{
    if (!approx_in.numerator.is_real() || !approx_in.denominator.is_real())
    {
        throw Error(ErrorKind::Validation, "approximant coefficients must be real");
    }
    const TransferFunction approx =
        TransferFunction::make(approx_in.numerator, approx_in.denominator);
    if (!approx.numerator.is_zero() && approx.numerator.degree() >= approx.denominator.degree())
    {
        throw Error(ErrorKind::Validation, "approximant is not strictly proper");
    }
    PoleResidue merged{sys.poles(), sys.residues()};
    if (approx.denominator.degree() > 0 && !approx.numerator.is_zero())
    {
        const PoleResidue pa = partial_fractions(approx);
        double scale         = 0.0;
        for (const auto& p : pa.poles)
        {
            scale = std::max(scale, std::abs(p));
            if (p.real() >= 0.0)
            {
                throw Error(ErrorKind::Validation, "unstable approximant: pole at " + describe(p));
            }
        }
        for (const auto& p : sys.poles())
        {
            scale = std::max(scale, std::abs(p));
        }
        for (std::size_t k = 0; k < pa.poles.size(); ++k)
        {
            for (std::size_t j = 0; j < pa.poles.size(); ++j)
            {
                if (j != k && std::abs(pa.poles[k] - pa.poles[j]) <= 1e-12 * scale)
                {
                    throw Error(ErrorKind::Validation, "approximant has a repeated pole");
                }
            }
            for (const auto& p : sys.poles())
            {
                if (std::abs(pa.poles[k] - p) <= 1e-12 * scale)
                {
                    throw Error(ErrorKind::Validation,
                                "approximant shares a pole with the system at " + describe(p));
                }
            }
            merged.poles.push_back(pa.poles[k]);
            merged.residues.push_back(-pa.residues[k]);
        }
    }
    const Complex sq = h2_inner(merged, merged);
    return std::sqrt(std::max(0.0, sq.real()));
}

} // namespace h2red
