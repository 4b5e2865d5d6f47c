///
/// \file tf.hpp
///
/// Transfer-function ingestion, validation and H2 norms by residue calculus.
///

#ifndef H2RED_TF_HPP
#define H2RED_TF_HPP

#include <span>
#include <vector>

#include "h2red/poly.hpp"

namespace h2red
{

///
/// Rational function numerator / denominator with real coefficients.
/// `make` divides both polynomials by the leading denominator coefficient,
/// so the denominator is monic afterwards.
///
struct TransferFunction
{
    Polynomial numerator;
    Polynomial denominator;

    static TransferFunction make(Polynomial numerator, Polynomial denominator);
    static TransferFunction make(std::span<const double> num_desc,
                                 std::span<const double> den_desc);

    int order() const noexcept
    {
        return denominator.degree();
    }
    Complex operator()(Complex s) const
    {
        return eval(numerator, s) / eval(denominator, s);
    }
};

/// Splits off the direct feedthrough: returns the strictly proper part and
/// stores the constant in `feedthrough` (when non-null).
TransferFunction strip_feedthrough(const TransferFunction& tf,
                                   double* feedthrough = nullptr);

struct ValidationTolerances
{
    /// Relative pairwise pole separation below which poles count as repeated.
    double pole_separation = 1e-7;
    /// |e(pole)| below this times ||e||_inf counts as a pole-zero cancellation.
    double coprime = 1e-9;
    /// Re(pole) >= -stability * max(1, |pole|) counts as unstable.
    double stability = 1e-14;
    /// Conjugate pairing tolerance for user-supplied poles (relative).
    double conjugate = 1e-10;
};

///
/// Stable strictly proper system with distinct poles, plus the pole
/// evaluations the reduction pipeline needs. Poles are sorted by real part,
/// then imaginary part; every per-pole array shares that order.
///
class ValidatedSystem
{
public:
    const TransferFunction& tf() const noexcept
    {
        return m_tf;
    }
    int order() const noexcept
    {
        return static_cast<int>(m_poles.size());
    }
    const std::vector<Complex>& poles() const noexcept
    {
        return m_poles;
    }
    const std::vector<Complex>& e_at_poles() const noexcept
    {
        return m_e_at_poles;
    }
    const std::vector<Complex>& dprime_at_poles() const noexcept
    {
        return m_dprime_at_poles;
    }
    const std::vector<Complex>& d_at_minus_poles() const noexcept
    {
        return m_d_at_minus_poles;
    }
    /// Partial-fraction residues e(pole) / d'(pole).
    std::vector<Complex> residues() const;
    /// Index of the conjugate partner of each pole (itself for real poles).
    const std::vector<std::size_t>& conjugate_partner() const noexcept
    {
        return m_partner;
    }

private:
    friend ValidatedSystem validate(const TransferFunction&,
                                    const ValidationTolerances&);
    friend ValidatedSystem validate_pole_residue(std::span<const Complex>,
                                                 std::span<const Complex>,
                                                 const ValidationTolerances&);

    TransferFunction m_tf;
    std::vector<Complex> m_poles;
    std::vector<Complex> m_e_at_poles;
    std::vector<Complex> m_dprime_at_poles;
    std::vector<Complex> m_d_at_minus_poles;
    std::vector<std::size_t> m_partner;
};

/// Coefficient-form path. Poles come from the companion matrix of d.
ValidatedSystem validate(const TransferFunction& tf,
                         const ValidationTolerances& tol = {});

/// Pole-residue path: sum_i residues_i / (s - poles_i). The poles are used
/// as given (after snapping conjugate partners to exact conjugates).
ValidatedSystem validate_pole_residue(std::span<const Complex> poles,
                                      std::span<const Complex> residues,
                                      const ValidationTolerances& tol = {});

double h2_norm(const ValidatedSystem& sys);

///
/// ||e/d - b/a||_2 for a stable strictly proper approximant b/a with simple
/// poles, by merging both partial-fraction expansions. Throws a Validation
/// error for unstable approximants and when a pole is shared with `sys`.
///
double h2_distance(const ValidatedSystem& sys, const TransferFunction& approx);

/// Partial-fraction data of a strictly proper function with simple poles.
struct PoleResidue
{
    std::vector<Complex> poles;
    std::vector<Complex> residues;
};
PoleResidue partial_fractions(const TransferFunction& tf);

/// <F, G> = (1/2pi) int F(iw) conj(G(iw)) dw for real stable functions with
/// simple poles, written in partial-fraction form.
Complex h2_inner(const PoleResidue& f, const PoleResidue& g);

} // namespace h2red

#endif // H2RED_TF_HPP
