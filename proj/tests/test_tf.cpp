#include <doctest.h>

#include <random>

#include <functional>

#include "h2red/error.hpp"
#include "h2red/tf.hpp"
#include "oracle/lyapunov.hpp"
#include "oracle/quadrature.hpp"
#include "support.hpp"

using namespace h2red;

namespace
{

const std::vector<double> kNinthNum{8.4800, -2.5942, 153.5350, 38.8803, 599.3205,
                                  196.3752, 315.3021, 6.4558, 9.4478e-5};
const std::vector<double> kNinthDen{1, 2.1179, 16.1278, 25.6052, 62.7884,
                                  79.1895, 42.6617, 32.5279, 0.2514, 2.2495e-6};

std::string message_of(const std::function<void()>& f, ErrorKind* kind = nullptr)
{
    try
    {
        f();
    }
    catch (const Error& e)
    {
        if (kind != nullptr)
        {
            *kind = e.kind();
        }
        return e.what();
    }
    return {};
}

bool contains(const std::string& s, const std::string& part)
{
    return s.find(part) != std::string::npos;
}

// sum_{j=1..5} q_j / (s + q_j), q_j = 0.78^{2j}
ValidatedSystem relaxation_benchmark()
{
    std::vector<Complex> poles, residues;
    for (int j = 1; j <= 5; ++j)
    {
        const double p = std::pow(0.78, 2 * j);
        poles.emplace_back(-p, 0.0);
        residues.emplace_back(p, 0.0);
    }
    return validate_pole_residue(poles, residues);
}

} // namespace

TEST_CASE("make normalizes to a monic denominator")
{
    const auto tf = TransferFunction::make(Polynomial{2.0}, Polynomial{2.0, 4.0});
    CHECK(tf.denominator == Polynomial{1.0, 2.0});
    CHECK(tf.numerator == Polynomial{1.0});
    CHECK(tf.order() == 1);
}

TEST_CASE("validate first-order system")
{
    const auto sys = validate(TransferFunction::make(Polynomial{1.0}, Polynomial{1.0, 1.0}));
    REQUIRE(sys.order() == 1);
    CHECK(std::abs(sys.poles()[0] - Complex(-1.0)) < 1e-15);
    CHECK(std::abs(sys.e_at_poles()[0] - Complex(1.0)) < 1e-15);
    CHECK(std::abs(sys.dprime_at_poles()[0] - Complex(1.0)) < 1e-15);
    CHECK(std::abs(sys.d_at_minus_poles()[0] - Complex(2.0)) < 1e-15);
}

TEST_CASE("validate the ninth-order benchmark")
{
    const auto sys = validate(TransferFunction::make(kNinthNum, kNinthDen));
    CHECK(sys.order() == 9);
    for (const auto& p : sys.poles())
    {
        CHECK(p.real() < 0.0);
    }
    for (std::size_t i = 1; i < sys.poles().size(); ++i)
    {
        CHECK(sys.poles()[i - 1].real() <= sys.poles()[i].real());
    }
    for (std::size_t i = 0; i < sys.poles().size(); ++i)
    {
        const auto j = sys.conjugate_partner()[i];
        CHECK(sys.poles()[j] == std::conj(sys.poles()[i]));
    }
}

TEST_CASE("validation errors")
{
    ErrorKind kind{};
    SUBCASE("pole-zero cancellation")
    {
        const auto msg = message_of(
            [] { validate(TransferFunction::make(Polynomial{1.0, 1.0}, Polynomial{1.0, 3.0, 2.0})); }, &kind);
        CHECK(contains(msg, "pole-zero cancellation"));
        CHECK(kind == ErrorKind::Validation);
    }
    SUBCASE("not strictly proper")
    {
        const auto msg = message_of(
            [] { validate(TransferFunction::make(Polynomial{1.0, 0.0}, Polynomial{1.0, 1.0})); }, &kind);
        CHECK(contains(msg, "not strictly proper"));
    }
    SUBCASE("unstable pole")
    {
        const auto msg = message_of(
            [] { validate(TransferFunction::make(Polynomial{1.0}, Polynomial{1.0, 1.0, -2.0})); }, &kind);
        CHECK(contains(msg, "unstable pole"));
        CHECK(kind == ErrorKind::Validation);
    }
    SUBCASE("repeated pole")
    {
        const auto msg = message_of(
            [] { validate(TransferFunction::make(Polynomial{1.0}, Polynomial{1.0, 2.0, 1.0})); }, &kind);
        CHECK(contains(msg, "repeated pole"));
    }
    SUBCASE("pole-residue form")
    {
        const std::vector<Complex> poles{Complex(-1.0, 1.0)}, res{1.0};
        CHECK(contains(message_of([&] { validate_pole_residue(poles, res); }), "not closed under conjugation"));
        const std::vector<Complex> p2{-1.0}, r2{Complex(1.0, 0.5)};
        CHECK(contains(message_of([&] { validate_pole_residue(p2, r2); }), "must be real"));
    }
}

TEST_CASE("strip_feedthrough")
{
    double dc = 0.0;
    const auto tf = strip_feedthrough(TransferFunction::make(Polynomial{2.0, 3.0}, Polynomial{1.0, 1.0}), &dc);
    CHECK(dc == doctest::Approx(2.0));
    CHECK(tf.numerator.coeffs()[0].real() == doctest::Approx(1.0));
    CHECK(tf.numerator.degree() == 0);
}

TEST_CASE("h2_norm known values")
{
    const auto first = validate(TransferFunction::make(Polynomial{1.0}, Polynomial{1.0, 1.0}));
    CHECK(h2_norm(first) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));

    const auto ex1 = validate(TransferFunction::make(kNinthNum, kNinthDen));
    CHECK(h2_norm(ex1) == doctest::Approx(8.8261).epsilon(0.5e-4 / 8.8261));

    CHECK(h2_norm(relaxation_benchmark()) == doctest::Approx(1.6980).epsilon(0.5e-4 / 1.6980));
}

TEST_CASE("h2_norm agrees with quadrature and state-space oracles")
{
    std::mt19937_64 gen(17);
    for (int t = 0; t < 40; ++t)
    {
        const int n   = 1 + t % 6;
        const auto p  = support::random_poles(gen, n, -3.0, -0.2, 0.1);
        const auto tf = support::random_tf(gen, p);
        const auto sys = validate(tf);
        const double mine = h2_norm(sys);
        const auto num = tf.numerator.real_coeffs();
        const auto den = tf.denominator.real_coeffs();
        CHECK(mine == doctest::Approx(oracle::h2_norm_quadrature(num, den)).epsilon(1e-6));
        CHECK(mine == doctest::Approx(oracle::h2_norm(oracle::realize(num, den))).epsilon(1e-8));
    }
}

TEST_CASE("h2_distance")
{
    SUBCASE("distance to itself is zero")
    {
        const auto ex1 = validate(TransferFunction::make(kNinthNum, kNinthDen));
        CHECK_THROWS_AS(h2_distance(ex1, ex1.tf()), Error); // shared poles are not supported
        std::mt19937_64 gen(2);
        const auto p  = support::random_poles(gen, 4, -3.0, -0.2, 0.2);
        const auto tf = support::random_tf(gen, p);
        const auto sys = validate(tf);
        // a slightly shifted copy converges to zero distance
        auto shifted = p;
        for (auto& z : shifted)
        {
            z -= 1e-7;
        }
        const auto tf2 = TransferFunction::make(tf.numerator, Polynomial::from_roots(shifted).real_part());
        CHECK(h2_distance(sys, tf2) < 1e-5 * h2_norm(sys));
    }
    SUBCASE("4-decimal reference approximant of the ninth-order benchmark")
    {
        const auto ex1 = validate(TransferFunction::make(kNinthNum, kNinthDen));
        const std::vector<double> b{8.4799, -2.5955, 153.5327, 38.8546, 599.3039, 196.2798, 315.2701, 6.4351};
        const std::vector<double> a{1, 2.1176, 16.1275, 25.6013, 62.7850, 79.1756, 42.6527, 32.5215, 0.2499};
        CHECK(h2_distance(ex1, TransferFunction::make(b, a)) == doctest::Approx(0.0344).epsilon(0.5e-3 / 0.0344));
    }
    SUBCASE("4-decimal reference approximant of the relaxation benchmark")
    {
        const std::vector<double> b{1.4240, 1.0946, 0.2371, 0.0134};
        const std::vector<double> a{1, 1.1781, 0.4457, 0.0627, 0.0028};
        CHECK(h2_distance(relaxation_benchmark(), TransferFunction::make(b, a))
              == doctest::Approx(0.0334).epsilon(0.5e-3 / 0.0334));
    }
    SUBCASE("unstable approximant")
    {
        const auto sys = validate(TransferFunction::make(Polynomial{1.0}, Polynomial{1.0, 1.0}));
        const auto msg = message_of([&] { h2_distance(sys, TransferFunction::make(Polynomial{1.0}, Polynomial{1.0, -0.5})); });
        CHECK(contains(msg, "unstable approximant"));
    }
    SUBCASE("expansion consistency and state-space oracle")
    {
        std::mt19937_64 gen(99);
        for (int t = 0; t < 30; ++t)
        {
            const int n  = 2 + t % 5;
            const auto p = support::random_poles(gen, n, -3.0, -0.2, 0.15);
            const auto q = support::random_poles(gen, n - 1, -3.5, -0.3, 0.15);
            bool clash   = false;
            for (const auto& x : p)
            {
                for (const auto& y : q)
                {
                    clash = clash || std::abs(x - y) < 0.05;
                }
            }
            if (clash)
            {
                continue;
            }
            const auto g  = support::random_tf(gen, p);
            const auto h  = support::random_tf(gen, q);
            const auto sys = validate(g);
            const double dist = h2_distance(sys, h);
            const auto pg = partial_fractions(g);
            const auto ph = partial_fractions(h);
            const double expansion = (h2_inner(pg, pg) - 2.0 * h2_inner(pg, ph) + h2_inner(ph, ph)).real();
            CHECK(dist * dist == doctest::Approx(expansion).epsilon(1e-8));
            const auto sg = oracle::realize(g.numerator.real_coeffs(), g.denominator.real_coeffs());
            const auto sh = oracle::realize(h.numerator.real_coeffs(), h.denominator.real_coeffs());
            const double ss = oracle::inner(sg, sg) - 2.0 * oracle::inner(sg, sh) + oracle::inner(sh, sh);
            CHECK(dist * dist == doctest::Approx(ss).epsilon(1e-7).scale(oracle::inner(sg, sg)));
        }
    }
}

TEST_CASE("validate is idempotent")
{
    std::mt19937_64 gen(5);
    for (int t = 0; t < 20; ++t)
    {
        const auto p   = support::random_poles(gen, 1 + t % 7, -3.0, -0.2, 0.1);
        const auto sys = validate(support::random_tf(gen, p));
        const auto again = validate(sys.tf());
        CHECK(again.poles() == sys.poles());
        CHECK(again.e_at_poles() == sys.e_at_poles());
        CHECK(again.dprime_at_poles() == sys.dprime_at_poles());
        CHECK(again.d_at_minus_poles() == sys.d_at_minus_poles());
    }
}
