#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"
#include "tors/scheme.hpp"

using namespace tors;
using namespace testsupport;

namespace {

RatFunc rf(const char* s) { return parse_ratfunc(s); }

// -4 + 4 sqrt 2 in Q(zeta_8), as an element of the trivial tower
TowerElement lambda_three() {
    auto f = CyclotomicField::get(8);
    auto sqrt2 = CyclotomicNumber::zeta(f, 1) + CyclotomicNumber::zeta(f, 7);
    return TowerElement::from_base(trivial_tower(f),
                                   CyclotomicNumber::rational(f, -4) + CyclotomicNumber::rational(f, 4) * sqrt2);
}

TowerElement rational_lambda(long v) { return TowerElement::from_rational(trivial_tower(CyclotomicField::get(1)), v); }

QPoly poly_over_Q(const Poly<RatFunc>& p) {
    std::vector<Rational> c;
    for (const auto& a : p.coeffs()) {
        REQUIRE(a.is_constant());
        c.push_back(a.num()[0]);
    }
    return QPoly(c, Rational(0));
}

WeierstrassCurve<Rational> random_curve() {
    for (;;) {
        WeierstrassCurve<Rational> E{uniform(-4, 4), uniform(-4, 4), uniform(-4, 4)};
        if (E.nonsingular()) return E;
    }
}

// Jordan totient J_2(m) = number of points of exact order m in (Z/m)^2.
std::uint64_t jordan2(std::uint64_t m) {
    std::uint64_t r = m * m;
    for (auto p : prime_factors(m)) r = r / (p * p) * (p * p - 1);
    return r;
}

}  // namespace

TEST_CASE("rational function grammar") {
    CHECK(rf("-(1+lambda)") == -(RatFunc::constant(1) + RatFunc::lambda()));
    CHECK(rf("λ^2 - 1") == RatFunc(qpoly({-1, 0, 1}), qpoly({1})));
    CHECK(rf("t/(t^2-t)") == RatFunc(qpoly({1}), qpoly({-1, 1})));
    CHECK(rf("2^-1") == RatFunc::constant(Rational(1, 2)));
    CHECK(rf(" 3 * (t + 1) ^ 2 ") == RatFunc(qpoly({3, 6, 3}), qpoly({1})));
    CHECK_THROWS_AS(rf("1+"), std::invalid_argument);
    CHECK_THROWS_AS(rf("x"), std::invalid_argument);
    CHECK_THROWS_AS(rf("(t"), std::invalid_argument);
    CHECK_THROWS_AS(rf("1/(t-t)"), std::domain_error);
}

TEST_CASE("division polynomials, frozen values") {
    // Legendre over Q(lambda)
    auto s = EllipticScheme::legendre();
    DivisionPolynomials<RatFunc> D(WeierstrassCurve<RatFunc>{s.a, s.b, s.c});
    CHECK(D.f(1) == Poly<RatFunc>::constant(RatFunc::constant(1)));
    Poly<RatFunc> psi3({-pow(RatFunc::lambda(), 2), RatFunc(), RatFunc::constant(6) * RatFunc::lambda(),
                        RatFunc::constant(-4) * (RatFunc::constant(1) + RatFunc::lambda()), RatFunc::constant(3)},
                       RatFunc());
    CHECK(D.f(3) == psi3);

    // y^2 = x^3 - x: psi_2^2 / 4 is the cubic, with roots -1, 0, 1
    DivisionPolynomials<Rational> D2(WeierstrassCurve<Rational>{0, -1, 0});
    CHECK(Rational(1, 4) * D2.psi2_squared() == qpoly({0, -1, 0, 1}));
    CHECK(DivisionPolynomials<Rational>::has_y_factor(2));
    auto r = certified_roots(qpoly({0, -1, 0, 1}), 64);
    REQUIRE(r.size() == 3);
    CHECK(std::abs(r[0].value.re.convert_to<double>() + 1) < 1e-15);
    CHECK(std::abs(r[1].value.re.convert_to<double>()) < 1e-15);
    CHECK(std::abs(r[2].value.re.convert_to<double>() - 1) < 1e-15);

    // Short Weierstrass y^2 = x^3 + A x + B:
    // psi_4 = 4y (x^6 + 5A x^4 + 20B x^3 - 5A^2 x^2 - 4AB x - 8B^2 - A^3)
    for (int it = 0; it < 20; ++it) {
        Rational A = small_rational(5), B = small_rational(5);
        DivisionPolynomials<Rational> Ds(WeierstrassCurve<Rational>{0, A, B});
        QPoly want({-8 * B * B - A * A * A, -4 * A * B, -5 * A * A, 20 * B, 5 * A, 0, 1}, Rational(0));
        CHECK(Ds.f(4) == Rational(2) * want);
    }
}

TEST_CASE("division values agree with division polynomials") {
    for (int it = 0; it < 20; ++it) {
        auto E = random_curve();
        DivisionPolynomials<Rational> D(E);
        Rational x0 = small_rational(6);
        auto fv = division_values(E, x0, 14);
        for (std::size_t m = 0; m <= 14; ++m) REQUIRE(fv[m] == D.f(m).eval(x0));
    }
}

TEST_CASE("degrees and primitive torsion counts over C") {
    for (int it = 0; it < 6; ++it) {
        auto E = random_curve();
        DivisionPolynomials<Rational> D(E);
        for (std::uint64_t m = 3; m <= 12; ++m) {
            const QPoly& f = D.f(m);
            int want = m % 2 ? static_cast<int>((m * m - 1) / 2) : static_cast<int>((m * m - 4) / 2);
            REQUIRE(f.degree() == want);
            REQUIRE(is_squarefree(f));
            // x-coordinates of points of exact order m: roots of f_m outside every f_d, d | m, 3 <= d < m
            QPoly lower = QPoly::constant(Rational(1));
            for (auto d : divisors(m))
                if (d >= 3 && d < m) lower = lower * D.f(d);
            int shared = gcd(f, lower).degree();
            REQUIRE(static_cast<std::uint64_t>(f.degree() - shared) == jordan2(m) / 2);
        }
    }
}

TEST_CASE("division values against brute force over F_q") {
    const std::uint64_t primes[] = {3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73};
    int curves = 0;
    for (auto q : primes) {
        auto Eq = random_curve();
        WeierstrassCurve<Fp> E{{reduce_rational(Eq.a, q), q}, {reduce_rational(Eq.b, q), q}, {reduce_rational(Eq.c, q), q}};
        if (!E.nonsingular()) continue;
        ++curves;
        for (std::uint64_t x = 0; x < q; ++x)
            for (std::uint64_t y = 0; y < q; ++y) {
                auto P = CurvePoint<Fp>::affine({x, q}, {y, q});
                if (!on_curve(E, P)) continue;
                auto fv = division_values(E, P.x, 12);
                CurvePoint<Fp> Q = P;
                unsigned order = 0;
                for (unsigned m = 1; m <= 12; ++m) {
                    // Q = m P
                    bool dead = Q.infinity;
                    if (dead && !order) order = m;
                    REQUIRE(dead == (m == 1 ? false : killed_by(fv, y == 0, m)));
                    Q = point_add(E, Q, P);
                }
                auto t = torsion_order(E, P, 12);
                REQUIRE(t.has_value() == (order != 0));
                if (order) {
                    REQUIRE(*t == order);
                    REQUIRE(scalar_mul(E, P, order).infinity);
                    for (auto d : divisors(order))
                        if (d < order) REQUIRE(!scalar_mul(E, P, d).infinity);
                }
                REQUIRE(torsion_order(E, negate(P), 12) == t);
            }
    }
    CHECK(curves >= 15);
}

TEST_CASE("group law") {
    WeierstrassCurve<Rational> E{0, -1, 0};
    auto O = CurvePoint<Rational>::at_infinity();
    auto P = CurvePoint<Rational>::affine(0, 0);
    CHECK(point_add(E, P, O) == P);
    CHECK(point_add(E, O, P) == P);
    CHECK(point_add(E, P, P).infinity);
    // associativity and commutativity on random F_q points
    for (std::uint64_t q : {101ull, 103ull, 107ull}) {
        WeierstrassCurve<Fp> Eq{{2, q}, {3, q}, {5, q}};
        std::vector<CurvePoint<Fp>> pts;
        for (std::uint64_t x = 0; x < q && pts.size() < 12; ++x)
            for (std::uint64_t y = 1; y < q; ++y) {
                auto R = CurvePoint<Fp>::affine({x, q}, {y, q});
                if (on_curve(Eq, R)) {
                    pts.push_back(R);
                    break;
                }
            }
        for (auto& A : pts)
            for (auto& B : pts) {
                REQUIRE(point_add(Eq, A, B) == point_add(Eq, B, A));
                REQUIRE(on_curve(Eq, point_add(Eq, A, B)));
                for (auto& C : pts) REQUIRE(point_add(Eq, point_add(Eq, A, B), C) == point_add(Eq, A, point_add(Eq, B, C)));
            }
    }
}

TEST_CASE("torsion orders, spec examples") {
    auto s = EllipticScheme::legendre();
    {
        auto sp = specialize(s, rational_lambda(2));
        CHECK(!sp.adjoined);
        CHECK(sp.point.w.is_zero());
        CHECK(torsion_order(sp.curve, sp.point, 64) == 2u);
    }
    {
        auto lam = lambda_three();
        auto sp = specialize(s, lam);
        CHECK(sp.adjoined);
        auto two = TowerElement::from_rational(lam.tower(), 2);
        CHECK(sp.point.v == two * (two - lam));
        // 16 - 8 lambda - lambda^2 = 0
        CHECK((TowerElement::from_rational(lam.tower(), 16) - TowerElement::from_rational(lam.tower(), 8) * lam - lam * lam)
                  .is_zero());
        auto P2 = point_double(sp.curve, sp.point);
        CHECK(!P2.infinity);
        CHECK(point_add(sp.curve, P2, sp.point).infinity);
        CHECK(torsion_order(sp.curve, sp.point, 64) == 3u);
        CHECK(torsion_order(sp.curve, negate(sp.point), 64) == 3u);
    }
    {
        // y^2 = 2 (2 - 3) = -2
        auto sp = specialize(s, rational_lambda(3));
        CHECK(sp.adjoined);
        CHECK(sp.point.y_square() == TowerElement::from_rational(sp.lambda.tower(), -2));
        CHECK(!torsion_order(sp.curve, sp.point, 10).has_value());
    }
    CHECK_THROWS_AS(specialize(s, rational_lambda(0)), BadReduction);
    CHECK_THROWS_AS(specialize(s, rational_lambda(1)), BadReduction);
    auto pole = EllipticScheme::from_strings("0", "-1", "1/(t-5)", "2");
    CHECK_THROWS_AS(specialize(pole, rational_lambda(5)), BadReduction);
    auto spole = EllipticScheme::from_strings("0", "-1", "t", "1/(t-4)");
    CHECK_THROWS_AS(specialize(spole, rational_lambda(4)), BadReduction);
}

TEST_CASE("prescreen") {
    auto s = EllipticScheme::legendre();
    auto sp2 = specialize(s, rational_lambda(2));
    CHECK(torsion_prescreen(sp2, 2, {7}) == Prescreen::pass);
    CHECK(torsion_prescreen(sp2, 1, {7}) == Prescreen::fail);
    auto sp3 = specialize(s, rational_lambda(3));
    CHECK(torsion_prescreen(sp3, 3, {11}) == Prescreen::fail);
    // psi_3(2) = 16 - 24 - 9 = -17 at lambda = 3, which vanishes mod 17
    CHECK(torsion_prescreen(sp3, 3, {17}) == Prescreen::pass);
    auto spl = specialize(s, lambda_three());
    std::vector<std::uint64_t> qs{17, 41, 73, 89, 97};
    CHECK(torsion_prescreen(spl, 3, qs) == Prescreen::pass);
    for (unsigned m : {2u, 4u, 5u, 7u, 8u}) CHECK(torsion_prescreen(spl, m, qs) == Prescreen::fail);
    // soundness: a failing prescreen never contradicts the exact order
    for (int it = 0; it < 40; ++it) {
        long l = uniform(-20, 20);
        if (l == 0 || l == 1) continue;
        auto sp = specialize(s, rational_lambda(l));
        auto ord = torsion_order(sp.curve, sp.point, 24);
        for (unsigned m = 1; m <= 24; ++m) {
            auto pre = torsion_prescreen(sp, m, {101, 103, 107, 109, 113});
            if (ord && m % *ord == 0) REQUIRE(pre == Prescreen::pass);
        }
        for (auto& red : good_reductions(*sp.lambda.tower(), 4, 200)) {
            try {
                auto r = reduced_order(sp, red, 200);
                if (ord) REQUIRE((r && *ord % *r == 0));
            } catch (const BadPrime&) {
            }
        }
    }
}

TEST_CASE("bad reduction sets") {
    auto leg = bad_reduction_set(EllipticScheme::legendre());
    REQUIRE(leg.points.size() == 2);
    CHECK(leg.points[0].minpoly == qpoly({0, 1}));
    CHECK(leg.points[1].minpoly == qpoly({-1, 1}));
    CHECK(leg.pole_at_infinity);
    auto cube = bad_reduction_set(EllipticScheme::from_strings("0", "0", "t", "1"));
    REQUIRE(cube.points.size() == 1);
    CHECK(cube.points[0].minpoly == qpoly({0, 1}));
    auto constant = bad_reduction_set(EllipticScheme::from_strings("0", "-1", "0", "2"));
    CHECK(constant.points.empty());
    CHECK(!constant.pole_at_infinity);
    auto poles = bad_reduction_set(EllipticScheme::from_strings("0", "-1", "1/(t^2-2)", "2"));
    bool found = false;
    for (const auto& p : poles.points) found = found || p.minpoly == qpoly({-2, 0, 1});
    CHECK(found);
    CHECK_THROWS_AS(EllipticScheme::from_strings("0", "0", "0", "1"), std::invalid_argument);
    CHECK(section_poles(EllipticScheme::from_strings("0", "-1", "t", "1/(t-4)")).size() == 1);
}

TEST_CASE("specialization avoids exactly the bad set") {
    auto s = EllipticScheme::from_strings("t", "t^2 - 3", "1/(t+2)", "t");
    auto bad = bad_reduction_set(s);
    for (long l = -30; l <= 30; ++l) {
        bool is_bad = false;
        for (const auto& p : bad.points) is_bad = is_bad || p.minpoly.eval(Rational(l)) == 0;
        if (is_bad) {
            CHECK_THROWS_AS(specialize(s, rational_lambda(l)), BadReduction);
        } else {
            auto sp = specialize(s, rational_lambda(l));
            REQUIRE(sp.curve.nonsingular());
            REQUIRE(on_curve(sp.curve, sp.point));
        }
    }
}
