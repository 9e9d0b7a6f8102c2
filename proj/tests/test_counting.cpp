#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tors/counting.hpp"
#include "tors/elliptic.hpp"
#include "tors/roots.hpp"

#include <cmath>
#include <map>
#include <random>

using namespace tors;

namespace {

RootOfUnityTuple tup(std::uint64_t N, std::vector<std::int64_t> e) {
    std::size_t n = e.size();
    return make_tuple(n, N, std::move(e));
}

double d(const Real& x) { return x.convert_to<double>(); }

// Rationals in [0, 1) of height <= T.
std::vector<Rational> letters(unsigned T) {
    std::vector<Rational> out{Rational(0)};
    for (unsigned m = 2; m <= T; ++m)
        for (unsigned k = 1; k < m; ++k)
            if (gcd_u64(k, m) == 1) out.emplace_back(static_cast<long>(k), static_cast<long>(m));
    return out;
}

// Exact order by repeated addition, 0 if none up to bound or bad reduction.
unsigned order_by_addition(const RootOfUnityTuple& t, unsigned bound) {
    auto tw = trivial_tower(CyclotomicField::get(t.N));
    Specialization sp;
    try {
        sp = specialize(EllipticScheme::legendre(), TowerElement::from_base(tw, sum_of_roots(t)));
    } catch (const BadReduction&) {
        return 0;
    }
    TowerPoint Q = sp.point;
    for (unsigned k = 1; k <= bound; ++k) {
        if (Q.infinity) return k;
        Q = point_add(sp.curve, Q, sp.point);
    }
    return 0;
}

bool crude_in_S(const Complex& lam, double delta) {
    double r = std::hypot(d(lam.re), d(lam.im));
    double r1 = std::hypot(d(lam.re) - 1, d(lam.im));
    return r <= 1 / delta && r >= delta && r1 >= delta;
}

}  // namespace

TEST_CASE("delta from a, B and K") {
    PrecisionScope scope(128);
    double two_bad = std::exp(-6 * (1 + std::log(2.0)));
    auto der = delta_derivation(Real(1), {Real(0), Real(0)}, 1);
    CHECK(der.l == 3);
    CHECK(std::abs(d(der.delta) / two_bad - 1) < 1e-14);
    CHECK(d(der.delta) > 3.87e-5);
    CHECK(d(der.delta) < 3.88e-5);
    CHECK(std::abs(d(der.delta) - 3.873050276e-5) < 1e-14);

    CHECK(std::abs(d(compute_delta(Real(1), {}, 1)) / std::exp(-2 * (1 + std::log(2.0))) - 1) < 1e-14);
    Real k1 = compute_delta(Real(1), {Real(0), Real(0)}, 1);
    Real k2 = compute_delta(Real(1), {Real(0), Real(0)}, 2);
    CHECK(std::abs(d(k2 / (k1 * k1)) - 1) < 1e-14);
    // a bad point of height log 2
    Real h2 = log_height(Rational(2));
    CHECK(std::abs(d(h2) - std::log(2.0)) < 1e-15);
    CHECK(std::abs(d(compute_delta(Real(1), {h2}, 1)) / std::exp(-4 * (1 + 2 * std::log(2.0))) - 1) < 1e-14);

    CHECK_THROWS_AS(compute_delta(Real(0), {}, 1), std::domain_error);
    CHECK_THROWS_AS(compute_delta(Real(-1), {}, 1), std::domain_error);

    auto S = default_compact_set(EllipticScheme::legendre());
    CHECK(std::abs(d(S.delta) / two_bad - 1) < 1e-14);
    CHECK(S.bad.size() == 2);
    CHECK(std::abs(d(S.norm_bound * S.delta) - 1) < 1e-14);
}

TEST_CASE("heights of algebraic numbers") {
    PrecisionScope scope(128);
    CHECK(std::abs(d(log_height(Rational(-3, 7))) - std::log(7.0)) < 1e-15);
    CHECK(d(log_height(Rational(0))) == 0);
    // sqrt 2: M = 2, degree 2
    CHECK(std::abs(d(log_height_of_minpoly(qpoly({-2, 0, 1}))) - std::log(2.0) / 2) < 1e-15);
    // golden ratio: M = phi
    CHECK(std::abs(d(log_height_of_minpoly(qpoly({-1, -1, 1}))) - std::log((1 + std::sqrt(5.0)) / 2) / 2) < 1e-15);
    // roots of unity have height 0
    CHECK(std::abs(d(log_height_of_minpoly(qpoly({1, 1, 1, 1, 1})))) < 1e-30);
    // 2x - 1
    CHECK(std::abs(d(log_height_of_minpoly(qpoly({-1, 2}))) - std::log(2.0)) < 1e-15);
}

TEST_CASE("conjugates of low height avoid the excluded discs") {
    // For alpha = P - beta of degree d, the conjugates within delta of beta
    // number at most d (h(P) + h(beta) + log 2) / log(1/delta).
    PrecisionScope scope(128);
    Real delta = compute_delta(Real(1), {Real(0), Real(0)}, 1);
    double L = -std::log(d(delta));
    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<int> coef(-3, 3), deg(1, 5);
    std::size_t sampled = 0;
    while (sampled < 1000) {
        int D = deg(rng);
        std::vector<Rational> c;
        for (int i = 0; i <= D; ++i) c.emplace_back(coef(rng));
        if (sgn(c.back()) == 0) c.back() = 1;
        QPoly p(c, Rational(0));
        for (const auto& [fac, mult] : factor_over_Q(p)) {
            (void)mult;
            auto q = primitive_part(fac);
            std::size_t deg_q = static_cast<std::size_t>(q.degree());
            if (deg_q == 0) continue;
            double h = d(log_height_of_minpoly(q));
            if (h > 1) continue;
            if (deg_q == 1 && (sgn(q[0]) == 0 || q[0] + q[1] == 0)) continue;  // P in B
            ++sampled;
            std::size_t near0 = 0, near1 = 0, far = 0;
            for (const auto& r : certified_roots(q, 96)) {
                double x = d(r.value.re), y = d(r.value.im);
                if (std::hypot(x, y) < d(delta)) ++near0;
                if (std::hypot(x - 1, y) < d(delta)) ++near1;
                if (std::hypot(x, y) > 1 / d(delta)) ++far;
            }
            double bound = static_cast<double>(deg_q) * (h + std::log(2.0)) / L;
            CHECK(static_cast<double>(near0) <= bound);
            CHECK(static_cast<double>(near1) <= bound);
            CHECK(static_cast<double>(far) <= bound);
            CHECK(2 * (near0 + near1 + far) <= deg_q);
        }
    }
}

TEST_CASE("membership in the compact set") {
    PrecisionScope scope(160);
    auto S = default_compact_set(EllipticScheme::legendre());
    auto f = RatFunc::lambda();
    Real err("1e-40");
    std::vector<Complex> one_one{Complex(Real(1)), Complex(Real(1))};
    CHECK(membership_in_S(S, f, Complex(Real(2)), one_one, err));
    std::vector<Complex> opp{Complex(Real(1)), Complex(Real(-1))};
    CHECK_FALSE(membership_in_S(S, f, Complex(Real(0)), opp, err));
    // fibre mismatch
    CHECK_FALSE(membership_in_S(S, f, Complex(Real(3)), one_one, err));
    // annulus
    std::vector<Complex> small{Complex(Real("0.4")), Complex(Real("1.6"))};
    CHECK_FALSE(membership_in_S(S, f, Complex(Real(2)), small, err));
    // roots of unity lie in the annulus
    for (std::uint64_t N : {3u, 5u, 8u, 12u})
        for (std::uint64_t k = 0; k < N; ++k) {
            auto e = expi2pi(real_from(Rational(static_cast<long>(k), static_cast<long>(N))));
            std::vector<Complex> ee{e, Complex(Real(1))};
            Complex lam = e + Complex(Real(1));
            bool expect = crude_in_S(lam, d(S.delta));
            CHECK(membership_in_S(S, f, lam, ee, err) == expect);
        }
    // far away
    Real big = S.norm_bound * 2;
    std::vector<Complex> e1{Complex(big)};
    CHECK_FALSE(membership_in_S(S, f, Complex(big), e1, err, Real(1)));
    // exactly on the boundary of the disc around 0
    std::vector<Complex> e0{Complex(S.delta)};
    CHECK_THROWS_AS(membership_in_S(S, f, Complex(S.delta), e0, err, Real(1)), PrecisionError);
    try {
        membership_in_S(S, f, Complex(S.delta), e0, err, Real(1));
    } catch (const PrecisionError& e) {
        CHECK(std::string(e.what()).find("needs more precision") != std::string::npos);
    }
}

TEST_CASE("conjugate fractions") {
    auto S = default_compact_set(EllipticScheme::legendre());
    auto f = RatFunc::lambda();

    auto t2 = tup(1, {0, 0});
    auto tw = trivial_tower(CyclotomicField::get(1));
    CHECK(conjugate_fraction_in_S(S, f, TowerElement::from_base(tw, sum_of_roots(t2)), t2) == Rational(1));

    // a single fifth root of unity: all four conjugates are in S
    auto t5 = tup(5, {1});
    auto tw5 = trivial_tower(CyclotomicField::get(5));
    CHECK(conjugate_fraction_in_S(S, f, TowerElement::from_base(tw5, sum_of_roots(t5)), t5) == Rational(1));

    // i + (-i) = 0 is excluded under every embedding
    auto t4 = tup(4, {1, 3});
    auto tw4 = trivial_tower(CyclotomicField::get(4));
    CHECK(conjugate_fraction_in_S(S, f, TowerElement::from_base(tw4, sum_of_roots(t4)), t4) == Rational(0));

    // the twelve-term point, lambda = -4 + 4 sqrt 2, through its fibre tower
    SearchConfig cfg;
    cfg.n = 12;
    cfg.T_max = 8;
    cfg.precision_bits = 128;
    auto t12 = tup(8, {1, 1, 1, 1, 7, 7, 7, 7, 4, 4, 4, 4});
    auto out = search_tuple(cfg, t12);
    REQUIRE(out.certificates.size() == 1);
    auto tw12 = make_tower(CyclotomicField::get(8), out.certificates[0].factor);
    CHECK(conjugate_fraction_in_S(S, f, TowerElement::generator(tw12), t12) == Rational(1));

    CHECK_THROWS_AS(conjugate_fraction_in_S(S, f, TowerElement::from_base(tw4, sum_of_roots(t4)), t5),
                    std::invalid_argument);
}

TEST_CASE("small counts") {
    CountConfig c1;
    c1.n = 1;
    c1.T_max = 1;
    auto r1 = count_rational_points(c1);
    REQUIRE(r1.N_nosubsum.size() == 1);
    CHECK(r1.N_nosubsum[0] == 0);
    CHECK(r1.N_subsum[0] == 0);

    CountConfig c2;
    c2.n = 2;
    c2.T_max = 6;
    auto r2 = count_rational_points(c2);
    REQUIRE(r2.T.size() == 6);
    CHECK(r2.N_nosubsum[0] == 0);
    CHECK(r2.N_nosubsum[1] >= 1);
    CHECK(r2.recert_failed == 0);
    for (std::size_t i = 1; i < r2.T.size(); ++i) {
        CHECK(r2.N_nosubsum[i] >= r2.N_nosubsum[i - 1]);
        CHECK(r2.N_subsum[i] >= r2.N_subsum[i - 1]);
    }
    bool saw_two = false;
    for (const auto& p : r2.points) {
        if (p.a == std::vector<Rational>{Rational(0), Rational(0)}) {
            saw_two = true;
            CHECK(p.curve_order == 2);
            CHECK(p.height == 2);
            CHECK(p.orderings == 1);
        }
        CHECK(p.height <= 6);
        CHECK(Integer(p.curve_order) % Integer(p.b1.get_den()) == 0);
        CHECK(Integer(p.curve_order) % Integer(p.b2.get_den()) == 0);
    }
    CHECK(saw_two);

    // sandwich by exact repeated addition: order <= T is counted, order > T^2 is not
    PrecisionScope scope(128);
    auto S = default_compact_set(EllipticScheme::legendre());
    auto L = letters(4);
    for (unsigned T = 1; T <= 4; ++T) {
        std::uint64_t lo = 0, hi = 0;
        for (const auto& x : L)
            for (const auto& y : L) {
                if (rational_height(x) > T || rational_height(y) > T) continue;
                std::uint64_t N = lcm_u64(x.get_den().get_ui(), y.get_den().get_ui());
                auto t = tup(N, {Rational(x * static_cast<long>(N)).get_num().get_si(),
                                 Rational(y * static_cast<long>(N)).get_num().get_si()});
                Complex lam = expi2pi(real_from(x)) + expi2pi(real_from(y));
                if (!crude_in_S(lam, d(S.delta))) continue;
                unsigned m = order_by_addition(t, T * T);
                if (m == 0) continue;
                ++hi;
                if (m <= T) ++lo;
            }
        std::uint64_t got = r2.N_nosubsum[T - 1] + r2.N_subsum[T - 1];
        CHECK(got >= lo);
        CHECK(got <= hi);
    }

    auto csv = count_csv(r2);
    CHECK(csv.rfind("# ctorsion.count.v1\nT,N_nosubsum,N_subsum\n", 0) == 0);
    auto j = to_json(r2);
    CHECK(j["T"].size() == 6);
    CHECK(j.contains("slope"));
}

TEST_CASE("phi bound") {
    for (std::uint64_t x = 1; x <= 100000; ++x) {
        std::uint64_t p = euler_phi(x);
        bool expect = 2 * p * p >= x;
        CHECK(phi_bound_holds(x) == expect);
        REQUIRE(expect);
    }
}

TEST_CASE("degree report") {
    auto r = degree_row(3, 8, 4);
    CHECK(r.T == 24);
    CHECK(r.gm_order == 8);
    CHECK(r.gm_degree == 4);
    CHECK(r.gm_ok);
    CHECK(std::abs(r.ratio - 4 / std::pow(24.0, 1.0 / 6)) < 1e-12);

    auto p = degree_row(1, 97, 96);
    CHECK(p.gm_degree == 96);
    CHECK(std::abs(p.gm_bound - std::sqrt(97 / 2.0)) < 1e-12);
    CHECK(p.gm_bound < 6.97);
    CHECK(p.gm_bound > 6.96);
    CHECK(p.gm_ok);

    SearchConfig cfg;
    cfg.n = 2;
    cfg.N_max = 2;
    cfg.T_max = 4;
    cfg.precision_bits = 128;
    auto rep = run_search(cfg);
    auto dr = degree_bound_report(rep.certificates);
    REQUIRE(dr.rows.size() == rep.certificates.size());
    CHECK(dr.gm_all_ok);
    CHECK(std::abs(dr.c3 - 1 / std::sqrt(2.0)) < 1e-15);
    double mn = 1e300;
    for (const auto& row : dr.rows) mn = std::min(mn, row.ratio);
    CHECK(dr.c4 == mn);
    auto j = to_json(dr);
    CHECK(j["rows"].size() == dr.rows.size());
}
