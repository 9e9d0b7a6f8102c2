#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tors/search.hpp"

#include <map>
#include <set>

using namespace tors;

namespace {

RootOfUnityTuple tup(std::uint64_t N, std::vector<std::int64_t> e) {
    std::size_t n = e.size();
    return make_tuple(n, N, std::move(e));
}

std::set<std::vector<std::pair<std::uint64_t, std::uint64_t>>> as_multisets(const std::vector<RootOfUnityTuple>& ts) {
    // each entry as a sorted list of reduced fractions k/N
    std::set<std::vector<std::pair<std::uint64_t, std::uint64_t>>> out;
    for (const auto& t : ts) {
        std::vector<std::pair<std::uint64_t, std::uint64_t>> v;
        for (auto k : t.exponents) {
            std::uint64_t g = gcd_u64(k, t.N);
            v.emplace_back(k / g, t.N / g);
        }
        std::sort(v.begin(), v.end());
        out.insert(v);
    }
    return out;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

SearchConfig legendre_config(std::size_t n, std::uint64_t N_max, unsigned T_max) {
    SearchConfig c;
    c.n = n;
    c.N_max = N_max;
    c.T_max = T_max;
    c.precision_bits = 128;
    return c;
}

// Torsion by repeated exact addition only, on the same tuples, f = identity.
std::map<std::string, unsigned> oracle(std::size_t n, std::uint64_t N_max, unsigned T_max) {
    std::map<std::string, unsigned> out;
    auto s = EllipticScheme::legendre();
    for (const auto& t : enumerate_tuples(n, N_max, false).tuples) {
        auto K = CyclotomicField::get(t.N);
        auto tw = trivial_tower(K);
        Specialization sp;
        try {
            sp = specialize(s, TowerElement::from_base(tw, sum_of_roots(t)));
        } catch (const BadReduction&) {
            continue;
        }
        TowerPoint Q = sp.point;
        for (unsigned k = 1; k <= T_max; ++k) {
            if (Q.infinity) {
                out[to_string(t)] = k;
                break;
            }
            if (k < T_max) Q = point_add(sp.curve, Q, sp.point);
        }
        if (!Q.infinity) continue;
    }
    return out;
}

RootOfUnityTuple twelve() { return tup(8, {1, 1, 1, 1, 7, 7, 7, 7, 4, 4, 4, 4}); }

}  // namespace

TEST_CASE("tuple enumeration examples") {
    auto a = enumerate_tuples(1, 2, false).tuples;
    REQUIRE(a.size() == 2);
    CHECK(a[0] == tup(1, {0}));
    CHECK(a[1] == tup(2, {1}));

    CHECK(enumerate_tuples(2, 2, false).tuples.size() == 3);
    auto skip = enumerate_tuples(2, 2, true).tuples;
    REQUIRE(skip.size() == 2);
    CHECK(skip[0] == tup(1, {0, 0}));
    CHECK(skip[1] == tup(2, {1, 1}));

    CHECK(enumerate_tuples(2, 4, false).tuples.size() == 10);
    CHECK_THROWS_AS(enumerate_tuples(0, 4, false), std::invalid_argument);
}

TEST_CASE("tuple enumeration counts multisets exactly once") {
    for (std::size_t n = 1; n <= 4; ++n)
        for (std::uint64_t N = 1; N <= 7; ++N) {
            auto ts = enumerate_tuples(n, N, false).tuples;
            CHECK(ts.size() == binomial(N + n - 1, n));
            CHECK(as_multisets(ts).size() == ts.size());
            for (const auto& t : ts) CHECK(tuple_order(t) == t.N);

            std::uint64_t alpha = 0;
            for (std::uint64_t q = 1; q <= N; ++q) alpha += euler_phi(q);
            auto all = enumerate_tuples(n, N, false, TupleMode::orders_up_to).tuples;
            CHECK(all.size() == binomial(alpha + n - 1, n));
            CHECK(as_multisets(all).size() == all.size());

            auto kept = enumerate_tuples(n, N, true).tuples;
            std::size_t expect = 0;
            for (const auto& t : ts) expect += has_vanishing_subsum(t) ? 0 : 1;
            CHECK(kept.size() == expect);
        }
    // orders_up_to with N_max = 4 adds the cube roots: 6 letters
    CHECK(enumerate_tuples(2, 4, false, TupleMode::orders_up_to).tuples.size() == 21);
}

TEST_CASE("tuple enumeration resumes after a budget") {
    auto full = enumerate_tuples(3, 6, true).tuples;
    std::vector<RootOfUnityTuple> pieces;
    std::string token;
    std::size_t rounds = 0;
    for (;;) {
        auto b = enumerate_tuples(3, 6, true, TupleMode::roots_of_N_max, 7, token);
        pieces.insert(pieces.end(), b.tuples.begin(), b.tuples.end());
        ++rounds;
        if (!b.resume) break;
        token = *b.resume;
    }
    CHECK(rounds > 3);
    CHECK(pieces == full);
    CHECK_THROWS_AS(enumerate_tuples(2, 6, true, TupleMode::roots_of_N_max, 7, token), std::invalid_argument);
}

TEST_CASE("fibre solving") {
    PrecisionScope scope(256);
    auto K1 = CyclotomicField::get(1);
    auto two = CyclotomicNumber::rational(K1, 2);
    {
        auto s = solve_fiber(RatFunc::lambda(), two);
        REQUIRE(s.roots.size() == 1);
        CHECK(s.g.degree() == 1);
        CHECK(s.roots[0].P.base_value() == two);
        CHECK(abs(s.roots[0].value - Complex(2)) < Real("1e-30"));
    }
    {
        auto s = solve_fiber(parse_ratfunc("t^2"), two);
        REQUIRE(s.roots.size() == 2);
        CHECK(s.roots[0].factor == s.g);
        CHECK(s.roots[1].factor == s.g);
        CHECK(s.g.degree() == 2);
        Real r2 = sqrt(Real(2));
        CHECK(abs(s.roots[0].value - Complex(-r2)) < Real("1e-30"));
        CHECK(abs(s.roots[1].value - Complex(r2)) < Real("1e-30"));
    }
    {
        auto s = solve_fiber(parse_ratfunc("(t^2+1)/t"), two);
        CHECK(s.numerator.degree() == 2);
        CHECK(s.g.degree() == 1);
        REQUIRE(s.roots.size() == 1);
        CHECK(s.roots[0].multiplicity == 2);
        CHECK(s.roots[0].P.base_value() == CyclotomicNumber::rational(K1, 1));
    }
    {
        // over Q(i): t^2 = i has the two roots +-(1 + i)/sqrt 2 in one factor
        auto K4 = CyclotomicField::get(4);
        auto s = solve_fiber(parse_ratfunc("t^2"), CyclotomicNumber::zeta(K4, 1));
        CHECK(s.roots.size() == 2);
        CHECK(s.roots[0].factor.degree() == 2);
        for (const auto& r : s.roots) CHECK(abs(r.value * r.value - Complex(Real(0), Real(1))) < Real("1e-30"));
    }
    CHECK(solve_fiber(parse_ratfunc("1/t"), CyclotomicNumber(K1)).roots.empty());
    CHECK_THROWS_AS(solve_fiber(RatFunc::constant(3), two), std::invalid_argument);
}

TEST_CASE("Legendre search finds lambda = 2") {
    auto rep = run_search(legendre_config(2, 8, 8));
    bool found = false;
    for (const auto& c : rep.certificates)
        if (c.tuple == tup(1, {0, 0})) {
            found = true;
            CHECK(c.curve_order == 2);
            CHECK(c.identity == "y = 0");
            CHECK(c.lambda_minpoly == qpoly({-2, 1}));
            CHECK(c.T == 2);
            CHECK(c.degree == 1);
        }
    CHECK(found);
    for (const auto& c : rep.certificates) CHECK(certify(c).pass);

    auto small = run_search(legendre_config(2, 2, 4));
    REQUIRE(small.certificates.size() == 1);
    CHECK(small.certificates[0].tuple == tup(1, {0, 0}));
    CHECK(small.bad_reduction == 1);

    auto c1 = legendre_config(1, 4, 8);
    c1.skip_vanishing_subsums = true;
    auto one = run_search(c1);
    CHECK(one.tuples == 4);
    CHECK(one.certificates.empty());
    CHECK(one.bad_reduction == 1);
}

TEST_CASE("the twelve-term certificate over Q(zeta_8)") {
    SearchConfig cfg = legendre_config(12, 8, 8);
    cfg.precision_bits = 256;
    auto out = search_tuple(cfg, twelve());
    REQUIRE(out.certificates.size() == 1);
    const auto& c = out.certificates[0];
    CHECK(c.curve_order == 3);
    CHECK(c.tuple_order == 8);
    CHECK(c.T == 24);
    CHECK(c.degree == 4);
    CHECK(c.lambda_minpoly == qpoly({-16, 8, 1}));
    CHECK_FALSE(c.vanishing_subsum);
    CHECK(Integer(3) % c.b1_rational.get_den() == 0);
    CHECK(Integer(3) % c.b2_rational.get_den() == 0);
    auto r = certify(c);
    CHECK(r.pass);

    auto tampered = c;
    tampered.curve_order = 5;
    auto bad = certify(tampered);
    CHECK_FALSE(bad.pass);
    REQUIRE_FALSE(bad.failures.empty());
    CHECK(bad.failures[0].find("psi_5") != std::string::npos);
    CHECK(bad.failures[0].find("f_5(x(P)) = 0") == std::string::npos);

    auto wrong_degree = c;
    wrong_degree.degree = 2;
    CHECK_FALSE(certify(wrong_degree).pass);
    auto wrong_zeta = c;
    wrong_zeta.zeta = wrong_zeta.zeta + CyclotomicNumber::rational(wrong_zeta.zeta.field(), 1);
    CHECK_FALSE(certify(wrong_zeta).pass);
    auto wrong_betti = c;
    wrong_betti.b1_rational = wrong_betti.b1_rational + Rational(1, 3);
    CHECK_FALSE(certify(wrong_betti).pass);
}

TEST_CASE("certificates survive JSON") {
    auto rep = run_search(legendre_config(2, 2, 4));
    REQUIRE(rep.certificates.size() == 1);
    auto cfg = legendre_config(12, 8, 8);
    auto more = search_tuple(cfg, twelve());
    for (const auto& c : {rep.certificates[0], more.certificates[0]}) {
        auto j = to_json(c);
        auto back = certificate_from_json(nlohmann::json::parse(j.dump()));
        CHECK(to_json(back) == j);
        CHECK(certify(back).pass);
    }
    auto j = to_json(rep.certificates[0]);
    j["schema"] = "something else";
    CHECK_THROWS_AS(certificate_from_json(j), std::invalid_argument);

    auto cj = to_json(legendre_config(2, 5, 6));
    CHECK(to_json(search_config_from_json(cj)) == cj);
    cj["bogus"] = 1;
    CHECK_THROWS_AS(search_config_from_json(cj), std::invalid_argument);
    CHECK_THROWS_AS(search_config_from_json(nlohmann::json{{"T_max", 1}}), std::invalid_argument);
    CHECK_THROWS_AS(search_config_from_json(nlohmann::json{{"f", "3"}}), std::invalid_argument);
}

TEST_CASE("search agrees with repeated addition") {
    for (std::size_t n = 1; n <= 2; ++n)
        for (std::uint64_t N = 1; N <= 6; ++N) {
            auto cfg = legendre_config(n, N, 10);
            cfg.dedupe_by_zeta = false;
            auto rep = run_search(cfg);
            std::map<std::string, unsigned> got;
            for (const auto& c : rep.certificates) got[to_string(c.tuple)] = c.curve_order;
            CHECK(got == oracle(n, N, 10));
        }
}

TEST_CASE("certificates pass certify and the prescreen at 20 primes") {
    std::vector<TorsionCertificate> certs;
    for (auto cfg : {legendre_config(2, 6, 10), legendre_config(3, 4, 10)}) {
        auto rep = run_search(cfg);
        certs.insert(certs.end(), rep.certificates.begin(), rep.certificates.end());
    }
    certs.push_back(search_tuple(legendre_config(12, 8, 8), twelve()).certificates.at(0));
    CHECK(certs.size() >= 2);
    for (const auto& c : certs) {
        CHECK(certify(c).pass);
        auto th = make_tower(c.zeta.field(), c.factor);
        auto sp = specialize(c.scheme, TowerElement::generator(th));
        std::vector<std::uint64_t> primes;
        for (const auto& r : good_reductions(*th, 20)) primes.push_back(r.q);
        CHECK(primes.size() == 20);
        CHECK(torsion_prescreen(sp, c.curve_order, primes) == Prescreen::pass);
    }
}

TEST_CASE("other base maps") {
    // f = t^2: lambda^2 = zeta, and (t^2 + 1)/t
    for (const char* f : {"t^2", "(t^2+1)/t", "2*t - 2"}) {
        auto cfg = legendre_config(2, 4, 8);
        cfg.f = parse_ratfunc(f);
        auto rep = run_search(cfg);
        for (const auto& c : rep.certificates) CHECK(certify(c).pass);
        if (std::string(f) == "2*t - 2") {
            // lambda = 2 from zeta = 2
            bool found = false;
            for (const auto& c : rep.certificates) found = found || (c.lambda_minpoly == qpoly({-2, 1}) && c.curve_order == 2);
            CHECK(found);
        }
    }
}

TEST_CASE("deterministic output under parallel runs, and deduplication by zeta") {
    auto cfg = legendre_config(2, 8, 8);
    cfg.dedupe_by_zeta = false;
    auto a = run_search(cfg, 1);
    auto b = run_search(cfg, 4);
    REQUIRE(a.certificates.size() == b.certificates.size());
    for (std::size_t i = 0; i < a.certificates.size(); ++i)
        CHECK(to_json(a.certificates[i]).dump() == to_json(b.certificates[i]).dump());
    CHECK(index_csv(a.certificates) == index_csv(b.certificates));

    // 1 + 1 and (zeta_3 + zeta_3^2) + ... do not coincide here, but
    // -1 = zeta_3 + zeta_3^2 appears from two tuples in orders_up_to mode
    auto c3 = legendre_config(2, 6, 10);
    c3.mode = TupleMode::orders_up_to;
    c3.dedupe_by_zeta = false;
    auto all = run_search(c3);
    c3.dedupe_by_zeta = true;
    auto dd = run_search(c3);
    CHECK(dd.certificates.size() + dd.collapsed.size() == all.certificates.size());
    std::set<std::string> zetas;
    for (const auto& c : dd.certificates) zetas.insert(to_string(c.zeta) + "@" + std::to_string(c.root_index));
    CHECK(zetas.size() == dd.certificates.size());
}

TEST_CASE("search budgets resume") {
    auto cfg = legendre_config(2, 6, 10);
    cfg.dedupe_by_zeta = false;
    auto full = run_search(cfg);
    cfg.budget = 5;
    std::vector<TorsionCertificate> pieces;
    std::string token;
    for (;;) {
        auto r = run_search(cfg, 2, token);
        pieces.insert(pieces.end(), r.certificates.begin(), r.certificates.end());
        if (!r.resume) break;
        token = *r.resume;
    }
    REQUIRE(pieces.size() == full.certificates.size());
    for (std::size_t i = 0; i < pieces.size(); ++i) CHECK(to_json(pieces[i]) == to_json(full.certificates[i]));
}
