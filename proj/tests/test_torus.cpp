#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tors/torus.hpp"

#include <algorithm>
#include <random>

using namespace tors;

namespace {

RootOfUnityTuple tup(std::uint64_t N, std::vector<std::int64_t> e) {
    std::size_t n = e.size();
    return make_tuple(n, N, std::move(e));
}

IntVector iv(std::initializer_list<long> xs) {
    IntVector v;
    for (long x : xs) v.emplace_back(x);
    return v;
}

// Multisets of exponents in [0, N) of size n, sorted.
void multisets(std::size_t n, std::uint64_t N, std::vector<std::int64_t>& cur,
               const std::function<void(const std::vector<std::int64_t>&)>& f) {
    if (cur.size() == n) {
        f(cur);
        return;
    }
    std::int64_t lo = cur.empty() ? 0 : cur.back();
    for (std::int64_t k = lo; k < static_cast<std::int64_t>(N); ++k) {
        cur.push_back(k);
        multisets(n, N, cur, f);
        cur.pop_back();
    }
}

}  // namespace

TEST_CASE("Hermite normal form and kernels") {
    auto H = hermite_normal_form({iv({2, 4, 6}), iv({1, 1, 1}), iv({3, 5, 7})}, 3);
    REQUIRE(H.size() == 2);
    CHECK(H[0] == iv({1, 1, 1}));
    CHECK(H[1] == iv({0, 2, 4}));
    auto K = integer_kernel(H, 3);
    REQUIRE(K.size() == 1);
    CHECK(K[0] == iv({1, -2, 1}));
    CHECK(hermite_normal_form({iv({0, 0})}, 2).empty());
    CHECK(integer_kernel({}, 2).size() == 2);

    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t rows = 1 + rng() % 4, cols = 1 + rng() % 5;
        std::vector<IntVector> m(rows, IntVector(cols));
        for (auto& r : m)
            for (auto& x : r) x = static_cast<long>(rng() % 7) - 3;
        auto h = hermite_normal_form(m, cols);
        auto k = integer_kernel(m, cols);
        CHECK(h.size() + k.size() == cols);
        for (const auto& v : k)
            for (const auto& r : m) {
                Integer dot = 0;
                for (std::size_t i = 0; i < cols; ++i) dot += r[i] * v[i];
                CHECK(dot == 0);
            }
        // HNF has positive pivots moving strictly right
        long last = -1;
        for (const auto& r : h) {
            long p = 0;
            while (r[p] == 0) ++p;
            CHECK(r[p] > 0);
            CHECK(p > last);
            last = p;
        }
    }
}

TEST_CASE("subgroup dimension examples") {
    auto t1 = tup(1, {0, 0});
    auto r1 = maximal_subgroup_dimension(t1, sum_of_roots(t1));
    CHECK(r1.dimension == 0);
    CHECK_FALSE(r1.witness.has_value());

    auto t2 = tup(4, {1, 3});
    auto r2 = maximal_subgroup_dimension(t2, sum_of_roots(t2));
    CHECK(r2.dimension == 1);
    REQUIRE(r2.witness.has_value());
    CHECK(r2.witness->blocks == std::vector<std::vector<std::size_t>>{{0}, {1, 2}});
    REQUIRE(r2.lattice.basis.size() == 1);
    CHECK(r2.lattice.basis[0] == iv({1, -1}));

    auto t3 = tup(3, {1, 2, 0});
    auto r3 = maximal_subgroup_dimension(t3, sum_of_roots(t3));
    CHECK(r3.dimension == 1);
    REQUIRE(r3.witness.has_value());
    CHECK(r3.witness->blocks == std::vector<std::vector<std::size_t>>{{0}, {1, 2, 3}});
    CHECK(r3.lattice.rank() == 2);

    // (1, -1, 1, -1): two independent vanishing pairs give a 2-torus
    auto t4 = tup(2, {0, 1, 0, 1});
    CHECK(maximal_subgroup_dimension(t4, sum_of_roots(t4)).dimension == 2);

    CHECK_THROWS_AS(maximal_subgroup_dimension(t1, sum_of_roots(t2)), std::invalid_argument);
    auto big = tup(2, {0, 0, 0, 0, 0, 0, 0, 0, 0});
    CHECK_THROWS_AS(maximal_subgroup_dimension(big, sum_of_roots(big)), std::length_error);
}

TEST_CASE("coset containment") {
    auto t2 = tup(4, {1, 3});
    auto r2 = maximal_subgroup_dimension(t2, sum_of_roots(t2));
    CHECK(verify_coset_containment(t2, sum_of_roots(t2), r2.lattice, 100));

    auto t1 = tup(1, {0, 0});
    SubgroupLattice diag{2, {iv({1, -1})}};
    CHECK_FALSE(verify_coset_containment(t1, sum_of_roots(t1), diag, 100));
    SubgroupLattice trivial{2, {iv({1, 0}), iv({0, 1})}};
    CHECK(verify_coset_containment(t1, sum_of_roots(t1), trivial, 100));
}

TEST_CASE("no vanishing subsum gives dimension zero, and witnesses are sound") {
    std::size_t checked = 0, positive = 0;
    for (std::size_t n = 1; n <= 4; ++n)
        for (std::uint64_t N = 1; N <= 8; ++N) {
            std::vector<std::int64_t> cur;
            multisets(n, N, cur, [&](const std::vector<std::int64_t>& e) {
                auto t = tup(N, e);
                auto z = sum_of_roots(t);
                auto r = maximal_subgroup_dimension(t, z);
                bool vs = has_vanishing_subsum(t);
                if (!vs) CHECK(r.dimension == 0);
                // with zeta = sum, a zero-sum partition other than the single block
                // needs a block without index 0, i.e. a vanishing subsum
                CHECK((r.dimension > 0) == vs);
                // lattice rank agrees with the kernel computed independently
                CHECK(integer_kernel(r.lattice.basis, n).size() == r.dimension);
                if (r.witness) {
                    ++positive;
                    CHECK(verify_coset_containment(t, z, r.lattice, 20, n * 100 + N));
                }
                ++checked;
            });
        }
    CHECK(checked > 300);
    CHECK(positive > 50);
}

TEST_CASE("dimension is invariant under permutations and Galois conjugation") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 150; ++trial) {
        std::uint64_t N = 1 + rng() % 12;
        std::size_t n = 1 + rng() % 5;
        std::vector<std::int64_t> e(n);
        for (auto& k : e) k = static_cast<std::int64_t>(rng() % N);
        auto t = tup(N, e);
        auto z = sum_of_roots(t);
        std::size_t d = maximal_subgroup_dimension(t, z).dimension;
        std::shuffle(e.begin(), e.end(), rng);
        auto tp = tup(N, e);
        CHECK(maximal_subgroup_dimension(tp, sum_of_roots(tp)).dimension == d);
        for (auto j : CyclotomicField::get(N)->units()) {
            std::vector<std::int64_t> ej;
            for (auto k : e) ej.push_back(k * static_cast<std::int64_t>(j));
            auto tj = tup(N, ej);
            CHECK(maximal_subgroup_dimension(tj, z.conjugate(j)).dimension == d);
        }
    }
}

TEST_CASE("ALW consequence check") {
    PrecisionScope scope(300);
    auto t1 = tup(1, {0, 0});
    auto z1 = sum_of_roots(t1);
    auto constant = alw_closure_check(t1, z1, [](const Real&) { return std::vector<Complex>(2); }, 20, 128);
    CHECK(constant.verdict == AlwVerdict::constant);
    CHECK(constant.max_deviation == 0);

    auto t2 = tup(4, {1, 3});
    auto z2 = sum_of_roots(t2);
    Real half_pi = pi_real() / 2;
    auto diag = alw_closure_check(
        t2, z2,
        [&](const Real& s) {
            Complex c{s, s * Real(3)};
            return std::vector<Complex>{Complex(Real(0), half_pi) + c, Complex(Real(0), -half_pi) + c};
        },
        20, 128);
    CHECK(diag.verdict == AlwVerdict::positive_dimensional);
    CHECK(diag.vanishing_subsum);
    CHECK(diag.max_deviation > Real("0.5"));

    auto away = alw_closure_check(
        t1, z1, [](const Real& s) { return std::vector<Complex>{Complex(s), Complex(s * s)}; }, 20, 128);
    CHECK(away.verdict == AlwVerdict::not_contained);

    // random polynomial log-paths through the point of a tuple with no vanishing subsum
    std::mt19937_64 rng(12);
    auto t3 = tup(5, {0, 1, 1});
    auto z3 = sum_of_roots(t3);
    REQUIRE_FALSE(has_vanishing_subsum(t3));
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Complex> c(3);
        for (auto& x : c) x = Complex(Real(static_cast<double>(rng() % 100) / 100), Real(static_cast<double>(rng() % 100) / 100));
        auto rep = alw_closure_check(
            t3, z3,
            [&](const Real& s) {
                std::vector<Complex> out;
                for (std::size_t i = 0; i < 3; ++i) {
                    Real base = Real(2) * pi_real() * Real(static_cast<long>(t3.exponents[i])) / Real(5);
                    out.push_back(Complex(Real(0), base) + s * s * c[i]);
                }
                return out;
            },
            20, 128);
        CHECK(rep.verdict == AlwVerdict::not_contained);
    }
}
