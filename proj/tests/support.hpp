#pragma once

#include "tors/cyclotomic.hpp"

#include <random>

namespace testsupport {

using namespace tors;

inline std::mt19937_64& rng() {
    static std::mt19937_64 g(0x5eed1234u);
    return g;
}

inline long uniform(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng()); }

inline Rational small_rational(long h = 5) {
    long q = uniform(1, h);
    Rational r(uniform(-h, h), q);
    r.canonicalize();
    return r;
}

inline CyclotomicNumber random_cyclotomic(const FieldPtr& f, long h = 5, double density = 0.7) {
    std::vector<Rational> c;
    std::bernoulli_distribution keep(density);
    for (std::size_t i = 0; i < f->degree(); ++i) c.push_back(keep(rng()) ? small_rational(h) : Rational(0));
    return CyclotomicNumber(f, c);
}

inline RootOfUnityTuple random_tuple(std::size_t n, std::uint64_t N) {
    RootOfUnityTuple t;
    t.N = N;
    for (std::size_t i = 0; i < n; ++i) t.exponents.push_back(static_cast<std::uint64_t>(uniform(0, static_cast<long>(N) - 1)));
    return t;
}

}  // namespace testsupport
