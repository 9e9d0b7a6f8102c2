#include "tors/arith.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace tors {

Rational inverse(const Rational& x) {
    if (sgn(x) == 0) throw std::domain_error("division by zero");
    return Rational(1) / x;
}

Rational parse_rational(const std::string& s) {
    std::string t;
    for (char c : s)
        if (c != ' ') t += c;
    if (t.empty()) throw std::invalid_argument("empty rational");
    if (t[0] == '+') t.erase(0, 1);
    auto slash = t.find('/');
    auto valid_int = [](const std::string& u) {
        std::size_t i = (!u.empty() && u[0] == '-') ? 1 : 0;
        if (i >= u.size()) return false;
        return std::all_of(u.begin() + static_cast<long>(i), u.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    if (slash == std::string::npos) {
        if (!valid_int(t)) throw std::invalid_argument("bad rational: " + s);
        return Rational(Integer(t));
    }
    std::string p = t.substr(0, slash), q = t.substr(slash + 1);
    if (!valid_int(p) || !valid_int(q)) throw std::invalid_argument("bad rational: " + s);
    Integer den(q);
    if (den == 0) throw std::invalid_argument("zero denominator: " + s);
    Rational r(Integer(p), den);
    r.canonicalize();
    return r;
}

std::string to_string(const Rational& q) { return q.get_str(); }

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) { return std::gcd(a, b); }

std::uint64_t lcm_u64(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0) return 0;
    return a / std::gcd(a, b) * b;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t x) {
    std::vector<std::uint64_t> ps;
    for (std::uint64_t p = 2; p * p <= x; ++p) {
        if (x % p == 0) {
            ps.push_back(p);
            while (x % p == 0) x /= p;
        }
    }
    if (x > 1) ps.push_back(x);
    return ps;
}

std::uint64_t euler_phi(std::uint64_t x) {
    if (x == 0) throw std::invalid_argument("euler_phi(0)");
    std::uint64_t r = x;
    for (auto p : prime_factors(x)) r = r / p * (p - 1);
    return r;
}

int moebius(std::uint64_t x) {
    int m = 1;
    for (std::uint64_t p = 2; p * p <= x; ++p) {
        if (x % p == 0) {
            x /= p;
            if (x % p == 0) return 0;
            m = -m;
        }
    }
    if (x > 1) m = -m;
    return m;
}

std::vector<std::uint64_t> divisors(std::uint64_t x) {
    std::vector<std::uint64_t> lo, hi;
    for (std::uint64_t d = 1; d * d <= x; ++d) {
        if (x % d == 0) {
            lo.push_back(d);
            if (d * d != x) hi.push_back(x / d);
        }
    }
    lo.insert(lo.end(), hi.rbegin(), hi.rend());
    return lo;
}

bool is_prime_u64(std::uint64_t x) {
    if (x < 2) return false;
    for (std::uint64_t p = 2; p * p <= x; ++p)
        if (x % p == 0) return false;
    return true;
}

Integer rational_height(const Rational& q) {
    Integer p = abs(q.get_num());
    const Integer& d = q.get_den();
    return p > d ? p : d;
}

}  // namespace tors
