#include "tors/cyclotomic.hpp"
#include "tors/errors.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <stdexcept>

namespace tors {

std::vector<Integer> cyclotomic_polynomial(std::uint64_t N) {
    if (N == 0) throw std::invalid_argument("cyclotomic_polynomial(0)");
    QPoly num = qpoly({1}), den = qpoly({1});
    for (auto d : divisors(N)) {
        int mu = moebius(N / d);
        if (mu == 0) continue;
        QPoly f = QPoly::monomial(Rational(1), d) - qpoly({1});
        if (mu > 0)
            num *= f;
        else
            den *= f;
    }
    auto [q, r] = divmod(num, den);
    if (!r.is_zero_poly()) throw std::logic_error("cyclotomic division not exact");
    std::vector<Integer> out;
    for (const auto& c : q.coeffs()) out.push_back(c.get_num());
    return out;
}

CyclotomicField::CyclotomicField(std::uint64_t N) : N_(N) {
    if (N == 0) throw std::invalid_argument("cyclotomic field of order 0");
    phi_ = cyclotomic_polynomial(N);
    degree_ = phi_.size() - 1;
    powers_.reserve(N);
    std::vector<Integer> cur(degree_, 0);
    cur[0] = 1;
    for (std::uint64_t k = 0; k < N; ++k) {
        powers_.push_back(cur);
        // multiply by x and reduce
        Integer top = cur[degree_ - 1];
        for (std::size_t i = degree_ - 1; i > 0; --i) cur[i] = cur[i - 1];
        cur[0] = 0;
        if (top != 0)
            for (std::size_t i = 0; i < degree_; ++i) cur[i] -= top * phi_[i];
    }
    for (std::uint64_t j = 1; j <= std::max<std::uint64_t>(N - 1, 1); ++j)
        if (std::gcd(j, N) == 1) units_.push_back(j);
}

std::shared_ptr<const CyclotomicField> CyclotomicField::get(std::uint64_t N) {
    static std::mutex m;
    static std::map<std::uint64_t, std::shared_ptr<const CyclotomicField>> cache;
    std::lock_guard<std::mutex> lock(m);
    auto it = cache.find(N);
    if (it != cache.end()) return it->second;
    auto f = std::make_shared<const CyclotomicField>(N);
    cache.emplace(N, f);
    return f;
}

const std::vector<Integer>& CyclotomicField::zeta_power(std::int64_t k) const {
    auto n = static_cast<std::int64_t>(N_);
    std::int64_t r = ((k % n) + n) % n;
    return powers_[static_cast<std::size_t>(r)];
}

CyclotomicNumber::CyclotomicNumber(FieldPtr f) : f_(std::move(f)) {
    if (!f_) throw std::invalid_argument("null field");
    c_.assign(f_->degree(), Rational(0));
}

CyclotomicNumber::CyclotomicNumber(FieldPtr f, std::vector<Rational> coeffs) : f_(std::move(f)) {
    if (!f_) throw std::invalid_argument("null field");
    std::size_t d = f_->degree();
    const auto& phi = f_->modulus();
    for (auto& c : coeffs) c.canonicalize();
    for (std::size_t k = coeffs.size(); k-- > d;) {
        if (sgn(coeffs[k]) == 0) continue;
        Rational t = coeffs[k];
        for (std::size_t i = 0; i <= d; ++i) coeffs[k - d + i] -= t * phi[i];
    }
    coeffs.resize(d, Rational(0));
    c_ = std::move(coeffs);
}

CyclotomicNumber CyclotomicNumber::rational(FieldPtr f, const Rational& q) {
    CyclotomicNumber z(std::move(f));
    z.c_[0] = q;
    return z;
}

CyclotomicNumber CyclotomicNumber::zeta(FieldPtr f, std::int64_t k) {
    CyclotomicNumber z(f);
    const auto& p = f->zeta_power(k);
    for (std::size_t i = 0; i < p.size(); ++i) z.c_[i] = p[i];
    return z;
}

bool CyclotomicNumber::is_zero() const {
    for (const auto& c : c_)
        if (sgn(c) != 0) return false;
    return true;
}

bool CyclotomicNumber::is_rational() const {
    for (std::size_t i = 1; i < c_.size(); ++i)
        if (sgn(c_[i]) != 0) return false;
    return true;
}

Rational CyclotomicNumber::rational_value() const {
    if (!is_rational()) throw std::domain_error("not a rational number");
    return c_.empty() ? Rational(0) : c_[0];
}

CyclotomicNumber CyclotomicNumber::conjugate(std::uint64_t j) const {
    if (std::gcd(j, N()) != 1) throw std::invalid_argument("conjugation exponent not coprime to N");
    CyclotomicNumber r(f_);
    for (std::size_t k = 0; k < c_.size(); ++k) {
        if (sgn(c_[k]) == 0) continue;
        const auto& p = f_->zeta_power(static_cast<std::int64_t>((j % N()) * k % N()));
        for (std::size_t i = 0; i < p.size(); ++i)
            if (p[i] != 0) r.c_[i] += c_[k] * p[i];
    }
    return r;
}

CyclotomicNumber CyclotomicNumber::lift(const FieldPtr& g) const {
    if (g->N() % N() != 0) throw std::invalid_argument("lift target does not contain the field");
    if (g->N() == N()) return *this;
    std::uint64_t s = g->N() / N();
    CyclotomicNumber r(g);
    for (std::size_t k = 0; k < c_.size(); ++k) {
        if (sgn(c_[k]) == 0) continue;
        const auto& p = g->zeta_power(static_cast<std::int64_t>(k * s));
        for (std::size_t i = 0; i < p.size(); ++i)
            if (p[i] != 0) r.c_[i] += c_[k] * p[i];
    }
    return r;
}

CyclotomicNumber CyclotomicNumber::inverse() const {
    if (is_zero()) throw std::domain_error("inverse of zero");
    if (is_rational()) return rational(f_, Rational(1) / c_[0]);
    QPoly a(c_, Rational(0));
    std::vector<Rational> phi(f_->modulus().begin(), f_->modulus().end());
    auto x = xgcd(a, QPoly(phi, Rational(0)));
    if (x.g.degree() != 0) throw std::logic_error("cyclotomic polynomial not coprime to a nonzero element");
    return CyclotomicNumber(f_, x.s.coeffs());
}

namespace {
void same_field(const CyclotomicNumber& a, const CyclotomicNumber& b) {
    if (!a.field() || !b.field()) throw std::invalid_argument("uninitialised cyclotomic number");
    if (a.N() != b.N()) throw std::invalid_argument("cyclotomic numbers from different fields");
}
}  // namespace

CyclotomicNumber operator+(const CyclotomicNumber& a, const CyclotomicNumber& b) {
    same_field(a, b);
    CyclotomicNumber r = a;
    for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += b.c_[i];
    return r;
}

CyclotomicNumber operator-(const CyclotomicNumber& a, const CyclotomicNumber& b) {
    same_field(a, b);
    CyclotomicNumber r = a;
    for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] -= b.c_[i];
    return r;
}

CyclotomicNumber operator-(const CyclotomicNumber& a) {
    CyclotomicNumber r = a;
    for (auto& c : r.c_) c = -c;
    return r;
}

CyclotomicNumber operator*(const CyclotomicNumber& a, const CyclotomicNumber& b) {
    same_field(a, b);
    std::size_t d = a.c_.size();
    if (a.is_rational()) {
        CyclotomicNumber r = b;
        for (auto& c : r.c_) c *= a.c_[0];
        return r;
    }
    if (b.is_rational()) {
        CyclotomicNumber r = a;
        for (auto& c : r.c_) c *= b.c_[0];
        return r;
    }
    std::vector<Rational> prod(2 * d - 1, Rational(0));
    for (std::size_t i = 0; i < d; ++i) {
        if (sgn(a.c_[i]) == 0) continue;
        for (std::size_t j = 0; j < d; ++j)
            if (sgn(b.c_[j]) != 0) prod[i + j] += a.c_[i] * b.c_[j];
    }
    return CyclotomicNumber(a.f_, std::move(prod));
}

bool operator==(const CyclotomicNumber& a, const CyclotomicNumber& b) {
    same_field(a, b);
    return a.c_ == b.c_;
}

bool operator<(const CyclotomicNumber& a, const CyclotomicNumber& b) {
    if (a.N() != b.N()) return a.N() < b.N();
    return a.c_ < b.c_;
}

std::pair<CyclotomicNumber, CyclotomicNumber> common_field(const CyclotomicNumber& a, const CyclotomicNumber& b) {
    auto f = CyclotomicField::get(lcm_u64(a.N(), b.N()));
    return {a.lift(f), b.lift(f)};
}

RootOfUnityTuple make_tuple(std::size_t n, std::uint64_t N, std::vector<std::int64_t> exponents) {
    if (n == 0) throw std::invalid_argument("tuple must have n >= 1");
    if (N == 0) throw std::invalid_argument("tuple order N must be >= 1");
    if (exponents.size() != n) throw std::invalid_argument("tuple length does not match n");
    RootOfUnityTuple t;
    t.N = N;
    auto sN = static_cast<std::int64_t>(N);
    for (auto k : exponents) t.exponents.push_back(static_cast<std::uint64_t>(((k % sN) + sN) % sN));
    return t;
}

RootOfUnityTuple normalize(const RootOfUnityTuple& t) {
    std::uint64_t g = t.N;
    for (auto k : t.exponents) g = std::gcd(g, k);
    RootOfUnityTuple r;
    r.N = t.N / g;
    for (auto k : t.exponents) r.exponents.push_back(k / g);
    return r;
}

std::uint64_t tuple_order(const RootOfUnityTuple& t) {
    std::uint64_t g = t.N;
    for (auto k : t.exponents) g = std::gcd(g, k);
    return t.N / g;
}

CyclotomicNumber sum_of_roots(const RootOfUnityTuple& t) {
    auto f = CyclotomicField::get(t.N);
    std::vector<Integer> acc(f->degree(), 0);
    for (auto k : t.exponents) {
        const auto& p = f->zeta_power(static_cast<std::int64_t>(k));
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += p[i];
    }
    std::vector<Rational> c(acc.begin(), acc.end());
    return CyclotomicNumber(f, std::move(c));
}

bool has_vanishing_subsum(const RootOfUnityTuple& t, std::size_t max_n) {
    std::size_t n = t.n();
    if (n > max_n) throw BudgetExceeded("subset budget exceeded: n = " + std::to_string(n), "");
    auto f = CyclotomicField::get(t.N);
    std::vector<std::complex<double>> u;
    const double tau = 2.0 * std::acos(-1.0);
    for (auto k : t.exponents) u.push_back(std::polar(1.0, tau * static_cast<double>(k) / static_cast<double>(t.N)));
    auto exact_zero = [&](std::uint64_t mask) {
        std::vector<Integer> acc(f->degree(), 0);
        for (std::size_t j = 0; j < n; ++j) {
            if (!(mask >> j & 1u)) continue;
            const auto& p = f->zeta_power(static_cast<std::int64_t>(t.exponents[j]));
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += p[i];
        }
        for (const auto& a : acc)
            if (a != 0) return false;
        return true;
    };
    std::uint64_t mask = 0;
    std::complex<double> s = 0;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t i = 1; i < total; ++i) {
        auto bit = static_cast<std::size_t>(__builtin_ctzll(i));
        mask ^= std::uint64_t{1} << bit;
        if (mask >> bit & 1u)
            s += u[bit];
        else
            s -= u[bit];
        if (std::abs(s) < 1e-6 && exact_zero(mask)) return true;
    }
    return false;
}

Embedding complex_embedding(const CyclotomicNumber& z, std::uint64_t j, unsigned precision_bits) {
    if (precision_bits < 64) throw std::invalid_argument("embedding precision must be at least 64 bits");
    check_precision_request(precision_bits);
    std::uint64_t N = z.N();
    if (std::gcd(j, N) != 1) throw std::invalid_argument("embedding index not coprime to N");
    unsigned wp = precision_bits + kGuardBits;
    PrecisionScope scope(wp);
    Complex v;
    Real mass(0);
    const auto& c = z.coeffs();
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (sgn(c[k]) == 0) continue;
        Real q = real_from(c[k]);
        Rational t(static_cast<long>((j % N) * k % N), static_cast<long>(N));
        v += q * expi2pi(real_from(t));
        mass += boost::multiprecision::abs(q);
    }
    Real err = (mass + 1) * static_cast<double>(c.size() + 4) * two_pow(-static_cast<long>(wp));
    return {v, err};
}

std::size_t degree_over_Q(const CyclotomicNumber& z) {
    std::set<std::vector<Rational>> seen;
    for (auto j : z.field()->units()) seen.insert(z.conjugate(j).coeffs());
    return seen.size();
}

namespace {

using Mat2 = std::array<CyclotomicNumber, 4>;

Mat2 mat_mul(const Mat2& a, const Mat2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

Mat2 mat_pow(const Mat2& m, std::uint64_t e) {
    const auto& f = m[0].field();
    Mat2 r{CyclotomicNumber::rational(f, 1), CyclotomicNumber(f), CyclotomicNumber(f), CyclotomicNumber::rational(f, 1)};
    Mat2 b = m;
    while (e) {
        if (e & 1u) r = mat_mul(r, b);
        e >>= 1u;
        if (e) b = mat_mul(b, b);
    }
    return r;
}

bool is_identity(const Mat2& m) {
    return m[0].is_rational() && m[0].rational_value() == 1 && m[1].is_zero() && m[2].is_zero() && m[3].is_rational() &&
           m[3].rational_value() == 1;
}

}  // namespace

std::optional<std::uint64_t> sl2_torsion_order(const CyclotomicNumber& lambda) {
    const auto& F = lambda.field();
    const double tau = 2.0 * std::acos(-1.0);
    // Every conjugate of 2cos(2 pi k/m) is real and lies in [-2, 2].
    double theta = 0;
    for (auto j : F->units()) {
        auto e = complex_embedding(lambda, j, 64).value.to_double();
        if (std::fabs(e.imag()) > 1e-9 || std::fabs(e.real()) > 2 + 1e-9) return std::nullopt;
        if (j == 1) theta = std::acos(std::clamp(e.real() / 2, -1.0, 1.0)) / tau;
    }
    std::size_t d = degree_over_Q(lambda);
    std::uint64_t bound = 8 * d * d + 2;
    for (std::uint64_t m = 3; m <= bound; ++m) {
        if (euler_phi(m) != 2 * d) continue;
        double km = theta * static_cast<double>(m);
        auto k = static_cast<std::int64_t>(std::llround(km));
        if (std::fabs(km - static_cast<double>(k)) > 1e-6 || std::gcd(static_cast<std::uint64_t>(k), m) != 1) continue;
        auto L = CyclotomicField::get(lcm_u64(F->N(), m));
        auto s = static_cast<std::int64_t>(L->N() / m);
        auto cand = CyclotomicNumber::zeta(L, k * s) + CyclotomicNumber::zeta(L, -k * s);
        if (!(lambda.lift(L) == cand)) continue;
        Mat2 M{CyclotomicNumber(F), CyclotomicNumber::rational(F, 1), CyclotomicNumber::rational(F, -1), lambda};
        if (!is_identity(mat_pow(M, m))) throw std::logic_error("SL2 order check failed: M^m != I");
        for (auto q : divisors(m))
            if (q < m && is_identity(mat_pow(M, q))) throw std::logic_error("SL2 order check failed: proper divisor");
        return m;
    }
    return std::nullopt;
}

}  // namespace tors
