#include "tors/roots.hpp"
#include "tors/errors.hpp"
#include "tors/finite_field.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace tors {

namespace {

using cd = std::complex<double>;

bool aberth_double(const std::vector<cd>& c, std::vector<cd>& z) {
    std::size_t n = c.size() - 1;
    double bound = 0;
    for (std::size_t k = 1; k <= n; ++k)
        bound = std::max(bound, std::pow(std::abs(c[n - k] / c[n]), 1.0 / static_cast<double>(k)));
    bound = 2 * bound + 1e-3;
    if (!std::isfinite(bound)) return false;
    z.resize(n);
    const double tau = 2 * std::acos(-1.0);
    for (std::size_t k = 0; k < n; ++k) z[k] = std::polar(bound, tau * static_cast<double>(k) / static_cast<double>(n) + 0.7);
    for (int it = 0; it < 2000; ++it) {
        double worst = 0;
        for (std::size_t i = 0; i < n; ++i) {
            cd p = c[n], dp = 0;
            for (std::size_t k = n; k-- > 0;) {
                dp = dp * z[i] + p;
                p = p * z[i] + c[k];
            }
            if (p == cd(0)) continue;
            cd ratio = p / dp, s = 0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) s += 1.0 / (z[i] - z[j]);
            cd w = ratio / (1.0 - ratio * s);
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return false;
            z[i] -= w;
            worst = std::max(worst, std::abs(w) / (1 + std::abs(z[i])));
        }
        if (worst < 1e-14) return true;
        // Rounding noise at high degree; the multiprecision pass refines from here.
        if (it >= 200 && worst < 1e-8) return true;
    }
    return false;
}

bool aberth_mp(const std::vector<Complex>& c, std::vector<Complex>& z, unsigned wp) {
    std::size_t n = c.size() - 1;
    Real tol = two_pow(-static_cast<long>(wp) + 8), loose = two_pow(-static_cast<long>(wp) / 2);
    Real prev(-1);
    int stalled = 0;
    for (int it = 0; it < 400; ++it) {
        bool done = true;
        Real worst(0);
        for (std::size_t i = 0; i < n; ++i) {
            Complex p = c[n], dp;
            for (std::size_t k = n; k-- > 0;) {
                dp = dp * z[i] + p;
                p = p * z[i] + c[k];
            }
            if (p.re == 0 && p.im == 0) continue;
            Complex ratio = p / dp, s;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) s += Complex(1) / (z[i] - z[j]);
            Complex w = ratio / (Complex(1) - ratio * s);
            z[i] -= w;
            Real rel = abs(w) / (1 + abs(z[i]));
            if (rel > tol) done = false;
            worst = std::max(worst, rel);
        }
        if (done) return true;
        // Steps at the rounding floor stop shrinking; certification decides from here.
        if (worst < loose && prev >= 0 && worst >= prev / 2) {
            if (++stalled >= 3) return true;
        } else {
            stalled = 0;
        }
        prev = worst;
    }
    return false;
}

bool root_less(const CertifiedRoot& a, const CertifiedRoot& b) {
    Real gap = a.radius + b.radius;
    if (boost::multiprecision::abs(a.value.re - b.value.re) > gap) return a.value.re < b.value.re;
    return a.value.im < b.value.im;
}

}  // namespace

Complex eval(const std::vector<Complex>& c, const Complex& z) {
    Complex r;
    for (std::size_t k = c.size(); k-- > 0;) r = r * z + c[k];
    return r;
}

std::vector<CertifiedRoot> certified_roots(const ComplexCoeffs& coeffs, unsigned precision_bits) {
    check_precision_request(precision_bits);
    unsigned wp = precision_bits + kGuardBits;
    for (;;) {
        if (wp > max_precision_bits() + 4 * kGuardBits) throw PrecisionError("root isolation failed at maximum precision");
        PrecisionScope scope(wp);
        std::vector<Complex> c = coeffs(wp);
        while (!c.empty() && c.back().re == 0 && c.back().im == 0) c.pop_back();
        if (c.empty()) throw std::domain_error("roots of the zero polynomial");
        std::size_t n = c.size() - 1;
        std::vector<CertifiedRoot> out;
        if (n == 0) return out;
        std::vector<Complex> z;
        std::vector<cd> cdbl;
        bool finite = true;
        for (const auto& x : c) {
            cdbl.push_back(x.to_double());
            finite = finite && std::isfinite(cdbl.back().real()) && std::isfinite(cdbl.back().imag());
        }
        std::vector<cd> zd;
        if (finite && std::abs(cdbl.back()) > 0 && aberth_double(cdbl, zd)) {
            for (auto& v : zd) z.push_back(Complex::from_double(v));
        } else {
            // Fujiwara bound on the root moduli.
            Real bound(0);
            for (std::size_t k = 1; k <= n; ++k) {
                Real r = abs(c[n - k] / c[n]);
                if (r > 0) bound = std::max(bound, Real(exp(log(r) / static_cast<double>(k))));
            }
            bound = 2 * bound + 1;
            for (std::size_t k = 0; k < n; ++k) {
                Real t = real_from(Rational(static_cast<long>(k), static_cast<long>(n)));
                z.push_back(bound * expi2pi(t + Real(0.11)));
            }
        }
        if (!aberth_mp(c, z, wp)) {
            wp *= 2;
            continue;
        }
        // Inclusion discs from Weierstrass corrections, widened by a bound on
        // rounding in the evaluation and in the coefficients.
        Real u = two_pow(-static_cast<long>(wp) + 4);
        bool ok = true;
        for (std::size_t i = 0; i < n; ++i) {
            Complex den = c[n];
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) den *= z[i] - z[j];
            Real mag(0), zi = abs(z[i]), pw(1);
            for (std::size_t k = 0; k <= n; ++k) {
                mag += abs(c[k]) * pw;
                pw *= zi;
            }
            Real num = abs(eval(c, z[i])) + static_cast<double>(4 * (n + 1)) * u * mag;
            Real dabs = abs(den);
            if (dabs == 0) {
                ok = false;
                break;
            }
            out.push_back({z[i], static_cast<double>(n) * num / dabs});
        }
        Real target = two_pow(-static_cast<long>(precision_bits));
        for (std::size_t i = 0; ok && i < n; ++i) {
            if (out[i].radius >= target) ok = false;
            for (std::size_t j = i + 1; ok && j < n; ++j)
                if (abs(out[i].value - out[j].value) <= out[i].radius + out[j].radius) ok = false;
        }
        if (!ok) {
            wp *= 2;
            continue;
        }
        std::sort(out.begin(), out.end(), root_less);
        return out;
    }
}

std::vector<CertifiedRoot> certified_roots(const QPoly& p, unsigned precision_bits) {
    return certified_roots(
        [&](unsigned) {
            std::vector<Complex> c;
            for (const auto& q : p.coeffs()) c.emplace_back(real_from(q));
            return c;
        },
        precision_bits);
}

bool is_squarefree(const QPoly& p) {
    if (p.degree() <= 0) return true;
    QPoly P = primitive_part(p);
    // Squarefree modulo a prime not dividing the leading coefficient implies squarefree over Q.
    int tried = 0;
    for (std::uint64_t q = (std::uint64_t{1} << 31) - 1; tried < 4; q -= 2) {
        if (!is_prime_u64(q)) continue;
        ++tried;
        if (mpz_fdiv_ui(P.lead().get_num().get_mpz_t(), q) == 0) continue;
        std::vector<Fp> c;
        for (const auto& a : P.coeffs()) c.push_back({mpz_fdiv_ui(a.get_num().get_mpz_t(), q), q});
        FpPoly f(c, Fp{0, q});
        if (gcd(f, f.derivative()).degree() == 0) return true;
    }
    return gcd(P, P.derivative()).degree() == 0;
}

QPoly primitive_part(const QPoly& p) {
    if (p.is_zero_poly()) return p;
    Integer den = 1, num = 0;
    for (const auto& c : p.coeffs()) den = lcm(den, c.get_den());
    for (const auto& c : p.coeffs()) num = gcd(num, Integer(c * den));
    Rational s(den, num);
    s.canonicalize();
    if (sgn(p.lead()) < 0) s = -s;
    return Rational(s) * p;
}

namespace {

// Working precision resolving every coefficient of lc * prod(x - z_i) well below 1/2.
unsigned recombination_bits(const QPoly& P) {
    double maxroot = 0;
    for (auto& r : certified_roots(P, 64)) maxroot = std::max(maxroot, abs(r.value).convert_to<double>());
    Integer c0 = P.lead().get_num();
    return static_cast<unsigned>(static_cast<double>(mpz_sizeinbase(c0.get_mpz_t(), 2)) +
                                 P.degree() * (std::log2(1 + maxroot) + 1) + 64);
}

bool near_int(const Real& x, Integer& out) {
    Real r = boost::multiprecision::round(x);
    if (boost::multiprecision::abs(x - r) > Real(1) / 8) return false;
    mpfr_get_z(out.get_mpz_t(), r.backend().data(), MPFR_RNDN);
    return true;
}

bool trace_is_integral(const Real& cr, const Complex& tr) {
    Integer dummy;
    return boost::multiprecision::abs(cr * tr.im) < Real(1) / 8 && near_int(cr * tr.re, dummy);
}

// lc * prod(x - z) rounded to Z[x] and checked to divide cur exactly; zero polynomial otherwise.
QPoly exact_factor(const QPoly& cur, const Real& cr, const std::vector<const Complex*>& zs) {
    std::vector<Complex> prod{Complex(1)};
    for (const Complex* r : zs) {
        std::vector<Complex> nx(prod.size() + 1);
        for (std::size_t j = 0; j < prod.size(); ++j) {
            nx[j + 1] += prod[j];
            nx[j] -= prod[j] * *r;
        }
        prod = std::move(nx);
    }
    std::vector<Rational> q;
    for (auto& x : prod) {
        Integer v;
        if (boost::multiprecision::abs(cr * x.im) > Real(1) / 8 || !near_int(cr * x.re, v)) return QPoly(Rational(0));
        q.emplace_back(v);
    }
    QPoly Q = primitive_part(QPoly(q, Rational(0)));
    if (Q.degree() != static_cast<int>(zs.size()) || !(cur % Q).is_zero_poly()) return QPoly(Rational(0));
    return Q;
}

// Advances a k-subset of [lo, m) in lexicographic order; false when exhausted.
bool next_subset(std::vector<std::size_t>& pick, std::size_t m) {
    std::size_t k = pick.size(), i = k;
    while (i > 0 && pick[i - 1] == m - (k - i) - 1) --i;
    if (i == 0) return false;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    return true;
}

std::size_t nearest(const std::vector<CertifiedRoot>& roots, const Complex& target) {
    std::size_t index = 0;
    for (std::size_t i = 1; i < roots.size(); ++i)
        if (abs(roots[i].value - target) < abs(roots[index].value - target)) index = i;
    return index;
}

}  // namespace

QPoly rational_factor_containing(const QPoly& p, const Complex& target) {
    QPoly P = primitive_part(p);
    int D = P.degree();
    if (D <= 0) throw std::domain_error("factor of a constant polynomial");
    if (D == 1) return P;
    if (!is_squarefree(P)) throw std::domain_error("recombination needs a squarefree polynomial");
    unsigned bits = recombination_bits(P);
    auto roots = certified_roots(P, bits);
    PrecisionScope scope(bits + kGuardBits);
    std::size_t index = nearest(roots, target);
    long budget = 4000000;
    // Smallest factor of `cur` whose roots are a subset of `pool` of size k <= kmax,
    // containing pool[0] when anchored.
    // `used` receives the pool positions of the factor's roots.
    auto search = [&](const QPoly& cur, const std::vector<std::size_t>& pool, bool anchored, int kmax,
                      std::vector<std::size_t>* used = nullptr) -> QPoly {
        Real cr = real_from(Rational(cur.lead().get_num()));
        std::size_t m = pool.size();
        for (int k = 1; k <= kmax; ++k) {
            std::size_t free_k = anchored ? static_cast<std::size_t>(k - 1) : static_cast<std::size_t>(k);
            std::size_t base = anchored ? 1 : 0;
            if (base + free_k > m) break;
            std::vector<std::size_t> pick(free_k);
            for (std::size_t i = 0; i < free_k; ++i) pick[i] = base + i;
            do {
                if (--budget < 0) throw BudgetExceeded("factor recombination budget exceeded", "");
                std::vector<const Complex*> sel;
                if (anchored) sel.push_back(&roots[pool[0]].value);
                for (auto i : pick) sel.push_back(&roots[pool[i]].value);
                Complex tr;
                for (auto* z : sel) tr += *z;
                if (trace_is_integral(cr, tr)) {
                    QPoly Q = exact_factor(cur, cr, sel);
                    if (!Q.is_zero_poly()) {
                        if (used) {
                            used->clear();
                            if (anchored) used->push_back(0);
                            for (auto i : pick) used->push_back(i);
                        }
                        return Q;
                    }
                }
            } while (next_subset(pick, m));
        }
        return QPoly(Rational(0));
    };
    QPoly cur = P;
    std::vector<std::size_t> pool{index};
    for (std::size_t i = 0; i < roots.size(); ++i)
        if (i != index) pool.push_back(i);
    for (;;) {
        int d = cur.degree();
        if (d == 1) return cur;
        QPoly f = search(cur, pool, true, d / 2);
        if (!f.is_zero_poly()) return f;
        // The factor through the target has degree > d/2; strip a cofactor.
        std::vector<std::size_t> rest(pool.begin() + 1, pool.end());
        std::vector<std::size_t> used;
        QPoly g = search(cur, rest, false, d / 2, &used);
        if (g.is_zero_poly()) return cur;
        cur = primitive_part(cur / g);
        std::vector<bool> drop(rest.size(), false);
        for (auto i : used) drop[i] = true;
        std::vector<std::size_t> keep{pool[0]};
        for (std::size_t i = 0; i < rest.size(); ++i)
            if (!drop[i]) keep.push_back(rest[i]);
        if (static_cast<int>(keep.size()) != cur.degree()) throw std::logic_error("root bookkeeping failed during recombination");
        pool = std::move(keep);
    }
}

QPoly rational_factor_in_blocks(const QPoly& p, const Complex& target, std::size_t nblocks,
                                const std::function<std::size_t(const Complex&)>& block_of) {
    QPoly P = primitive_part(p);
    if (P.degree() <= 0) throw std::domain_error("factor of a constant polynomial");
    if (!is_squarefree(P)) throw std::domain_error("recombination needs a squarefree polynomial");
    if (P.degree() % static_cast<int>(nblocks) != 0) throw std::invalid_argument("degree not divisible by the block count");
    std::size_t per = static_cast<std::size_t>(P.degree()) / nblocks;
    unsigned bits = recombination_bits(P);
    auto roots = certified_roots(P, bits);
    PrecisionScope scope(bits + kGuardBits);
    std::size_t index = nearest(roots, target);
    std::vector<std::vector<std::size_t>> blocks(nblocks);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        std::size_t b = block_of(roots[i].value);
        if (b >= nblocks) throw std::logic_error("root outside every block");
        blocks[b].push_back(i);
    }
    for (const auto& b : blocks)
        if (b.size() != per) throw std::logic_error("unbalanced root blocks");
    std::size_t tb = block_of(roots[index].value);
    // The target first in its block so anchored subsets start with it.
    auto& tblock = blocks[tb];
    std::iter_swap(tblock.begin(), std::find(tblock.begin(), tblock.end(), index));
    Real cr = real_from(Rational(P.lead().get_num()));
    long budget = 4000000;
    for (std::size_t k = 1; k < per; ++k) {
        // Per block: all k-subsets with their root sums; the target's block only those through it.
        std::vector<std::vector<std::vector<std::size_t>>> subsets(nblocks);
        std::vector<std::vector<Complex>> sums(nblocks);
        for (std::size_t b = 0; b < nblocks; ++b) {
            bool anchored = b == tb;
            std::size_t free_k = anchored ? k - 1 : k, base = anchored ? 1 : 0;
            std::vector<std::size_t> pick(free_k);
            for (std::size_t i = 0; i < free_k; ++i) pick[i] = base + i;
            do {
                std::vector<std::size_t> sel;
                if (anchored) sel.push_back(blocks[b][0]);
                for (auto i : pick) sel.push_back(blocks[b][i]);
                Complex s;
                for (auto i : sel) s += roots[i].value;
                subsets[b].push_back(std::move(sel));
                sums[b].push_back(s);
            } while (next_subset(pick, per));
        }
        // Meet in the middle on the imaginary part of the trace, which must vanish.
        std::vector<std::vector<long double>> ims(nblocks);
        long double mag = 1;
        for (std::size_t bl = 0; bl < nblocks; ++bl)
            for (const auto& z : sums[bl]) {
                ims[bl].push_back(z.im.convert_to<long double>());
                mag = std::max(mag, static_cast<long double>(abs(z).convert_to<double>()));
            }
        long double window = 1.0L / (8 * cr.convert_to<long double>()) + 1e-16L * mag * static_cast<long double>(nblocks);
        std::size_t half = nblocks / 2;
        auto enumerate = [&](std::size_t lo, std::size_t hi, std::vector<long double>& key, std::vector<std::uint32_t>& picks) {
            std::size_t width = hi - lo;
            std::vector<std::size_t> odo(width, 0);
            for (;;) {
                if (--budget < 0) throw BudgetExceeded("factor recombination budget exceeded", "");
                long double v = 0;
                for (std::size_t i = 0; i < width; ++i) {
                    v += ims[lo + i][odo[i]];
                    picks.push_back(static_cast<std::uint32_t>(odo[i]));
                }
                key.push_back(v);
                std::size_t i = 0;
                while (i < width && ++odo[i] == subsets[lo + i].size()) odo[i++] = 0;
                if (i == width) break;
            }
        };
        std::vector<long double> lkey, rkey;
        std::vector<std::uint32_t> lpick, rpick;
        enumerate(0, half, lkey, lpick);
        enumerate(half, nblocks, rkey, rpick);
        std::vector<std::size_t> order(rkey.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return rkey[x] < rkey[y]; });
        std::vector<long double> sorted;
        for (auto i : order) sorted.push_back(rkey[i]);
        std::size_t rw = nblocks - half;
        for (std::size_t li = 0; li < lkey.size(); ++li) {
            long double want = -lkey[li];
            auto it = std::lower_bound(sorted.begin(), sorted.end(), want - window);
            for (; it != sorted.end() && *it <= want + window; ++it) {
                if (--budget < 0) throw BudgetExceeded("factor recombination budget exceeded", "");
                std::size_t ri = order[static_cast<std::size_t>(it - sorted.begin())];
                auto choice = [&](std::size_t bl) {
                    return bl < half ? lpick[li * half + bl] : rpick[ri * rw + (bl - half)];
                };
                Complex tr;
                for (std::size_t bl = 0; bl < nblocks; ++bl) tr += sums[bl][choice(bl)];
                if (!trace_is_integral(cr, tr)) continue;
                std::vector<const Complex*> sel;
                for (std::size_t bl = 0; bl < nblocks; ++bl)
                    for (auto i : subsets[bl][choice(bl)]) sel.push_back(&roots[i].value);
                QPoly Q = exact_factor(P, cr, sel);
                if (!Q.is_zero_poly()) return Q;
            }
        }
    }
    return P;
}

std::vector<std::pair<QPoly, unsigned>> factor_over_Q(const QPoly& p) {
    if (p.is_zero_poly()) throw std::domain_error("factor of zero polynomial");
    std::vector<std::pair<QPoly, unsigned>> out;
    // Squarefree decomposition (Yun).
    QPoly f = p.monic();
    QPoly a = gcd(f, f.derivative());
    QPoly b = f / a;
    unsigned mult = 1;
    std::vector<std::pair<QPoly, unsigned>> sqf;
    while (b.degree() > 0) {
        QPoly c = gcd(a, b);
        QPoly part = b / c;
        if (part.degree() > 0) sqf.push_back({part, mult});
        b = c;
        a = a / c;
        ++mult;
    }
    for (auto& [part, m] : sqf) {
        QPoly rest = primitive_part(part);
        while (rest.degree() > 0) {
            auto r0 = certified_roots(rest, 64);
            QPoly fac = rational_factor_containing(rest, r0[0].value);
            out.push_back({fac, m});
            rest = primitive_part(rest / fac);
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        if (x.first.degree() != y.first.degree()) return x.first.degree() < y.first.degree();
        return x.first.coeffs() < y.first.coeffs();
    });
    return out;
}

}  // namespace tors
