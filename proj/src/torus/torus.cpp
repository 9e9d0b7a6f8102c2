#include "tors/torus.hpp"

#include "tors/errors.hpp"

#include <random>
#include <stdexcept>

namespace tors {

std::vector<IntVector> hermite_normal_form(std::vector<IntVector> rows, std::size_t ncols) {
    std::size_t r = 0;
    for (std::size_t c = 0; c < ncols && r < rows.size(); ++c) {
        // Euclid on column c below row r.
        for (;;) {
            std::size_t piv = rows.size();
            for (std::size_t i = r; i < rows.size(); ++i)
                if (rows[i][c] != 0 && (piv == rows.size() || abs(rows[i][c]) < abs(rows[piv][c]))) piv = i;
            if (piv == rows.size()) break;
            std::swap(rows[r], rows[piv]);
            bool done = true;
            for (std::size_t i = r + 1; i < rows.size(); ++i) {
                if (rows[i][c] == 0) continue;
                Integer q;
                mpz_fdiv_q(q.get_mpz_t(), rows[i][c].get_mpz_t(), rows[r][c].get_mpz_t());
                for (std::size_t k = c; k < ncols; ++k) rows[i][k] -= q * rows[r][k];
                if (rows[i][c] != 0) done = false;
            }
            if (done) break;
        }
        if (rows[r][c] == 0) continue;
        if (rows[r][c] < 0)
            for (auto& x : rows[r]) x = -x;
        for (std::size_t i = 0; i < r; ++i) {
            Integer q;
            mpz_fdiv_q(q.get_mpz_t(), rows[i][c].get_mpz_t(), rows[r][c].get_mpz_t());
            if (q != 0)
                for (std::size_t k = c; k < ncols; ++k) rows[i][k] -= q * rows[r][k];
        }
        ++r;
    }
    rows.resize(r);
    return rows;
}

std::vector<IntVector> integer_kernel(const std::vector<IntVector>& rows, std::size_t ncols) {
    // Rational reduced row echelon form.
    std::vector<std::vector<Rational>> m;
    for (const auto& row : rows) m.emplace_back(row.begin(), row.end());
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < ncols && r < m.size(); ++c) {
        std::size_t piv = r;
        while (piv < m.size() && sgn(m[piv][c]) == 0) ++piv;
        if (piv == m.size()) continue;
        std::swap(m[r], m[piv]);
        Rational inv = 1 / m[r][c];
        for (auto& x : m[r]) x *= inv;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i == r || sgn(m[i][c]) == 0) continue;
            Rational f = m[i][c];
            for (std::size_t k = 0; k < ncols; ++k) m[i][k] -= f * m[r][k];
        }
        pivots.push_back(c);
        ++r;
    }
    std::vector<IntVector> out;
    std::vector<bool> is_pivot(ncols, false);
    for (auto c : pivots) is_pivot[c] = true;
    for (std::size_t f = 0; f < ncols; ++f) {
        if (is_pivot[f]) continue;
        std::vector<Rational> v(ncols, Rational(0));
        v[f] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -m[i][f];
        Integer l = 1;
        for (const auto& x : v) l = lcm(l, Integer(x.get_den()));
        IntVector iv;
        Integer g = 0;
        for (const auto& x : v) {
            iv.push_back(Integer(x.get_num() * (l / x.get_den())));
            g = gcd(g, iv.back());
        }
        if (g > 1)
            for (auto& x : iv) x /= g;
        out.push_back(std::move(iv));
    }
    return out;
}

SubgroupLattice lattice_of_partition(const ZeroSumPartition& p, std::size_t n) {
    std::vector<IntVector> rows;
    for (const auto& block : p.blocks) {
        bool has_zero = false;
        for (auto i : block) has_zero = has_zero || i == 0;
        std::optional<std::size_t> first;
        for (auto i : block) {
            if (i == 0) continue;
            IntVector v(n, 0);
            if (has_zero) {
                v[i - 1] = 1;
            } else if (first) {
                v[*first - 1] = 1;
                v[i - 1] = -1;
            } else {
                first = i;
                continue;
            }
            rows.push_back(std::move(v));
        }
    }
    SubgroupLattice L;
    L.n = n;
    L.basis = hermite_normal_form(std::move(rows), n);
    return L;
}

SubgroupResult maximal_subgroup_dimension(const RootOfUnityTuple& t, const CyclotomicNumber& zeta) {
    std::size_t n = t.n();
    if (n == 0) throw std::invalid_argument("empty tuple");
    if (n > kPartitionBound)
        throw std::length_error("partition enumeration is limited to n <= " + std::to_string(kPartitionBound));
    auto [s, z] = common_field(sum_of_roots(t), zeta);
    if (!(s == z)) throw std::invalid_argument("zeta is not the sum of the tuple");
    const FieldPtr& K = z.field();

    // Coefficients a_0 = -zeta, a_i = eps_i, and all subset sums by bitmask.
    std::size_t m = n + 1;
    std::vector<CyclotomicNumber> a{-z};
    auto Kt = CyclotomicField::get(t.N);
    for (auto k : t.exponents) a.push_back(CyclotomicNumber::zeta(Kt, static_cast<std::int64_t>(k)).lift(K));
    std::vector<bool> zero_sum(std::size_t(1) << m);
    {
        std::vector<CyclotomicNumber> sums(std::size_t(1) << m, CyclotomicNumber(K));
        for (std::size_t mask = 1; mask < sums.size(); ++mask) {
            std::size_t low = static_cast<std::size_t>(__builtin_ctzll(mask));
            sums[mask] = sums[mask & (mask - 1)] + a[low];
            zero_sum[mask] = sums[mask].is_zero();
        }
    }

    SubgroupResult best;
    best.lattice = lattice_of_partition(ZeroSumPartition{{[&] {
                                            std::vector<std::size_t> all(m);
                                            for (std::size_t i = 0; i < m; ++i) all[i] = i;
                                            return all;
                                        }()}},
                                        n);
    best.dimension = best.lattice.dimension();

    // Restricted growth strings: rgs[i] <= 1 + max(rgs[0..i-1]).
    std::vector<std::size_t> rgs(m, 0), mx(m, 0);
    for (;;) {
        std::size_t nblocks = mx[m - 1] + 1;
        std::vector<std::size_t> masks(nblocks, 0);
        for (std::size_t i = 0; i < m; ++i) masks[rgs[i]] |= std::size_t(1) << i;
        bool ok = nblocks > 1;
        for (auto mk : masks) ok = ok && zero_sum[mk];
        if (ok) {
            ZeroSumPartition p;
            p.blocks.resize(nblocks);
            for (std::size_t i = 0; i < m; ++i) p.blocks[rgs[i]].push_back(i);
            SubgroupLattice L = lattice_of_partition(p, n);
            if (L.dimension() > best.dimension) {
                best.dimension = L.dimension();
                best.lattice = std::move(L);
                best.witness = std::move(p);
            }
        }
        // next string
        std::size_t i = m - 1;
        while (i > 0 && rgs[i] == mx[i - 1] + 1) --i;
        if (i == 0) break;
        ++rgs[i];
        mx[i] = std::max(mx[i - 1], rgs[i]);
        for (std::size_t j = i + 1; j < m; ++j) {
            rgs[j] = 0;
            mx[j] = mx[i];
        }
    }
    if (best.dimension > 0 && !has_vanishing_subsum(t))
        throw VerificationFailure("positive-dimensional subgroup for a tuple without vanishing subsums");
    return best;
}

bool verify_coset_containment(const RootOfUnityTuple& t, const CyclotomicNumber& zeta, const SubgroupLattice& H,
                              std::size_t samples, std::uint64_t seed) {
    std::size_t n = t.n();
    if (H.n != n) throw std::invalid_argument("subgroup dimension does not match the tuple");
    auto kernel = integer_kernel(H.basis, n);
    PrecisionScope scope(256 + kGuardBits);
    std::vector<Complex> eps;
    for (auto k : t.exponents)
        eps.push_back(expi2pi(real_from(Rational(static_cast<long>(k), static_cast<long>(t.N)))));
    Complex z = complex_embedding(zeta, 1, 256).value;
    Real tol("1e-20");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::size_t rounds = kernel.empty() ? 1 : samples;
    for (std::size_t s = 0; s < rounds; ++s) {
        std::vector<Complex> logh(n);
        for (const auto& v : kernel) {
            Complex c{Real(u(rng)), Real(u(rng) * 6.283185307179586)};
            for (std::size_t i = 0; i < n; ++i) logh[i] += Real(v[i].get_si()) * c;
        }
        Complex sum;
        for (std::size_t i = 0; i < n; ++i) sum += eps[i] * exp(logh[i]);
        if (abs(sum - z) > tol) return false;
    }
    return true;
}

AlwReport alw_closure_check(const RootOfUnityTuple& t, const CyclotomicNumber& zeta, const LogPath& path,
                            std::size_t samples, unsigned precision_bits) {
    if (samples < 2) throw std::invalid_argument("need at least two samples");
    check_precision_request(precision_bits);
    PrecisionScope scope(precision_bits + kGuardBits);
    AlwReport rep;
    rep.vanishing_subsum = has_vanishing_subsum(t);
    rep.max_deviation = 0;
    rep.max_residual = 0;
    Complex z = complex_embedding(zeta, 1, precision_bits).value;
    Real tol = two_pow(-static_cast<long>(precision_bits / 2));
    std::vector<Complex> start;
    for (std::size_t k = 0; k < samples; ++k) {
        Real s = Real(k) / Real(samples - 1);
        std::vector<Complex> lx = path(s);
        if (lx.size() != t.n()) throw std::runtime_error("path sampler returned the wrong dimension");
        std::vector<Complex> x;
        Complex sum;
        for (const auto& l : lx) {
            x.push_back(exp(l));
            sum += x.back();
        }
        Real res = abs(sum - z);
        if (res > rep.max_residual) rep.max_residual = res;
        if (k == 0) start = x;
        for (std::size_t i = 0; i < x.size(); ++i) {
            Real d = abs(x[i] - start[i]);
            if (d > rep.max_deviation) rep.max_deviation = d;
        }
    }
    if (rep.max_residual > tol)
        rep.verdict = AlwVerdict::not_contained;
    else if (rep.max_deviation <= tol)
        rep.verdict = AlwVerdict::constant;
    else
        rep.verdict = rep.vanishing_subsum ? AlwVerdict::positive_dimensional : AlwVerdict::violated;
    return rep;
}

const char* to_string(AlwVerdict v) {
    switch (v) {
        case AlwVerdict::not_contained: return "not contained";
        case AlwVerdict::constant: return "constant";
        case AlwVerdict::positive_dimensional: return "positive dimensional";
        case AlwVerdict::violated: return "violated";
    }
    return "?";
}

}  // namespace tors
