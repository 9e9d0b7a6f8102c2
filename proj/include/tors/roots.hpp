#pragma once

#include "tors/bigfloat.hpp"
#include "tors/poly.hpp"

#include <functional>
#include <vector>

namespace tors {

struct CertifiedRoot {
    Complex value;
    // The disc of this radius around value contains exactly one root.
    Real radius;
};

// Coefficients (low to high) evaluated at a requested working precision.
using ComplexCoeffs = std::function<std::vector<Complex>(unsigned working_bits)>;

// All roots of a squarefree polynomial, each isolated in a disc of radius
// below 2^-precision_bits, ordered by (re, im). Precision is raised internally
// up to the configured maximum; beyond that PrecisionError is thrown.
std::vector<CertifiedRoot> certified_roots(const ComplexCoeffs& coeffs, unsigned precision_bits);

std::vector<CertifiedRoot> certified_roots(const QPoly& p, unsigned precision_bits);

Complex eval(const std::vector<Complex>& c, const Complex& z);

// Irreducible factor in Z[x] (primitive, positive leading coefficient) of a
// squarefree p vanishing at the root of p nearest to target. Found by
// recombining numeric roots; every candidate is verified by exact division.
QPoly rational_factor_containing(const QPoly& p, const Complex& target);
// Same, when the roots of p fall into blocks (block_of maps a root to [0, nblocks))
// and every factor has equally many roots in each block, as for a norm down to Q.
QPoly rational_factor_in_blocks(const QPoly& p, const Complex& target, std::size_t nblocks,
                                const std::function<std::size_t(const Complex&)>& block_of);

// Irreducible factors over Q of a nonzero polynomial, each primitive in Z[x],
// with multiplicity.
std::vector<std::pair<QPoly, unsigned>> factor_over_Q(const QPoly& p);

bool is_squarefree(const QPoly& p);

// Primitive integer polynomial with positive leading coefficient.
QPoly primitive_part(const QPoly& p);

}  // namespace tors
