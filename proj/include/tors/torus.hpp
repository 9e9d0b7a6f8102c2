#pragma once

#include "tors/bigfloat.hpp"
#include "tors/cyclotomic.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace tors {

using IntVector = std::vector<Integer>;

// Subgroup H of G_m^n given by the characters vanishing on it.
struct SubgroupLattice {
    std::size_t n = 0;
    // Hermite normal form rows, nonzero.
    std::vector<IntVector> basis;

    std::size_t rank() const { return basis.size(); }
    std::size_t dimension() const { return n - rank(); }
};

// Rows in Hermite normal form, zero rows dropped.
std::vector<IntVector> hermite_normal_form(std::vector<IntVector> rows, std::size_t ncols);
// Primitive integer basis of the rational kernel {v : B v = 0}.
std::vector<IntVector> integer_kernel(const std::vector<IntVector>& rows, std::size_t ncols);

// Partition of {0, 1, ..., n}; index 0 carries -zeta, index i carries eps_i.
struct ZeroSumPartition {
    std::vector<std::vector<std::size_t>> blocks;
};

SubgroupLattice lattice_of_partition(const ZeroSumPartition& p, std::size_t n);

struct SubgroupResult {
    std::size_t dimension = 0;
    SubgroupLattice lattice;
    // Absent when the only zero-sum partition is the single block.
    std::optional<ZeroSumPartition> witness;
};

constexpr std::size_t kPartitionBound = 8;

// Maximal H with eps H inside {sum x_i = zeta}, over all zero-sum partitions.
// Throws std::invalid_argument if zeta is not the sum of the tuple and
// std::length_error for n above kPartitionBound.
SubgroupResult maximal_subgroup_dimension(const RootOfUnityTuple& t, const CyclotomicNumber& zeta);

// Samples h = exp(sum c_k v_k) over a kernel basis v_k of the lattice and checks
// sum eps_i h_i = zeta to 1e-20 at 256 bits.
bool verify_coset_containment(const RootOfUnityTuple& t, const CyclotomicNumber& zeta, const SubgroupLattice& H,
                              std::size_t samples, std::uint64_t seed = 1);

enum class AlwVerdict {
    not_contained,         // the path leaves {sum x_i = zeta}; nothing to check
    constant,              // contained and constant
    positive_dimensional,  // contained, moving, and eps has a vanishing subsum
    violated               // contained, moving, no vanishing subsum
};

struct AlwReport {
    AlwVerdict verdict = AlwVerdict::not_contained;
    Real max_deviation;
    Real max_residual;
    bool vanishing_subsum = false;
};

// Path s in [0, 1] -> log coordinates in C^n.
using LogPath = std::function<std::vector<Complex>(const Real& s)>;

AlwReport alw_closure_check(const RootOfUnityTuple& t, const CyclotomicNumber& zeta, const LogPath& path,
                            std::size_t samples, unsigned precision_bits);

const char* to_string(AlwVerdict v);

}  // namespace tors
