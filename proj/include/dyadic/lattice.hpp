#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dyadic {

/// Dyadic lattice over the unit root cube [0,1]^d. A cube at level j has
/// sidelength 2^{-j}; level j holds 2^{d*j} cubes.
struct LatticeConfig {
    int dim = 3;        // d in {1,2,3}; children per cube = 2^d
    int max_level = 0;  // J >= 0

    void validate() const;
    std::uint64_t cubes_at_level(int level) const;
    std::uint64_t total_cubes() const;
    int children_per_cube() const { return 1 << dim; }

    bool operator==(const LatticeConfig&) const = default;
};

struct CubeId {
    int level = 0;
    std::array<std::int32_t, 3> coords{0, 0, 0};  // entries >= dim are 0

    auto operator<=>(const CubeId&) const = default;
};

std::string to_string(const CubeId& cube, int dim);

bool in_lattice(const CubeId& cube, const LatticeConfig& config);

/// Flat index of a cube within its level: row-major over coords, so flat
/// order coincides with lexicographic order on (coords[0], ..., coords[d-1]).
std::uint64_t flat_index(const CubeId& cube, const LatticeConfig& config);
CubeId cube_from_index(int level, std::uint64_t index, const LatticeConfig& config);

/// The 2^d cubes at level+1 contained in `cube`, sorted by coords.
/// Empty for cubes at the maximum level. Throws std::invalid_argument for
/// cubes outside the lattice.
std::vector<CubeId> children(const CubeId& cube, const LatticeConfig& config);

/// The unique containing cube one level up; nullopt for the root.
std::optional<CubeId> parent(const CubeId& cube);

/// Interaction stencil (top, mid, bottom): mid is a dyadic child of top and
/// bottom a dyadic child of mid. kappa = 2^{(d+2) j(top) / 2}.
struct Cascade {
    CubeId top;
    CubeId mid;
    CubeId bottom;
    std::uint64_t top_index = 0;     // flat index at level j
    std::uint64_t mid_index = 0;     // flat index at level j+1
    std::uint64_t bottom_index = 0;  // flat index at level j+2
    double kappa = 0.0;
};

struct CascadeTable {
    LatticeConfig config;
    std::vector<Cascade> triples;

    double max_kappa() const;
};

double cascade_coupling(int top_level, int dim);

/// All cascades with all three cubes inside the lattice, ordered by
/// (top level, top coords, mid coords, bottom coords).
CascadeTable enumerate_cascades(const LatticeConfig& config);

/// One triple per line: top, mid, bottom, kappa.
void dump_cascades(const CascadeTable& table, std::ostream& out);

/// A dyadic cube dilated by `scale` about its own center. scale = 1 is the
/// cube itself; scale = 2 is the paper-style doubled cube 2Q.
struct ScaledCube {
    CubeId id;
    double scale = 1.0;

    double sidelength() const;
    double center(int axis) const;
    double lo(int axis) const;
    double hi(int axis) const;

    bool operator==(const ScaledCube&) const = default;
};

/// True when the open interiors overlap; face contact does not count, which
/// matches the half-open reading of dyadic cubes.
bool cubes_overlap(const ScaledCube& a, const ScaledCube& b, int dim);

/// a contained in the `factor`-dilation of b (closed comparison).
bool contained_in_dilation(const ScaledCube& a, const ScaledCube& b, double factor, int dim);

/// Greedy Vitali subcover: pairwise-disjoint subcollection S such that every
/// input cube sits inside 5Q for some Q in S. Selection order is strictly
/// decreasing sidelength with lexicographic (level, coords, scale) tiebreak,
/// so the output is deterministic.
std::vector<ScaledCube> vitali_subcover(const std::vector<ScaledCube>& cubes, int dim);

/// Families A_j of level-j cubes for a contiguous level range; the model's
/// stand-in for a limsup set E = limsup A_j.
struct CubeFamilySequence {
    int first_level = 0;
    std::vector<std::vector<CubeId>> families;

    int level_of(std::size_t i) const { return first_level + static_cast<int>(i); }
    void validate() const;
};

class estimate_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Least-squares slope of log2 #(A_j) against j. Growth 2^{d j} gives d, the
/// upper bound the limsup construction certifies. Empty families are left out
/// of the fit; throws estimate_error when fewer than two levels remain.
double limsup_dimension_estimate(const CubeFamilySequence& seq);

}  // namespace dyadic
