#include "dyadic/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace dyadic {

namespace {

// Flat per-level indices are built as sum coords[k] * 2^{level*(d-1-k)},
// which needs dim*level bits; keep well inside 64 and inside memory.
constexpr int kMaxIndexBits = 40;

}  // namespace

void LatticeConfig::validate() const {
    if (dim < 1 || dim > 3) {
        throw std::invalid_argument("lattice dim must be 1, 2, or 3 (got " + std::to_string(dim) + ")");
    }
    if (max_level < 0) {
        throw std::invalid_argument("lattice max_level must be >= 0 (got " + std::to_string(max_level) + ")");
    }
    if (dim * max_level > kMaxIndexBits) {
        throw std::invalid_argument("lattice too deep: dim*max_level must be <= " + std::to_string(kMaxIndexBits));
    }
}

std::uint64_t LatticeConfig::cubes_at_level(int level) const {
    return std::uint64_t{1} << (dim * level);
}

std::uint64_t LatticeConfig::total_cubes() const {
    std::uint64_t total = 0;
    for (int j = 0; j <= max_level; ++j) {
        total += cubes_at_level(j);
    }
    return total;
}

std::string to_string(const CubeId& cube, int dim) {
    std::ostringstream out;
    out << cube.level << ':';
    for (int k = 0; k < dim; ++k) {
        if (k > 0) out << ',';
        out << cube.coords[k];
    }
    return out.str();
}

bool in_lattice(const CubeId& cube, const LatticeConfig& config) {
    if (cube.level < 0 || cube.level > config.max_level) return false;
    const std::int64_t side = std::int64_t{1} << cube.level;
    for (int k = 0; k < config.dim; ++k) {
        if (cube.coords[k] < 0 || cube.coords[k] >= side) return false;
    }
    for (int k = config.dim; k < 3; ++k) {
        if (cube.coords[k] != 0) return false;
    }
    return true;
}

std::uint64_t flat_index(const CubeId& cube, const LatticeConfig& config) {
    std::uint64_t index = 0;
    for (int k = 0; k < config.dim; ++k) {
        index = (index << cube.level) | static_cast<std::uint64_t>(cube.coords[k]);
    }
    return index;
}

CubeId cube_from_index(int level, std::uint64_t index, const LatticeConfig& config) {
    CubeId cube;
    cube.level = level;
    const std::uint64_t mask = (std::uint64_t{1} << level) - 1;
    for (int k = config.dim - 1; k >= 0; --k) {
        cube.coords[k] = static_cast<std::int32_t>(index & mask);
        index >>= level;
    }
    return cube;
}

std::vector<CubeId> children(const CubeId& cube, const LatticeConfig& config) {
    if (!in_lattice(cube, config)) {
        throw std::invalid_argument("invalid cube " + to_string(cube, config.dim) + " for this lattice");
    }
    if (cube.level == config.max_level) return {};

    std::vector<CubeId> result;
    result.reserve(config.children_per_cube());
    for (int m = 0; m < config.children_per_cube(); ++m) {
        CubeId child;
        child.level = cube.level + 1;
        for (int k = 0; k < config.dim; ++k) {
            const int bit = (m >> (config.dim - 1 - k)) & 1;
            child.coords[k] = 2 * cube.coords[k] + bit;
        }
        result.push_back(child);
    }
    return result;
}

std::optional<CubeId> parent(const CubeId& cube) {
    if (cube.level == 0) return std::nullopt;
    CubeId up;
    up.level = cube.level - 1;
    for (int k = 0; k < 3; ++k) {
        up.coords[k] = cube.coords[k] >> 1;  // floor division, coords are non-negative
    }
    return up;
}

double cascade_coupling(int top_level, int dim) {
    return std::exp2(0.5 * (dim + 2) * top_level);
}

double CascadeTable::max_kappa() const {
    double m = 0.0;
    for (const auto& c : triples) m = std::max(m, c.kappa);
    return m;
}

CascadeTable enumerate_cascades(const LatticeConfig& config) {
    config.validate();
    CascadeTable table;
    table.config = config;

    for (int j = 0; j + 2 <= config.max_level; ++j) {
        const std::uint64_t count = config.cubes_at_level(j);
        for (std::uint64_t i = 0; i < count; ++i) {
            const CubeId top = cube_from_index(j, i, config);
            const double kappa = cascade_coupling(j, config.dim);
            for (const CubeId& mid : children(top, config)) {
                const std::uint64_t mid_index = flat_index(mid, config);
                for (const CubeId& bottom : children(mid, config)) {
                    Cascade c;
                    c.top = top;
                    c.mid = mid;
                    c.bottom = bottom;
                    c.top_index = i;
                    c.mid_index = mid_index;
                    c.bottom_index = flat_index(bottom, config);
                    c.kappa = kappa;
                    table.triples.push_back(c);
                }
            }
        }
    }
    return table;
}

void dump_cascades(const CascadeTable& table, std::ostream& out) {
    char buf[64];
    for (const auto& c : table.triples) {
        std::snprintf(buf, sizeof(buf), "%.17g", c.kappa);
        out << to_string(c.top, table.config.dim) << ' ' << to_string(c.mid, table.config.dim) << ' '
            << to_string(c.bottom, table.config.dim) << ' ' << buf << '\n';
    }
}

double ScaledCube::sidelength() const {
    return scale * std::exp2(-id.level);
}

double ScaledCube::center(int axis) const {
    return (id.coords[axis] + 0.5) * std::exp2(-id.level);
}

double ScaledCube::lo(int axis) const {
    return center(axis) - 0.5 * sidelength();
}

double ScaledCube::hi(int axis) const {
    return center(axis) + 0.5 * sidelength();
}

bool cubes_overlap(const ScaledCube& a, const ScaledCube& b, int dim) {
    for (int k = 0; k < dim; ++k) {
        if (!(a.lo(k) < b.hi(k) && b.lo(k) < a.hi(k))) return false;
    }
    return true;
}

bool contained_in_dilation(const ScaledCube& a, const ScaledCube& b, double factor, int dim) {
    const double half = 0.5 * factor * b.sidelength();
    for (int k = 0; k < dim; ++k) {
        const double c = b.center(k);
        if (a.lo(k) < c - half || a.hi(k) > c + half) return false;
    }
    return true;
}

std::vector<ScaledCube> vitali_subcover(const std::vector<ScaledCube>& cubes, int dim) {
    std::vector<ScaledCube> order = cubes;
    std::sort(order.begin(), order.end(), [](const ScaledCube& a, const ScaledCube& b) {
        const double sa = a.sidelength();
        const double sb = b.sidelength();
        if (sa != sb) return sa > sb;
        if (a.id != b.id) return a.id < b.id;
        return a.scale < b.scale;
    });

    std::vector<ScaledCube> selected;
    for (const auto& cube : order) {
        bool hits = false;
        for (const auto& s : selected) {
            if (cubes_overlap(cube, s, dim)) {
                hits = true;
                break;
            }
        }
        if (!hits) selected.push_back(cube);
    }
    return selected;
}

void CubeFamilySequence::validate() const {
    for (std::size_t i = 0; i < families.size(); ++i) {
        for (const CubeId& cube : families[i]) {
            if (cube.level != level_of(i)) {
                throw std::invalid_argument("family at level " + std::to_string(level_of(i)) +
                                            " contains a cube at level " + std::to_string(cube.level));
            }
        }
    }
}

double limsup_dimension_estimate(const CubeFamilySequence& seq) {
    seq.validate();

    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < seq.families.size(); ++i) {
        const std::size_t n = seq.families[i].size();
        if (n == 0) continue;  // empty levels carry no covering information
        xs.push_back(static_cast<double>(seq.level_of(i)));
        ys.push_back(std::log2(static_cast<double>(n)));
    }
    if (xs.size() < 2) {
        throw estimate_error("dimension estimate undefined: fewer than two non-empty families");
    }

    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) {
        throw estimate_error("dimension estimate undefined: single distinct level");
    }
    return sxy / sxx;
}

}  // namespace dyadic
