#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>
#include <vector>

#include "dyadic/lattice.hpp"
#include "dyadic/numerics.hpp"
#include "test_support.hpp"

using namespace dyadic;
using test_support::all_cubes;
using test_support::brute_force_cascades;
using test_support::Triple;

TEST_CASE("cube counts and flat index roundtrip") {
    for (int d = 1; d <= 3; ++d) {
        for (int max_level = 0; max_level <= 4; ++max_level) {
            const LatticeConfig config{d, max_level};
            config.validate();

            std::uint64_t total = 0;
            for (int j = 0; j <= max_level; ++j) {
                CHECK(config.cubes_at_level(j) == std::uint64_t{1} << (d * j));
                total += config.cubes_at_level(j);
            }
            CHECK(config.total_cubes() == total);

            for (const CubeId& cube : all_cubes(config)) {
                CHECK(in_lattice(cube, config));
                CHECK(cube_from_index(cube.level, flat_index(cube, config), config) == cube);
            }
        }
    }
}

TEST_CASE("lattice config validation") {
    CHECK_THROWS_AS(LatticeConfig{0, 2}.validate(), std::invalid_argument);
    CHECK_THROWS_AS(LatticeConfig{4, 2}.validate(), std::invalid_argument);
    CHECK_THROWS_AS(LatticeConfig{1, -1}.validate(), std::invalid_argument);
    CHECK_THROWS_AS(LatticeConfig{3, 30}.validate(), std::invalid_argument);
}

TEST_CASE("children of the root in three dimensions") {
    const LatticeConfig config{3, 2};
    const auto kids = children(CubeId{0, {0, 0, 0}}, config);
    REQUIRE(kids.size() == 8);
    for (const CubeId& c : kids) {
        CHECK(c.level == 1);
        for (int k = 0; k < 3; ++k) {
            CHECK(c.coords[k] >= 0);
            CHECK(c.coords[k] <= 1);
        }
    }
    // all 8 corners distinct
    auto sorted = kids;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
}

TEST_CASE("children in one dimension halve the interval") {
    const LatticeConfig config{1, 3};
    const auto kids = children(CubeId{2, {3, 0, 0}}, config);
    REQUIRE(kids.size() == 2);
    CHECK(kids[0] == CubeId{3, {6, 0, 0}});
    CHECK(kids[1] == CubeId{3, {7, 0, 0}});
}

TEST_CASE("children at the maximum level is empty") {
    const LatticeConfig config{2, 2};
    CHECK(children(CubeId{2, {1, 3, 0}}, config).empty());
}

TEST_CASE("children rejects cubes outside the lattice") {
    const LatticeConfig config{2, 3};
    CHECK_THROWS_AS(children(CubeId{1, {2, 0, 0}}, config), std::invalid_argument);
    CHECK_THROWS_AS(children(CubeId{4, {0, 0, 0}}, config), std::invalid_argument);
    CHECK_THROWS_AS(children(CubeId{1, {-1, 0, 0}}, config), std::invalid_argument);
}

TEST_CASE("parent examples") {
    CHECK(!parent(CubeId{0, {0, 0, 0}}).has_value());
    const auto up = parent(CubeId{1, {1, 0, 1}});
    REQUIRE(up.has_value());
    CHECK(*up == CubeId{0, {0, 0, 0}});
}

TEST_CASE("parent of child roundtrip across dimensions") {
    for (int d = 1; d <= 3; ++d) {
        const int max_level = d == 3 ? 3 : 5;
        const LatticeConfig config{d, max_level};
        for (const CubeId& cube : all_cubes(config)) {
            for (const CubeId& child : children(cube, config)) {
                const auto up = parent(child);
                REQUIRE(up.has_value());
                CHECK(*up == cube);
            }
        }
    }
}

TEST_CASE("cascade enumeration matches brute force and the count formula") {
    for (int d = 1; d <= 3; ++d) {
        for (int max_level = 0; max_level <= 4; ++max_level) {
            const LatticeConfig config{d, max_level};
            const CascadeTable table = enumerate_cascades(config);

            std::uint64_t formula = 0;
            for (int j = 0; j + 2 <= max_level; ++j) {
                formula += std::uint64_t{1} << (d * j + 2 * d);
            }
            CHECK(table.triples.size() == formula);

            const auto oracle = brute_force_cascades(config);
            REQUIRE(table.triples.size() == oracle.size());
            std::vector<Triple> got;
            for (const Cascade& c : table.triples) {
                got.emplace_back(c.top, c.mid, c.bottom);
                CHECK(c.kappa == std::exp2(0.5 * (d + 2) * c.top.level));
                CHECK(c.top_index == flat_index(c.top, config));
                CHECK(c.mid_index == flat_index(c.mid, config));
                CHECK(c.bottom_index == flat_index(c.bottom, config));
            }
            std::vector<Triple> sorted = got;
            std::sort(sorted.begin(), sorted.end());
            CHECK(got == sorted);  // deterministic (top, mid, bottom) ordering
            CHECK(sorted == oracle);
        }
    }
}

TEST_CASE("cascade counts for the documented cases") {
    CHECK(enumerate_cascades(LatticeConfig{3, 2}).triples.size() == 64);
    CHECK(enumerate_cascades(LatticeConfig{1, 2}).triples.size() == 4);
    for (int d = 1; d <= 3; ++d) {
        CHECK(enumerate_cascades(LatticeConfig{d, 1}).triples.empty());
    }
}

TEST_CASE("cascade dump is one triple per line") {
    const CascadeTable table = enumerate_cascades(LatticeConfig{1, 2});
    std::ostringstream out;
    dump_cascades(table, out);
    std::istringstream in(out.str());
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 4);
    CHECK(out.str().substr(0, out.str().find('\n')) == "0:0 1:0 2:0 1");
}

namespace {

void check_vitali(const std::vector<ScaledCube>& input, int dim) {
    const auto selected = vitali_subcover(input, dim);

    for (std::size_t a = 0; a < selected.size(); ++a) {
        for (std::size_t b = a + 1; b < selected.size(); ++b) {
            CHECK(!cubes_overlap(selected[a], selected[b], dim));
        }
    }
    for (const ScaledCube& cube : input) {
        bool covered = false;
        for (const ScaledCube& s : selected) {
            if (contained_in_dilation(cube, s, 5.0, dim)) {
                covered = true;
                break;
            }
        }
        CHECK(covered);
    }
}

}  // namespace

TEST_CASE("vitali keeps a pairwise disjoint input unchanged") {
    std::vector<ScaledCube> input;
    for (int k = 0; k < 4; ++k) {
        input.push_back({CubeId{2, {k, 0, 0}}, 1.0});
    }
    const auto selected = vitali_subcover(input, 1);
    CHECK(selected.size() == input.size());
    check_vitali(input, 1);
}

TEST_CASE("vitali keeps one of two identical cubes") {
    const ScaledCube cube{CubeId{1, {1, 0, 0}}, 1.0};
    const auto selected = vitali_subcover({cube, cube}, 1);
    REQUIRE(selected.size() == 1);
    CHECK(selected[0] == cube);
}

TEST_CASE("vitali on a chain of overlapping dilated cubes") {
    // Doubled level-3 intervals: consecutive ones overlap, so the greedy
    // pass keeps every other cube.
    std::vector<ScaledCube> input;
    for (int k = 0; k < 8; ++k) {
        input.push_back({CubeId{3, {k, 0, 0}}, 2.0});
    }
    const auto selected = vitali_subcover(input, 1);
    REQUIRE(selected.size() == 4);
    for (std::size_t i = 0; i < selected.size(); ++i) {
        CHECK(selected[i].id.coords[0] == static_cast<int>(2 * i));
    }
    check_vitali(input, 1);
}

TEST_CASE("vitali properties on random mixed-scale collections") {
    std::uint64_t counter = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const int dim = 1 + trial % 3;
        std::vector<ScaledCube> input;
        const int n = 1 + static_cast<int>(mix64(counter++) % 50);
        for (int i = 0; i < n; ++i) {
            ScaledCube cube;
            cube.id.level = static_cast<int>(mix64(counter++) % 5);
            for (int k = 0; k < dim; ++k) {
                cube.id.coords[k] = static_cast<std::int32_t>(mix64(counter++) % (1u << cube.id.level));
            }
            const double scales[] = {1.0, 1.0, 2.0, 3.0};
            cube.scale = scales[mix64(counter++) % 4];
            input.push_back(cube);
        }
        check_vitali(input, dim);
    }
}

namespace {

CubeFamilySequence synthetic_families(int first_level, int last_level,
                                      const std::vector<std::uint64_t>& sizes) {
    CubeFamilySequence seq;
    seq.first_level = first_level;
    for (int j = first_level; j <= last_level; ++j) {
        const std::uint64_t n = sizes[static_cast<std::size_t>(j - first_level)];
        std::vector<CubeId> family;
        family.reserve(n);
        const std::uint64_t side = std::uint64_t{1} << j;
        for (std::uint64_t i = 0; i < n; ++i) {
            // pack the index into valid level-j coords (enough room for n <= 2^{2j})
            CubeId cube;
            cube.level = j;
            cube.coords[0] = static_cast<std::int32_t>(i & (side - 1));
            cube.coords[1] = static_cast<std::int32_t>(i >> j);
            family.push_back(cube);
        }
        seq.families.push_back(std::move(family));
    }
    return seq;
}

}  // namespace

TEST_CASE("dimension estimate of constant singleton families is zero") {
    std::vector<std::uint64_t> sizes(9, 1);
    const auto seq = synthetic_families(4, 12, sizes);
    CHECK(limsup_dimension_estimate(seq) == 0.0);
}

TEST_CASE("dimension estimate of a full covering is exact") {
    std::vector<std::uint64_t> sizes;
    for (int j = 2; j <= 5; ++j) sizes.push_back(std::uint64_t{1} << (3 * j));
    CubeFamilySequence seq;
    seq.first_level = 2;
    const LatticeConfig config{3, 5};
    for (int j = 2; j <= 5; ++j) {
        std::vector<CubeId> family;
        for (std::uint64_t i = 0; i < config.cubes_at_level(j); ++i) {
            family.push_back(cube_from_index(j, i, config));
        }
        seq.families.push_back(std::move(family));
    }
    CHECK(limsup_dimension_estimate(seq) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("dimension estimate recovers the growth exponent of 2^(beta j)") {
    for (double beta : {0.5, 1.0, 1.5, 2.0}) {
        std::vector<std::uint64_t> sizes;
        for (int j = 4; j <= 12; ++j) {
            sizes.push_back(std::uint64_t{1} << static_cast<int>(std::floor(beta * j)));
        }
        const auto seq = synthetic_families(4, 12, sizes);
        const double estimate = limsup_dimension_estimate(seq);
        CHECK(std::abs(estimate - beta) <= 0.1);
    }
}

TEST_CASE("dimension estimate skips empty families") {
    // sizes 2^1, (empty), 2^3, 2^4, 2^5 over levels 4..8: exact slope 1
    const auto seq = synthetic_families(4, 8, {2, 0, 8, 16, 32});
    CHECK(limsup_dimension_estimate(seq) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dimension estimate undefined for empty or singleton input") {
    CHECK_THROWS_AS(limsup_dimension_estimate(synthetic_families(4, 8, {0, 0, 0, 0, 0})),
                    estimate_error);
    CHECK_THROWS_AS(limsup_dimension_estimate(synthetic_families(4, 8, {0, 5, 0, 0, 0})),
                    estimate_error);
}

TEST_CASE("family sequence validation rejects level mismatches") {
    CubeFamilySequence seq;
    seq.first_level = 2;
    seq.families.push_back({CubeId{3, {0, 0, 0}}});
    CHECK_THROWS_AS(limsup_dimension_estimate(seq), std::invalid_argument);
}
