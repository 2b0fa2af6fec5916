#pragma once

#include <cstdint>
#include <vector>

#include "dyadic/lattice.hpp"

namespace dyadic {

/// The state u: one real coefficient per cube, stored per level in flat-index
/// order. Only coefficients are represented; there is no spatial basis here.
class CoefficientField {
public:
    CoefficientField() = default;
    explicit CoefficientField(const LatticeConfig& config);

    const LatticeConfig& config() const { return config_; }
    int max_level() const { return config_.max_level; }

    std::vector<double>& level(int j) { return levels_[static_cast<std::size_t>(j)]; }
    const std::vector<double>& level(int j) const { return levels_[static_cast<std::size_t>(j)]; }

    double& at(int level, std::uint64_t index) { return levels_[static_cast<std::size_t>(level)][index]; }
    double at(int level, std::uint64_t index) const { return levels_[static_cast<std::size_t>(level)][index]; }

    double& at(const CubeId& cube);
    double at(const CubeId& cube) const;

    bool same_lattice(const CoefficientField& other) const { return config_ == other.config_; }
    bool all_finite() const;

    void fill(double value);

    /// *this += a * other (same lattice required).
    void add_scaled(const CoefficientField& other, double a);

    bool operator==(const CoefficientField&) const = default;

private:
    LatticeConfig config_;
    std::vector<std::vector<double>> levels_;
};

}  // namespace dyadic
