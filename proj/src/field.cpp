#include "dyadic/field.hpp"

#include <cmath>

namespace dyadic {

CoefficientField::CoefficientField(const LatticeConfig& config) : config_(config) {
    config_.validate();
    levels_.resize(static_cast<std::size_t>(config_.max_level) + 1);
    for (int j = 0; j <= config_.max_level; ++j) {
        levels_[static_cast<std::size_t>(j)].assign(config_.cubes_at_level(j), 0.0);
    }
}

double& CoefficientField::at(const CubeId& cube) {
    if (!in_lattice(cube, config_)) {
        throw std::invalid_argument("cube " + to_string(cube, config_.dim) + " outside lattice");
    }
    return at(cube.level, flat_index(cube, config_));
}

double CoefficientField::at(const CubeId& cube) const {
    if (!in_lattice(cube, config_)) {
        throw std::invalid_argument("cube " + to_string(cube, config_.dim) + " outside lattice");
    }
    return at(cube.level, flat_index(cube, config_));
}

bool CoefficientField::all_finite() const {
    for (const auto& lvl : levels_) {
        for (double x : lvl) {
            if (!std::isfinite(x)) return false;
        }
    }
    return true;
}

void CoefficientField::fill(double value) {
    for (auto& lvl : levels_) {
        for (double& x : lvl) x = value;
    }
}

void CoefficientField::add_scaled(const CoefficientField& other, double a) {
    if (!same_lattice(other)) {
        throw std::invalid_argument("lattice mismatch in field arithmetic");
    }
    for (std::size_t j = 0; j < levels_.size(); ++j) {
        const auto& src = other.levels_[j];
        auto& dst = levels_[j];
        for (std::size_t i = 0; i < dst.size(); ++i) {
            dst[i] += a * src[i];
        }
    }
}

}  // namespace dyadic
