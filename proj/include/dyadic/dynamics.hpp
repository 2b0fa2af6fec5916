#pragma once

#include <vector>

#include "dyadic/field.hpp"
#include "dyadic/lattice.hpp"

namespace dyadic {

/// Selects how the two directed transfer terms are weighted in the nonlinear
/// right-hand side. `conservative` derives both from the single kappa family,
/// which makes the nonlinearity exactly energy-neutral. `paper_literal` keeps
/// the (-1, 32) weights for comparison runs; it is not conservative.
enum class Convention {
    conservative,
    paper_literal,
};

struct ModelParams {
    double alpha = 1.0;              // dissipation exponent
    bool dissipation_enabled = true; // false = inviscid cascade mode
    Convention convention = Convention::conservative;
    double coupling_scale = 1.0;     // global multiplier on kappa

    void validate() const;
};

/// Decay rate of the level-j eigenspace: 2^{2*alpha*j}, or 0 when
/// dissipation is disabled.
double dissipation_eigenvalue(int level, const ModelParams& params);

/// Transfer toward finer scales: output at the bottom cube accumulates
/// kappa(top) * u_top * v_mid over all cascades. Bilinear in (u, v).
CoefficientField cascade_down(const CoefficientField& u, const CoefficientField& v,
                              const CascadeTable& table, double coupling_scale = 1.0);

/// Transfer toward coarser scales: output at the top cube accumulates
/// kappa(top) * u_bottom * v_mid. The transpose of cascade_down in its
/// outer argument.
CoefficientField cascade_up(const CoefficientField& u, const CoefficientField& v,
                            const CascadeTable& table, double coupling_scale = 1.0);

/// Nonlinear part of du/dt. Under Convention::conservative this is
/// cascade_up(u,u) - cascade_down(u,u), whose pairing with u vanishes
/// identically up to rounding.
CoefficientField nonlinear_rhs(const CoefficientField& u, const ModelParams& params,
                               const CascadeTable& table);

/// Full right-hand side: nonlinear term minus 2^{2*alpha*j} u_Q per cube.
CoefficientField full_rhs(const CoefficientField& u, const ModelParams& params,
                          const CascadeTable& table);

/// Sum of squared coefficients (compensated).
double energy(const CoefficientField& u);

/// (sum 2^{2*beta*j} u_Q^2)^{1/2}; beta = 0 recovers sqrt(energy).
double sobolev_norm(const CoefficientField& u, double beta);

/// max over cubes of 2^{d*j/2} |u_Q|, the coefficient-level stand-in for the
/// pointwise magnitude of the represented function.
double sup_norm_proxy(const CoefficientField& u);

/// Per-level energies; entries sum to energy(u).
std::vector<double> level_spectrum(const CoefficientField& u);

/// <a, b> over all cubes (compensated, fixed order).
double inner_product(const CoefficientField& a, const CoefficientField& b);

}  // namespace dyadic
