#pragma once

namespace relucert {

// Numerical tolerances shared by the geometry and certification layers.
//
// tol_geom is relative: every on-kink / hyperplane-equality test scales it by
// max(1, ||w||, |b|) of the neuron involved, so inflating a neuron by a large
// factor does not change any classification.
struct GeomConfig {
    double tol_geom = 1e-9;  // hyperplane equality / on-kink tests (relative)
    double tol_vol = 1e-9;   // LP slack certifying positive chamber volume
    int pattern_cap = 20;    // refuse enumerations beyond 2^pattern_cap
};

// Relative tolerance on certified inequalities (accumulated LP and norm
// round-off).
inline constexpr double kCertTol = 1e-7;

} // namespace relucert
