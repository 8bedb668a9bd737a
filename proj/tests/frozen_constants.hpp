#pragma once

// Regression constants, produced by tests/derive_constants.cpp.
//
// Provenance: each value was accepted only after two independent routes
// agreed: (1) a dense Eigen full-spectrum solve at twice the default
// resolution on Boost Gauss-Legendre nodes, with the chain's transition
// density written directly (tests/oracles/dense_oracle.hpp), and (2) a
// Fleming-Viot ray-survival Monte Carlo (tests/oracles/ray_survival_oracle.hpp,
// 2e5 particles, 600 steps). Observed agreement:
//
//   d=2 lambda_0: Nystrom 1.384475074264, dense 1.384475074264, MC 1.384566 +- 7.7e-5
//   d=3 lambda_0: Nystrom 1.860022979684, dense 1.860022979684, MC 1.859911 +- 1.0e-4
//   d=2 h_star:   Nystrom 0.588612064507, dense 0.588612065670, MC lambda(h*) 0.999939 +- 1.0e-4
//   d=3 h_star:   Nystrom 0.572188447197, dense 0.572188446301, MC lambda(h*) 0.999866 +- 1.7e-4
//   eigenvalue gaps: default grid, 2x grid and dense agree to <= 1e-12.

namespace frozen {

inline constexpr double lambda0_d2 = 1.384475074264;
inline constexpr double lambda0_d3 = 1.860022979684;

inline constexpr double h_star_d2 = 0.588612064507;
inline constexpr double h_star_d3 = 0.572188447197;

/// u0 = d/(d-1)^2 ln lambda_0, where the critical line crosses a = 0.
inline constexpr double u0_d2 = 0.650642120092;
inline constexpr double u0_d3 = 0.465441631738;

/// lambda_a exp(-(a rho + rho^2/2)(d-1)^2/d) - lambda_{a+rho}.
inline constexpr double gap_d2_a0_r1 = 3.426416579712e-01;
inline constexpr double gap_d2_a05_r05 = 1.423611341376e-01;
inline constexpr double gap_d2_a1_r05 = 7.722854635586e-02;
inline constexpr double gap_d3_a2_r2 = 6.390781650824e-06;

}  // namespace frozen
