#pragma once

#include <cstdint>
#include <cstddef>

#include "qpart/pauli.hpp"

namespace qpart {

/// 1D transverse-field Ising model with periodic boundary conditions:
/// H = -coupling * sum_i X_i X_{i+1} - field * sum_i Z_i, with the wrap
/// bond X_n X_1.
struct TfimSpec {
    std::size_t sites = 0;
    double coupling = 1.0;
    double field = 1.0;

    bool operator==(const TfimSpec&) const = default;
};

/// Builds the 2n-term observable (the n=2 wrap bond merges into a single
/// doubled XX term).
Observable build_tfim(const TfimSpec& spec);

struct GroundStateOptions {
    std::size_t max_iterations = 2000;
    /// Convergence target for the residual ||Hx - Ex|| relative to the
    /// coefficient 1-norm of H.
    double tolerance = 1e-11;
    /// Lanczos basis size before restarting from the current Ritz vector;
    /// 0 picks a size from a ~512 MB memory budget.
    std::size_t max_basis = 0;
    std::uint64_t seed = 0x9c0ffee;
};

/// Lowest eigenvalue of the TFIM via matrix-free Lanczos iteration (H is
/// applied as a sum of Pauli-string actions on 2^n amplitudes).  Supports
/// n <= 20; throws on non-convergence with the final residual reported.
double exact_ground_energy(const TfimSpec& spec,
                           const GroundStateOptions& options = {});

/// Closed-form ground energy from the free-fermion solution (even n only):
/// E0 = -sum_{m=1}^{n/2} 2 sqrt(J^2 + h^2 - 2 J h cos((2m-1) pi / n)).
/// Independent of the iterative oracle by construction.
double free_fermion_ground_energy(const TfimSpec& spec);

}  // namespace qpart
