#pragma once

#include "qnek/lax.hpp"

namespace qnek {

/// Knobs for one full verification run. The seed fully determines every
/// random parameter draw; two runs with the same config produce identical
/// reports (up to wall times, which the serializers can zero out).
struct SuiteConfig {
    unsigned seed = 42;
    int cutoff = 6;       // instanton bound for the block-level checks
    int lax_cutoff = 5;   // instanton bound for the lattice-sum checks
    int radius = 2;       // lattice window for the tau sums
    real tol_scale = 1.0; // multiplies every per-check tolerance
    QBase base{cplx(0.3, 0.0)};
    LaxParams lax;        // parameters for the deformation-level checks
};

/// The config the CLI starts from when no file overrides it.
SuiteConfig default_suite_config();

/// Run every registered identity check. Checks may execute concurrently
/// (QNEK_THREADS caps the pool); the returned order is sorted by id.
/// Resonant draws and empty sample annuli come back as skipped, not failed.
std::vector<VerificationReport> run_suite(const SuiteConfig& cfg);

} // namespace qnek
