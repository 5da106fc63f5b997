#pragma once

#include "qnek/qspecial.hpp"

#include <string>
#include <vector>

namespace qnek {

struct VerificationReport {
    std::string id;        // stable identity id, e.g. "lemma2.4.det"
    std::string settings;  // echo of the knobs the check ran with
    real max_residual = 0.0;
    real tolerance = 0.0;
    bool pass = false;
    std::string skipped;   // nonempty => outcome is skipped(<reason>), not fail
    real wall_time = 0.0;  // seconds

    std::string outcome() const {
        if (!skipped.empty()) return "skipped(" + skipped + ")";
        return pass ? "pass" : "fail";
    }
    void finish(real residual, real tol) {
        max_residual = residual;
        tolerance = tol;
        pass = residual <= tol;
    }
};

/// Serialize reports; wall times are zeroed when include_timings is false so
/// reruns with the same seed are byte-identical.
std::string reports_to_json(const std::vector<VerificationReport>& rs, bool include_timings);
std::string reports_to_csv(const std::vector<VerificationReport>& rs, bool include_timings);

} // namespace qnek
