#pragma once

#include "sossm/harness/config.hpp"

namespace sossm {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// Run one job end to end: build model/space/schedule, dispatch to the
/// matching engine, write the output CSV and its metadata sidecar
/// (output path + ".meta"). Throws on any failure.
void run_job(const JobConfig& cfg);

}  // namespace sossm
