#pragma once

#include <string>
#include <vector>

#include "sossm/ssm_model.hpp"

namespace sossm {

/// Column transforms applied to a loaded CSV, in declared order.
struct Transform {
  enum class Op { divide, day_start_diff };
  Op op;
  double value = 1.0;  // divisor
  long period = 24;    // day length for day_start_diff
};

/// Rectangular numeric CSV with one header row. Errors name the offending
/// row/column. Transforms: "divide" scales every cell by 1/value;
/// "day_start_diff" emits row_t - row_{period*floor((t-1)/period)} for
/// t = 1..n-1 (rows are 0-indexed on input, so the first output row is
/// row_1 - row_0).
ObsSequence load_observations(const std::string& path, const std::vector<Transform>& transforms = {});

/// Write a numeric CSV (17 significant digits, lossless round-trip).
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

std::string format_double(double v);

}  // namespace sossm
