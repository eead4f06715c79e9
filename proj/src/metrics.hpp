#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace silhuetta {

struct VolumeRecord {
  std::string experiment;
  std::string method;
  double experimental_volume = 0.0;  // X0, cm^3
  double real_volume = 0.0;          // X, cm^3
  double real_uncertainty = 0.5;     // cm^3
};

/// (X - X0) / X0 * 100, signed.
double relative_error(double real, double experimental);

/// |RE| / X * 100. Dividing by the real volume X (not X0) is what makes the
/// published uncertainty column and its averages come out; see README.
double precision_metric(double real, double experimental);

/// Half-up (away from zero) rounding to `decimals` places.
double round_half_up(double value, int decimals);

/// CSV with header
///   experiment,method,exp_volume_cm3,real_volume_cm3,RE_pct,precision_pct
/// one row per record, then `AVERAGE,<method>,,,<re>,<prec>` per method in
/// first-appearance order. Percentages are rounded to 2 decimals after
/// averaging the unrounded values.
std::string report_csv(std::span<const VolumeRecord> records);

/// Reads `experiment,method,exp_volume_cm3,real_volume_cm3[,real_uncertainty_cm3]`
/// with a header line; blank lines and '#' comments are skipped.
std::vector<VolumeRecord> parse_records_csv(const std::string& text);
std::vector<VolumeRecord> load_records_csv(const std::filesystem::path& path);

}  // namespace silhuetta
