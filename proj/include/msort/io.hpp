#pragma once

#include <string>

#include "msort/config.hpp"
#include "msort/sorter.hpp"

namespace msort {

/// Writes a 16-bit P5 graymap (maxval 65535, value v -> phase 2pi v / 65536)
/// plus a text sidecar `<path>.meta` with macro_pitch, m, wavelength and seed.
void save_hologram(const PhaseElement& e, const std::string& path,
                   double wavelength = 780e-9, std::uint64_t seed = 0);

/// Reads a hologram written by save_hologram. Throws IoError on malformed
/// files, wrong maxval, or size mismatch against the sidecar.
PhaseElement load_hologram(const std::string& path);

enum class Normalization { kPeak, kPower };

/// 16-bit graymap of |a|^2. kPeak scales the maximum to 65535; kPower scales
/// by per-sample power fraction (clamped).
void export_intensity(const ComplexField& f, const std::string& path,
                      Normalization norm = Normalization::kPeak);

/// Same export for a precomputed intensity map.
void export_intensity_map(const std::vector<double>& map, int n,
                          const std::string& path,
                          Normalization norm = Normalization::kPeak);

/// CSV report: normalized crosstalk matrix (6 decimals, rows sum to 1)
/// followed by ability / efficiency / e_b / R / B footer rows.
void write_crosstalk_csv(const SortMetrics& metrics, const std::string& path);

/// CSV of the raw channel-intensity matrix.
void write_raw_csv(const SortMetrics& metrics, const std::string& path);

}  // namespace msort
