#pragma once

#include <optional>
#include <string>
#include <vector>

#include "msort/ga.hpp"
#include "msort/mub.hpp"

namespace msort {

/// Raised for malformed or inconsistent configuration input.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised for file-system level failures.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parsed run configuration: sectioned key = value text with paper defaults
/// for omitted keys.
struct RunConfig {
  // [grid] -- pitch is the macropixel pitch; sample pitch = pitch / supersampling
  int n = 256;
  double pitch = 20e-6;
  double wavelength = 780e-9;
  int supersampling = 1;

  // [mode]
  std::string family;  ///< oam | radial | fullfield (required)
  int d = 0;           ///< 0 -> derived from the index lists
  double waist = 250e-6;
  std::vector<int> ells;  ///< optional explicit index lists
  std::vector<int> ps;
  int mub = 0;  ///< 0 = computational basis, 1..d = MUB index

  // [layout]
  double channel_side = 200e-6;
  std::vector<std::pair<double, double>> centers;  ///< empty -> family default

  // [sorter]
  int planes = 2;
  double focal = 1.0;
  int steps = 1;

  // [ga]
  GAConfig ga;
  bool rank_tau_given = false;

  // [output]
  std::string output_dir = "out";
  long checkpoint_interval = 0;
};

RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

/// Sample grid (pitch / supersampling).
Grid make_grid(const RunConfig& cfg);

/// Computational LG basis per the mode block.
BasisSpec make_basis(const RunConfig& cfg);

/// Channel layout: explicit centers, or per-family defaults (d = 2 opposite
/// corners, full-field 3 x 2 grid, otherwise a 400 um-spaced horizontal line).
ChannelLayout make_layout(const RunConfig& cfg);

SorterSetup make_setup(const RunConfig& cfg);

/// Input fields: the computational basis modes, or the selected MUB's
/// vectors as coherent superpositions.
std::vector<ComplexField> make_inputs(const RunConfig& cfg);

}  // namespace msort
