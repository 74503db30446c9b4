// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "spikemix/linalg.hpp"

namespace spikemix {

// One row per detected spike, s samples per row.
struct WaveformMatrix {
  RowMatrix values;
  std::optional<double> sample_interval_ms;

  int n() const { return static_cast<int>(values.rows()); }
  int s() const { return static_cast<int>(values.cols()); }
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reads a rectangular numeric CSV. Errors name the 1-based file line.
RowMatrix read_numeric_csv(std::istream& in, bool has_header, const std::string& source);
WaveformMatrix load_waveforms(const std::string& path, bool has_header);

}  // namespace spikemix
