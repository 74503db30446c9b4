// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <random>

namespace spikemix {

// Seeded random stream. Two streams built from the same (seed, stream_id)
// produce the same sequence; distinct stream ids are seeded independently
// through std::seed_seq.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Uniform on [0, 1).
  double uniform();
  // Uniform on the open interval (0, 1).
  double uniform_open();
  double normal();
  // Uniform integer on [0, n).
  int index(int n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace spikemix
