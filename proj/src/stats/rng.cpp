// Apache License, Version 2.0, refer to LICENSE.txt

#include "spikemix/rng.hpp"

#include <stdexcept>

namespace spikemix {

namespace {

std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t stream_id) {
  return std::seed_seq{
      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(stream_id),
      static_cast<std::uint32_t>(stream_id >> 32), 0x5d1c3b7fU};
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  auto seq = make_seed_seq(seed, stream_id);
  engine_.seed(seq);
}

double RngStream::uniform() { return unit_(engine_); }

double RngStream::uniform_open() {
  double u = 0.0;
  do {
    u = unit_(engine_);
  } while (u <= 0.0);
  return u;
}

double RngStream::normal() { return normal_(engine_); }

int RngStream::index(int n) {
  if (n <= 0) throw std::invalid_argument("RngStream::index: n must be positive");
  std::uniform_int_distribution<int> dist(0, n - 1);
  return dist(engine_);
}

}  // namespace spikemix
