#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace whmc {

// Sub-seed for a named stream: splitmix64(master_seed ^ fnv1a64(stream_id)).
// Every stochastic component owns one stream derived this way, so a run is a
// pure function of the master seed regardless of evaluation order.
std::uint64_t derive_stream_seed(std::uint64_t master_seed,
                                 std::string_view stream_id);

class RngStream {
 public:
  RngStream() : RngStream(0, "default") {}
  RngStream(std::uint64_t master_seed, std::string_view stream_id)
      : engine_(derive_stream_seed(master_seed, stream_id)) {}

  // Uniform on [0, 1) with 53 random bits. std::uniform_real_distribution is
  // implementation-defined, so the conversion is done by hand.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Unit-mean exponential, -log(1 - U). Never returns a negative value.
  double exponential();

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace whmc
