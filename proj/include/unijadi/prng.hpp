#pragma once

#include <cstdint>

#include "unijadi/tensor.hpp"

namespace unijadi {

// Counter-based generator: draw k is a SplitMix64 mix of seed, stream and
// counter, so sequences are identical across platforms and substreams can be
// split off without sharing state.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();

    double uniform01();                     // [0, 1)
    double uniform(double lo, double hi);
    double gaussian();                      // standard normal, Box-Muller
    cplx complex_gaussian(double sigma_component);
    cplx unit_phase();                      // e^{i theta}, theta uniform

    CounterRng substream(std::uint64_t k) const;

private:
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
    double cached_gaussian_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace unijadi
