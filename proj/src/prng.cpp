#include "unijadi/prng.hpp"

#include <cmath>

namespace unijadi {

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : base_(mix64(seed + kGamma) ^ mix64(stream * 0xda942042e4dd58b5ULL + kGamma)) {}

std::uint64_t CounterRng::next_u64() {
    ++counter_;
    return mix64(base_ + counter_ * kGamma);
}

double CounterRng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

double CounterRng::gaussian() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_gaussian_;
    }
    // Box-Muller; u1 shifted into (0, 1] so the log is finite.
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double th = 2.0 * M_PI * u2;
    cached_gaussian_ = r * std::sin(th);
    has_cached_ = true;
    return r * std::cos(th);
}

cplx CounterRng::complex_gaussian(double sigma_component) {
    double re = sigma_component * gaussian();
    double im = sigma_component * gaussian();
    return {re, im};
}

cplx CounterRng::unit_phase() {
    double th = 2.0 * M_PI * uniform01();
    return {std::cos(th), std::sin(th)};
}

CounterRng CounterRng::substream(std::uint64_t k) const {
    CounterRng out(0);
    out.base_ = mix64(base_ + (k + 1) * 0x632be59bd9b4e019ULL);
    return out;
}

}  // namespace unijadi
