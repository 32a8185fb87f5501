#pragma once

#include <cstdint>
#include <cstddef>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace mobgap {

// splitmix64 step; used to derive independent sub-seeds so that restarts and
// per-k sweeps can run concurrently yet reproduce bit-identically.
std::uint64_t splitmix64(std::uint64_t x);

// Deterministic sub-seed for (seed, salt) pairs, e.g. restart or k indices.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

// mt19937_64 core with hand-rolled draw functions. The standard library's
// distributions are implementation-defined, so every draw here is pinned to
// the engine's standardized output stream.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, n). n must be > 0.
    std::uint64_t bounded(std::uint64_t n);

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01();

    // Uniform in [lo, hi).
    double uniform(double lo, double hi);

    // Standard normal via Box-Muller (one value per call, no caching, so the
    // draw count stays predictable).
    double normal();

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Gamma via Marsaglia-Tsang; shape > 0, scale > 0.
    double gamma(double shape, double scale);

    // Draw with the given mean and stddev; stddev 0 returns the mean exactly,
    // otherwise a gamma with matching first two moments (values stay >= 0).
    double positive(double mean, double stddev);

    // Index draw from cumulative-free weights (sum need not be 1).
    std::size_t categorical(const std::vector<double>& weights);

  private:
    std::mt19937_64 engine_;
};

// Runs fn(0..count-1) on up to `threads` workers, writing nothing shared;
// exceptions are rethrown for the lowest failing index. threads <= 1 runs
// inline.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

// Shortest round-trip decimal form (std::to_chars), locale-free.
std::string format_double(double v);

// Fixed-point form with the given number of decimals.
std::string format_double_fixed(double v, int decimals);

// SHA-256 of a byte string / file, lowercase hex.
std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::string& path);

} // namespace mobgap
