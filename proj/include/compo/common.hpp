#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace compo {

// Thrown when a value fails a structural or numeric precondition
// (dimension mismatch, non-finite input, bad configuration).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// splitmix64 step; used to derive independent seed streams from one run seed.
uint64_t splitmix64(uint64_t x);

// Deterministic seed derivation: mixes a stream id into a base seed.
uint64_t seed_mix(uint64_t seed, uint64_t stream);

std::mt19937_64 make_rng(uint64_t seed);

// FNV-1a over a byte string; stable across platforms, used for config hashes.
uint64_t fnv1a64(const std::string& bytes);

// Worker count for population evaluation. Reads COMPO_MOTOR_THREADS once per
// call; 0, 1, or unset mean serial.
int worker_threads();

// Runs fn(i) for i in [0, n) on up to n_workers threads. Work is claimed via
// a shared counter and results must be written to index i only, so the
// outcome is identical to the serial loop regardless of thread count.
void parallel_for_indexed(int n, int n_workers, const std::function<void(int)>& fn);

}  // namespace compo
