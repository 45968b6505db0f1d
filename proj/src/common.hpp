// Shared error types and small utilities used across the library.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace afa {

// Error hierarchy maps onto the C API status codes (and CLI exit codes):
// ConfigError -> 1, DataError -> 2, InternalError -> 3.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};
struct InternalError : std::logic_error {
  explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

#define AFA_CHECK(cond, msg)                      \
  do {                                            \
    if (!(cond)) throw ::afa::InternalError(msg); \
  } while (0)

// Relabels `labels` in place to a dense 0-based range, ordered by first
// occurrence. Returns the number of distinct labels.
int relabel_dense(std::vector<int32_t>& labels);

// Deterministic uniform double in [0,1) from a 64-bit generator state.
// Hand-rolled so results do not depend on the standard library's
// distribution implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}
  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }
  // Standard normal via Box-Muller; explicit formula for portability.
  double next_normal();

 private:
  uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Derives a sub-seed from a base seed and a stage tag (FNV-1a over the tag).
uint64_t derive_seed(uint64_t base, const std::string& tag, uint64_t index = 0);

std::vector<std::string> split(const std::string& s, char sep);
std::string trim(const std::string& s);
std::string lower(const std::string& s);

}  // namespace afa
