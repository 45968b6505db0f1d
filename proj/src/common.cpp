#include "common.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>

namespace afa {

int relabel_dense(std::vector<int32_t>& labels) {
  std::unordered_map<int32_t, int32_t> remap;
  remap.reserve(64);
  int32_t next = 0;
  for (auto& v : labels) {
    auto it = remap.find(v);
    if (it == remap.end()) {
      remap.emplace(v, next);
      v = next++;
    } else {
      v = it->second;
    }
  }
  return int(next);
}

double SplitMix64::next_normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = next_double();
  } while (u1 <= 0.0);
  double u2 = next_double();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

uint64_t derive_seed(uint64_t base, const std::string& tag, uint64_t index) {
  uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](uint64_t byte) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  };
  for (int i = 0; i < 8; ++i) mix((base >> (8 * i)) & 0xff);
  for (unsigned char c : tag) mix(c);
  for (int i = 0; i < 8; ++i) mix((index >> (8 * i)) & 0xff);
  return h;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace afa
