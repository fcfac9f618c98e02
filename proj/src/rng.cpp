#include "gevregret/rng.hpp"

namespace gevregret {

namespace {

// splitmix64 finalizer; full-period mixer used to whiten seed material.
uint64_t mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t fnv1a(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

uint64_t derive_seed(uint64_t master, std::string_view stream) {
  return mix(master ^ mix(fnv1a(stream)));
}

uint64_t derive_seed(uint64_t master, std::string_view stream, uint64_t index) {
  return mix(derive_seed(master, stream) ^ mix(index + 0x51ed2701ab7c9d43ULL));
}

}  // namespace gevregret
