#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>

#include "graphguard/error.hpp"
#include "graphguard/rng.hpp"

namespace graphguard {

namespace {
LogLevel g_level = LogLevel::kWarn;
}

void set_log_level(LogLevel level) { g_level = level; }
LogLevel log_level() { return g_level; }

void warn(std::string_view message) {
  if (g_level >= LogLevel::kWarn) std::cerr << "warning: " << message << '\n';
}

void info(std::string_view message) {
  if (g_level >= LogLevel::kInfo) std::cerr << message << '\n';
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  // Rejection on the top of the range keeps every residue equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

double Rng::normal() {
  // Box-Muller, one variate per call.
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::exponential(double rate) {
  double u = uniform01();
  while (u <= 0.0) u = uniform01();
  return -std::log(u) / rate;
}

std::int64_t Rng::poisson(double mean) {
  if (mean <= 0.0) return 0;
  // Knuth's product method, applied in chunks so exp(-mean) never underflows.
  std::int64_t total = 0;
  double remaining = mean;
  while (remaining > 0.0) {
    const double chunk = std::min(remaining, 30.0);
    remaining -= chunk;
    const double limit = std::exp(-chunk);
    double product = uniform01();
    while (product > limit) {
      ++total;
      product *= uniform01();
    }
  }
  return total;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = mix64(base);
  for (std::uint64_t p : parts) h = mix64(h ^ mix64(p));
  return h;
}

}  // namespace graphguard
