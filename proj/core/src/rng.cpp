#include "svpg/rng.hpp"

#include <cmath>
#include <sstream>

#include "svpg/errors.hpp"
#include "svpg/types.hpp"

namespace svpg {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng make_stream(std::uint64_t agent_seed, std::uint64_t iteration, StreamPurpose purpose,
                std::uint64_t sub) {
  std::uint64_t key = splitmix64(agent_seed);
  key = splitmix64(key ^ iteration);
  key = splitmix64(key ^ static_cast<std::uint64_t>(purpose));
  key = splitmix64(key ^ sub);
  return Rng(key);
}

std::string particle_label(int particle) {
  if (particle < 0) return {};
  return " (particle " + std::to_string(particle) + ")";
}

void require_size(std::size_t actual, std::size_t expected, const char* what) {
  if (actual != expected) {
    std::ostringstream os;
    os << what << ": expected size " << expected << ", got " << actual;
    throw DimensionError(os.str());
  }
}

void require_finite(const Eigen::Ref<const Eigen::VectorXd>& v, const char* what, int particle) {
  if (!v.allFinite()) {
    throw NumericalError(std::string("non-finite ") + what + particle_label(particle));
  }
}

}  // namespace svpg
