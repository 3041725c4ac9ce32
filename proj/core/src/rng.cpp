#include "mcaimem/rng.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <sstream>

#include "mcaimem/error.hpp"

namespace mcaimem {

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
  engine_.seed(seq);
}

double RngStream::standard_normal() {
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * uniform01());
}

std::string RngStream::state() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

void RngStream::set_state(const std::string& s) {
  std::istringstream is(s);
  is >> engine_;
  if (is.fail()) throw ParseError("malformed random engine state");
}

}  // namespace mcaimem
