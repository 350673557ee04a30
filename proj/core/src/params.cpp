#include "cccp/params.hpp"

#include <cmath>
#include <sstream>

namespace cccp {

NonAbsorbingError::NonAbsorbingError()
    : DomainError("non-absorbing instance: with p = 1 the collection is never completed") {}

Params::Params(std::uint32_t n, double p) : n_(n), p_(p) {
  if (n < 1) throw DomainError("n must be at least 1");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
}

std::string to_string(const Params& params) {
  std::ostringstream os;
  os << "Params{n=" << params.n() << ", p=" << params.p() << "}";
  return os.str();
}

}  // namespace cccp
