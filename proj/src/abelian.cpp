#include "twocx/abelian.hpp"

#include <sstream>

#include "twocx/smith.hpp"

namespace twocx {

AbelianGroup cokernel_of_rows(const IntMatrix& relations) {
  AbelianGroup out;
  const auto factors = invariant_factors(relations);
  out.free_rank = static_cast<std::size_t>(relations.cols()) - factors.size();
  for (const Integer& d : factors) {
    if (d != Integer(1)) out.torsion.push_back(d);
  }
  return out;
}

std::string to_string(const AbelianGroup& a) {
  std::ostringstream os;
  bool first = true;
  if (a.free_rank > 0) {
    os << "Z";
    if (a.free_rank > 1) os << "^" << a.free_rank;
    first = false;
  }
  for (const Integer& t : a.torsion) {
    if (!first) os << " + ";
    os << "Z/" << t;
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

}  // namespace twocx
