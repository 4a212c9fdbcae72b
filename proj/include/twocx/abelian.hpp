#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "twocx/integer.hpp"

namespace twocx {

/// Finitely generated abelian group Z^free_rank + sum Z/torsion[i], with
/// torsion[i] > 1 and torsion[i] | torsion[i+1].
struct AbelianGroup {
  std::size_t free_rank = 0;
  std::vector<Integer> torsion;

  bool trivial() const { return free_rank == 0 && torsion.empty(); }

  friend bool operator==(const AbelianGroup&, const AbelianGroup&) = default;
};

/// Cokernel of the integer relation matrix whose rows are relations among
/// `relations.cols()` generators.
AbelianGroup cokernel_of_rows(const IntMatrix& relations);

std::string to_string(const AbelianGroup& a);

}  // namespace twocx
