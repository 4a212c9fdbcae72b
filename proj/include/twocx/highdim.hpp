#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <tuple>
#include <vector>

#include "twocx/abelian.hpp"
#include "twocx/freegroup.hpp"
#include "twocx/integer.hpp"

namespace twocx {

/// Finite group given by its multiplication table on elements 0..order-1.
class FiniteGroup {
 public:
  /// Validates closure, identity, inverses and associativity (exhaustive up
  /// to order 64, sampled above). Throws ParseError on failure.
  FiniteGroup(std::vector<std::vector<std::size_t>> table, std::size_t identity);

  static FiniteGroup trivial();
  static FiniteGroup cyclic(std::size_t n);
  static FiniteGroup symmetric3();
  static FiniteGroup direct_product(const FiniteGroup& a, const FiniteGroup& b);

  std::size_t order() const { return table_.size(); }
  std::size_t identity() const { return identity_; }
  std::size_t mul(std::size_t a, std::size_t b) const { return table_[a][b]; }
  std::size_t inv(std::size_t a) const { return inverse_[a]; }
  const std::vector<std::vector<std::size_t>>& table() const { return table_; }

  /// Image of a word under gen i -> images[i].
  std::size_t evaluate(const Word& w, std::span<const std::size_t> images) const;

  friend bool operator==(const FiniteGroup& a, const FiniteGroup& b) {
    return a.identity_ == b.identity_ && a.table_ == b.table_;
  }

 private:
  std::vector<std::vector<std::size_t>> table_;
  std::size_t identity_;
  std::vector<std::size_t> inverse_;
};

/// Element of Z[G]: element index -> coefficient, zeros never stored.
using GroupRingElement = std::map<std::size_t, Integer>;

GroupRingElement ring_mul(const FiniteGroup& g, const GroupRingElement& a, const GroupRingElement& b);

/// Sparse matrix over Z[G].
struct GroupRingMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::map<std::pair<std::size_t, std::size_t>, GroupRingElement> entries;

  static GroupRingMatrix zero(std::size_t rows, std::size_t cols) { return GroupRingMatrix{rows, cols, {}}; }

  /// entry(row, col) += coeff * elem
  void add(std::size_t row, std::size_t col, std::size_t elem, const Integer& coeff);

  const GroupRingElement* at(std::size_t row, std::size_t col) const;

  bool is_zero() const { return entries.empty(); }

  friend bool operator==(const GroupRingMatrix&, const GroupRingMatrix&) = default;
};

GroupRingMatrix multiply(const FiniteGroup& g, const GroupRingMatrix& a, const GroupRingMatrix& b);

/// Horizontal concatenation [a | b].
GroupRingMatrix hconcat(const GroupRingMatrix& a, const GroupRingMatrix& b);

/// Integer matrix of size (rows*|G|) x (cols*|G|); the block of an entry
/// sum a_g g is left multiplication on the basis of Z[G].
IntMatrix restrict_scalars(const GroupRingMatrix& m, const FiniteGroup& g);

/// Free Z[G] chain complex C_n -> ... -> C_0. boundaries[k-1] is d_k, a
/// rank_{k-1} x rank_k matrix acting on column vectors.
struct ChainComplexData {
  FiniteGroup group = FiniteGroup::trivial();
  std::size_t n = 0;
  std::vector<std::size_t> ranks;
  std::vector<GroupRingMatrix> boundaries;

  const GroupRingMatrix& boundary(std::size_t k) const { return boundaries.at(k - 1); }

  /// Shapes, element indices and d_{k-1} d_k = 0. Throws VerificationError.
  void validate() const;
};

/// H_k of the restricted-scalars integer complex.
AbelianGroup homology_at(const ChainComplexData& c, std::size_t k);

/// Shares the (n-1)-skeleton and places both top boundaries side by side.
/// Throws ContextError when the skeleta differ.
ChainComplexData glue_product(const ChainComplexData& c1, const ChainComplexData& c2);

/// Whether c1 and c2 agree below dimension n.
bool same_skeleton(const ChainComplexData& c1, const ChainComplexData& c2);

/// sum (-1)^k rank_k
long long euler_char_chain(const ChainComplexData& c);

/// chi(c1) + (-1)^n rank_n(c2), the Euler characteristic of the glued complex.
long long product_euler(const ChainComplexData& c1, const ChainComplexData& c2);

/// (-1)^n chi(c1) == (-1)^n chi(c2) >= 2 + (-1)^n chi(c0)
bool check_dyer_bound(const ChainComplexData& c1, const ChainComplexData& c2, const ChainComplexData& c0);

/// Fox-calculus complex C_2 -> C_1 -> C_0 of a presentation of `g`, where
/// generator i maps to images[i]. Uses right derivatives, so
/// d_1 d_2 = (R - 1) = 0.
ChainComplexData presentation_chain(const FiniteGroup& g, std::span<const std::size_t> images,
                                    std::span<const Word> relators, std::size_t generators);

/// Generators, as columns of a module_rank-row matrix, of the right Z[G]-module
/// spanned by the columns of `basis` (restricted coordinates). Columns are
/// taken greedily in order, skipping those already in the span.
GroupRingMatrix module_generators(const FiniteGroup& g, const IntMatrix& basis, std::size_t module_rank);

/// Complex with one more dimension whose top boundary is `top`
/// (rank_n rows). Validated.
ChainComplexData attach_cells(const ChainComplexData& c, const GroupRingMatrix& top);

}  // namespace twocx
