#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "twocx/presentation.hpp"

namespace twocx {

enum class Side { Left, Right };

// Elementary moves. All indices are 0-based.

/// R_j -> w R_j w^-1
struct ConjRel {
  std::size_t j = 0;
  Word w;
};
/// R_j -> R_j^-1
struct InvRel {
  std::size_t j = 0;
};
/// R_j -> R_j R_k (right) or R_k R_j (left), k != j
struct SlideRel {
  std::size_t j = 0;
  std::size_t k = 0;
  Side side = Side::Right;
};
/// Nielsen g_i -> g_i^-1; relators receive the inverse substitution (the same map).
struct NielsenInv {
  GeneratorIndex i = 0;
};
/// Nielsen g_i -> g_i g_j (right) or g_j g_i (left); relators receive the
/// inverse substitution g_i -> g_i g_j^-1 (right) or g_j^-1 g_i (left).
struct NielsenMul {
  GeneratorIndex i = 0;
  GeneratorIndex j = 0;
  Side side = Side::Right;
};
/// Appends a generator and the relator equal to it.
struct AddGen {
  std::string name;
};
/// Inverse of AddGen: relator exactly g_i^{+-1}, g_i used nowhere else.
struct RemoveGen {
  GeneratorIndex i = 0;
};
struct AddTrivialRel {};
struct RemoveTrivialRel {
  std::size_t j = 0;
};
/// One factor w [R_k^sign, h] w^-1 of a restricted slide.
struct SlideFactor {
  Word w;
  std::size_t k = 0;
  int sign = 1;
  Word h;
};
/// R_j -> R_j * prod_i w_i [R_{k_i}^{sign_i}, h_i] w_i^-1, every k_i != j.
struct RestrictedSlide {
  std::size_t j = 0;
  std::vector<SlideFactor> factors;
};

using Move = std::variant<ConjRel, InvRel, SlideRel, NielsenInv, NielsenMul, AddGen, RemoveGen, AddTrivialRel,
                          RemoveTrivialRel, RestrictedSlide>;

std::string_view op_name(const Move& m);

enum class Regime { Full, KPrime };

std::string_view regime_name(Regime r);

/// A replayable certificate: moves plus the regime they claim to respect.
/// `stabilized` admits AddTrivialRel/RemoveTrivialRel under the restricted regime.
struct MoveScript {
  std::vector<Move> moves;
  Regime regime = Regime::Full;
  bool stabilized = false;
};

/// Throws MoveError with a reason when `m` is outside the regime.
void check_regime(const Move& m, Regime regime, bool stabilized);

/// Applies a single move; throws MoveError on bad indices or preconditions.
Presentation apply_move(const Presentation& p, const Move& m);

/// Left fold of apply_move with regime checks; throws ReplayError naming
/// the first bad move.
Presentation replay(const Presentation& p, const MoveScript& s);

/// Moves that undo `moves` when applied after them, starting from `start`.
/// Throws MoveError for moves whose inverse would reorder cells
/// (RemoveGen/RemoveTrivialRel of a non-final position).
std::vector<Move> inverse_moves(const Presentation& start, const std::vector<Move>& moves);

/// Signed count of slides of R_j over R_k, each weighted by the inversion
/// parity of R_k at the time of the slide. Keys are (j, k), 0-based.
std::map<std::pair<std::size_t, std::size_t>, long long> slide_exponent_ledger(const MoveScript& s);

/// Type-(i) composite R_j -> R_j * c R_k^sign c^-1 (right) or c R_k^sign c^-1 * R_j (left).
std::vector<Move> conjugate_slide(std::size_t j, std::size_t k, const Word& c, int sign, Side side);

/// Expansion of a restricted slide into ConjRel/InvRel/SlideRel moves.
std::vector<Move> expand_restricted_slide(const RestrictedSlide& m);

/// ConjRel/InvRel moves turning every relator into its cyclic_canonical form.
std::vector<Move> canonicalize_moves(const Presentation& p);

/// Nielsen moves realising the transposition of generators a and b on the relators.
std::vector<Move> swap_generators_moves(GeneratorIndex a, GeneratorIndex b);

struct SearchBudget {
  std::size_t max_depth = 3;
  std::size_t max_relator_length = 24;
  std::size_t max_states = 200000;
  std::size_t conjugator_length = 3;
  unsigned jobs = 1;
};

/// Breadth-first search over CanonicalKey-deduplicated states for a script
/// from `p` to a presentation with the key of `q`. Returns std::nullopt when
/// the budget is exhausted; never asserts inequivalence. Returned scripts
/// have been replayed and checked.
std::optional<MoveScript> bounded_equivalence_search(const Presentation& p, const Presentation& q,
                                                     const SearchBudget& budget, Regime regime);

}  // namespace twocx
