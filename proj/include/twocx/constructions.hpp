#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "twocx/moves.hpp"
#include "twocx/pairing.hpp"
#include "twocx/presentation.hpp"

namespace twocx {

/// Mutually inverse maps between the generators of P (x) and Q (y):
/// y_in_x[i] is the i-th Q-generator written over P's generators.
struct IsoWitness {
  std::vector<Word> y_in_x;
  std::vector<Word> x_in_y;
};

/// The identity witness between two presentations on the same tuple.
IsoWitness identity_witness(std::size_t rank);

/// One factor g^-1 R_r^sign g of a normal closure witness (r 0-based).
struct WitnessFactor {
  Word g;
  std::size_t r = 0;
  int sign = 1;

  friend bool operator==(const WitnessFactor&, const WitnessFactor&) = default;
};

/// target = prod_i g_i^-1 R_{r_i}^{sign_i} g_i in the free group.
struct NormalClosureWitness {
  Word target;
  std::vector<WitnessFactor> factors;
};

/// Product of the factors in the free group.
Word evaluate_witness(const NormalClosureWitness& w, std::span<const Word> relators);

/// Throws VerificationError unless the factors multiply to the target.
void verify_witness(const NormalClosureWitness& w, std::span<const Word> relators);

/// Algebra on witnesses: every result keeps `target` equal to the product.
NormalClosureWitness witness_product(const NormalClosureWitness& a, const NormalClosureWitness& b);
NormalClosureWitness witness_inverse(const NormalClosureWitness& a);
/// Witness for u * target * u^-1.
NormalClosureWitness witness_conjugate(const NormalClosureWitness& a, const Word& u);
/// Cancels adjacent factor pairs that are mutually inverse.
NormalClosureWitness witness_simplify(const NormalClosureWitness& a);

struct CommonGenerators {
  Presentation p;  // P' over the shared tuple
  Presentation q;  // Q' over the shared tuple
  MoveScript script_p;
  MoveScript script_q;
  /// correspondence[i] = position in the shared tuple of Q' generator i
  /// before the final reordering.
  std::vector<std::size_t> correspondence;
  bool skipped = false;
};

/// Expresses P and Q over one tuple x_1..x_a, y_1..y_c by adding linking
/// relators x_{a+i} y_i(x)^-1 to P and y_{c+j} x_j(y)^-1 to Q. Skipped when
/// both tuples coincide and the witness is the identity.
CommonGenerators common_generators(const Presentation& p, const Presentation& q, const IsoWitness& w);

/// Script on product(l1, l2) replacing every relator of l2 by the empty word,
/// one witness per relator of l2 written over the relators of l1.
MoveScript product_stabilization(const Presentation& l1, const Presentation& l2,
                                 std::span<const NormalClosureWitness> witnesses);

/// Moves on `p` that turn each relator `targets[i]` into the empty word, using
/// witnesses over the relators `sources` of p (witness index r addresses
/// sources[r]).
std::vector<Move> stabilization_moves(const Presentation& p, std::span<const std::size_t> targets,
                                      std::span<const std::size_t> sources,
                                      std::span<const NormalClosureWitness> witnesses);

struct WitnessBudget {
  std::size_t max_factors = 8;
  std::size_t max_conjugator_length = 4;
  std::size_t max_nodes = 200000;
  unsigned jobs = 1;
};

/// Iterative deepening on the number of factors. The last factor is solved
/// exactly by a conjugacy test, the others enumerated by conjugator length,
/// then relator, sign and word order. std::nullopt means the budget ran out.
std::optional<NormalClosureWitness> search_normal_closure_witness(const Word& target, std::span<const Word> relators,
                                                                  const WitnessBudget& budget);

/// <r, s, t | s^2 t^-3, [r^2, s^(2i+1)], [r^2, t^(3i+1)]>
Presentation lustig(long long i);

/// Witnesses for every relator of lustig(to) over the relators of lustig(from),
/// built from commutator identities rather than search.
std::vector<NormalClosureWitness> lustig_transfer_witnesses(long long from, long long to);

enum class Outcome { Verified, Failed, Unknown };

std::string_view outcome_name(Outcome o);

struct PipelineOptions {
  WitnessBudget budget;
  /// Per-relator witnesses of L2' over L1' and of L1' over L2'; missing
  /// entries are searched for.
  std::vector<std::optional<NormalClosureWitness>> forward;
  std::vector<std::optional<NormalClosureWitness>> backward;
};

struct PipelineResult {
  Outcome outcome = Outcome::Unknown;
  CommonGenerators common;
  long long m = 0;
  FormalSum<Integer> x;
  std::vector<EquivalenceCertificate> certificates;
  NullReport<Integer> null_report;
  std::vector<std::string> log;
};

/// Common generators, both directional stabilizations and the chain of four
/// product identities, ending in a null-vector check of x = L1' - L2'.
PipelineResult null_vector_pipeline(const Presentation& l1, const Presentation& l2, const IsoWitness& w,
                                    const PipelineOptions& options);

/// Checks restricted-regime scripts on product(l1, l2): the `to_l1l1`
/// scripts, replayed in order, must reach the key of product(l1, l1), the
/// `to_l2l2` scripts that of product(l2, l2). Throws ContextError on shape
/// mismatch, ReplayError on illegal or out-of-regime moves and
/// VerificationError on a key mismatch.
std::vector<EquivalenceCertificate> verify_smove_certificate(const Presentation& l1, const Presentation& l2,
                                                             std::span<const MoveScript> to_l1l1,
                                                             std::span<const MoveScript> to_l2l2);

/// Shifts every relator index in `moves` by `offset`.
std::vector<Move> shift_relators(std::span<const Move> moves, std::size_t offset);

}  // namespace twocx
