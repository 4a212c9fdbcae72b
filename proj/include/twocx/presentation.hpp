#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "twocx/abelian.hpp"
#include "twocx/freegroup.hpp"

namespace twocx {

/// A group presentation, read as its standard 2-complex: one 0-cell, one
/// 1-cell per generator (the boundary wedge of circles) and one 2-cell per
/// relator.
struct Presentation {
  std::vector<std::string> generators;
  std::vector<Word> relators;

  std::size_t rank() const { return generators.size(); }

  /// Throws ContextError if a relator uses a generator outside the tuple or
  /// generator names repeat.
  void validate() const;

  friend bool operator==(const Presentation&, const Presentation&) = default;
};

/// `g1 ... gn`.
std::vector<std::string> positional_names(std::size_t n);

/// Normal form modulo relator conjugation, inversion and reordering.
struct CanonicalKey {
  std::size_t rank = 0;
  std::vector<Word> classes;  // sorted, each its own cyclic_canonical

  friend bool operator==(const CanonicalKey&, const CanonicalKey&) = default;
  friend std::strong_ordering operator<=>(const CanonicalKey& a, const CanonicalKey& b);
};

CanonicalKey canonical_key(const Presentation& p);

/// `rank` then one canonical word per line, words written over g1..gn.
std::string serialize(const CanonicalKey& key);
CanonicalKey deserialize_key(std::string_view text);

/// Representative presentation of a key, over positional names.
Presentation representative(const CanonicalKey& key);

/// 1 - #generators + #relators.
long long euler_char(const Presentation& p);

/// Union along the common boundary: P's generators, concatenated relators.
Presentation product(const Presentation& p, const Presentation& q);

/// Relator-free presentation on the same generators (the product unit).
Presentation unit_like(const Presentation& p);

/// Appends `count` trivial relators.
Presentation wedge_s2(const Presentation& p, std::size_t count);

/// Appends `count` fresh generators without relators.
Presentation wedge_s1(const Presentation& p, std::size_t count);

/// Elementary Nielsen automorphism, as a substitution on relators:
/// Invert g_i -> g_i^-1, MultiplyRight g_i -> g_i g_j, MultiplyLeft g_i -> g_j g_i.
struct NielsenStep {
  enum class Kind { Invert, MultiplyRight, MultiplyLeft };
  Kind kind = Kind::Invert;
  GeneratorIndex i = 0;
  GeneratorIndex j = 0;
};

/// Images of the generators under the substitutions applied in order.
std::vector<Word> nielsen_images(std::size_t rank, std::span<const NielsenStep> steps);

/// Substitutes `images` through every relator after checking that the
/// supplied Nielsen decomposition produces exactly those images.
Presentation apply_automorphism(const Presentation& p, std::span<const Word> images,
                                std::span<const NielsenStep> decomposition);

/// Element of the closed-complex monoid: a multiset of connected components.
struct ClosedComplex {
  std::vector<CanonicalKey> components;  // sorted; empty means the empty complex

  friend bool operator==(const ClosedComplex&, const ClosedComplex&) = default;
  friend std::strong_ordering operator<=>(const ClosedComplex& a, const ClosedComplex& b);
};

/// Forgets the boundary identification. Keys are compared up to relator
/// conjugation, inversion and permutation only, which under-approximates
/// equality of closed complexes.
ClosedComplex forget_boundary(const Presentation& p);

ClosedComplex disjoint_union(const ClosedComplex& c, const ClosedComplex& d);

std::string serialize(const ClosedComplex& c);

/// Abelianization via Smith normal form of the exponent-sum matrix.
AbelianGroup abelianization(const Presentation& p);

/// Presentation text: one `gens:` line, then `rel:` lines. A relation
/// `a = b` becomes the relator a b^-1. `#` starts a comment.
Presentation parse_presentation(std::string_view text);
std::string format_presentation(const Presentation& p);

Presentation load_presentation(const std::string& path);
void save_presentation(const Presentation& p, const std::string& path);

}  // namespace twocx
