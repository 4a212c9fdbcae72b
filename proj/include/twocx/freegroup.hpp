#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace twocx {

using GeneratorIndex = std::uint32_t;

/// One generator raised to +1 or -1.
struct Letter {
  GeneratorIndex gen = 0;
  std::int8_t sign = 1;

  constexpr Letter inverse() const { return Letter{gen, static_cast<std::int8_t>(-sign)}; }

  friend constexpr bool operator==(Letter a, Letter b) = default;
  // Generator index ascending, positive before negative.
  friend constexpr std::strong_ordering operator<=>(Letter a, Letter b) {
    if (a.gen != b.gen) return a.gen <=> b.gen;
    return b.sign <=> a.sign;
  }
};

constexpr Letter pos(GeneratorIndex g) { return Letter{g, 1}; }
constexpr Letter neg(GeneratorIndex g) { return Letter{g, -1}; }

/// A freely reduced word in the free group on generators 0, 1, 2, ...
///
/// Words are immutable values; every constructor reduces its input, so the
/// invariant "no adjacent inverse pair" holds for every instance.
class Word {
 public:
  Word() = default;
  explicit Word(std::span<const Letter> raw);
  Word(std::initializer_list<Letter> raw);

  /// g^power for generator g.
  static Word generator(GeneratorIndex g, long long power = 1);

  std::span<const Letter> letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return letters_[i]; }

  /// Largest generator index used plus one (0 for the empty word).
  std::size_t span_rank() const;

  friend bool operator==(const Word&, const Word&) = default;
  // Lexicographic in the letter order; a proper prefix comes first.
  friend std::strong_ordering operator<=>(const Word& a, const Word& b);

 private:
  struct Trusted {};
  Word(Trusted, std::vector<Letter> reduced) : letters_(std::move(reduced)) {}
  friend Word reduce(std::span<const Letter>);

  std::vector<Letter> letters_;
};

/// Free reduction of an arbitrary letter sequence.
Word reduce(std::span<const Letter> raw);

Word multiply(const Word& u, const Word& v);
inline Word operator*(const Word& u, const Word& v) { return multiply(u, v); }

Word invert(const Word& u);

/// w u w^-1
Word conjugate(const Word& u, const Word& w);

/// u v u^-1 v^-1
Word commutator(const Word& u, const Word& v);

Word power(const Word& u, long long k);

/// Signed count of occurrences of generator g.
long long exponent_sum(const Word& u, GeneratorIndex g);

/// Homomorphic extension of gen i -> images[i]. Throws ContextError when a
/// generator of u has no image.
Word substitute(const Word& u, std::span<const Word> images);

/// Splits u = a c a^-1 with c cyclically reduced; returns c and stores a.
Word cyclic_reduction(const Word& u, Word* conjugator = nullptr);

/// Least rotation of the cyclic reduction of u or of its inverse. Two words
/// have equal output iff they are conjugate up to inversion.
Word cyclic_canonical(const Word& u);

/// Rotation of w by `offset` letters to the left: w[offset..] w[..offset].
Word rotate(const Word& w, std::size_t offset);

/// Text form `x y^-2 z`, `1` for the empty word.
std::string format_word(const Word& u, std::span<const std::string> names);

/// Parses the token grammar `name` / `name^k` separated by whitespace; `1`
/// denotes the identity. Reduces the result.
Word parse_word(std::string_view text, std::span<const std::string> names);

}  // namespace twocx
