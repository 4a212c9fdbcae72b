#pragma once

// Random generators and fixture builders shared by the unit and acceptance tests.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "twocx/constructions.hpp"
#include "twocx/highdim.hpp"
#include "twocx/moves.hpp"
#include "twocx/pairing.hpp"
#include "twocx/presentation.hpp"
#include "twocx/smith.hpp"

namespace twocx::testing {

using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline long long pick_int(Rng& rng, long long lo, long long hi) {
  return std::uniform_int_distribution<long long>(lo, hi)(rng);
}

inline bool coin(Rng& rng) { return pick(rng, 0, 1) == 1; }

/// Reduction of a uniformly random letter sequence of length <= max_len.
inline Word random_word(Rng& rng, std::size_t rank, std::size_t max_len) {
  if (rank == 0) return Word();
  std::vector<Letter> raw(pick(rng, 0, max_len));
  for (auto& l : raw) l = Letter{static_cast<GeneratorIndex>(pick(rng, 0, rank - 1)), coin(rng) ? std::int8_t(1) : std::int8_t(-1)};
  return reduce(raw);
}

/// Random freely reduced word of length exactly len.
inline Word random_reduced_word(Rng& rng, std::size_t rank, std::size_t len) {
  std::vector<Letter> out;
  while (out.size() < len && rank > 0) {
    const Letter l{static_cast<GeneratorIndex>(pick(rng, 0, rank - 1)), coin(rng) ? std::int8_t(1) : std::int8_t(-1)};
    if (!out.empty() && out.back() == l.inverse()) continue;
    out.push_back(l);
  }
  return Word(out);
}

inline Presentation random_presentation(Rng& rng, std::size_t max_rank, std::size_t max_rels, std::size_t max_len,
                                        std::size_t min_rank = 1) {
  Presentation p;
  p.generators = positional_names(pick(rng, min_rank, max_rank));
  const std::size_t r = pick(rng, 0, max_rels);
  for (std::size_t j = 0; j < r; ++j) p.relators.push_back(random_word(rng, p.rank(), max_len));
  return p;
}

inline std::string fresh_name(const Presentation& p) {
  for (std::size_t i = p.rank() + 1;; ++i) {
    std::string name = "h" + std::to_string(i);
    if (std::find(p.generators.begin(), p.generators.end(), name) == p.generators.end()) return name;
  }
}

inline RestrictedSlide random_restricted_slide(Rng& rng, std::size_t rank, std::size_t j, std::size_t first,
                                              std::size_t count, std::size_t factors, std::size_t word_len) {
  RestrictedSlide m{j, {}};
  for (std::size_t f = 0; f < factors; ++f) {
    std::size_t k = first + pick(rng, 0, count - 1);
    while (k == j) k = first + pick(rng, 0, count - 1);
    Word h = random_word(rng, rank, word_len);
    if (h.empty()) h = Word::generator(0);
    m.factors.push_back(SlideFactor{random_word(rng, rank, word_len), k, coin(rng) ? 1 : -1, h});
  }
  return m;
}

/// A candidate move with valid indices; preconditions of RemoveGen and
/// RemoveTrivialRel may still fail.
inline Move random_move(Rng& rng, const Presentation& p) {
  const std::size_t n = p.rank(), r = p.relators.size();
  for (;;) {
    switch (pick(rng, 0, 9)) {
      case 0:
        if (r > 0) return ConjRel{pick(rng, 0, r - 1), random_word(rng, n, 3)};
        break;
      case 1:
        if (r > 0) return InvRel{pick(rng, 0, r - 1)};
        break;
      case 2:
        if (r > 1) {
          const std::size_t j = pick(rng, 0, r - 1);
          std::size_t k = pick(rng, 0, r - 2);
          if (k >= j) ++k;
          return SlideRel{j, k, coin(rng) ? Side::Left : Side::Right};
        }
        break;
      case 3:
        if (n > 0) return NielsenInv{static_cast<GeneratorIndex>(pick(rng, 0, n - 1))};
        break;
      case 4:
        if (n > 1) {
          const auto i = static_cast<GeneratorIndex>(pick(rng, 0, n - 1));
          auto j = static_cast<GeneratorIndex>(pick(rng, 0, n - 2));
          if (j >= i) ++j;
          return NielsenMul{i, j, coin(rng) ? Side::Left : Side::Right};
        }
        break;
      case 5:
        if (n < 6) return AddGen{fresh_name(p)};
        break;
      case 6:
        if (n > 0) return RemoveGen{static_cast<GeneratorIndex>(pick(rng, 0, n - 1))};
        break;
      case 7:
        return AddTrivialRel{};
      case 8:
        if (r > 0) return RemoveTrivialRel{pick(rng, 0, r - 1)};
        break;
      case 9:
        if (r > 1 && n > 0) return random_restricted_slide(rng, n, pick(rng, 0, r - 1), 0, r, pick(rng, 1, 2), 2);
        break;
    }
  }
}

inline std::size_t max_relator_length(const Presentation& p) {
  std::size_t m = 0;
  for (const auto& w : p.relators) m = std::max(m, w.size());
  return m;
}

/// Script of up to `length` legal full-regime moves; states[i] is the
/// presentation before move i, states.back() the result.
struct LegalScript {
  MoveScript script;
  std::vector<Presentation> states;
};

inline LegalScript random_legal_script(Rng& rng, const Presentation& start, std::size_t length,
                                       std::size_t length_cap = 48) {
  LegalScript out;
  out.states.push_back(start);
  std::size_t attempts = 0;
  while (out.script.moves.size() < length && attempts++ < 50 * length) {
    const Presentation& cur = out.states.back();
    Move m = random_move(rng, cur);
    try {
      Presentation next = apply_move(cur, m);
      if (max_relator_length(next) > length_cap) continue;
      out.script.moves.push_back(std::move(m));
      out.states.push_back(std::move(next));
    } catch (const MoveError&) {
    }
  }
  return out;
}

/// k_prime script on a presentation: restricted slides within the relator
/// block plus conjugations and inversions.
inline MoveScript random_kprime_script(Rng& rng, const Presentation& p, std::size_t length) {
  MoveScript s;
  s.regime = Regime::KPrime;
  const std::size_t n = p.rank(), r = p.relators.size();
  for (std::size_t i = 0; i < length; ++i) {
    const std::size_t kind = r > 1 ? pick(rng, 0, 3) : pick(rng, 0, 1);
    const std::size_t j = pick(rng, 0, r - 1);
    if (kind == 0) {
      s.moves.push_back(ConjRel{j, random_word(rng, n, 2)});
    } else if (kind == 1) {
      s.moves.push_back(InvRel{j});
    } else {
      s.moves.push_back(random_restricted_slide(rng, n, j, 0, r, pick(rng, 1, 2), 2));
    }
  }
  return s;
}

inline IntMatrix random_int_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, long long lo, long long hi) {
  IntMatrix a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = Integer(pick_int(rng, lo, hi));
  return a;
}

/// Determinant by fraction-free (Bareiss) elimination.
inline Integer bareiss_determinant(IntMatrix a) {
  const Eigen::Index n = a.rows();
  if (n == 0) return Integer(1);
  Integer prev(1);
  int sign = 1;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (a(k, k).is_zero()) {
      Eigen::Index p = k + 1;
      while (p < n && a(p, k).is_zero()) ++p;
      if (p == n) return Integer(0);
      a.row(k).swap(a.row(p));
      sign = -sign;
    }
    for (Eigen::Index i = k + 1; i < n; ++i)
      for (Eigen::Index j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
    prev = a(k, k);
  }
  return sign > 0 ? a(n - 1, n - 1) : -a(n - 1, n - 1);
}

/// Rank by Gaussian elimination over the rationals; independent of the SNF.
inline Eigen::Index rational_rank(const IntMatrix& a) {
  std::vector<std::vector<Rational>> m(a.rows(), std::vector<Rational>(a.cols()));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) m[i][j] = Rational(a(i, j).rep());
  Eigen::Index rank = 0;
  for (Eigen::Index c = 0; c < a.cols() && rank < a.rows(); ++c) {
    Eigen::Index p = rank;
    while (p < a.rows() && m[p][c] == 0) ++p;
    if (p == a.rows()) continue;
    std::swap(m[p], m[rank]);
    for (Eigen::Index i = rank + 1; i < a.rows(); ++i) {
      if (m[i][c] == 0) continue;
      const Rational f = m[i][c] / m[rank][c];
      for (Eigen::Index j = c; j < a.cols(); ++j) m[i][j] -= f * m[rank][j];
    }
    ++rank;
  }
  return rank;
}

inline FormalSum<Integer> random_sum(Rng& rng, std::size_t rank, std::size_t max_terms) {
  FormalSum<Integer> x = FormalSum<Integer>::zero(rank);
  const std::size_t terms = pick(rng, 0, max_terms);
  for (std::size_t t = 0; t < terms; ++t) {
    Presentation p{positional_names(rank), {}};
    const std::size_t r = pick(rng, 0, 2);
    for (std::size_t j = 0; j < r; ++j) p.relators.push_back(random_word(rng, rank, 3));
    x.add_term(canonical_key(p), Integer(pick_int(rng, -3, 3)));
  }
  return x;
}

// ---------------------------------------------------------------------------
// (G, n) chain fixtures

/// A presentation of `group` with generator i mapped to images[i].
struct PresentedGroup {
  std::string name;
  FiniteGroup group;
  Presentation pres;
  std::vector<std::size_t> images;
};

inline std::size_t element_of_order(const FiniteGroup& g, std::size_t order, std::size_t skip = 0) {
  for (std::size_t x = 0; x < g.order(); ++x) {
    std::size_t y = x, k = 1;
    while (y != g.identity()) y = g.mul(y, x), ++k;
    if (k == order && skip-- == 0) return x;
  }
  return g.identity();
}

inline std::vector<PresentedGroup> small_groups() {
  std::vector<PresentedGroup> out;
  const std::vector<std::string> one{"a"}, two{"a", "b"};
  out.push_back({"trivial", FiniteGroup::trivial(), Presentation{one, {Word::generator(0)}}, {0}});
  for (std::size_t n = 2; n <= 6; ++n) {
    out.push_back({"C" + std::to_string(n), FiniteGroup::cyclic(n),
                   Presentation{one, {Word::generator(0, static_cast<long long>(n))}}, {1}});
  }
  {
    const FiniteGroup s3 = FiniteGroup::symmetric3();
    const Word a = Word::generator(0), b = Word::generator(1);
    out.push_back({"S3", s3, Presentation{two, {power(a, 2), power(b, 3), power(a * b, 2)}},
                   {element_of_order(s3, 2), element_of_order(s3, 3)}});
  }
  {
    const FiniteGroup v = FiniteGroup::direct_product(FiniteGroup::cyclic(2), FiniteGroup::cyclic(2));
    const Word a = Word::generator(0), b = Word::generator(1);
    out.push_back({"C2xC2", v, Presentation{two, {power(a, 2), power(b, 2), commutator(a, b)}},
                   {element_of_order(v, 2, 0), element_of_order(v, 2, 1)}});
  }
  return out;
}

/// Random Tietze moves that keep the presentation a presentation of the same
/// group, tracking the generator images.
inline PresentedGroup scramble(Rng& rng, PresentedGroup pg, std::size_t steps) {
  for (std::size_t s = 0; s < steps; ++s) {
    Presentation& p = pg.pres;
    const std::size_t n = p.rank(), r = p.relators.size();
    Move m;
    switch (pick(rng, 0, 5)) {
      case 0: m = ConjRel{pick(rng, 0, r - 1), random_word(rng, n, 2)}; break;
      case 1: m = InvRel{pick(rng, 0, r - 1)}; break;
      case 2:
        if (r < 2) continue;
        {
          const std::size_t j = pick(rng, 0, r - 1);
          std::size_t k = pick(rng, 0, r - 2);
          if (k >= j) ++k;
          m = SlideRel{j, k, coin(rng) ? Side::Left : Side::Right};
        }
        break;
      case 3: m = AddTrivialRel{}; break;
      case 4:
        if (n >= 3) continue;
        m = AddGen{fresh_name(p)};
        pg.images.push_back(pg.group.identity());
        break;
      case 5:
        if (n < 2) continue;
        {
          const auto i = static_cast<GeneratorIndex>(pick(rng, 0, n - 1));
          auto j = static_cast<GeneratorIndex>(pick(rng, 0, n - 2));
          if (j >= i) ++j;
          const Side side = coin(rng) ? Side::Left : Side::Right;
          m = NielsenMul{i, j, side};
          pg.images[i] = side == Side::Right ? pg.group.mul(pg.images[i], pg.images[j])
                                             : pg.group.mul(pg.images[j], pg.images[i]);
        }
        break;
    }
    Presentation next = apply_move(p, m);
    if (max_relator_length(next) > 14) {
      if (std::holds_alternative<AddGen>(m)) pg.images.pop_back();
      continue;
    }
    p = std::move(next);
  }
  return pg;
}

inline void shuffle_columns(Rng& rng, IntMatrix& k) {
  for (Eigen::Index c = k.cols() - 1; c > 0; --c) k.col(c).swap(k.col(static_cast<Eigen::Index>(pick(rng, 0, c))));
  // A few unimodular column operations.
  for (int t = 0; t < 4 && k.cols() > 1; ++t) {
    const auto a = static_cast<Eigen::Index>(pick(rng, 0, k.cols() - 1));
    auto b = static_cast<Eigen::Index>(pick(rng, 0, k.cols() - 2));
    if (b >= a) ++b;
    k.col(a) += Integer(pick_int(rng, -2, 2)) * k.col(b);
  }
}

/// Top boundary whose image is exactly ker d_n of `c` (restricted scalars).
inline GroupRingMatrix killing_top(Rng& rng, const ChainComplexData& c, bool vary) {
  IntMatrix k = integer_kernel(restrict_scalars(c.boundary(c.n), c.group));
  if (vary) shuffle_columns(rng, k);
  GroupRingMatrix top = module_generators(c.group, k, c.ranks[c.n]);
  if (vary && top.cols > 0) {
    // Extra cells on Z[G]-combinations of the existing ones.
    const std::size_t extra = pick(rng, 0, 2);
    GroupRingMatrix mix = GroupRingMatrix::zero(top.cols, extra);
    for (std::size_t e = 0; e < extra; ++e)
      for (std::size_t t = 0; t < 2; ++t)
        mix.add(pick(rng, 0, top.cols - 1), e, pick(rng, 0, c.group.order() - 1), Integer(pick_int(rng, -2, 2)));
    top = hconcat(top, multiply(c.group, top, mix));
  }
  return top;
}

struct FixturePair {
  std::string group;
  ChainComplexData a;
  ChainComplexData b;
};

/// Two (G, n)-chain fixtures sharing their (n-1)-skeleton.
inline FixturePair random_fixture_pair(Rng& rng, const PresentedGroup& base, std::size_t n) {
  const PresentedGroup pg = scramble(rng, base, pick(rng, 2, 8));
  ChainComplexData c = presentation_chain(pg.group, pg.images, pg.pres.relators, pg.pres.rank());
  while (c.n + 1 < n) c = attach_cells(c, killing_top(rng, c, false));
  return FixturePair{pg.name, attach_cells(c, killing_top(rng, c, coin(rng))), attach_cells(c, killing_top(rng, c, true))};
}

}  // namespace twocx::testing
