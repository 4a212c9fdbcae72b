#include "doctest.h"
#include "support.hpp"
#include "twocx/errors.hpp"
#include "twocx/highdim.hpp"

using namespace twocx;
using namespace twocx::testing;

namespace {

ChainComplexData chain(const FiniteGroup& g, std::vector<std::size_t> ranks,
                       std::vector<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t, long long>> entries) {
  ChainComplexData c;
  c.group = g;
  c.n = ranks.size() - 1;
  c.ranks = ranks;
  for (std::size_t k = 1; k <= c.n; ++k) c.boundaries.push_back(GroupRingMatrix::zero(ranks[k - 1], ranks[k]));
  for (auto [k, r, col, e, v] : entries) c.boundaries[k - 1].add(r, col, e, Integer(v));
  c.validate();
  return c;
}

GroupRingMatrix random_matrix(Rng& rng, const FiniteGroup& g, std::size_t rows, std::size_t cols) {
  GroupRingMatrix m = GroupRingMatrix::zero(rows, cols);
  for (std::size_t t = 0, n = pick(rng, 0, rows * cols * 2); t < n; ++t)
    m.add(pick(rng, 0, rows - 1), pick(rng, 0, cols - 1), pick(rng, 0, g.order() - 1), Integer(pick_int(rng, -3, 3)));
  return m;
}

}  // namespace

TEST_CASE("finite groups") {
  CHECK(FiniteGroup::cyclic(5).order() == 5);
  const FiniteGroup s3 = FiniteGroup::symmetric3();
  CHECK(s3.order() == 6);
  bool abelian = true;
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = 0; b < 6; ++b) abelian = abelian && s3.mul(a, b) == s3.mul(b, a);
  CHECK_FALSE(abelian);
  CHECK(FiniteGroup::direct_product(FiniteGroup::cyclic(2), FiniteGroup::cyclic(3)).order() == 6);
  CHECK_THROWS_AS(FiniteGroup({{0, 1}, {1, 1}}, 0), ParseError);
  CHECK_THROWS_AS(FiniteGroup({{0, 1}, {1, 0}}, 1), ParseError);
  for (const auto& pg : small_groups()) {
    for (const Word& r : pg.pres.relators) CHECK(pg.group.evaluate(r, pg.images) == pg.group.identity());
  }
}

TEST_CASE("restriction of scalars") {
  const FiniteGroup c2 = FiniteGroup::cyclic(2);
  GroupRingMatrix m = GroupRingMatrix::zero(1, 1);
  m.add(0, 0, 0, 1);
  m.add(0, 0, 1, 1);
  IntMatrix expected(2, 2);
  expected << Integer(1), Integer(1), Integer(1), Integer(1);
  CHECK(restrict_scalars(m, c2) == expected);
  CHECK(all_zero(restrict_scalars(GroupRingMatrix::zero(2, 3), c2)));
  CHECK(restrict_scalars(GroupRingMatrix::zero(2, 3), c2).rows() == 4);

  GroupRingMatrix id = GroupRingMatrix::zero(2, 2);
  id.add(0, 0, 0, 3);
  id.add(1, 0, 0, -2);
  IntMatrix e2(2, 2);
  e2 << Integer(3), Integer(0), Integer(-2), Integer(0);
  CHECK(restrict_scalars(id, FiniteGroup::trivial()) == e2);
}

TEST_CASE("restriction of scalars is functorial") {
  Rng rng(71);
  for (const auto& pg : small_groups()) {
    for (int t = 0; t < 10; ++t) {
      const std::size_t a = pick(rng, 1, 3), b = pick(rng, 1, 3), c = pick(rng, 1, 3);
      const GroupRingMatrix m = random_matrix(rng, pg.group, a, b), n = random_matrix(rng, pg.group, b, c);
      CHECK(restrict_scalars(multiply(pg.group, m, n), pg.group) ==
            restrict_scalars(m, pg.group) * restrict_scalars(n, pg.group));
    }
  }
}

TEST_CASE("homology examples") {
  const FiniteGroup c3 = FiniteGroup::cyclic(3);
  const ChainComplexData zero = chain(c3, {1, 1}, {});
  CHECK(homology_at(zero, 0).free_rank == 3);

  const ChainComplexData two = chain(FiniteGroup::trivial(), {1, 1}, {{1, 0, 0, 0, 2}});
  const AbelianGroup h0 = homology_at(two, 0);
  CHECK(h0.free_rank == 0);
  CHECK(h0.torsion == std::vector<Integer>{2});

  CHECK_THROWS_AS(chain(FiniteGroup::trivial(), {1, 1, 1}, {{1, 0, 0, 0, 1}, {2, 0, 0, 0, 1}}), VerificationError);
}

TEST_CASE("presentation chains of finite groups") {
  for (const auto& pg : small_groups()) {
    const ChainComplexData c = presentation_chain(pg.group, pg.images, pg.pres.relators, pg.pres.rank());
    CHECK_NOTHROW(c.validate());
    // The universal cover is connected and simply connected.
    CHECK(homology_at(c, 0) == AbelianGroup{1, {}});
    CHECK(homology_at(c, 1).trivial());
  }
}

TEST_CASE("gluing") {
  const FiniteGroup triv = FiniteGroup::trivial();
  const ChainComplexData c = chain(triv, {1, 0, 1, 1}, {{3, 0, 0, 0, 1}});
  const ChainComplexData g = glue_product(c, c);
  CHECK(g.ranks == std::vector<std::size_t>{1, 0, 1, 2});
  CHECK(g.boundary(3).cols == 2);
  CHECK(restrict_scalars(g.boundary(3), triv) == (IntMatrix(1, 2) << Integer(1), Integer(1)).finished());
  CHECK(homology_at(g, 2).trivial());
  CHECK(euler_char_chain(c) == 1);
  CHECK(euler_char_chain(g) == 0);
  CHECK(product_euler(c, c) == 0);

  const ChainComplexData empty_top = chain(triv, {1, 0, 1, 0}, {});
  CHECK(glue_product(c, empty_top).ranks == c.ranks);
  CHECK(glue_product(c, empty_top).boundary(3) == c.boundary(3));

  const ChainComplexData other = chain(triv, {1, 0, 2, 1}, {{3, 0, 0, 0, 1}});
  CHECK_FALSE(same_skeleton(c, other));
  CHECK_THROWS_AS(glue_product(c, other), ContextError);
}

TEST_CASE("Dyer bound") {
  const FiniteGroup triv = FiniteGroup::trivial();
  // n = 3, so the bound reads -chi(c1) = -chi(c2) >= 2 - chi(c0).
  const ChainComplexData c = chain(triv, {1, 0, 1, 2}, {});
  CHECK(check_dyer_bound(c, c, chain(triv, {1, 0, 1, 0}, {})));
  CHECK(check_dyer_bound(c, c, chain(triv, {1, 0, 2, 0}, {})));
  CHECK_FALSE(check_dyer_bound(c, c, chain(triv, {1, 0, 1, 1}, {})));
  CHECK_FALSE(check_dyer_bound(c, chain(triv, {1, 0, 1, 3}, {}), chain(triv, {1, 0, 9, 0}, {})));
}

TEST_CASE("synthetic (G, n) fixtures") {
  Rng rng(72);
  const auto groups = small_groups();
  for (int t = 0; t < 16; ++t) {
    const auto& pg = groups[t % groups.size()];
    const std::size_t n = 3 + t % 2;
    const FixturePair f = random_fixture_pair(rng, pg, n);
    CHECK(same_skeleton(f.a, f.b));
    for (const auto* c : {&f.a, &f.b}) {
      CHECK(homology_at(*c, 1).trivial());
      CHECK(homology_at(*c, n - 1).trivial());
    }
    const ChainComplexData g = glue_product(f.a, f.b);
    CHECK_NOTHROW(g.validate());
    for (std::size_t i = 2; i <= n - 1; ++i) CHECK(homology_at(g, i).trivial());
    CHECK(euler_char_chain(g) == product_euler(f.a, f.b));
  }
}
