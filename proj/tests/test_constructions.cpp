#include "doctest.h"
#include "support.hpp"
#include "twocx/constructions.hpp"
#include "twocx/errors.hpp"

using namespace twocx;
using namespace twocx::testing;

namespace {
Presentation pres(std::string_view text) { return parse_presentation(text); }

bool only_relator_moves(const MoveScript& s) {
  return std::all_of(s.moves.begin(), s.moves.end(), [](const Move& m) {
    return std::holds_alternative<ConjRel>(m) || std::holds_alternative<InvRel>(m) || std::holds_alternative<SlideRel>(m);
  });
}
}  // namespace

TEST_CASE("normal closure witnesses") {
  const Word x = Word::generator(0);
  const std::vector<Word> rels{x};
  const NormalClosureWitness two{power(x, 2), {{Word(), 0, 1}, {Word(), 0, 1}}};
  CHECK_NOTHROW(verify_witness(two, rels));
  CHECK_THROWS_AS(verify_witness(NormalClosureWitness{power(x, 3), two.factors}, rels), VerificationError);

  Rng rng(61);
  for (int t = 0; t < 200; ++t) {
    std::vector<Word> rs{random_word(rng, 2, 4), random_word(rng, 2, 4)};
    NormalClosureWitness a{Word(), {}};
    for (std::size_t f = 0, n = pick(rng, 0, 3); f < n; ++f)
      a.factors.push_back({random_word(rng, 2, 3), pick(rng, 0, 1), coin(rng) ? 1 : -1});
    a.target = evaluate_witness(a, rs);
    NormalClosureWitness b{Word(), {{random_word(rng, 2, 3), pick(rng, 0, 1), 1}}};
    b.target = evaluate_witness(b, rs);
    const Word u = random_word(rng, 2, 3);
    CHECK_NOTHROW(verify_witness(witness_product(a, b), rs));
    CHECK(witness_product(a, b).target == a.target * b.target);
    CHECK_NOTHROW(verify_witness(witness_inverse(a), rs));
    CHECK(witness_inverse(a).target == invert(a.target));
    CHECK_NOTHROW(verify_witness(witness_conjugate(a, u), rs));
    CHECK(witness_conjugate(a, u).target == conjugate(a.target, u));
    CHECK(witness_simplify(witness_product(a, witness_inverse(a))).factors.empty());
  }
}

TEST_CASE("normal closure witness search") {
  const Word x = Word::generator(0);
  WitnessBudget budget;
  const std::vector<Word> rx{x};
  const auto two = search_normal_closure_witness(power(x, 2), rx, budget);
  REQUIRE(two.has_value());
  CHECK(two->factors.size() == 2);
  CHECK(two->factors[0] == WitnessFactor{Word(), 0, 1});
  CHECK(two->factors[1] == WitnessFactor{Word(), 0, 1});

  const auto self = search_normal_closure_witness(x, rx, budget);
  REQUIRE(self.has_value());
  CHECK(self->factors.size() == 1);

  WitnessBudget small{3, 2, 20000, 1};
  const std::vector<Word> rx2{power(x, 2)};
  CHECK_FALSE(search_normal_closure_witness(x, rx2, small).has_value());

  // Found witnesses always verify; search agrees across thread counts.
  Rng rng(62);
  for (int t = 0; t < 40; ++t) {
    const std::vector<Word> rs{random_reduced_word(rng, 2, 3), random_reduced_word(rng, 2, 2)};
    NormalClosureWitness w{Word(), {}};
    for (std::size_t f = 0, n = pick(rng, 1, 2); f < n; ++f)
      w.factors.push_back({random_word(rng, 2, 2), pick(rng, 0, 1), coin(rng) ? 1 : -1});
    const Word target = evaluate_witness(w, rs);
    WitnessBudget b{3, 2, 50000, 1};
    const auto found = search_normal_closure_witness(target, rs, b);
    b.jobs = 3;
    const auto found3 = search_normal_closure_witness(target, rs, b);
    REQUIRE(found.has_value());
    CHECK_NOTHROW(verify_witness(*found, rs));
    REQUIRE(found3.has_value());
    CHECK_NOTHROW(verify_witness(*found3, rs));
    CHECK(found3->factors.size() == found->factors.size());
  }
}

TEST_CASE("Lustig presentations") {
  CHECK(lustig(1) == pres("gens: r s t\nrel: s^2 t^-3\nrel: r^2 s^3 r^-2 s^-3\nrel: r^2 t^4 r^-2 t^-4\n"));
  for (long long i = 1; i <= 6; ++i) CHECK(euler_char(lustig(i)) == 1);
  CHECK(canonical_key(lustig(1)) != canonical_key(lustig(2)));
  CHECK_THROWS(lustig(0));
}

TEST_CASE("Lustig transfer witnesses verify") {
  for (long long i = 1; i <= 3; ++i) {
    for (long long j = 1; j <= 3; ++j) {
      const auto ws = lustig_transfer_witnesses(i, j);
      REQUIRE(ws.size() == 3);
      for (std::size_t k = 0; k < 3; ++k) {
        CHECK(ws[k].target == lustig(j).relators[k]);
        CHECK_NOTHROW(verify_witness(ws[k], lustig(i).relators));
      }
    }
  }
}

TEST_CASE("common generators") {
  const Presentation p = pres("gens: x\nrel: x^2\n"), q = pres("gens: y\nrel: y^2\n");
  const IsoWitness w{{Word::generator(0)}, {Word::generator(0)}};
  const CommonGenerators cg = common_generators(p, q, w);
  CHECK_FALSE(cg.skipped);
  CHECK(cg.p.generators == cg.q.generators);
  CHECK(cg.p.rank() == 2);
  const Word g1 = Word::generator(0), g2 = Word::generator(1);
  CHECK(canonical_key(cg.p) == canonical_key(Presentation{positional_names(2), {power(g1, 2), g2 * invert(g1)}}));
  CHECK(canonical_key(cg.q) == canonical_key(Presentation{positional_names(2), {power(g2, 2), g1 * invert(g2)}}));
  CHECK(replay(p, cg.script_p) == cg.p);
  CHECK(canonical_key(replay(q, cg.script_q)) == canonical_key(cg.q));
  CHECK(euler_char(cg.p) == euler_char(p));
  CHECK(euler_char(cg.q) == euler_char(q));

  const CommonGenerators same = common_generators(lustig(1), lustig(2), identity_witness(3));
  CHECK(same.skipped);
  CHECK(same.p == lustig(1));
  CHECK(same.q == lustig(2));
  CHECK(same.script_p.moves.empty());
  CHECK(same.script_q.moves.empty());

  // P = Q with a non-identity automorphism as witness: doubled tuple on both sides.
  const Presentation xy = pres("gens: x y\nrel: x y^2\n");
  const IsoWitness swap{{Word::generator(1), Word::generator(0)}, {Word::generator(1), Word::generator(0)}};
  const CommonGenerators d = common_generators(xy, xy, swap);
  CHECK(d.p.rank() == 4);
  CHECK(d.p.relators.size() == 3);
  CHECK(d.q.relators.size() == 3);
  CHECK(canonical_key(replay(xy, d.script_q)) == canonical_key(d.q));
}

TEST_CASE("product stabilization") {
  const Presentation l1 = pres("gens: x\nrel: x\n"), l2 = pres("gens: x\nrel: x^2\n");
  const Word x = Word::generator(0);
  const std::vector<NormalClosureWitness> ws{{power(x, 2), {{Word(), 0, 1}, {Word(), 0, 1}}}};
  const MoveScript s = product_stabilization(l1, l2, ws);
  CHECK(only_relator_moves(s));
  CHECK(canonical_key(replay(product(l1, l2), s)) == canonical_key(pres("gens: x\nrel: x\nrel: 1\n")));
  const auto slides = std::count_if(s.moves.begin(), s.moves.end(), [](const Move& m) { return std::holds_alternative<SlideRel>(m); });
  CHECK(slides == 2);

  CHECK(product_stabilization(l1, pres("gens: x\n"), {}).moves.empty());
  const std::vector<NormalClosureWitness> wrong{{power(x, 2), {{Word(), 0, 1}}}};
  CHECK_THROWS_AS(product_stabilization(l1, l2, wrong), VerificationError);

  // The symmetric call reaches wedge_s2(L2, l).
  Rng rng(63);
  for (int t = 0; t < 50; ++t) {
    Presentation a{positional_names(2), {random_word(rng, 2, 4), random_word(rng, 2, 4)}};
    Presentation b = a;
    for (auto& r : b.relators) r = conjugate(r, random_word(rng, 2, 2));
    std::vector<NormalClosureWitness> ab, ba;
    for (std::size_t k = 0; k < 2; ++k) {
      ab.push_back(search_normal_closure_witness(b.relators[k], a.relators, WitnessBudget{}).value());
      ba.push_back(search_normal_closure_witness(a.relators[k], b.relators, WitnessBudget{}).value());
    }
    const MoveScript s1 = product_stabilization(a, b, ab), s2 = product_stabilization(b, a, ba);
    CHECK(only_relator_moves(s1));
    CHECK(canonical_key(replay(product(a, b), s1)) == canonical_key(wedge_s2(a, 2)));
    CHECK(canonical_key(replay(product(b, a), s2)) == canonical_key(wedge_s2(b, 2)));
  }
}

TEST_CASE("null vector pipeline on small inputs") {
  const Presentation x1 = pres("gens: x\nrel: x\n");
  PipelineResult same = null_vector_pipeline(x1, x1, identity_witness(1), PipelineOptions{});
  CHECK(same.outcome == Outcome::Verified);
  CHECK(same.x.empty());
  CHECK(same.null_report.null);

  const Presentation x3 = pres("gens: x\nrel: x x x^-1\n");
  PipelineResult collide = null_vector_pipeline(x1, x3, identity_witness(1), PipelineOptions{});
  CHECK(collide.outcome == Outcome::Verified);
  CHECK(collide.x.empty());

  const Presentation e2 = pres("gens: x y\nrel: x y\nrel: y\n"), f2 = pres("gens: x y\nrel: x\nrel: y\n");
  PipelineResult r = null_vector_pipeline(e2, f2, identity_witness(2), PipelineOptions{});
  CHECK(r.outcome == Outcome::Verified);
  CHECK(r.m == 2);
  CHECK(r.certificates.size() == 4);
  for (const auto& c : r.certificates) CHECK(check_certificate(c).ok);
  CHECK(r.null_report.null);

  CHECK_THROWS_AS(null_vector_pipeline(x1, pres("gens: x\n"), identity_witness(1), PipelineOptions{}), ContextError);

  // x is not in the normal closure of x^2: the pipeline reports Unknown, not failure.
  PipelineOptions tiny;
  tiny.budget = WitnessBudget{2, 1, 2000, 1};
  const PipelineResult u = null_vector_pipeline(pres("gens: x\nrel: x^2\n"), pres("gens: x\nrel: x^2 x^-1\n"),
                                                identity_witness(1), tiny);
  CHECK(u.outcome == Outcome::Unknown);
  CHECK(u.certificates.empty());
}

TEST_CASE("null vector pipeline across different generator tuples") {
  const IsoWitness w{{Word::generator(0)}, {Word::generator(0)}};
  const PipelineResult r =
      null_vector_pipeline(pres("gens: x\nrel: x^2\n"), pres("gens: y\nrel: y^-2\n"), w, PipelineOptions{});
  CHECK(r.outcome == Outcome::Verified);
  CHECK_FALSE(r.common.skipped);
  CHECK(r.null_report.null);

  // Cubes need a four-factor witness, beyond the default node budget: Unknown.
  const Presentation p = pres("gens: x\nrel: x^3\n"), q = pres("gens: y\nrel: y^-3\n");
  const PipelineResult u = null_vector_pipeline(p, q, w, PipelineOptions{});
  CHECK(u.outcome == Outcome::Unknown);
  CHECK(u.certificates.empty());

  // Supplying the witnesses completes it.
  PipelineOptions opt;
  const CommonGenerators cg = common_generators(p, q, w);
  for (const Word& target : cg.q.relators)
    opt.forward.push_back(search_normal_closure_witness(target, cg.p.relators, WitnessBudget{8, 4, 20000000, 4}));
  for (const Word& target : cg.p.relators)
    opt.backward.push_back(search_normal_closure_witness(target, cg.q.relators, WitnessBudget{8, 4, 20000000, 4}));
  const PipelineResult v = null_vector_pipeline(p, q, w, opt);
  CHECK(v.outcome == Outcome::Verified);
  CHECK(v.null_report.null);
}

TEST_CASE("s-move certificates") {
  const Presentation l1 = pres("gens: x y\nrel: x^2\nrel: y^3\n");
  CHECK(verify_smove_certificate(l1, l1, {}, {}).size() == 2);

  const Word h = Word::generator(1);
  const MoveScript tau{{RestrictedSlide{1, {SlideFactor{Word::generator(1), 0, 1, h}}}}, Regime::KPrime, false};
  const Presentation l2 = replay(l1, tau);
  const std::vector<MoveScript> to11{MoveScript{shift_relators(inverse_moves(l1, tau.moves), 2), Regime::KPrime, false}};
  const std::vector<MoveScript> to22{tau};
  REQUIRE(canonical_key(l2) != canonical_key(l1));
  const auto certs = verify_smove_certificate(l1, l2, to11, to22);
  CHECK(certs.size() == 2);
  for (const auto& c : certs) CHECK(check_certificate(c).ok);

  std::vector<MoveScript> bad = to22;
  bad[0].moves.push_back(SlideRel{0, 1, Side::Right});
  CHECK_THROWS_AS(verify_smove_certificate(l1, l2, to11, bad), ReplayError);
  std::vector<MoveScript> full = to22;
  full[0].regime = Regime::Full;
  CHECK_THROWS_AS(verify_smove_certificate(l1, l2, to11, full), VerificationError);
  CHECK_THROWS_AS(verify_smove_certificate(l1, l2, {}, to22), VerificationError);
}
