#include "twocx/constructions.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <thread>

#include "twocx/errors.hpp"

namespace twocx {

IsoWitness identity_witness(std::size_t rank) {
  IsoWitness w;
  for (std::size_t i = 0; i < rank; ++i) {
    w.y_in_x.push_back(Word::generator(static_cast<GeneratorIndex>(i)));
    w.x_in_y.push_back(Word::generator(static_cast<GeneratorIndex>(i)));
  }
  return w;
}

// ---------------------------------------------------------------------------
// Witness algebra

Word evaluate_witness(const NormalClosureWitness& w, std::span<const Word> relators) {
  Word total;
  for (std::size_t f = 0; f < w.factors.size(); ++f) {
    const WitnessFactor& fac = w.factors[f];
    if (fac.r >= relators.size()) {
      throw VerificationError("witness factor " + std::to_string(f + 1) + " names relator " +
                              std::to_string(fac.r + 1) + " of " + std::to_string(relators.size()));
    }
    if (fac.sign != 1 && fac.sign != -1) throw VerificationError("witness factor sign must be +1 or -1");
    const Word r = fac.sign > 0 ? relators[fac.r] : invert(relators[fac.r]);
    total = total * conjugate(r, invert(fac.g));
  }
  return total;
}

void verify_witness(const NormalClosureWitness& w, std::span<const Word> relators) {
  if (!(evaluate_witness(w, relators) == w.target)) {
    throw VerificationError("witness factors do not multiply to the target word");
  }
}

NormalClosureWitness witness_product(const NormalClosureWitness& a, const NormalClosureWitness& b) {
  NormalClosureWitness out{a.target * b.target, a.factors};
  out.factors.insert(out.factors.end(), b.factors.begin(), b.factors.end());
  return out;
}

NormalClosureWitness witness_inverse(const NormalClosureWitness& a) {
  NormalClosureWitness out{invert(a.target), {}};
  for (auto it = a.factors.rbegin(); it != a.factors.rend(); ++it) out.factors.push_back({it->g, it->r, -it->sign});
  return out;
}

NormalClosureWitness witness_conjugate(const NormalClosureWitness& a, const Word& u) {
  NormalClosureWitness out{conjugate(a.target, u), {}};
  const Word u_inv = invert(u);
  for (const WitnessFactor& f : a.factors) out.factors.push_back({f.g * u_inv, f.r, f.sign});
  return out;
}

NormalClosureWitness witness_simplify(const NormalClosureWitness& a) {
  NormalClosureWitness out{a.target, {}};
  for (const WitnessFactor& f : a.factors) {
    if (!out.factors.empty()) {
      const WitnessFactor& top = out.factors.back();
      if (top.r == f.r && top.sign == -f.sign && top.g == f.g) {
        out.factors.pop_back();
        continue;
      }
    }
    out.factors.push_back(f);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Common generators

namespace {

bool is_identity_images(std::span<const Word> images) {
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (!(images[i] == Word::generator(static_cast<GeneratorIndex>(i)))) return false;
  }
  return true;
}

std::string unused_name(const std::vector<std::string>& taken, const std::string& preferred) {
  auto used = [&](const std::string& s) { return std::find(taken.begin(), taken.end(), s) != taken.end(); };
  if (!preferred.empty() && !used(preferred)) return preferred;
  for (std::size_t k = taken.size() + 1;; ++k) {
    std::string cand = "g" + std::to_string(k);
    if (!used(cand)) return cand;
  }
}

// Appends one generator per image together with the relator
// new_gen * image^-1, built from AddGen followed by Nielsen moves on the new
// generator only.
std::vector<Move> linking_moves(const Presentation& start, std::span<const Word> images,
                                std::span<const std::string> names) {
  std::vector<Move> moves;
  std::vector<std::string> current = start.generators;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string name = unused_name(current, names[i]);
    current.push_back(name);
    moves.push_back(AddGen{name});
    const auto fresh = static_cast<GeneratorIndex>(current.size() - 1);
    const Word tail = invert(images[i]);
    // Each Nielsen step inserts one letter directly after the new generator.
    for (std::size_t idx = tail.size(); idx-- > 0;) {
      const Letter l = tail[idx];
      if (l.sign < 0) {
        moves.push_back(NielsenMul{fresh, l.gen, Side::Right});
      } else {
        moves.push_back(NielsenInv{l.gen});
        moves.push_back(NielsenMul{fresh, l.gen, Side::Right});
        moves.push_back(NielsenInv{l.gen});
      }
    }
  }
  return moves;
}

}  // namespace

CommonGenerators common_generators(const Presentation& p, const Presentation& q, const IsoWitness& w) {
  const std::size_t a = p.rank();
  const std::size_t c = q.rank();
  if (w.y_in_x.size() != c || w.x_in_y.size() != a) {
    throw ContextError("iso witness dimensions (" + std::to_string(w.y_in_x.size()) + ", " +
                       std::to_string(w.x_in_y.size()) + ") do not match generator counts (" + std::to_string(c) +
                       ", " + std::to_string(a) + ")");
  }
  for (const Word& y : w.y_in_x)
    if (y.span_rank() > a) throw ContextError("iso witness image uses a generator outside P");
  for (const Word& x : w.x_in_y)
    if (x.span_rank() > c) throw ContextError("iso witness image uses a generator outside Q");

  CommonGenerators out;
  if (p.generators == q.generators && is_identity_images(w.y_in_x) && is_identity_images(w.x_in_y)) {
    out.p = p;
    out.q = q;
    out.correspondence.resize(c);
    std::iota(out.correspondence.begin(), out.correspondence.end(), 0);
    out.skipped = true;
    return out;
  }

  std::vector<std::string> shared = p.generators;
  for (const auto& name : q.generators) shared.push_back(unused_name(shared, name));

  out.script_p.moves = linking_moves(p, w.y_in_x, std::span(shared).subspan(a));
  Presentation p_prime = replay(p, out.script_p);

  std::vector<Move> q_moves = linking_moves(q, w.x_in_y, std::span(shared).subspan(0, a));
  // Q' order is y_1..y_c, x_1..x_a; the shared order is x_1..x_a, y_1..y_c.
  std::vector<std::size_t> label(a + c);
  for (std::size_t i = 0; i < c; ++i) label[i] = a + i;
  for (std::size_t j = 0; j < a; ++j) label[c + j] = j;
  out.correspondence = label;
  for (std::size_t s = 0; s < label.size(); ++s) {
    const auto at = static_cast<std::size_t>(std::find(label.begin(), label.end(), s) - label.begin());
    if (at == s) continue;
    auto swap = swap_generators_moves(static_cast<GeneratorIndex>(s), static_cast<GeneratorIndex>(at));
    q_moves.insert(q_moves.end(), swap.begin(), swap.end());
    std::swap(label[s], label[at]);
  }
  out.script_q.moves = std::move(q_moves);
  Presentation q_prime = replay(q, out.script_q);

  p_prime.generators = shared;
  q_prime.generators = shared;
  out.p = std::move(p_prime);
  out.q = std::move(q_prime);
  return out;
}

// ---------------------------------------------------------------------------
// Stabilization

std::vector<Move> stabilization_moves(const Presentation& p, std::span<const std::size_t> targets,
                                      std::span<const std::size_t> sources,
                                      std::span<const NormalClosureWitness> witnesses) {
  if (targets.size() != witnesses.size()) {
    throw ContextError("need one witness per target relator (" + std::to_string(targets.size()) + "), got " +
                       std::to_string(witnesses.size()));
  }
  std::vector<Word> source_words;
  for (std::size_t k : sources) {
    if (k >= p.relators.size()) throw ContextError("source relator index out of range");
    if (std::find(targets.begin(), targets.end(), k) != targets.end()) {
      throw ContextError("relator " + std::to_string(k + 1) + " is both source and target");
    }
    source_words.push_back(p.relators[k]);
  }
  std::vector<Move> moves;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::size_t j = targets[i];
    if (j >= p.relators.size()) throw ContextError("target relator index out of range");
    const NormalClosureWitness& w = witnesses[i];
    if (!(w.target == p.relators[j])) {
      throw VerificationError("witness " + std::to_string(i + 1) + " targets a different word than relator " +
                              std::to_string(j + 1));
    }
    verify_witness(w, source_words);
    // Peel factors off the left: S = f_1 f_2 ... becomes f_2 ... after
    // sliding f_1^-1 = g^-1 R^-sign g onto it.
    for (const WitnessFactor& f : w.factors) {
      auto step = conjugate_slide(j, sources[f.r], invert(f.g), -f.sign, Side::Left);
      moves.insert(moves.end(), step.begin(), step.end());
    }
  }
  return moves;
}

MoveScript product_stabilization(const Presentation& l1, const Presentation& l2,
                                 std::span<const NormalClosureWitness> witnesses) {
  const Presentation prod = product(l1, l2);
  const std::size_t b = l1.relators.size();
  const std::size_t d = l2.relators.size();
  std::vector<std::size_t> sources(b), targets(d);
  std::iota(sources.begin(), sources.end(), 0);
  std::iota(targets.begin(), targets.end(), b);
  MoveScript script{stabilization_moves(prod, targets, sources, witnesses), Regime::Full, false};
  if (canonical_key(replay(prod, script)) != canonical_key(wedge_s2(l1, d))) {
    throw VerificationError("stabilization script does not reach the wedge with 2-spheres");
  }
  return script;
}

// ---------------------------------------------------------------------------
// Witness search

namespace {

std::vector<Word> conjugator_words(std::size_t rank, std::size_t max_len) {
  std::vector<Word> out{Word()};
  std::vector<Word> layer{Word()};
  for (std::size_t len = 1; len <= max_len && rank > 0; ++len) {
    std::vector<Word> next;
    for (const Word& w : layer) {
      for (GeneratorIndex g = 0; g < rank; ++g) {
        for (int s : {1, -1}) {
          const Letter l{g, static_cast<std::int8_t>(s)};
          if (!w.empty() && w[w.size() - 1] == l.inverse()) continue;
          next.push_back(w * Word{l});
        }
      }
    }
    std::sort(next.begin(), next.end());
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

// Shortest u with c = u^k, k maximal.
Word primitive_root(const Word& c) {
  const std::size_t n = c.size();
  for (std::size_t period = 1; period <= n; ++period) {
    if (n % period) continue;
    bool ok = true;
    for (std::size_t i = period; i < n && ok; ++i) ok = c[i] == c[i - period];
    if (ok) return Word(c.letters().subspan(0, period));
  }
  return c;
}

bool shorter(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

struct RelatorShape {
  std::size_t r;
  int sign;
  Word b, d;  // R^sign = b d b^-1, d cyclically reduced
};

class WitnessSearch {
 public:
  WitnessSearch(const Word& target, std::span<const Word> relators, const WitnessBudget& budget)
      : target_(target), relators_(relators.begin(), relators.end()), budget_(budget) {
    std::size_t rank = target.span_rank();
    for (const Word& r : relators_) rank = std::max(rank, r.span_rank());
    words_ = conjugator_words(rank, budget.max_conjugator_length);
    for (const Word& g : words_)
      for (std::size_t r = 0; r < relators_.size(); ++r) {
        if (relators_[r].empty()) continue;
        for (int s : {1, -1}) choices_.push_back({g, r, s});
      }
    for (std::size_t r = 0; r < relators_.size(); ++r) {
      if (relators_[r].empty()) continue;
      for (int s : {1, -1}) {
        RelatorShape shape{r, s, {}, {}};
        shape.d = cyclic_reduction(s > 0 ? relators_[r] : invert(relators_[r]), &shape.b);
        shapes_.push_back(std::move(shape));
      }
    }
  }

  std::optional<NormalClosureWitness> run() {
    if (target_.empty()) return NormalClosureWitness{target_, {}};
    for (std::size_t t = 1; t <= budget_.max_factors; ++t) {
      std::vector<WitnessFactor> prefix;
      if (auto found = descend(t - 1, 0, Word(), prefix)) return found;
      if (exhausted_) return std::nullopt;
    }
    return std::nullopt;
  }

  // Entry for a single first factor (parallel driver).
  std::optional<NormalClosureWitness> run_with_first(std::size_t t, std::size_t first) {
    std::vector<WitnessFactor> prefix{choices_[first]};
    return descend(t - 2, 0, factor_word(choices_[first]), prefix);
  }

  std::size_t choice_count() const { return choices_.size(); }
  bool exhausted() const { return exhausted_; }
  void share_counter(std::atomic<std::size_t>* c) { shared_nodes_ = c; }

  std::optional<NormalClosureWitness> last_only() {
    std::vector<WitnessFactor> prefix;
    return descend(0, 0, Word(), prefix);
  }

 private:
  Word factor_word(const WitnessFactor& f) const {
    const Word r = f.sign > 0 ? relators_[f.r] : invert(relators_[f.r]);
    return conjugate(r, invert(f.g));
  }

  bool tick() {
    const std::size_t n = shared_nodes_ ? ++*shared_nodes_ : ++nodes_;
    if (n > budget_.max_nodes) exhausted_ = true;
    return !exhausted_;
  }

  std::optional<NormalClosureWitness> descend(std::size_t remaining, std::size_t, const Word& product,
                                              std::vector<WitnessFactor>& prefix) {
    if (!tick()) return std::nullopt;
    if (remaining == 0) {
      const Word rest = invert(product) * target_;
      if (auto last = solve_last(rest)) {
        NormalClosureWitness w{target_, prefix};
        w.factors.push_back(*last);
        return w;
      }
      return std::nullopt;
    }
    for (const WitnessFactor& f : choices_) {
      prefix.push_back(f);
      auto found = descend(remaining - 1, 0, product * factor_word(f), prefix);
      prefix.pop_back();
      if (found || exhausted_) return found;
    }
    return std::nullopt;
  }

  // Least g (length, then word order) with g^-1 R^s g == rest, |g| bounded.
  std::optional<WitnessFactor> solve_last(const Word& rest) const {
    if (rest.empty()) return std::nullopt;
    Word a;
    const Word c = cyclic_reduction(rest, &a);
    const Word rho = primitive_root(c);
    std::optional<WitnessFactor> best;
    for (const RelatorShape& sh : shapes_) {
      if (sh.d.size() != c.size()) continue;
      for (std::size_t o = 0; o < sh.d.size(); ++o) {
        if (!(rotate(sh.d, o) == c)) continue;
        const Word be = sh.b * Word(sh.d.letters().subspan(0, o));
        const long long reach = static_cast<long long>(
            (budget_.max_conjugator_length + a.size() + be.size()) / rho.size() + 1);
        for (long long k = -reach; k <= reach; ++k) {
          const Word g = be * power(rho, -k) * invert(a);
          if (g.size() > budget_.max_conjugator_length) continue;
          if (!best || shorter(g, best->g) ||
              (g == best->g && std::pair(sh.r, -sh.sign) < std::pair(best->r, -best->sign))) {
            best = WitnessFactor{g, sh.r, sh.sign};
          }
        }
      }
    }
    return best;
  }

  Word target_;
  std::vector<Word> relators_;
  WitnessBudget budget_;
  std::vector<Word> words_;
  std::vector<WitnessFactor> choices_;
  std::vector<RelatorShape> shapes_;
  std::size_t nodes_ = 0;
  std::atomic<std::size_t>* shared_nodes_ = nullptr;
  bool exhausted_ = false;
};

}  // namespace

std::optional<NormalClosureWitness> search_normal_closure_witness(const Word& target, std::span<const Word> relators,
                                                                  const WitnessBudget& budget) {
  std::optional<NormalClosureWitness> found;
  if (budget.jobs <= 1) {
    WitnessSearch search(target, relators, budget);
    found = search.run();
  } else {
    // Depth one is cheap and done inline; deeper levels split on the first
    // factor and keep the lowest-index success.
    WitnessSearch probe(target, relators, budget);
    if (target.empty()) return NormalClosureWitness{target, {}};
    std::atomic<std::size_t> nodes{0};
    probe.share_counter(&nodes);
    found = probe.last_only();
    for (std::size_t t = 2; !found && t <= budget.max_factors && nodes < budget.max_nodes; ++t) {
      const std::size_t count = probe.choice_count();
      std::vector<std::optional<NormalClosureWitness>> results(count);
      std::atomic<std::size_t> next{0};
      std::atomic<std::size_t> best{count};
      auto worker = [&] {
        WitnessSearch local(target, relators, budget);
        local.share_counter(&nodes);
        for (std::size_t i = next++; i < count && i < best; i = next++) {
          results[i] = local.run_with_first(t, i);
          if (results[i]) {
            std::size_t cur = best.load();
            while (i < cur && !best.compare_exchange_weak(cur, i)) {
            }
          }
          if (local.exhausted()) break;
        }
      };
      std::vector<std::thread> threads;
      for (unsigned j = 0; j < budget.jobs; ++j) threads.emplace_back(worker);
      for (auto& th : threads) th.join();
      if (best < count) found = results[best];
    }
  }
  if (found) verify_witness(*found, relators);
  return found;
}

// ---------------------------------------------------------------------------
// Lustig family

Presentation lustig(long long i) {
  if (i < 1) throw ContextError("lustig index must be at least 1");
  const Word r = Word::generator(0), s = Word::generator(1), t = Word::generator(2);
  const Word z = power(r, 2);
  return Presentation{{"r", "s", "t"},
                      {power(s, 2) * power(t, -3), commutator(z, power(s, 2 * i + 1)),
                       commutator(z, power(t, 3 * i + 1))}};
}

namespace {

// Witnesses for [z, u] over the relators A = s^2 t^-3, B = [z, s^p],
// C = [z, t^q] with 3p - 2q = 1.
class LustigAlgebra {
 public:
  explicit LustigAlgebra(long long i)
      : p_(2 * i + 1), q_(3 * i + 1), z_(power(Word::generator(0), 2)), s_(Word::generator(1)),
        t_(Word::generator(2)) {
    relators_ = lustig(i).relators;
    a_ = NormalClosureWitness{relators_[0], {{Word(), 0, 1}}};
    const NormalClosureWitness b{relators_[1], {{Word(), 1, 1}}};
    const NormalClosureWitness c{relators_[2], {{Word(), 2, 1}}};

    // [z, t]: t = t^(3p) t^(-2q) and t^(3p) = n^-1 s^(2p), n = s^(2p) t^(-3p).
    const NormalClosureWitness s2p = power_comm(b, power(s_, p_), 2);
    NormalClosureWitness wn = a_;
    for (long long k = 2; k <= p_; ++k) wn = witness_product(witness_conjugate(a_, power(s_, 2 * (k - 1))), wn);
    const Word n = wn.target;
    const NormalClosureWitness t3p = witness_product(inverse_comm(member_comm(wn), n),
                                                     witness_conjugate(s2p, invert(n)));
    const NormalClosureWitness t_neg2q = power_comm(inverse_comm(c, power(t_, q_)), power(t_, -q_), 2);
    ct_ = witness_simplify(witness_product(t3p, witness_conjugate(t_neg2q, power(t_, 3 * p_))));

    // [z, s]: s^2 = A t^3 and s = s^p (s^2)^(-(p-1)/2).
    const NormalClosureWitness t3 = power_comm(ct_, t_, 3);
    const NormalClosureWitness s2 = witness_product(member_comm(a_), witness_conjugate(t3, a_.target));
    const NormalClosureWitness s_back = power_comm(inverse_comm(s2, power(s_, 2)), power(s_, -2), (p_ - 1) / 2);
    cs_ = witness_simplify(witness_product(b, witness_conjugate(s_back, power(s_, p_))));
  }

  const std::vector<Word>& relators() const { return relators_; }

  std::vector<NormalClosureWitness> targets_of(long long j) const {
    const long long p = 2 * j + 1, q = 3 * j + 1;
    return {a_, witness_simplify(power_comm(cs_, s_, p)), witness_simplify(power_comm(ct_, t_, q))};
  }

 private:
  // [z, v^k] from [z, v], k >= 0.
  static NormalClosureWitness power_comm(const NormalClosureWitness& cv, const Word& v, long long k) {
    NormalClosureWitness out{Word(), {}};
    for (long long e = 0; e < k; ++e) out = witness_product(out, witness_conjugate(cv, power(v, e)));
    return out;
  }

  // [z, v^-1] = v^-1 [z, v]^-1 v
  static NormalClosureWitness inverse_comm(const NormalClosureWitness& cv, const Word& v) {
    return witness_conjugate(witness_inverse(cv), invert(v));
  }

  // [z, n] = z n z^-1 n^-1 for n in the normal closure.
  NormalClosureWitness member_comm(const NormalClosureWitness& wn) const {
    return witness_product(witness_conjugate(wn, z_), witness_inverse(wn));
  }

  long long p_, q_;
  Word z_, s_, t_;
  std::vector<Word> relators_;
  NormalClosureWitness a_, cs_, ct_;
};

}  // namespace

std::vector<NormalClosureWitness> lustig_transfer_witnesses(long long from, long long to) {
  if (from < 1 || to < 1) throw ContextError("lustig index must be at least 1");
  const LustigAlgebra algebra(from);
  auto out = algebra.targets_of(to);
  const auto targets = lustig(to).relators;
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (!(out[k].target == targets[k])) throw VerificationError("transfer witness has the wrong target");
    verify_witness(out[k], algebra.relators());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Null-vector pipeline

std::string_view outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Verified: return "verified";
    case Outcome::Failed: return "failed";
    case Outcome::Unknown: return "unknown";
  }
  return "unknown";
}

namespace {

std::optional<long long> recognize_lustig(const Presentation& p) {
  if (p.rank() != 3 || p.relators.size() != 3) return std::nullopt;
  const CanonicalKey key = canonical_key(p);
  std::size_t longest = 0;
  for (const Word& w : p.relators) longest = std::max(longest, w.size());
  // [r^2, t^(3i+1)] has length 6i + 6.
  for (long long i = 1; 6 * i + 6 <= static_cast<long long>(longest); ++i) {
    if (canonical_key(lustig(i)) == key && lustig(i).relators == p.relators) return i;
  }
  return std::nullopt;
}

std::vector<NormalClosureWitness> self_witnesses(const Presentation& p) {
  std::vector<NormalClosureWitness> out;
  for (std::size_t k = 0; k < p.relators.size(); ++k) out.push_back({p.relators[k], {{Word(), k, 1}}});
  return out;
}

// Fills witnesses for each relator of `to` over `from`: supplied first, then
// bounded search, then the Lustig transfer identities.
std::optional<std::vector<NormalClosureWitness>> gather_witnesses(
    const Presentation& from, const Presentation& to, const std::vector<std::optional<NormalClosureWitness>>& given,
    const WitnessBudget& budget, const std::string& direction, std::vector<std::string>& log) {
  std::vector<NormalClosureWitness> out;
  std::optional<std::vector<NormalClosureWitness>> family;
  const auto li = recognize_lustig(from), lj = recognize_lustig(to);
  for (std::size_t k = 0; k < to.relators.size(); ++k) {
    const std::string label = direction + " relator " + std::to_string(k + 1);
    if (k < given.size() && given[k]) {
      if (!(given[k]->target == to.relators[k])) {
        throw VerificationError(label + ": supplied witness targets a different word");
      }
      verify_witness(*given[k], from.relators);
      log.push_back(label + ": supplied witness, " + std::to_string(given[k]->factors.size()) + " factors");
      out.push_back(*given[k]);
      continue;
    }
    if (auto found = search_normal_closure_witness(to.relators[k], from.relators, budget)) {
      log.push_back(label + ": search found " + std::to_string(found->factors.size()) + " factors");
      out.push_back(*found);
      continue;
    }
    log.push_back(label + ": search unknown (max factors " + std::to_string(budget.max_factors) +
                  ", max conjugator " + std::to_string(budget.max_conjugator_length) + ")");
    if (li && lj) {
      if (!family) family = lustig_transfer_witnesses(*li, *lj);
      log.push_back(label + ": commutator transfer identity, " + std::to_string((*family)[k].factors.size()) +
                    " factors");
      out.push_back((*family)[k]);
      continue;
    }
    return std::nullopt;
  }
  return out;
}

}  // namespace

PipelineResult null_vector_pipeline(const Presentation& l1, const Presentation& l2, const IsoWitness& w,
                                    const PipelineOptions& options) {
  if (euler_char(l1) != euler_char(l2)) {
    throw ContextError("Euler characteristics differ (" + std::to_string(euler_char(l1)) + " vs " +
                       std::to_string(euler_char(l2)) + ")");
  }
  PipelineResult res;
  res.common = common_generators(l1, l2, w);
  const Presentation& a = res.common.p;
  const Presentation& b = res.common.q;
  const std::size_t n = a.rank();
  res.m = euler_char(l1) - 1 + static_cast<long long>(n);
  res.log.push_back(res.common.skipped ? "common generators: tuples coincide, no doubling"
                                       : "common generators: n = " + std::to_string(n));
  res.log.push_back("m = chi - 1 + n = " + std::to_string(res.m));
  const auto m = static_cast<std::size_t>(res.m);
  if (a.relators.size() != m || b.relators.size() != m) {
    throw VerificationError("relator counts after normalization differ from m");
  }
  res.x = subtract(FormalSum<Integer>::basis(a), FormalSum<Integer>::basis(b));

  if (!res.x.empty()) {
    auto fwd = gather_witnesses(a, b, options.forward, options.budget, "forward", res.log);
    auto bwd = fwd ? gather_witnesses(b, a, options.backward, options.budget, "backward", res.log) : std::nullopt;
    if (!fwd || !bwd) {
      res.outcome = Outcome::Unknown;
      return res;
    }

    auto self_a = self_witnesses(a);
    auto self_b = self_witnesses(b);
    res.certificates.push_back({"L1'.L1' = L1' v m S2", product(a, a), wedge_s2(a, m),
                                product_stabilization(a, a, self_a)});
    res.certificates.push_back({"L1'.L2' = L1' v m S2", product(a, b), wedge_s2(a, m),
                                product_stabilization(a, b, *fwd)});
    res.certificates.push_back({"L2'.L2' = L2' v m S2", product(b, b), wedge_s2(b, m),
                                product_stabilization(b, b, self_b)});

    // Both stabilizations start from L1'.L2'; undoing the one that kills the
    // first block and applying the other links the two wedges.
    const Presentation prod = product(a, b);
    std::vector<std::size_t> first(m), second(m);
    std::iota(first.begin(), first.end(), 0);
    std::iota(second.begin(), second.end(), m);
    const auto kill_first = stabilization_moves(prod, first, second, *bwd);
    const auto kill_second = stabilization_moves(prod, second, first, *fwd);
    MoveScript link{inverse_moves(prod, kill_first), Regime::Full, false};
    link.moves.insert(link.moves.end(), kill_second.begin(), kill_second.end());
    const Presentation left = replay(prod, MoveScript{kill_first, Regime::Full, false});
    res.certificates.push_back({"L2' v m S2 = L1' v m S2", left, wedge_s2(a, m), std::move(link)});
  }

  res.null_report = verify_null(res.x, res.certificates);
  for (const auto& s : res.null_report.certificates) res.log.push_back(s.message);
  res.outcome = res.null_report.null ? Outcome::Verified : Outcome::Failed;
  return res;
}

// ---------------------------------------------------------------------------
// Restricted-regime certificates

std::vector<Move> shift_relators(std::span<const Move> moves, std::size_t offset) {
  std::vector<Move> out;
  out.reserve(moves.size());
  for (Move m : moves) {
    if (auto* x = std::get_if<ConjRel>(&m)) x->j += offset;
    if (auto* x = std::get_if<InvRel>(&m)) x->j += offset;
    if (auto* x = std::get_if<SlideRel>(&m)) {
      x->j += offset;
      x->k += offset;
    }
    if (auto* x = std::get_if<RemoveTrivialRel>(&m)) x->j += offset;
    if (auto* x = std::get_if<RestrictedSlide>(&m)) {
      x->j += offset;
      for (auto& f : x->factors) f.k += offset;
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<EquivalenceCertificate> verify_smove_certificate(const Presentation& l1, const Presentation& l2,
                                                             std::span<const MoveScript> to_l1l1,
                                                             std::span<const MoveScript> to_l2l2) {
  if (l1.generators != l2.generators) throw ContextError("s-move pair must share the generator tuple");
  if (l1.relators.size() != l2.relators.size()) throw ContextError("s-move pair must have equal relator counts");
  const Presentation start = product(l1, l2);

  auto run = [&](std::span<const MoveScript> scripts, const Presentation& goal, const std::string& label) {
    MoveScript combined{{}, Regime::KPrime, false};
    Presentation cur = start;
    for (std::size_t i = 0; i < scripts.size(); ++i) {
      const MoveScript& s = scripts[i];
      if (s.regime != Regime::KPrime) {
        throw VerificationError(label + " script " + std::to_string(i + 1) + ": regime must be k_prime");
      }
      try {
        cur = replay(cur, s);
      } catch (const ReplayError& e) {
        throw ReplayError(combined.moves.size() + e.position(), label + " script " + std::to_string(i + 1) + ", " +
                                                                    e.what());
      }
      combined.moves.insert(combined.moves.end(), s.moves.begin(), s.moves.end());
      combined.stabilized = combined.stabilized || s.stabilized;
    }
    if (canonical_key(cur) != canonical_key(goal)) {
      throw VerificationError(label + ": scripts do not reach the expected product");
    }
    return EquivalenceCertificate{"L1.L2 = " + label, start, goal, std::move(combined)};
  };
  return {run(to_l1l1, product(l1, l1), "L1.L1"), run(to_l2l2, product(l2, l2), "L2.L2")};
}

}  // namespace twocx
