#include "twocx/moves.hpp"

#include <algorithm>
#include <thread>
#include <unordered_set>

#include "twocx/errors.hpp"

namespace twocx {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void fail(const Move& m, const std::string& why) {
  throw MoveError(std::string(op_name(m)) + ": " + why);
}

void need_relator(const Move& m, const Presentation& p, std::size_t j, const char* role) {
  if (j >= p.relators.size()) {
    fail(m, std::string(role) + " relator index " + std::to_string(j + 1) + " out of range (" +
                std::to_string(p.relators.size()) + " relators)");
  }
}

void need_generator(const Move& m, const Presentation& p, std::size_t i, const char* role) {
  if (i >= p.rank()) {
    fail(m, std::string(role) + " generator index " + std::to_string(i + 1) + " out of range (" +
                std::to_string(p.rank()) + " generators)");
  }
}

void need_word(const Move& m, const Presentation& p, const Word& w, const char* role) {
  if (w.span_rank() > p.rank()) fail(m, std::string(role) + " word uses a generator outside the tuple");
}

std::vector<Word> identity_images(std::size_t rank) {
  std::vector<Word> out;
  out.reserve(rank);
  for (std::size_t i = 0; i < rank; ++i) out.push_back(Word::generator(static_cast<GeneratorIndex>(i)));
  return out;
}

Word restricted_product(const Presentation& p, const RestrictedSlide& m) {
  Word total;
  for (const SlideFactor& f : m.factors) {
    const Word rk = f.sign > 0 ? p.relators[f.k] : invert(p.relators[f.k]);
    total = total * conjugate(commutator(rk, f.h), f.w);
  }
  return total;
}

}  // namespace

std::string_view op_name(const Move& m) {
  return std::visit(overloaded{
                        [](const ConjRel&) { return std::string_view("ConjRel"); },
                        [](const InvRel&) { return std::string_view("InvRel"); },
                        [](const SlideRel&) { return std::string_view("SlideRel"); },
                        [](const NielsenInv&) { return std::string_view("NielsenInv"); },
                        [](const NielsenMul&) { return std::string_view("NielsenMul"); },
                        [](const AddGen&) { return std::string_view("AddGen"); },
                        [](const RemoveGen&) { return std::string_view("RemoveGen"); },
                        [](const AddTrivialRel&) { return std::string_view("AddTrivialRel"); },
                        [](const RemoveTrivialRel&) { return std::string_view("RemoveTrivialRel"); },
                        [](const RestrictedSlide&) { return std::string_view("RestrictedSlide"); },
                    },
                    m);
}

std::string_view regime_name(Regime r) { return r == Regime::Full ? "full" : "k_prime"; }

void check_regime(const Move& m, Regime regime, bool stabilized) {
  if (regime == Regime::Full) return;
  const bool allowed = std::visit(overloaded{
                                      [](const ConjRel&) { return true; },
                                      [](const InvRel&) { return true; },
                                      [](const RestrictedSlide&) { return true; },
                                      [&](const AddTrivialRel&) { return stabilized; },
                                      [&](const RemoveTrivialRel&) { return stabilized; },
                                      [](const auto&) { return false; },
                                  },
                                  m);
  if (!allowed) {
    fail(m, stabilized ? "regime violation: not permitted in k_prime"
                       : "regime violation: not permitted in k_prime (unstabilized)");
  }
}

Presentation apply_move(const Presentation& p, const Move& move) {
  Presentation out = p;
  std::visit(overloaded{
                 [&](const ConjRel& m) {
                   need_relator(move, p, m.j, "target");
                   need_word(move, p, m.w, "conjugator");
                   out.relators[m.j] = conjugate(p.relators[m.j], m.w);
                 },
                 [&](const InvRel& m) {
                   need_relator(move, p, m.j, "target");
                   out.relators[m.j] = invert(p.relators[m.j]);
                 },
                 [&](const SlideRel& m) {
                   need_relator(move, p, m.j, "target");
                   need_relator(move, p, m.k, "source");
                   if (m.j == m.k) fail(move, "source and target relator coincide (" + std::to_string(m.j + 1) + ")");
                   out.relators[m.j] = m.side == Side::Right ? p.relators[m.j] * p.relators[m.k]
                                                             : p.relators[m.k] * p.relators[m.j];
                 },
                 [&](const NielsenInv& m) {
                   need_generator(move, p, m.i, "target");
                   auto sigma = identity_images(p.rank());
                   sigma[m.i] = Word::generator(m.i, -1);
                   for (Word& r : out.relators) r = substitute(r, sigma);
                 },
                 [&](const NielsenMul& m) {
                   need_generator(move, p, m.i, "target");
                   need_generator(move, p, m.j, "source");
                   if (m.i == m.j) fail(move, "generator indices coincide");
                   auto sigma = identity_images(p.rank());
                   const Word gi = Word::generator(m.i);
                   const Word gj_inv = Word::generator(m.j, -1);
                   sigma[m.i] = m.side == Side::Right ? gi * gj_inv : gj_inv * gi;
                   for (Word& r : out.relators) r = substitute(r, sigma);
                 },
                 [&](const AddGen& m) {
                   if (m.name.empty()) fail(move, "empty generator name");
                   if (std::find(p.generators.begin(), p.generators.end(), m.name) != p.generators.end()) {
                     fail(move, "generator name '" + m.name + "' already in use");
                   }
                   out.generators.push_back(m.name);
                   out.relators.push_back(Word::generator(static_cast<GeneratorIndex>(p.rank())));
                 },
                 [&](const RemoveGen& m) {
                   need_generator(move, p, m.i, "target");
                   std::optional<std::size_t> host;
                   for (std::size_t j = 0; j < p.relators.size(); ++j) {
                     const Word& r = p.relators[j];
                     const bool single = r.size() == 1 && r[0].gen == m.i;
                     const bool uses = std::any_of(r.letters().begin(), r.letters().end(),
                                                   [&](Letter l) { return l.gen == m.i; });
                     if (single && !host) {
                       host = j;
                     } else if (uses) {
                       fail(move, "generator " + p.generators[m.i] + " also occurs in relator " + std::to_string(j + 1));
                     }
                   }
                   if (!host) fail(move, "no relator equal to the single letter " + p.generators[m.i]);
                   out.relators.erase(out.relators.begin() + static_cast<std::ptrdiff_t>(*host));
                   out.generators.erase(out.generators.begin() + m.i);
                   for (Word& r : out.relators) {
                     std::vector<Letter> letters(r.letters().begin(), r.letters().end());
                     for (Letter& l : letters) {
                       if (l.gen > m.i) --l.gen;
                     }
                     r = Word(letters);
                   }
                 },
                 [&](const AddTrivialRel&) { out.relators.emplace_back(); },
                 [&](const RemoveTrivialRel& m) {
                   need_relator(move, p, m.j, "target");
                   if (!p.relators[m.j].empty()) {
                     fail(move, "relator " + std::to_string(m.j + 1) + " is not the empty word");
                   }
                   out.relators.erase(out.relators.begin() + static_cast<std::ptrdiff_t>(m.j));
                 },
                 [&](const RestrictedSlide& m) {
                   need_relator(move, p, m.j, "target");
                   for (std::size_t f = 0; f < m.factors.size(); ++f) {
                     const SlideFactor& fac = m.factors[f];
                     need_relator(move, p, fac.k, "factor");
                     if (fac.k == m.j) {
                       fail(move, "factor " + std::to_string(f + 1) + " slides relator " + std::to_string(m.j + 1) +
                                      " over itself");
                     }
                     if (fac.sign != 1 && fac.sign != -1) fail(move, "factor sign must be +1 or -1");
                     need_word(move, p, fac.w, "factor conjugator");
                     need_word(move, p, fac.h, "factor commutator");
                   }
                   out.relators[m.j] = p.relators[m.j] * restricted_product(p, m);
                 },
             },
             move);
  return out;
}

Presentation replay(const Presentation& p, const MoveScript& s) {
  Presentation cur = p;
  for (std::size_t pos = 0; pos < s.moves.size(); ++pos) {
    try {
      check_regime(s.moves[pos], s.regime, s.stabilized);
      cur = apply_move(cur, s.moves[pos]);
    } catch (const MoveError& e) {
      throw ReplayError(pos, e.what());
    }
  }
  return cur;
}

std::vector<Move> inverse_moves(const Presentation& start, const std::vector<Move>& moves) {
  std::vector<Presentation> states{start};
  states.reserve(moves.size() + 1);
  for (const Move& m : moves) states.push_back(apply_move(states.back(), m));

  std::vector<Move> out;
  for (std::size_t idx = moves.size(); idx-- > 0;) {
    const Presentation& before = states[idx];
    const Move& move = moves[idx];
    std::visit(overloaded{
                   [&](const ConjRel& m) { out.push_back(ConjRel{m.j, invert(m.w)}); },
                   [&](const InvRel& m) { out.push_back(m); },
                   [&](const SlideRel& m) {
                     out.push_back(InvRel{m.k});
                     out.push_back(m);
                     out.push_back(InvRel{m.k});
                   },
                   [&](const NielsenInv& m) { out.push_back(m); },
                   [&](const NielsenMul& m) {
                     out.push_back(NielsenInv{m.j});
                     out.push_back(m);
                     out.push_back(NielsenInv{m.j});
                   },
                   [&](const AddGen&) { out.push_back(RemoveGen{static_cast<GeneratorIndex>(before.rank())}); },
                   [&](const RemoveGen& m) {
                     const std::size_t last_rel = before.relators.size() - 1;
                     const Word& host = before.relators[last_rel];
                     if (m.i + 1 != before.rank() || host.size() != 1 || host[0].gen != m.i) {
                       fail(move, "only removal of the last generator with the last relator can be inverted");
                     }
                     out.push_back(AddGen{before.generators[m.i]});
                     if (host[0].sign < 0) out.push_back(InvRel{last_rel});
                   },
                   [&](const AddTrivialRel&) { out.push_back(RemoveTrivialRel{before.relators.size()}); },
                   [&](const RemoveTrivialRel& m) {
                     if (m.j + 1 != before.relators.size()) {
                       fail(move, "only removal of the last relator can be inverted");
                     }
                     out.push_back(AddTrivialRel{});
                   },
                   [&](const RestrictedSlide& m) {
                     RestrictedSlide inv{m.j, {}};
                     for (auto it = m.factors.rbegin(); it != m.factors.rend(); ++it) {
                       inv.factors.push_back(SlideFactor{it->w * it->h, it->k, it->sign, invert(it->h)});
                     }
                     out.push_back(std::move(inv));
                   },
               },
               move);
  }
  return out;
}

std::map<std::pair<std::size_t, std::size_t>, long long> slide_exponent_ledger(const MoveScript& s) {
  std::map<std::pair<std::size_t, std::size_t>, long long> ledger;
  std::map<std::size_t, bool> inverted;
  for (std::size_t pos = 0; pos < s.moves.size(); ++pos) {
    const Move& move = s.moves[pos];
    if (const auto* m = std::get_if<SlideRel>(&move)) {
      ledger[{m->j, m->k}] += inverted[m->k] ? -1 : 1;
    } else if (const auto* m = std::get_if<InvRel>(&move)) {
      inverted[m->j] = !inverted[m->j];
    } else if (!std::holds_alternative<ConjRel>(move)) {
      throw ReplayError(pos, std::string(op_name(move)) + ": ledger accepts only ConjRel, InvRel and SlideRel");
    }
  }
  return ledger;
}

std::vector<Move> conjugate_slide(std::size_t j, std::size_t k, const Word& c, int sign, Side side) {
  std::vector<Move> out;
  if (!c.empty()) out.push_back(ConjRel{k, c});
  if (sign < 0) out.push_back(InvRel{k});
  out.push_back(SlideRel{j, k, side});
  if (sign < 0) out.push_back(InvRel{k});
  if (!c.empty()) out.push_back(ConjRel{k, invert(c)});
  return out;
}

std::vector<Move> expand_restricted_slide(const RestrictedSlide& m) {
  std::vector<Move> out;
  for (const SlideFactor& f : m.factors) {
    auto a = conjugate_slide(m.j, f.k, f.w, f.sign, Side::Right);
    auto b = conjugate_slide(m.j, f.k, f.w * f.h, -f.sign, Side::Right);
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

std::vector<Move> canonicalize_moves(const Presentation& p) {
  std::vector<Move> out;
  for (std::size_t j = 0; j < p.relators.size(); ++j) {
    const Word& r = p.relators[j];
    const Word canon = cyclic_canonical(r);
    if (r == canon) continue;
    Word a;
    const Word c = cyclic_reduction(r, &a);
    bool done = false;
    for (int inverted = 0; inverted < 2 && !done; ++inverted) {
      const Word base = inverted ? invert(c) : c;
      for (std::size_t o = 0; o < base.size(); ++o) {
        if (!(rotate(base, o) == canon)) continue;
        const Word head(base.letters().subspan(0, o));
        if (inverted) out.push_back(InvRel{j});
        // (head^-1 a^-1) R^{+-1} (a head) is the rotation starting after `head`.
        const Word w = invert(head) * invert(a);
        if (!w.empty()) out.push_back(ConjRel{j, w});
        done = true;
        break;
      }
    }
  }
  return out;
}

std::vector<Move> swap_generators_moves(GeneratorIndex a, GeneratorIndex b) {
  return {NielsenMul{a, b, Side::Right}, NielsenInv{b}, NielsenMul{b, a, Side::Left},
          NielsenInv{a},                 NielsenMul{a, b, Side::Right}, NielsenInv{a}};
}

// ---------------------------------------------------------------------------
// Bounded search

namespace {

std::vector<Word> words_up_to(std::size_t rank, std::size_t max_len) {
  std::vector<Word> out{Word()};
  std::vector<Word> layer{Word()};
  for (std::size_t len = 1; len <= max_len && rank > 0; ++len) {
    std::vector<Word> next;
    for (const Word& w : layer) {
      for (GeneratorIndex g = 0; g < rank; ++g) {
        for (int s : {1, -1}) {
          const Letter l{g, static_cast<std::int8_t>(s)};
          if (!w.empty() && w[w.size() - 1] == l.inverse()) continue;
          std::vector<Letter> letters(w.letters().begin(), w.letters().end());
          letters.push_back(l);
          next.emplace_back(letters);
        }
      }
    }
    std::sort(next.begin(), next.end());
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

struct Node {
  Presentation pres;
  std::size_t parent;
  std::vector<Move> moves;  // from parent
};

struct Candidate {
  Presentation pres;
  std::string key;
  std::vector<Move> moves;
};

std::vector<Candidate> expand(const Presentation& state, const std::vector<Word>& conjugators, Regime regime,
                              std::size_t max_len) {
  std::vector<Candidate> out;
  const auto canon = canonicalize_moves(state);
  Presentation base = state;
  for (const Move& m : canon) base = apply_move(base, m);
  const std::size_t nrel = base.relators.size();
  auto push = [&](std::size_t j, const Word& factor, std::vector<Move> tail) {
    // |r_j factor| >= |factor| - |r_j|, so skip the product when that already fails.
    if (factor.size() > max_len + base.relators[j].size()) return;
    Word rel = base.relators[j] * factor;
    if (rel.size() > max_len) return;
    Presentation next = base;
    next.relators[j] = std::move(rel);
    std::vector<Move> moves = canon;
    moves.insert(moves.end(), tail.begin(), tail.end());
    std::string key = serialize(canonical_key(next));
    out.push_back(Candidate{std::move(next), std::move(key), std::move(moves)});
  };
  for (std::size_t k = 0; k < nrel; ++k) {
    for (int sign : {1, -1}) {
      const Word rk = sign > 0 ? base.relators[k] : invert(base.relators[k]);
      if (regime == Regime::Full) {
        for (const Word& c : conjugators) {
          const Word factor = conjugate(rk, c);
          for (std::size_t j = 0; j < nrel; ++j) {
            if (j != k) push(j, factor, conjugate_slide(j, k, c, sign, Side::Right));
          }
        }
      } else {
        for (const Word& h : conjugators) {
          if (h.empty()) continue;
          const Word comm = commutator(rk, h);
          for (const Word& w : conjugators) {
            const Word factor = conjugate(comm, w);
            for (std::size_t j = 0; j < nrel; ++j) {
              if (j != k) push(j, factor, {RestrictedSlide{j, {SlideFactor{w, k, sign, h}}}});
            }
          }
        }
      }
    }
  }
  return out;
}

}  // namespace

std::optional<MoveScript> bounded_equivalence_search(const Presentation& p, const Presentation& q,
                                                     const SearchBudget& budget, Regime regime) {
  if (p.rank() != q.rank()) return std::nullopt;
  const std::string target = serialize(canonical_key(q));
  const auto conjugators = words_up_to(p.rank(), budget.conjugator_length);

  std::vector<Node> nodes{Node{p, 0, {}}};
  std::unordered_set<std::string> seen{serialize(canonical_key(p))};

  auto build_script = [&](std::size_t leaf) {
    std::vector<std::size_t> path;
    for (std::size_t n = leaf; n != 0; n = nodes[n].parent) path.push_back(n);
    MoveScript s;
    s.regime = regime;
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      s.moves.insert(s.moves.end(), nodes[*it].moves.begin(), nodes[*it].moves.end());
    }
    return s;
  };

  if (seen.count(target)) return MoveScript{{}, regime, false};

  std::vector<std::size_t> frontier{0};
  const unsigned jobs = std::max(1u, budget.jobs);
  // Frontier nodes are expanded in chunks so the state cap bounds memory.
  const std::size_t chunk = 8 * static_cast<std::size_t>(jobs);
  for (std::size_t depth = 0; depth < budget.max_depth && !frontier.empty(); ++depth) {
    std::vector<std::size_t> next;
    for (std::size_t lo = 0; lo < frontier.size(); lo += chunk) {
      const std::size_t hi = std::min(frontier.size(), lo + chunk);
      // Expansion is independent per node; merging happens in frontier order,
      // so results do not depend on the thread count.
      std::vector<std::vector<Candidate>> expanded(hi - lo);
      auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t f = lo + begin; f < hi; f += stride) {
          expanded[f - lo] = expand(nodes[frontier[f]].pres, conjugators, regime, budget.max_relator_length);
        }
      };
      if (jobs == 1 || hi - lo == 1) {
        work(0, 1);
      } else {
        std::vector<std::thread> threads;
        for (unsigned t = 0; t < jobs; ++t) threads.emplace_back(work, t, jobs);
        for (auto& th : threads) th.join();
      }
      for (std::size_t f = lo; f < hi; ++f) {
        for (Candidate& c : expanded[f - lo]) {
          if (!seen.insert(c.key).second) continue;
          nodes.push_back(Node{std::move(c.pres), frontier[f], std::move(c.moves)});
          const std::size_t id = nodes.size() - 1;
          if (c.key == target) {
            MoveScript s = build_script(id);
            // Certificates are only ever returned after an independent replay.
            if (serialize(canonical_key(replay(p, s))) != target) {
              throw VerificationError("search produced a script that does not replay to the target");
            }
            return s;
          }
          next.push_back(id);
          if (nodes.size() >= budget.max_states) return std::nullopt;
        }
      }
    }
    frontier = std::move(next);
  }
  return std::nullopt;
}

}  // namespace twocx
