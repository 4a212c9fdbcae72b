// Command-line front end: presentations, move scripts, pipelines, homology.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "twocx/constructions.hpp"
#include "twocx/errors.hpp"
#include "twocx/highdim.hpp"
#include "twocx/io.hpp"
#include "twocx/moves.hpp"
#include "twocx/pairing.hpp"
#include "twocx/presentation.hpp"

namespace fs = std::filesystem;
using namespace twocx;
using io::json;

namespace {

constexpr int kOk = 0;
constexpr int kVerificationFailed = 1;
constexpr int kInputError = 2;

struct Common {
  std::string format = "text";
  bool json() const { return format == "json"; }
};

void emit(const Common& c, const json& j, const std::string& text) {
  if (c.json()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
  }
}

std::string key_line(const CanonicalKey& k) {
  std::string s = serialize(k);
  return s;
}

json key_json(const Presentation& p) {
  return json{{"key", serialize(canonical_key(p))}, {"euler_char", euler_char(p)}};
}

// ----------------------------------------------------------------------------

int cmd_normalize(const Common& c, const std::string& path) {
  const Presentation p = load_presentation(path);
  emit(c, key_json(p), key_line(canonical_key(p)));
  return kOk;
}

int cmd_apply(const Common& c, const std::string& pres, const std::string& script, const std::string& out) {
  const Presentation p = load_presentation(pres);
  const MoveScript s = io::script_from_json(io::read_json(script), p);
  const Presentation q = replay(p, s);
  if (!out.empty()) save_presentation(q, out);
  emit(c, json{{"presentation", format_presentation(q)}, {"key", serialize(canonical_key(q))}, {"euler_char", euler_char(q)}},
       format_presentation(q));
  return kOk;
}

int cmd_product(const Common& c, const std::string& a, const std::string& b, const std::string& out) {
  const Presentation p = load_presentation(a);
  const Presentation q = load_presentation(b);
  if (p.generators != q.generators) {
    throw ContextError("product: generator tuples differ");
  }
  const Presentation r = product(p, q);
  if (!out.empty()) save_presentation(r, out);
  emit(c, json{{"presentation", format_presentation(r)}, {"key", serialize(canonical_key(r))}}, format_presentation(r));
  return kOk;
}

int cmd_lustig(const Common& c, long long i, const std::string& out, long long over, const std::string& witness_out) {
  const Presentation p = lustig(i);
  if (!out.empty()) save_presentation(p, out);
  json j{{"presentation", format_presentation(p)}, {"key", serialize(canonical_key(p))}};
  if (over > 0) {
    // Witnesses for the relators of lustig(i) over those of lustig(over).
    const auto ws = lustig_transfer_witnesses(over, i);
    json arr = json::array();
    for (const auto& w : ws) arr.push_back(io::witness_to_json(w, p.generators));
    if (!witness_out.empty()) io::write_file(witness_out, arr.dump(2) + "\n");
    j["witnesses"] = arr;
  }
  emit(c, j, format_presentation(p));
  return kOk;
}

int cmd_witness(const Common& c, const std::string& pres, const std::string& target, const WitnessBudget& budget,
                const std::string& out) {
  const Presentation p = load_presentation(pres);
  const Word s = parse_word(target, p.generators);
  const auto w = search_normal_closure_witness(s, p.relators, budget);
  if (!w) {
    emit(c, json{{"result", "unknown"}}, "unknown");
    return kOk;
  }
  const json wj = io::witness_to_json(*w, p.generators);
  if (!out.empty()) io::write_file(out, wj.dump(2) + "\n");
  std::ostringstream os;
  os << "witness: " << w->factors.size() << " factors\n";
  for (const auto& f : w->factors) {
    os << "  (" << format_word(invert(f.g), p.generators) << ") R" << f.r + 1 << "^" << f.sign << " ("
       << format_word(f.g, p.generators) << ")\n";
  }
  emit(c, json{{"result", "found"}, {"witness", wj}}, os.str());
  return kOk;
}

std::string pipeline_report(const PipelineResult& r) {
  std::ostringstream os;
  os << "outcome: " << outcome_name(r.outcome) << "\n";
  for (const auto& line : r.log) os << line << "\n";
  os << "x =\n" << format_sum(r.x);
  if (r.outcome != Outcome::Unknown) {
    os << "x.x =\n" << format_sum(r.null_report.square);
    os << "x.x reduced =\n" << format_sum(r.null_report.reduced);
    os << "null: " << (r.null_report.null ? "true" : "false") << "\n";
  }
  return os.str();
}

int cmd_pipeline(const Common& c, const std::string& a, const std::string& b, const std::string& iso,
                 const std::string& out, const std::string& fwd, const std::string& bwd, const WitnessBudget& budget) {
  const Presentation p = load_presentation(a);
  const Presentation q = load_presentation(b);
  IsoWitness w;
  if (!iso.empty()) {
    w = io::iso_from_json(io::read_json(iso), p, q);
  } else if (p.generators == q.generators) {
    w = identity_witness(p.rank());
  } else {
    throw ParseError("--iso is required when generator tuples differ");
  }
  PipelineOptions opt;
  opt.budget = budget;
  // Witness files are written over the shared tuple; it is the input tuple
  // whenever the common-generator step is skipped.
  const auto cg = common_generators(p, q, w);
  if (!fwd.empty()) opt.forward = io::witnesses_from_json(io::read_json(fwd), cg.p.generators);
  if (!bwd.empty()) opt.backward = io::witnesses_from_json(io::read_json(bwd), cg.q.generators);

  const auto t0 = std::chrono::steady_clock::now();
  const PipelineResult r = null_vector_pipeline(p, q, w, opt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string report = pipeline_report(r);
  {
    std::ostringstream os;
    os << "seconds: " << secs << "\n";
    report += os.str();
  }
  json j{{"outcome", std::string(outcome_name(r.outcome))},
         {"m", r.m},
         {"certificates", r.certificates.size()},
         {"log", r.log},
         {"seconds", secs}};
  if (r.outcome == Outcome::Verified && !out.empty()) {
    io::write_bundle(out, io::Bundle{r.x, r.certificates, report});
    j["bundle"] = out;
  }
  emit(c, j, report);
  return r.outcome == Outcome::Failed ? kVerificationFailed : kOk;
}

int cmd_verify_null(const Common& c, const std::string& dir) {
  const io::Bundle b = io::read_bundle(dir);
  const auto report = verify_null(b.x, b.certificates);
  std::ostringstream os;
  json certs = json::array();
  for (const auto& s : report.certificates) {
    os << (s.ok ? "[ok]   " : "[FAIL] ") << s.message << "\n";
    certs.push_back({{"ok", s.ok}, {"message", s.message}});
  }
  os << "x.x reduced =\n" << format_sum(report.reduced);
  os << "null: " << (report.null ? "true" : "false") << "\n";
  emit(c, json{{"null", report.null}, {"certificates", certs}, {"surviving_terms", report.reduced.terms.size()}},
       os.str());
  return report.null ? kOk : kVerificationFailed;
}

std::vector<MoveScript> load_scripts(const fs::path& dir, Presentation start) {
  std::vector<MoveScript> out;
  if (!fs::is_directory(dir)) return out;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    try {
      out.push_back(io::script_from_json(io::read_json(f), start));
    } catch (const ParseError& e) {
      throw ParseError(f.string() + ": " + e.what());
    }
  }
  return out;
}

int cmd_verify_smove(const Common& c, const std::string& a, const std::string& b, const std::string& dir,
                     const std::string& out) {
  const Presentation l1 = load_presentation(a);
  const Presentation l2 = load_presentation(b);
  if (l1.generators != l2.generators) throw ContextError("generator tuples differ");
  const Presentation start = product(l1, l2);
  if (!fs::is_directory(dir)) throw ParseError("scripts directory '" + dir + "' not found");
  const auto to11 = load_scripts(fs::path(dir) / "l1l1", start);
  const auto to22 = load_scripts(fs::path(dir) / "l2l2", start);
  std::vector<EquivalenceCertificate> certs;
  try {
    certs = verify_smove_certificate(l1, l2, to11, to22);
  } catch (const ReplayError& e) {
    emit(c, json{{"accepted", false}, {"reason", e.what()}}, std::string("rejected: ") + e.what());
    return kVerificationFailed;
  } catch (const VerificationError& e) {
    emit(c, json{{"accepted", false}, {"reason", e.what()}}, std::string("rejected: ") + e.what());
    return kVerificationFailed;
  }
  const auto x = subtract(FormalSum<Integer>::basis(l1), FormalSum<Integer>::basis(l2));
  const auto report = verify_null(x, certs);
  std::ostringstream os;
  os << "accepted: " << certs.size() << " certificates (k_prime)\n";
  for (const auto& s : report.certificates) os << "  " << s.message << "\n";
  os << "null: " << (report.null ? "true" : "false") << "\n";
  if (!out.empty()) io::write_bundle(out, io::Bundle{x, certs, os.str()});
  emit(c, json{{"accepted", true}, {"null", report.null}}, os.str());
  return report.null ? kOk : kVerificationFailed;
}

int cmd_search(const Common& c, const std::string& a, const std::string& b, const SearchBudget& budget,
               const std::string& regime, const std::string& out) {
  const Presentation p = load_presentation(a);
  const Presentation q = load_presentation(b);
  const Regime r = regime == "k_prime" ? Regime::KPrime : Regime::Full;
  const auto s = bounded_equivalence_search(p, q, budget, r);
  if (!s) {
    emit(c, json{{"result", "unknown"}}, "unknown (budget exhausted; no claim about equivalence)");
    return kOk;
  }
  const json sj = io::script_to_json(*s, p);
  if (!out.empty()) io::write_file(out, sj.dump(2) + "\n");
  emit(c, json{{"result", "found"}, {"script", sj}},
       "found: " + std::to_string(s->moves.size()) + " moves, verified by replay\n" + sj.dump(2));
  return kOk;
}

int cmd_homology(const Common& c, const std::string& chain, std::size_t k) {
  const ChainComplexData data = io::load_chain(chain);
  const AbelianGroup h = homology_at(data, k);
  json torsion = json::array();
  for (const auto& t : h.torsion) torsion.push_back(t.str());
  emit(c, json{{"k", k}, {"free_rank", h.free_rank}, {"torsion", torsion}},
       "H_" + std::to_string(k) + " = " + to_string(h));
  return kOk;
}

int cmd_glue(const Common& c, const std::string& a, const std::string& b, const std::string& out) {
  const ChainComplexData c1 = io::load_chain(a);
  const ChainComplexData c2 = io::load_chain(b);
  const ChainComplexData g = glue_product(c1, c2);
  if (!out.empty()) io::write_file(out, io::chain_to_json(g).dump(2) + "\n");
  const AbelianGroup h = homology_at(g, g.n - 1);
  const long long chi = euler_char_chain(g);
  const long long predicted = product_euler(c1, c2);
  std::ostringstream os;
  os << "ranks:";
  for (auto r : g.ranks) os << " " << r;
  os << "\nH_" << g.n - 1 << " = " << to_string(h) << "\n";
  os << "euler: " << chi << " (predicted " << predicted << ")\n";
  emit(c, json{{"ranks", g.ranks}, {"h_top_minus_one", to_string(h)}, {"euler_char", chi}, {"predicted", predicted}},
       os.str());
  return chi == predicted ? kOk : kVerificationFailed;
}

// ----------------------------------------------------------------------------
// REPL

const char* kReplHelp =
    "commands (indices 1-based):\n"
    "  conj j w | inv j | slide j k [left|right] | ninv i | nmul i j [left|right]\n"
    "  addgen name | remgen i | addtriv | remtriv j | rslide j w k sign h\n"
    "  undo | show | help | quit\n";

Move parse_repl_move(const std::string& line, const Presentation& p) {
  std::istringstream is(line);
  std::string op;
  is >> op;
  auto index = [&]() -> std::size_t {
    long long v = 0;
    if (!(is >> v) || v < 1) throw ParseError("expected a positive index");
    return static_cast<std::size_t>(v - 1);
  };
  auto side = [&]() {
    std::string s;
    if (!(is >> s) || s == "right") return Side::Right;
    if (s == "left") return Side::Left;
    throw ParseError("side must be left or right");
  };
  auto rest_word = [&]() {
    std::string w;
    std::getline(is, w);
    return parse_word(w.empty() ? "1" : w, p.generators);
  };
  auto token_word = [&]() {
    std::string w;
    if (!(is >> w)) throw ParseError("expected a word");
    return parse_word(w, p.generators);
  };
  if (op == "conj") {
    const std::size_t j = index();
    return ConjRel{j, rest_word()};
  }
  if (op == "inv") return InvRel{index()};
  if (op == "slide") {
    const std::size_t j = index(), k = index();
    return SlideRel{j, k, side()};
  }
  if (op == "ninv") return NielsenInv{static_cast<GeneratorIndex>(index())};
  if (op == "nmul") {
    const auto i = static_cast<GeneratorIndex>(index());
    const auto j = static_cast<GeneratorIndex>(index());
    return NielsenMul{i, j, side()};
  }
  if (op == "addgen") {
    std::string name;
    if (!(is >> name)) throw ParseError("expected a name");
    return AddGen{name};
  }
  if (op == "remgen") return RemoveGen{static_cast<GeneratorIndex>(index())};
  if (op == "addtriv") return AddTrivialRel{};
  if (op == "remtriv") return RemoveTrivialRel{index()};
  if (op == "rslide") {
    const std::size_t j = index();
    const Word w = token_word();
    const std::size_t k = index();
    int sign = 0;
    if (!(is >> sign) || (sign != 1 && sign != -1)) throw ParseError("sign must be 1 or -1");
    return RestrictedSlide{j, {SlideFactor{w, k, sign, token_word()}}};
  }
  throw ParseError("unknown command '" + op + "' (try help)");
}

int cmd_repl(const Common& c, const std::string& pres, const std::string& log_path) {
  const Presentation start = load_presentation(pres);
  std::vector<Presentation> states{start};
  MoveScript log;
  auto status = [&] {
    const Presentation& p = states.back();
    std::cout << format_presentation(p) << "key:\n" << serialize(canonical_key(p)) << "\nchi: " << euler_char(p)
              << "\n";
  };
  std::cout << kReplHelp;
  status();
  std::string line;
  while (std::cout << "> " << std::flush, std::getline(std::cin, line)) {
    if (line.empty()) continue;
    if (line == "quit" || line == "exit") break;
    if (line == "help") {
      std::cout << kReplHelp;
      continue;
    }
    if (line == "show") {
      status();
      continue;
    }
    if (line == "undo") {
      if (log.moves.empty()) {
        std::cout << "nothing to undo\n";
      } else {
        log.moves.pop_back();
        states.pop_back();
        status();
      }
      continue;
    }
    try {
      const Move m = parse_repl_move(line, states.back());
      states.push_back(apply_move(states.back(), m));
      log.moves.push_back(m);
      status();
    } catch (const Error& e) {
      std::cout << "error: " << e.what() << "\n";
    }
  }
  const std::string dump = io::script_to_json(log, start).dump(2) + "\n";
  if (!log_path.empty()) {
    io::write_file(log_path, dump);
  } else if (!c.json()) {
    std::cout << "\nscript:\n" << dump;
  } else {
    std::cout << dump;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"twocx: 2-complexes with fixed 1-skeleton, move certificates and chain homology"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--format", common.format, "Report format")->check(CLI::IsMember({"text", "json"}));

  std::string a, b, out, script, iso, fwd, bwd, target, dir, regime = "full", log_path;
  long long index = 0, over = 0;
  std::size_t at = 0;
  WitnessBudget wbudget;
  SearchBudget sbudget;

  auto* normalize = app.add_subcommand("normalize", "Print the canonical key of a presentation");
  normalize->add_option("pres", a)->required();

  auto* apply = app.add_subcommand("apply", "Replay a move script and print the result");
  apply->add_option("pres", a)->required();
  apply->add_option("script", script)->required();
  apply->add_option("-o,--out", out);

  auto* prod = app.add_subcommand("product", "Union of two presentations along their boundary");
  prod->add_option("presA", a)->required();
  prod->add_option("presB", b)->required();
  prod->add_option("-o,--out", out);

  auto* lus = app.add_subcommand("lustig", "Write the Lustig presentation K_i");
  lus->add_option("i", index)->required()->check(CLI::PositiveNumber);
  lus->add_option("-o,--out", out);
  lus->add_option("--witnesses-over", over, "Also derive witnesses for K_i over K_j")->check(CLI::PositiveNumber);
  lus->add_option("--witness-out", target, "File for the derived witnesses");

  auto add_witness_budget = [&](CLI::App* sub) {
    sub->add_option("--max-factors", wbudget.max_factors)->capture_default_str();
    sub->add_option("--max-conj", wbudget.max_conjugator_length)->capture_default_str();
    sub->add_option("--max-nodes", wbudget.max_nodes)->capture_default_str();
    sub->add_option("--jobs", wbudget.jobs)->capture_default_str();
  };

  auto* wit = app.add_subcommand("witness", "Search for a normal closure witness");
  wit->add_option("pres", a)->required();
  wit->add_option("--target", target)->required();
  wit->add_option("-o,--out", out);
  add_witness_budget(wit);

  auto* pipe = app.add_subcommand("pipeline", "Null-vector pipeline for two presentations");
  pipe->add_option("presA", a)->required();
  pipe->add_option("presB", b)->required();
  pipe->add_option("--iso", iso, "Iso witness JSON (identity if omitted and tuples coincide)");
  pipe->add_option("-o,--out", out, "Bundle directory");
  pipe->add_option("--witnesses-fwd", fwd, "Witnesses for B's relators over A's");
  pipe->add_option("--witnesses-bwd", bwd, "Witnesses for A's relators over B's");
  add_witness_budget(pipe);

  auto* vnull = app.add_subcommand("verify-null", "Check a pipeline bundle");
  vnull->add_option("bundle", dir)->required();

  auto* vsm = app.add_subcommand("verify-smove", "Check restricted-regime scripts for an s-move pair");
  vsm->add_option("presA", a)->required();
  vsm->add_option("presB", b)->required();
  vsm->add_option("--scripts", dir, "Directory with l1l1/ and l2l2/ script files")->required();
  vsm->add_option("-o,--out", out, "Bundle directory");

  auto* search = app.add_subcommand("search-equiv", "Bounded search for a move script");
  search->add_option("presA", a)->required();
  search->add_option("presB", b)->required();
  search->add_option("--depth", sbudget.max_depth)->capture_default_str();
  search->add_option("--regime", regime)->check(CLI::IsMember({"full", "k_prime"}))->capture_default_str();
  search->add_option("--max-states", sbudget.max_states)->capture_default_str();
  search->add_option("--max-length", sbudget.max_relator_length)->capture_default_str();
  search->add_option("--conj-length", sbudget.conjugator_length)->capture_default_str();
  search->add_option("--jobs", sbudget.jobs)->capture_default_str();
  search->add_option("-o,--out", out, "Script file for a found certificate");

  auto* hom = app.add_subcommand("homology", "Homology of a chain complex file");
  hom->add_option("chain", a)->required();
  hom->add_option("--at", at)->required();

  auto* glue = app.add_subcommand("glue", "Glue two chain complexes along their common skeleton");
  glue->add_option("c1", a)->required();
  glue->add_option("c2", b)->required();
  glue->add_option("-o,--out", out);

  auto* repl = app.add_subcommand("repl", "Interactive move application");
  repl->add_option("pres", a)->required();
  repl->add_option("--log", log_path, "Write the session script here on exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*normalize) return cmd_normalize(common, a);
    if (*apply) return cmd_apply(common, a, script, out);
    if (*prod) return cmd_product(common, a, b, out);
    if (*lus) return cmd_lustig(common, index, out, over, target);
    if (*wit) return cmd_witness(common, a, target, wbudget, out);
    if (*pipe) return cmd_pipeline(common, a, b, iso, out, fwd, bwd, wbudget);
    if (*vnull) return cmd_verify_null(common, dir);
    if (*vsm) return cmd_verify_smove(common, a, b, dir, out);
    if (*search) return cmd_search(common, a, b, sbudget, regime, out);
    if (*hom) return cmd_homology(common, a, at);
    if (*glue) return cmd_glue(common, a, b, out);
    if (*repl) return cmd_repl(common, a, log_path);
  } catch (const VerificationError& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return kVerificationFailed;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
