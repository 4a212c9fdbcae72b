#include "twocx/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "twocx/errors.hpp"

namespace twocx::io {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string side_name(Side s) { return s == Side::Left ? "left" : "right"; }

namespace {

Side parse_side(const json& j) {
  const std::string s = j.get<std::string>();
  if (s == "left") return Side::Left;
  if (s == "right") return Side::Right;
  throw ParseError("side must be 'left' or 'right', got '" + s + "'");
}

std::size_t index_field(const json& obj, const char* key) {
  if (!obj.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw ParseError(std::string("field '") + key + "' must be a positive integer (indices are 1-based)");
  }
  return static_cast<std::size_t>(v.get<long long>() - 1);
}

int sign_field(const json& obj, const char* key) {
  const long long s = obj.at(key).get<long long>();
  if (s != 1 && s != -1) throw ParseError(std::string("field '") + key + "' must be 1 or -1");
  return static_cast<int>(s);
}

Word word_field(const json& obj, const char* key, const std::vector<std::string>& names) {
  if (!obj.contains(key)) return Word();
  return parse_word(obj.at(key).get<std::string>(), names);
}

template <typename F>
auto guarded(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ParseError(where + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(where + ": " + e.what());
  }
}

json move_to_json(const Move& move, const std::vector<std::string>& names) {
  json j;
  j["op"] = std::string(op_name(move));
  auto w = [&](const Word& x) { return format_word(x, names); };
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ConjRel>) {
          j["j"] = m.j + 1;
          j["w"] = w(m.w);
        } else if constexpr (std::is_same_v<T, InvRel>) {
          j["j"] = m.j + 1;
        } else if constexpr (std::is_same_v<T, SlideRel>) {
          j["j"] = m.j + 1;
          j["k"] = m.k + 1;
          j["side"] = side_name(m.side);
        } else if constexpr (std::is_same_v<T, NielsenInv>) {
          j["i"] = m.i + 1;
        } else if constexpr (std::is_same_v<T, NielsenMul>) {
          j["i"] = m.i + 1;
          j["j"] = m.j + 1;
          j["side"] = side_name(m.side);
        } else if constexpr (std::is_same_v<T, AddGen>) {
          j["name"] = m.name;
        } else if constexpr (std::is_same_v<T, RemoveGen>) {
          j["i"] = m.i + 1;
        } else if constexpr (std::is_same_v<T, RemoveTrivialRel>) {
          j["j"] = m.j + 1;
        } else if constexpr (std::is_same_v<T, RestrictedSlide>) {
          j["j"] = m.j + 1;
          json fs = json::array();
          for (const auto& f : m.factors) fs.push_back({{"w", w(f.w)}, {"k", f.k + 1}, {"sign", f.sign}, {"h", w(f.h)}});
          j["factors"] = fs;
        }
      },
      move);
  return j;
}

Move move_from_json(const json& j, const std::vector<std::string>& names) {
  if (!j.is_object()) throw ParseError("move must be a JSON object");
  const std::string op = j.at("op").get<std::string>();
  if (op == "ConjRel") return ConjRel{index_field(j, "j"), word_field(j, "w", names)};
  if (op == "InvRel") return InvRel{index_field(j, "j")};
  if (op == "SlideRel") {
    return SlideRel{index_field(j, "j"), index_field(j, "k"), j.contains("side") ? parse_side(j.at("side")) : Side::Right};
  }
  if (op == "NielsenInv") return NielsenInv{static_cast<GeneratorIndex>(index_field(j, "i"))};
  if (op == "NielsenMul") {
    return NielsenMul{static_cast<GeneratorIndex>(index_field(j, "i")), static_cast<GeneratorIndex>(index_field(j, "j")),
                      j.contains("side") ? parse_side(j.at("side")) : Side::Right};
  }
  if (op == "AddGen") return AddGen{j.at("name").get<std::string>()};
  if (op == "RemoveGen") return RemoveGen{static_cast<GeneratorIndex>(index_field(j, "i"))};
  if (op == "AddTrivialRel") return AddTrivialRel{};
  if (op == "RemoveTrivialRel") return RemoveTrivialRel{index_field(j, "j")};
  if (op == "RestrictedSlide") {
    RestrictedSlide m{index_field(j, "j"), {}};
    for (const json& f : j.at("factors")) {
      m.factors.push_back(
          SlideFactor{word_field(f, "w", names), index_field(f, "k"), sign_field(f, "sign"), word_field(f, "h", names)});
    }
    return m;
  }
  throw ParseError("unknown move op '" + op + "'");
}

void track_names(std::vector<std::string>& names, const Move& m) {
  if (const auto* a = std::get_if<AddGen>(&m)) names.push_back(a->name);
  if (const auto* r = std::get_if<RemoveGen>(&m)) {
    if (r->i < names.size()) names.erase(names.begin() + r->i);
  }
}

Regime parse_regime(const std::string& s) {
  if (s == "full") return Regime::Full;
  if (s == "k_prime") return Regime::KPrime;
  throw ParseError("regime must be 'full' or 'k_prime', got '" + s + "'");
}

}  // namespace

json script_to_json(const MoveScript& s, const Presentation& start) {
  std::vector<std::string> names = start.generators;
  json moves = json::array();
  for (const Move& m : s.moves) {
    moves.push_back(move_to_json(m, names));
    track_names(names, m);
  }
  json out{{"regime", std::string(regime_name(s.regime))}, {"moves", moves}};
  if (s.stabilized) out["stabilized"] = true;
  return out;
}

MoveScript script_from_json(const json& j, const Presentation& start) {
  MoveScript s;
  const json* moves = &j;
  if (j.is_object()) {
    if (j.contains("regime")) s.regime = parse_regime(j.at("regime").get<std::string>());
    if (j.contains("stabilized")) s.stabilized = j.at("stabilized").get<bool>();
    if (!j.contains("moves")) throw ParseError("script object needs a 'moves' array");
    moves = &j.at("moves");
  }
  if (!moves->is_array()) throw ParseError("script must be a JSON array of moves");
  std::vector<std::string> names = start.generators;
  for (std::size_t i = 0; i < moves->size(); ++i) {
    Move m = guarded("move " + std::to_string(i + 1), [&] { return move_from_json((*moves)[i], names); });
    track_names(names, m);
    s.moves.push_back(std::move(m));
  }
  return s;
}

json witness_to_json(const NormalClosureWitness& w, const std::vector<std::string>& names) {
  json fs = json::array();
  for (const auto& f : w.factors) fs.push_back({{"g", format_word(f.g, names)}, {"r", f.r + 1}, {"sign", f.sign}});
  return json{{"target", format_word(w.target, names)}, {"factors", fs}};
}

NormalClosureWitness witness_from_json(const json& j, const std::vector<std::string>& names) {
  return guarded("witness", [&] {
    NormalClosureWitness w{parse_word(j.at("target").get<std::string>(), names), {}};
    for (const json& f : j.at("factors")) {
      w.factors.push_back(WitnessFactor{word_field(f, "g", names), index_field(f, "r"), sign_field(f, "sign")});
    }
    return w;
  });
}

std::vector<std::optional<NormalClosureWitness>> witnesses_from_json(const json& j,
                                                                     const std::vector<std::string>& names) {
  std::vector<std::optional<NormalClosureWitness>> out;
  if (j.is_object()) {
    out.push_back(witness_from_json(j, names));
    return out;
  }
  if (!j.is_array()) throw ParseError("witness file must hold an object or an array");
  for (const json& w : j) {
    if (w.is_null()) {
      out.emplace_back();
    } else {
      out.push_back(witness_from_json(w, names));
    }
  }
  return out;
}

IsoWitness iso_from_json(const json& j, const Presentation& p, const Presentation& q) {
  return guarded("iso witness", [&] {
    IsoWitness w;
    for (const json& y : j.at("y_in_x")) w.y_in_x.push_back(parse_word(y.get<std::string>(), p.generators));
    for (const json& x : j.at("x_in_y")) w.x_in_y.push_back(parse_word(x.get<std::string>(), q.generators));
    return w;
  });
}

json iso_to_json(const IsoWitness& w, const Presentation& p, const Presentation& q) {
  json y = json::array(), x = json::array();
  for (const Word& v : w.y_in_x) y.push_back(format_word(v, p.generators));
  for (const Word& v : w.x_in_y) x.push_back(format_word(v, q.generators));
  return json{{"y_in_x", y}, {"x_in_y", x}};
}

json sum_to_json(const FormalSum<Integer>& x) {
  json out = json::array();
  for (const auto& [k, c] : x.terms) {
    json coeff;
    if (auto small = c.to_int64()) {
      coeff = *small;
    } else {
      coeff = c.str();
    }
    out.push_back({{"coeff", coeff}, {"presentation", format_presentation(representative(k))}});
  }
  return out;
}

FormalSum<Integer> sum_from_json(const json& j) {
  return guarded("formal sum", [&] {
    if (!j.is_array()) throw ParseError("formal sum must be a JSON array");
    std::optional<FormalSum<Integer>> out;
    for (const json& t : j) {
      const Presentation p = parse_presentation(t.at("presentation").get<std::string>());
      const json& c = t.at("coeff");
      const Integer coeff = c.is_string() ? Integer::parse(c.get<std::string>()) : Integer(c.get<long long>());
      if (!out) out = FormalSum<Integer>::zero(p.rank());
      out->add_term(canonical_key(p), coeff);
    }
    return out ? *out : FormalSum<Integer>::zero(0);
  });
}

json certificate_to_json(const EquivalenceCertificate& c) {
  return json{{"label", c.label},
              {"lhs", format_presentation(c.lhs)},
              {"rhs", format_presentation(c.rhs)},
              {"script", script_to_json(c.script, c.lhs)}};
}

EquivalenceCertificate certificate_from_json(const json& j) {
  return guarded("certificate", [&] {
    EquivalenceCertificate c;
    if (j.contains("label")) c.label = j.at("label").get<std::string>();
    c.lhs = parse_presentation(j.at("lhs").get<std::string>());
    c.rhs = parse_presentation(j.at("rhs").get<std::string>());
    c.script = script_from_json(j.at("script"), c.lhs);
    return c;
  });
}

namespace {

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(b, e - b + 1));
  }
  return out;
}

std::size_t parse_count(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    throw ParseError("bad " + what + " '" + s + "'");
  }
  if (used != s.size() || s[0] == '-') throw ParseError("bad " + what + " '" + s + "'");
  return static_cast<std::size_t>(v);
}

FiniteGroup group_from_json(const json& g) {
  std::vector<std::vector<std::size_t>> table = g.at("table").get<std::vector<std::vector<std::size_t>>>();
  if (g.contains("order") && g.at("order").get<std::size_t>() != table.size()) {
    throw ParseError("group order does not match the table");
  }
  return FiniteGroup(std::move(table), g.value("identity", std::size_t{0}));
}

}  // namespace

FiniteGroup parse_group(const std::string& text) {
  const auto lines = data_lines(text);
  if (lines.size() < 2) throw ParseError("group file needs order and identity lines");
  const std::size_t order = parse_count(lines[0], "group order");
  const std::size_t identity = parse_count(lines[1], "identity index");
  if (lines.size() != order + 2) {
    throw ParseError("group file has " + std::to_string(lines.size() - 2) + " table rows, expected " +
                     std::to_string(order));
  }
  std::vector<std::vector<std::size_t>> table;
  for (std::size_t r = 0; r < order; ++r) {
    std::vector<std::size_t> row;
    std::string cell;
    std::istringstream is(lines[r + 2]);
    while (std::getline(is, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t");
      const auto e = cell.find_last_not_of(" \t");
      if (b == std::string::npos) throw ParseError("empty cell in table row " + std::to_string(r + 1));
      row.push_back(parse_count(cell.substr(b, e - b + 1), "table entry"));
    }
    table.push_back(std::move(row));
  }
  return FiniteGroup(std::move(table), identity);
}

std::string format_group(const FiniteGroup& g) {
  std::ostringstream os;
  os << g.order() << "\n" << g.identity() << "\n";
  for (const auto& row : g.table()) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
  return os.str();
}

ChainComplexData chain_from_json(const json& j, const fs::path& base) {
  ChainComplexData c = guarded("chain", [&] {
    ChainComplexData c;
    const json& g = j.at("group");
    if (g.is_string()) {
      fs::path p = g.get<std::string>();
      if (p.is_relative()) p = base / p;
      c.group = parse_group(read_file(p));
    } else {
      c.group = group_from_json(g);
    }
    c.n = j.at("n").get<std::size_t>();
    c.ranks = j.at("ranks").get<std::vector<std::size_t>>();
    if (c.ranks.size() != c.n + 1) throw ParseError("ranks must list rank_0..rank_n");
    for (std::size_t k = 1; k <= c.n; ++k) c.boundaries.push_back(GroupRingMatrix::zero(c.ranks[k - 1], c.ranks[k]));
    for (const json& e : j.value("entries", json::array())) {
      if (!e.is_array() || e.size() != 5) throw ParseError("entry must be [k, row, col, elem, coeff]");
      const auto k = e[0].get<std::size_t>();
      if (k < 1 || k > c.n) throw ParseError("entry boundary index out of range");
      const Integer coeff = e[4].is_string() ? Integer::parse(e[4].get<std::string>()) : Integer(e[4].get<long long>());
      const auto elem = e[3].get<std::size_t>();
      if (elem >= c.group.order()) throw ParseError("entry group element out of range");
      try {
        c.boundaries[k - 1].add(e[1].get<std::size_t>(), e[2].get<std::size_t>(), elem, coeff);
      } catch (const ContextError& err) {
        throw ParseError(err.what());
      }
    }
    return c;
  });
  c.validate();
  return c;
}

json chain_to_json(const ChainComplexData& c) {
  json entries = json::array();
  for (std::size_t k = 1; k <= c.n; ++k) {
    for (const auto& [ij, e] : c.boundary(k).entries) {
      for (const auto& [x, coeff] : e) {
        json cj;
        if (auto small = coeff.to_int64()) {
          cj = *small;
        } else {
          cj = coeff.str();
        }
        entries.push_back(json::array({k, ij.first, ij.second, x, cj}));
      }
    }
  }
  return json{{"group", {{"order", c.group.order()}, {"identity", c.group.identity()}, {"table", c.group.table()}}},
              {"n", c.n},
              {"ranks", c.ranks},
              {"entries", entries}};
}

ChainComplexData load_chain(const fs::path& path) {
  try {
    return chain_from_json(read_json(path), path.parent_path());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_bundle(const fs::path& dir, const Bundle& b) {
  const fs::path target = fs::absolute(dir);
  const fs::path parent = target.parent_path();
  fs::create_directories(parent);
  std::random_device rd;
  const fs::path tmp = parent / (target.filename().string() + ".tmp-" + std::to_string(rd()));
  fs::create_directories(tmp / "certs");
  try {
    write_file(tmp / "x.sum", sum_to_json(b.x).dump(2) + "\n");
    for (std::size_t i = 0; i < b.certificates.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "%02zu.json", i + 1);
      write_file(tmp / "certs" / name, certificate_to_json(b.certificates[i]).dump(2) + "\n");
    }
    write_file(tmp / "report.txt", b.report);
    if (fs::exists(target)) fs::remove_all(target);
    fs::rename(tmp, target);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(tmp, ec);
    throw;
  }
}

Bundle read_bundle(const fs::path& dir) {
  Bundle b;
  if (!fs::is_directory(dir)) throw ParseError("bundle directory '" + dir.string() + "' not found");
  b.x = sum_from_json(read_json(dir / "x.sum"));
  std::vector<fs::path> certs;
  if (fs::is_directory(dir / "certs")) {
    for (const auto& e : fs::directory_iterator(dir / "certs"))
      if (e.path().extension() == ".json") certs.push_back(e.path());
  }
  std::sort(certs.begin(), certs.end());
  for (const auto& p : certs) {
    try {
      b.certificates.push_back(certificate_from_json(read_json(p)));
    } catch (const ParseError& e) {
      throw ParseError(p.string() + ": " + e.what());
    }
  }
  // An empty sum carries no rank on disk; take it from the certificates.
  if (b.x.empty() && !b.certificates.empty()) b.x.rank = b.certificates.front().lhs.rank();
  if (fs::exists(dir / "report.txt")) b.report = read_file(dir / "report.txt");
  return b;
}

}  // namespace twocx::io
