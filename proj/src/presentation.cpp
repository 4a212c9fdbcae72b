#include "twocx/presentation.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "twocx/errors.hpp"

namespace twocx {

void Presentation::validate() const {
  std::set<std::string> seen;
  for (const auto& name : generators) {
    if (name.empty()) throw ContextError("empty generator name");
    if (!seen.insert(name).second) throw ContextError("duplicate generator name '" + name + "'");
  }
  for (std::size_t j = 0; j < relators.size(); ++j) {
    if (relators[j].span_rank() > generators.size()) {
      throw ContextError("relator " + std::to_string(j + 1) + " uses a generator outside the tuple");
    }
  }
}

std::vector<std::string> positional_names(std::size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back("g" + std::to_string(i + 1));
  return out;
}

std::strong_ordering operator<=>(const CanonicalKey& a, const CanonicalKey& b) {
  if (auto c = a.rank <=> b.rank; c != 0) return c;
  return std::lexicographical_compare_three_way(a.classes.begin(), a.classes.end(), b.classes.begin(),
                                                b.classes.end());
}

CanonicalKey canonical_key(const Presentation& p) {
  CanonicalKey key;
  key.rank = p.rank();
  key.classes.reserve(p.relators.size());
  for (const Word& r : p.relators) key.classes.push_back(cyclic_canonical(r));
  std::sort(key.classes.begin(), key.classes.end());
  return key;
}

std::string serialize(const CanonicalKey& key) {
  const auto names = positional_names(key.rank);
  std::string out = std::to_string(key.rank);
  for (const Word& w : key.classes) {
    out += '\n';
    out += format_word(w, names);
  }
  return out;
}

CanonicalKey deserialize_key(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  if (!std::getline(is, line)) throw ParseError("empty key");
  CanonicalKey key;
  try {
    key.rank = std::stoul(line);
  } catch (const std::exception&) {
    throw ParseError("bad key rank line '" + line + "'");
  }
  const auto names = positional_names(key.rank);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    key.classes.push_back(cyclic_canonical(parse_word(line, names)));
  }
  std::sort(key.classes.begin(), key.classes.end());
  return key;
}

Presentation representative(const CanonicalKey& key) {
  return Presentation{positional_names(key.rank), key.classes};
}

long long euler_char(const Presentation& p) {
  return 1 - static_cast<long long>(p.generators.size()) + static_cast<long long>(p.relators.size());
}

Presentation product(const Presentation& p, const Presentation& q) {
  if (p.rank() != q.rank()) {
    throw ContextError("product: boundary ranks differ (" + std::to_string(p.rank()) + " vs " +
                       std::to_string(q.rank()) + ")");
  }
  if (p.generators != q.generators) throw ContextError("product: generator tuples differ");
  Presentation out = p;
  out.relators.insert(out.relators.end(), q.relators.begin(), q.relators.end());
  return out;
}

Presentation unit_like(const Presentation& p) { return Presentation{p.generators, {}}; }

Presentation wedge_s2(const Presentation& p, std::size_t count) {
  Presentation out = p;
  out.relators.resize(out.relators.size() + count);
  return out;
}

namespace {

std::string fresh_name(const std::vector<std::string>& taken, std::size_t hint) {
  for (std::size_t k = hint;; ++k) {
    std::string cand = "g" + std::to_string(k);
    if (std::find(taken.begin(), taken.end(), cand) == taken.end()) return cand;
  }
}

}  // namespace

Presentation wedge_s1(const Presentation& p, std::size_t count) {
  Presentation out = p;
  for (std::size_t i = 0; i < count; ++i) out.generators.push_back(fresh_name(out.generators, out.rank() + 1));
  return out;
}

std::vector<Word> nielsen_images(std::size_t rank, std::span<const NielsenStep> steps) {
  std::vector<Word> images;
  images.reserve(rank);
  for (std::size_t i = 0; i < rank; ++i) images.push_back(Word::generator(static_cast<GeneratorIndex>(i)));
  for (const NielsenStep& s : steps) {
    if (s.i >= rank || (s.kind != NielsenStep::Kind::Invert && (s.j >= rank || s.j == s.i))) {
      throw ContextError("Nielsen step indices out of range or equal");
    }
    std::vector<Word> sigma;
    sigma.reserve(rank);
    for (std::size_t i = 0; i < rank; ++i) sigma.push_back(Word::generator(static_cast<GeneratorIndex>(i)));
    const Word gi = Word::generator(s.i);
    const Word gj = Word::generator(s.j);
    switch (s.kind) {
      case NielsenStep::Kind::Invert: sigma[s.i] = invert(gi); break;
      case NielsenStep::Kind::MultiplyRight: sigma[s.i] = gi * gj; break;
      case NielsenStep::Kind::MultiplyLeft: sigma[s.i] = gj * gi; break;
    }
    // The later substitution acts on the letters of the current images.
    for (Word& w : images) w = substitute(w, sigma);
  }
  return images;
}

Presentation apply_automorphism(const Presentation& p, std::span<const Word> images,
                                std::span<const NielsenStep> decomposition) {
  if (images.size() != p.rank()) throw ContextError("apply_automorphism: wrong number of images");
  const auto certified = nielsen_images(p.rank(), decomposition);
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (!(certified[i] == images[i])) {
      throw VerificationError("apply_automorphism: Nielsen decomposition does not produce the image of " +
                              p.generators[i]);
    }
  }
  Presentation out = p;
  for (Word& r : out.relators) r = substitute(r, images);
  return out;
}

std::strong_ordering operator<=>(const ClosedComplex& a, const ClosedComplex& b) {
  return std::lexicographical_compare_three_way(a.components.begin(), a.components.end(),
                                                b.components.begin(), b.components.end());
}

ClosedComplex forget_boundary(const Presentation& p) { return ClosedComplex{{canonical_key(p)}}; }

ClosedComplex disjoint_union(const ClosedComplex& c, const ClosedComplex& d) {
  ClosedComplex out;
  out.components.reserve(c.components.size() + d.components.size());
  std::merge(c.components.begin(), c.components.end(), d.components.begin(), d.components.end(),
             std::back_inserter(out.components));
  return out;
}

std::string serialize(const ClosedComplex& c) {
  std::string out;
  for (std::size_t i = 0; i < c.components.size(); ++i) {
    if (i) out += "\n--\n";
    out += serialize(c.components[i]);
  }
  return out;
}

AbelianGroup abelianization(const Presentation& p) {
  IntMatrix rel = IntMatrix::Zero(static_cast<Eigen::Index>(p.relators.size()), static_cast<Eigen::Index>(p.rank()));
  for (std::size_t j = 0; j < p.relators.size(); ++j) {
    for (Letter l : p.relators[j].letters()) rel(static_cast<Eigen::Index>(j), l.gen) += Integer(l.sign);
  }
  return cokernel_of_rows(rel);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Presentation parse_presentation(std::string_view text) {
  Presentation p;
  bool have_gens = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    auto where = [&] { return "line " + std::to_string(line_no) + ": "; };
    if (line.starts_with("gens:")) {
      if (have_gens) throw ParseError(where() + "second gens: line");
      if (!p.relators.empty()) throw ParseError(where() + "gens: must come first");
      std::istringstream is{std::string(line.substr(5))};
      std::string name;
      while (is >> name) {
        if (name == "1" || name.find('^') != std::string::npos || name.find('*') != std::string::npos ||
            name.find('=') != std::string::npos) {
          throw ParseError(where() + "bad generator name '" + name + "'");
        }
        p.generators.push_back(name);
      }
      have_gens = true;
    } else if (line.starts_with("rel:")) {
      if (!have_gens) throw ParseError(where() + "rel: before gens:");
      std::string_view body = trim(line.substr(4));
      try {
        if (auto eq = body.find('='); eq != std::string_view::npos) {
          Word lhs = parse_word(trim(body.substr(0, eq)), p.generators);
          Word rhs = parse_word(trim(body.substr(eq + 1)), p.generators);
          p.relators.push_back(lhs * invert(rhs));
        } else {
          p.relators.push_back(parse_word(body, p.generators));
        }
      } catch (const ParseError& e) {
        throw ParseError(where() + e.what());
      }
    } else {
      throw ParseError(where() + "expected gens: or rel:");
    }
    if (end == text.size()) break;
  }
  if (!have_gens) throw ParseError("missing gens: line");
  try {
    p.validate();
  } catch (const ContextError& e) {
    throw ParseError(e.what());
  }
  return p;
}

std::string format_presentation(const Presentation& p) {
  std::string out = "gens:";
  for (const auto& g : p.generators) out += " " + g;
  out += '\n';
  for (const Word& r : p.relators) out += "rel: " + format_word(r, p.generators) + "\n";
  return out;
}

Presentation load_presentation(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open presentation file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_presentation(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void save_presentation(const Presentation& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << format_presentation(p);
}

}  // namespace twocx
