#include "twocx/freegroup.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "twocx/errors.hpp"

namespace twocx {

Word reduce(std::span<const Letter> raw) {
  std::vector<Letter> out;
  out.reserve(raw.size());
  for (Letter l : raw) {
    if (!out.empty() && out.back() == l.inverse()) {
      out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  return Word(Word::Trusted{}, std::move(out));
}

Word::Word(std::span<const Letter> raw) : Word(reduce(raw)) {}

Word::Word(std::initializer_list<Letter> raw)
    : Word(std::span<const Letter>(raw.begin(), raw.size())) {}

Word Word::generator(GeneratorIndex g, long long power) {
  std::vector<Letter> out(static_cast<std::size_t>(power < 0 ? -power : power),
                          Letter{g, static_cast<std::int8_t>(power < 0 ? -1 : 1)});
  return Word(Trusted{}, std::move(out));
}

std::size_t Word::span_rank() const {
  std::size_t r = 0;
  for (Letter l : letters_) r = std::max<std::size_t>(r, l.gen + 1);
  return r;
}

std::strong_ordering operator<=>(const Word& a, const Word& b) {
  return std::lexicographical_compare_three_way(a.letters_.begin(), a.letters_.end(),
                                                b.letters_.begin(), b.letters_.end());
}

Word multiply(const Word& u, const Word& v) {
  auto a = u.letters();
  auto b = v.letters();
  // Cancel at the junction only; both operands are already reduced.
  std::size_t k = 0;
  while (k < a.size() && k < b.size() && a[a.size() - 1 - k] == b[k].inverse()) ++k;
  std::vector<Letter> out;
  out.reserve(a.size() + b.size() - 2 * k);
  out.insert(out.end(), a.begin(), a.end() - static_cast<std::ptrdiff_t>(k));
  out.insert(out.end(), b.begin() + static_cast<std::ptrdiff_t>(k), b.end());
  return reduce(out);
}

Word invert(const Word& u) {
  std::vector<Letter> out;
  out.reserve(u.size());
  for (auto it = u.letters().rbegin(); it != u.letters().rend(); ++it) out.push_back(it->inverse());
  return reduce(out);
}

Word conjugate(const Word& u, const Word& w) { return w * u * invert(w); }

Word commutator(const Word& u, const Word& v) { return u * v * invert(u) * invert(v); }

Word power(const Word& u, long long k) {
  const Word base = k < 0 ? invert(u) : u;
  const long long n = k < 0 ? -k : k;
  std::vector<Letter> raw;
  raw.reserve(base.size() * static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) raw.insert(raw.end(), base.letters().begin(), base.letters().end());
  return reduce(raw);
}

long long exponent_sum(const Word& u, GeneratorIndex g) {
  long long total = 0;
  for (Letter l : u.letters()) {
    if (l.gen == g) total += l.sign;
  }
  return total;
}

Word substitute(const Word& u, std::span<const Word> images) {
  std::vector<Letter> raw;
  for (Letter l : u.letters()) {
    if (l.gen >= images.size()) {
      throw ContextError("substitute: no image for generator index " + std::to_string(l.gen));
    }
    const Word& img = images[l.gen];
    if (l.sign > 0) {
      raw.insert(raw.end(), img.letters().begin(), img.letters().end());
    } else {
      for (auto it = img.letters().rbegin(); it != img.letters().rend(); ++it) raw.push_back(it->inverse());
    }
  }
  return reduce(raw);
}

Word cyclic_reduction(const Word& u, Word* conjugator) {
  auto l = u.letters();
  std::size_t k = 0;
  while (2 * k + 1 < l.size() && l[k] == l[l.size() - 1 - k].inverse()) ++k;
  if (conjugator) *conjugator = Word(l.subspan(0, k));
  return Word(l.subspan(k, l.size() - 2 * k));
}

Word rotate(const Word& w, std::size_t offset) {
  auto l = w.letters();
  if (l.empty()) return w;
  offset %= l.size();
  std::vector<Letter> out;
  out.reserve(l.size());
  out.insert(out.end(), l.begin() + static_cast<std::ptrdiff_t>(offset), l.end());
  out.insert(out.end(), l.begin(), l.begin() + static_cast<std::ptrdiff_t>(offset));
  return Word(out);
}

namespace {

// Index of the least rotation of a cyclic sequence, by direct comparison.
std::size_t least_rotation(std::span<const Letter> s) {
  const std::size_t n = s.size();
  std::size_t best = 0;
  for (std::size_t cand = 1; cand < n; ++cand) {
    for (std::size_t i = 0; i < n; ++i) {
      Letter a = s[(cand + i) % n];
      Letter b = s[(best + i) % n];
      if (a == b) continue;
      if (a < b) best = cand;
      break;
    }
  }
  return best;
}

}  // namespace

Word cyclic_canonical(const Word& u) {
  Word c = cyclic_reduction(u);
  if (c.empty()) return c;
  Word ci = invert(c);
  Word a = rotate(c, least_rotation(c.letters()));
  Word b = rotate(ci, least_rotation(ci.letters()));
  return std::min(a, b);
}

std::string format_word(const Word& u, std::span<const std::string> names) {
  if (u.empty()) return "1";
  std::ostringstream os;
  auto l = u.letters();
  bool first = true;
  for (std::size_t i = 0; i < l.size();) {
    std::size_t j = i;
    while (j < l.size() && l[j] == l[i]) ++j;
    const long long run = static_cast<long long>(j - i) * l[i].sign;
    if (!first) os << ' ';
    first = false;
    if (l[i].gen >= names.size()) {
      throw ContextError("format_word: generator index " + std::to_string(l[i].gen) + " has no name");
    }
    os << names[l[i].gen];
    if (run != 1) os << '^' << run;
    i = j;
  }
  return os.str();
}

Word parse_word(std::string_view text, std::span<const std::string> names) {
  std::vector<Letter> raw;
  std::size_t i = 0;
  bool saw_token = false;
  auto fail = [&](const std::string& why) {
    throw ParseError("cannot parse word '" + std::string(text) + "': " + why);
  };
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == '*') {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '^' &&
           text[i] != '*')
      ++i;
    std::string_view name = text.substr(start, i - start);
    long long exp = 1;
    if (i < text.size() && text[i] == '^') {
      ++i;
      std::size_t es = i;
      if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      std::string_view digits = text.substr(es, i - es);
      if (!digits.empty() && digits[0] == '+') digits.remove_prefix(1);
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), exp);
      if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) {
        fail("bad exponent");
      }
      if (exp == 0) fail("zero exponent");
    }
    saw_token = true;
    if (name == "1") {
      continue;
    }
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) fail("unknown generator '" + std::string(name) + "'");
    const auto g = static_cast<GeneratorIndex>(it - names.begin());
    const Letter l{g, static_cast<std::int8_t>(exp < 0 ? -1 : 1)};
    for (long long k = 0; k < (exp < 0 ? -exp : exp); ++k) raw.push_back(l);
  }
  if (!saw_token) fail("empty text (use 1 for the identity)");
  return reduce(raw);
}

}  // namespace twocx
