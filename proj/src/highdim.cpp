#include "twocx/highdim.hpp"

#include <algorithm>
#include <array>
#include <random>

#include "twocx/errors.hpp"
#include "twocx/smith.hpp"

namespace twocx {

FiniteGroup::FiniteGroup(std::vector<std::vector<std::size_t>> table, std::size_t identity)
    : table_(std::move(table)), identity_(identity) {
  const std::size_t n = table_.size();
  if (n == 0) throw ParseError("group of order 0");
  if (identity_ >= n) throw ParseError("identity index out of range");
  for (std::size_t a = 0; a < n; ++a) {
    if (table_[a].size() != n) throw ParseError("multiplication table row " + std::to_string(a) + " has wrong length");
    for (std::size_t b = 0; b < n; ++b)
      if (table_[a][b] >= n) throw ParseError("table entry out of range");
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (table_[identity_][a] != a || table_[a][identity_] != a) throw ParseError("identity is not two-sided");
  }
  inverse_.assign(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (table_[a][b] == identity_) {
        if (table_[b][a] != identity_) throw ParseError("left and right inverses differ");
        inverse_[a] = b;
        break;
      }
    }
    if (inverse_[a] == n) throw ParseError("element " + std::to_string(a) + " has no inverse");
  }
  auto assoc = [&](std::size_t a, std::size_t b, std::size_t c) {
    if (table_[table_[a][b]][c] != table_[a][table_[b][c]]) throw ParseError("table is not associative");
  };
  if (n <= 64) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c) assoc(a, b, c);
  } else {
    std::mt19937_64 rng(n);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (int i = 0; i < 200000; ++i) assoc(pick(rng), pick(rng), pick(rng));
  }
}

FiniteGroup FiniteGroup::trivial() { return FiniteGroup({{0}}, 0); }

FiniteGroup FiniteGroup::cyclic(std::size_t n) {
  if (n == 0) throw ParseError("cyclic group of order 0");
  std::vector<std::vector<std::size_t>> t(n, std::vector<std::size_t>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) t[a][b] = (a + b) % n;
  return FiniteGroup(std::move(t), 0);
}

FiniteGroup FiniteGroup::symmetric3() {
  // Permutations of {0,1,2} in lexicographic order; composition (p*q)(x) = p(q(x)).
  const std::vector<std::array<int, 3>> perms{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::vector<std::vector<std::size_t>> t(6, std::vector<std::size_t>(6));
  for (std::size_t a = 0; a < 6; ++a) {
    for (std::size_t b = 0; b < 6; ++b) {
      std::array<int, 3> c{};
      for (int x = 0; x < 3; ++x) c[x] = perms[a][perms[b][x]];
      t[a][b] = static_cast<std::size_t>(std::find(perms.begin(), perms.end(), c) - perms.begin());
    }
  }
  return FiniteGroup(std::move(t), 0);
}

FiniteGroup FiniteGroup::direct_product(const FiniteGroup& a, const FiniteGroup& b) {
  const std::size_t na = a.order(), nb = b.order();
  std::vector<std::vector<std::size_t>> t(na * nb, std::vector<std::size_t>(na * nb));
  for (std::size_t x = 0; x < na * nb; ++x)
    for (std::size_t y = 0; y < na * nb; ++y)
      t[x][y] = a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb);
  return FiniteGroup(std::move(t), a.identity() * nb + b.identity());
}

std::size_t FiniteGroup::evaluate(const Word& w, std::span<const std::size_t> images) const {
  std::size_t acc = identity_;
  for (Letter l : w.letters()) {
    if (l.gen >= images.size()) throw ContextError("word uses a generator without an image");
    const std::size_t x = images[l.gen];
    acc = mul(acc, l.sign > 0 ? x : inv(x));
  }
  return acc;
}

GroupRingElement ring_mul(const FiniteGroup& g, const GroupRingElement& a, const GroupRingElement& b) {
  GroupRingElement out;
  for (const auto& [x, cx] : a) {
    for (const auto& [y, cy] : b) {
      Integer& slot = out[g.mul(x, y)];
      slot += cx * cy;
    }
  }
  std::erase_if(out, [](const auto& kv) { return kv.second.is_zero(); });
  return out;
}

void GroupRingMatrix::add(std::size_t row, std::size_t col, std::size_t elem, const Integer& coeff) {
  if (row >= rows || col >= cols) throw ContextError("group ring matrix index out of range");
  if (coeff.is_zero()) return;
  auto& e = entries[{row, col}];
  Integer& slot = e[elem];
  slot += coeff;
  if (slot.is_zero()) e.erase(elem);
  if (e.empty()) entries.erase({row, col});
}

const GroupRingElement* GroupRingMatrix::at(std::size_t row, std::size_t col) const {
  auto it = entries.find({row, col});
  return it == entries.end() ? nullptr : &it->second;
}

GroupRingMatrix multiply(const FiniteGroup& g, const GroupRingMatrix& a, const GroupRingMatrix& b) {
  if (a.cols != b.rows) throw ContextError("group ring matrix shapes do not compose");
  GroupRingMatrix out = GroupRingMatrix::zero(a.rows, b.cols);
  for (const auto& [ia, ea] : a.entries) {
    for (const auto& [ib, eb] : b.entries) {
      if (ia.second != ib.first) continue;
      for (const auto& [x, c] : ring_mul(g, ea, eb)) out.add(ia.first, ib.second, x, c);
    }
  }
  return out;
}

GroupRingMatrix hconcat(const GroupRingMatrix& a, const GroupRingMatrix& b) {
  if (a.rows != b.rows) throw ContextError("hconcat: row counts differ");
  GroupRingMatrix out = GroupRingMatrix::zero(a.rows, a.cols + b.cols);
  out.entries = a.entries;
  for (const auto& [ij, e] : b.entries) out.entries[{ij.first, ij.second + a.cols}] = e;
  return out;
}

IntMatrix restrict_scalars(const GroupRingMatrix& m, const FiniteGroup& g) {
  const auto n = static_cast<Eigen::Index>(g.order());
  IntMatrix out = IntMatrix::Zero(static_cast<Eigen::Index>(m.rows) * n, static_cast<Eigen::Index>(m.cols) * n);
  for (const auto& [ij, e] : m.entries) {
    const auto r0 = static_cast<Eigen::Index>(ij.first) * n;
    const auto c0 = static_cast<Eigen::Index>(ij.second) * n;
    for (const auto& [x, coeff] : e) {
      if (x >= g.order()) throw ContextError("group element index " + std::to_string(x) + " out of range");
      for (std::size_t h = 0; h < g.order(); ++h) {
        out(r0 + static_cast<Eigen::Index>(g.mul(x, h)), c0 + static_cast<Eigen::Index>(h)) += coeff;
      }
    }
  }
  return out;
}

void ChainComplexData::validate() const {
  if (ranks.size() != n + 1) throw VerificationError("chain complex needs ranks 0..n");
  if (boundaries.size() != n) throw VerificationError("chain complex needs boundaries d_1..d_n");
  if (ranks[0] < 1) throw VerificationError("rank_0 must be at least 1");
  for (std::size_t k = 1; k <= n; ++k) {
    const GroupRingMatrix& d = boundary(k);
    if (d.rows != ranks[k - 1] || d.cols != ranks[k]) {
      throw VerificationError("d_" + std::to_string(k) + " has shape " + std::to_string(d.rows) + "x" +
                              std::to_string(d.cols) + ", expected " + std::to_string(ranks[k - 1]) + "x" +
                              std::to_string(ranks[k]));
    }
    for (const auto& [ij, e] : d.entries) {
      if (ij.first >= d.rows || ij.second >= d.cols) throw VerificationError("entry outside the matrix");
      for (const auto& [x, c] : e)
        if (x >= group.order()) throw VerificationError("group element index out of range");
    }
  }
  for (std::size_t k = 2; k <= n; ++k) {
    if (!multiply(group, boundary(k - 1), boundary(k)).is_zero()) {
      throw VerificationError("d_" + std::to_string(k - 1) + " d_" + std::to_string(k) + " is not zero");
    }
  }
}

AbelianGroup homology_at(const ChainComplexData& c, std::size_t k) {
  c.validate();
  if (k > c.n) throw ContextError("homology index " + std::to_string(k) + " above top dimension");
  const auto g = static_cast<Eigen::Index>(c.group.order());
  const auto dim = static_cast<Eigen::Index>(c.ranks[k]) * g;
  Eigen::Index rank_out = 0;
  if (k >= 1) rank_out = static_cast<Eigen::Index>(invariant_factors(restrict_scalars(c.boundary(k), c.group)).size());
  std::vector<Integer> incoming;
  if (k + 1 <= c.n) incoming = invariant_factors(restrict_scalars(c.boundary(k + 1), c.group));
  AbelianGroup out;
  out.free_rank = static_cast<std::size_t>(dim - rank_out - static_cast<Eigen::Index>(incoming.size()));
  for (const Integer& d : incoming)
    if (d != Integer(1)) out.torsion.push_back(d);
  return out;
}

bool same_skeleton(const ChainComplexData& c1, const ChainComplexData& c2) {
  if (!(c1.group == c2.group) || c1.n != c2.n || c1.n == 0) return false;
  for (std::size_t k = 0; k < c1.n; ++k)
    if (c1.ranks[k] != c2.ranks[k]) return false;
  for (std::size_t k = 1; k < c1.n; ++k)
    if (!(c1.boundary(k) == c2.boundary(k))) return false;
  return true;
}

ChainComplexData glue_product(const ChainComplexData& c1, const ChainComplexData& c2) {
  c1.validate();
  c2.validate();
  if (!same_skeleton(c1, c2)) throw ContextError("glue: complexes do not share group, n and the (n-1)-skeleton");
  ChainComplexData out = c1;
  out.ranks[c1.n] = c1.ranks[c1.n] + c2.ranks[c2.n];
  out.boundaries[c1.n - 1] = hconcat(c1.boundary(c1.n), c2.boundary(c2.n));
  out.validate();
  return out;
}

long long euler_char_chain(const ChainComplexData& c) {
  long long chi = 0;
  for (std::size_t k = 0; k < c.ranks.size(); ++k) chi += (k % 2 ? -1 : 1) * static_cast<long long>(c.ranks[k]);
  return chi;
}

long long product_euler(const ChainComplexData& c1, const ChainComplexData& c2) {
  if (!same_skeleton(c1, c2)) throw ContextError("product_euler: complexes are not gluable");
  const long long sign = c1.n % 2 ? -1 : 1;
  return euler_char_chain(c1) + sign * static_cast<long long>(c2.ranks[c2.n]);
}

bool check_dyer_bound(const ChainComplexData& c1, const ChainComplexData& c2, const ChainComplexData& c0) {
  if (c1.n != c2.n || c1.n != c0.n) return false;
  const long long sign = c1.n % 2 ? -1 : 1;
  const long long a = sign * euler_char_chain(c1);
  const long long b = sign * euler_char_chain(c2);
  return a == b && a >= 2 + sign * euler_char_chain(c0);
}

namespace {

// Right Fox derivative d'(w)/d(x_i) evaluated in Z[G]:
// d'(uv) = d'(u) v + d'(v), d'(x_i) = 1, d'(x_i^-1) = -x_i^-1.
GroupRingElement fox_right(const FiniteGroup& g, const Word& w, GeneratorIndex i, std::span<const std::size_t> images) {
  GroupRingElement out;
  // Scan from the right, tracking the value of the suffix after each letter.
  std::size_t suffix = g.identity();
  for (std::size_t pos = w.size(); pos-- > 0;) {
    const Letter l = w[pos];
    const std::size_t x = images[l.gen];
    if (l.gen == i) {
      if (l.sign > 0) {
        out[suffix] += Integer(1);
      } else {
        out[g.mul(g.inv(x), suffix)] -= Integer(1);
      }
    }
    suffix = g.mul(l.sign > 0 ? x : g.inv(x), suffix);
  }
  std::erase_if(out, [](const auto& kv) { return kv.second.is_zero(); });
  return out;
}

}  // namespace

ChainComplexData presentation_chain(const FiniteGroup& g, std::span<const std::size_t> images,
                                    std::span<const Word> relators, std::size_t generators) {
  if (images.size() != generators) throw ContextError("need one group element per generator");
  for (std::size_t x : images)
    if (x >= g.order()) throw ContextError("generator image out of range");
  for (const Word& r : relators) {
    if (r.span_rank() > generators) throw ContextError("relator uses a generator outside the tuple");
    if (g.evaluate(r, images) != g.identity()) throw ContextError("relator is not trivial in the group");
  }
  ChainComplexData c;
  c.group = g;
  c.n = 2;
  c.ranks = {1, generators, relators.size()};
  GroupRingMatrix d1 = GroupRingMatrix::zero(1, generators);
  for (std::size_t i = 0; i < generators; ++i) {
    d1.add(0, i, images[i], Integer(1));
    d1.add(0, i, g.identity(), Integer(-1));
  }
  GroupRingMatrix d2 = GroupRingMatrix::zero(generators, relators.size());
  for (std::size_t j = 0; j < relators.size(); ++j) {
    for (std::size_t i = 0; i < generators; ++i) {
      for (const auto& [x, coeff] : fox_right(g, relators[j], static_cast<GeneratorIndex>(i), images)) {
        d2.add(i, j, x, coeff);
      }
    }
  }
  c.boundaries = {std::move(d1), std::move(d2)};
  c.validate();
  return c;
}

GroupRingMatrix module_generators(const FiniteGroup& g, const IntMatrix& basis, std::size_t module_rank) {
  const auto n = static_cast<Eigen::Index>(g.order());
  if (basis.rows() != static_cast<Eigen::Index>(module_rank) * n) {
    throw ContextError("module_generators: basis has the wrong number of rows");
  }
  std::vector<Eigen::Matrix<Integer, Eigen::Dynamic, 1>> chosen;
  IntMatrix span(basis.rows(), 0);
  for (Eigen::Index c = 0; c < basis.cols(); ++c) {
    const auto v = basis.col(c);
    if (span.cols() > 0 && in_integer_span(span, v)) continue;
    if (span.cols() == 0 && all_zero(v)) continue;
    chosen.push_back(v);
    // Right translates v * x permute coordinates within each block: h -> h x.
    IntMatrix grown(span.rows(), span.cols() + n);
    grown.leftCols(span.cols()) = span;
    for (Eigen::Index x = 0; x < n; ++x) {
      auto col = grown.col(span.cols() + x);
      col.setZero();
      for (Eigen::Index blk = 0; blk < static_cast<Eigen::Index>(module_rank); ++blk)
        for (Eigen::Index h = 0; h < n; ++h)
          col(blk * n + static_cast<Eigen::Index>(g.mul(static_cast<std::size_t>(h), static_cast<std::size_t>(x)))) =
              v(blk * n + h);
    }
    span = std::move(grown);
  }
  GroupRingMatrix out = GroupRingMatrix::zero(module_rank, chosen.size());
  for (std::size_t j = 0; j < chosen.size(); ++j)
    for (Eigen::Index blk = 0; blk < static_cast<Eigen::Index>(module_rank); ++blk)
      for (Eigen::Index h = 0; h < n; ++h)
        out.add(static_cast<std::size_t>(blk), j, static_cast<std::size_t>(h), chosen[j](blk * n + h));
  return out;
}

ChainComplexData attach_cells(const ChainComplexData& c, const GroupRingMatrix& top) {
  if (top.rows != c.ranks[c.n]) throw ContextError("attach_cells: boundary rows must equal rank_n");
  ChainComplexData out = c;
  out.n = c.n + 1;
  out.ranks.push_back(top.cols);
  out.boundaries.push_back(top);
  out.validate();
  return out;
}

}  // namespace twocx
