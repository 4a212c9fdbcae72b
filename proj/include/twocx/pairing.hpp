#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "twocx/errors.hpp"
#include "twocx/integer.hpp"
#include "twocx/moves.hpp"
#include "twocx/presentation.hpp"

namespace twocx {

/// Element of k K_n: finitely supported map from canonical keys of rank
/// `rank` to exact scalars. Zero coefficients are never stored.
template <typename Scalar = Integer>
struct FormalSum {
  std::size_t rank = 0;
  std::map<CanonicalKey, Scalar> terms;

  static FormalSum zero(std::size_t rank) { return FormalSum{rank, {}}; }

  static FormalSum basis(const Presentation& p, const Scalar& c = Scalar(1)) {
    FormalSum out{p.rank(), {}};
    out.add_term(canonical_key(p), c);
    return out;
  }

  /// The relator-free presentation on `rank` generators.
  static FormalSum unit(std::size_t rank) { return basis(Presentation{positional_names(rank), {}}); }

  bool empty() const { return terms.empty(); }

  void add_term(const CanonicalKey& key, const Scalar& c) {
    if (key.rank != rank) throw ContextError("formal sum term of rank " + std::to_string(key.rank) +
                                             " in a sum of rank " + std::to_string(rank));
    if (c == Scalar(0)) return;
    auto [it, fresh] = terms.try_emplace(key, c);
    if (!fresh) {
      it->second += c;
      if (it->second == Scalar(0)) terms.erase(it);
    }
  }

  friend bool operator==(const FormalSum&, const FormalSum&) = default;
};

/// Element of k K_0: formal combination of closed complexes.
template <typename Scalar = Integer>
struct ClosedSum {
  std::map<ClosedComplex, Scalar> terms;

  bool empty() const { return terms.empty(); }

  void add_term(const ClosedComplex& key, const Scalar& c) {
    if (c == Scalar(0)) return;
    auto [it, fresh] = terms.try_emplace(key, c);
    if (!fresh) {
      it->second += c;
      if (it->second == Scalar(0)) terms.erase(it);
    }
  }

  friend bool operator==(const ClosedSum&, const ClosedSum&) = default;
};

namespace detail {

inline void require_same_rank(std::size_t a, std::size_t b) {
  if (a != b) throw ContextError("formal sums of ranks " + std::to_string(a) + " and " + std::to_string(b));
}

}  // namespace detail

template <typename Scalar>
FormalSum<Scalar> add(const FormalSum<Scalar>& x, const FormalSum<Scalar>& y) {
  detail::require_same_rank(x.rank, y.rank);
  FormalSum<Scalar> out = x;
  for (const auto& [k, c] : y.terms) out.add_term(k, c);
  return out;
}

template <typename Scalar>
FormalSum<Scalar> scale(const Scalar& c, const FormalSum<Scalar>& x) {
  FormalSum<Scalar> out = FormalSum<Scalar>::zero(x.rank);
  for (const auto& [k, a] : x.terms) out.add_term(k, c * a);
  return out;
}

template <typename Scalar>
FormalSum<Scalar> subtract(const FormalSum<Scalar>& x, const FormalSum<Scalar>& y) {
  return add(x, scale(Scalar(-1), y));
}

/// Key of product(representative(a), representative(b)).
CanonicalKey product_key(const CanonicalKey& a, const CanonicalKey& b);

/// Bilinear extension of the presentation product.
template <typename Scalar>
FormalSum<Scalar> dot(const FormalSum<Scalar>& x, const FormalSum<Scalar>& y) {
  detail::require_same_rank(x.rank, y.rank);
  FormalSum<Scalar> out = FormalSum<Scalar>::zero(x.rank);
  for (const auto& [kx, cx] : x.terms)
    for (const auto& [ky, cy] : y.terms) out.add_term(product_key(kx, ky), cx * cy);
  return out;
}

/// The universal pairing: dot followed by forgetting the boundary.
template <typename Scalar>
ClosedSum<Scalar> bracket(const FormalSum<Scalar>& x, const FormalSum<Scalar>& y) {
  ClosedSum<Scalar> out;
  for (const auto& [k, c] : dot(x, y).terms) out.add_term(ClosedComplex{{k}}, c);
  return out;
}

/// A claimed equality lhs == rhs in K_n (or K'_n) backed by a replayable script.
struct EquivalenceCertificate {
  std::string label;
  Presentation lhs;
  Presentation rhs;
  MoveScript script;
};

struct CertificateStatus {
  bool ok = false;
  std::string message;
};

/// Replays the script from lhs and compares keys with rhs. Never throws for
/// bad scripts; failures are returned as a status.
CertificateStatus check_certificate(const EquivalenceCertificate& cert);

/// Union-find over canonical keys joined by certificates; the class
/// representative is the least key in serialization order.
class CertificateClasses {
 public:
  /// Throws VerificationError naming the first certificate that fails
  /// replay, ContextError on a rank mismatch.
  CertificateClasses(std::size_t rank, const std::vector<EquivalenceCertificate>& certs);

  CanonicalKey representative(const CanonicalKey& key) const;

 private:
  std::string find(const std::string& s) const;

  std::size_t rank_;
  mutable std::map<std::string, std::string> parent_;
  std::map<std::string, CanonicalKey> keys_;
};

template <typename Scalar>
FormalSum<Scalar> reduce_by_certificates(const FormalSum<Scalar>& x, const std::vector<EquivalenceCertificate>& certs) {
  const CertificateClasses classes(x.rank, certs);
  FormalSum<Scalar> out = FormalSum<Scalar>::zero(x.rank);
  for (const auto& [k, c] : x.terms) out.add_term(classes.representative(k), c);
  return out;
}

template <typename Scalar = Integer>
struct NullReport {
  bool null = false;
  std::vector<CertificateStatus> certificates;
  FormalSum<Scalar> square;   // dot(x, x) before reduction
  FormalSum<Scalar> reduced;  // after reduction by the verified certificates
};

/// True iff every certificate verifies and dot(x, x) reduces to the empty sum.
template <typename Scalar>
NullReport<Scalar> verify_null(const FormalSum<Scalar>& x, const std::vector<EquivalenceCertificate>& certs) {
  NullReport<Scalar> report;
  report.square = dot(x, x);
  bool all_ok = true;
  std::vector<EquivalenceCertificate> good;
  for (const auto& c : certs) {
    CertificateStatus s = check_certificate(c);
    if (s.ok && (c.lhs.rank() != x.rank || c.rhs.rank() != x.rank)) {
      s = {false, "rank differs from the formal sum"};
    }
    if (s.ok) {
      good.push_back(c);
    } else {
      all_ok = false;
    }
    report.certificates.push_back(std::move(s));
  }
  report.reduced = reduce_by_certificates(report.square, good);
  report.null = all_ok && report.reduced.empty();
  return report;
}

/// One term per line: `coeff  [rank | w1 | w2 ...]`.
template <typename Scalar>
std::string format_sum(const FormalSum<Scalar>& x) {
  if (x.empty()) return "0\n";
  std::ostringstream os;
  for (const auto& [k, c] : x.terms) {
    os << c << "  [" << k.rank;
    for (const Word& w : k.classes) os << " | " << format_word(w, positional_names(k.rank));
    os << "]\n";
  }
  return os.str();
}

}  // namespace twocx
