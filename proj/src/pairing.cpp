#include "twocx/pairing.hpp"

#include <algorithm>

namespace twocx {

CanonicalKey product_key(const CanonicalKey& a, const CanonicalKey& b) {
  if (a.rank != b.rank) throw ContextError("product of keys with different ranks");
  CanonicalKey out;
  out.rank = a.rank;
  out.classes.reserve(a.classes.size() + b.classes.size());
  std::merge(a.classes.begin(), a.classes.end(), b.classes.begin(), b.classes.end(),
             std::back_inserter(out.classes));
  return out;
}

CertificateStatus check_certificate(const EquivalenceCertificate& cert) {
  const std::string name = cert.label.empty() ? std::string("certificate") : cert.label;
  if (cert.lhs.rank() != cert.rhs.rank()) {
    return {false, name + ": endpoints have different boundary ranks"};
  }
  try {
    const Presentation end = replay(cert.lhs, cert.script);
    if (canonical_key(end) != canonical_key(cert.rhs)) {
      return {false, name + ": replay does not reach the right-hand side"};
    }
  } catch (const Error& e) {
    return {false, name + ": " + e.what()};
  }
  return {true, name + ": ok (" + std::to_string(cert.script.moves.size()) + " moves, " +
                    std::string(regime_name(cert.script.regime)) + ")"};
}

CertificateClasses::CertificateClasses(std::size_t rank, const std::vector<EquivalenceCertificate>& certs)
    : rank_(rank) {
  auto touch = [&](const CanonicalKey& k) {
    std::string s = serialize(k);
    keys_.try_emplace(s, k);
    parent_.try_emplace(s, s);
    return s;
  };
  for (const auto& c : certs) {
    if (c.lhs.rank() != rank_ || c.rhs.rank() != rank_) {
      throw ContextError((c.label.empty() ? std::string("certificate") : c.label) + ": rank differs from " +
                         std::to_string(rank_));
    }
    const CertificateStatus status = check_certificate(c);
    if (!status.ok) throw VerificationError(status.message);
    const std::string a = find(touch(canonical_key(c.lhs)));
    const std::string b = find(touch(canonical_key(c.rhs)));
    if (a == b) continue;
    // The lesser serialization becomes the root, so roots are class minima.
    if (a < b) {
      parent_[b] = a;
    } else {
      parent_[a] = b;
    }
  }
}

std::string CertificateClasses::find(const std::string& s) const {
  std::string root = s;
  while (parent_.at(root) != root) root = parent_.at(root);
  std::string cur = s;
  while (cur != root) {
    std::string next = parent_.at(cur);
    parent_[cur] = root;
    cur = std::move(next);
  }
  return root;
}

CanonicalKey CertificateClasses::representative(const CanonicalKey& key) const {
  const std::string s = serialize(key);
  if (!parent_.count(s)) return key;  // untouched by every certificate
  return keys_.at(find(s));
}

}  // namespace twocx
