#include "topolasso/terms.hpp"

#include <algorithm>

namespace topolasso {

Term Term::from_indices(const std::vector<int>& one_based) {
  std::uint64_t m = 0;
  for (int i : one_based) {
    if (i < 1 || i > kMaxVariables)
      throw std::invalid_argument("Term: variable index out of range: " +
                                  std::to_string(i));
    m |= (std::uint64_t{1} << (i - 1));
  }
  return Term(m);
}

std::vector<int> Term::indices() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(degree()));
  std::uint64_t m = mask_;
  while (m) {
    int bit = __builtin_ctzll(m);
    out.push_back(bit + 1);
    m &= m - 1;
  }
  return out;
}

std::vector<Term> Term::facets() const {
  std::vector<Term> out;
  if (degree() <= 1) return out;
  std::uint64_t m = mask_;
  while (m) {
    std::uint64_t low = m & (~m + 1);
    out.push_back(Term(mask_ ^ low));
    m &= m - 1;
  }
  return out;
}

std::string Term::label() const {
  std::string out;
  bool dotted = (63 - __builtin_clzll(mask_)) >= 9;  // any index > 9
  for (int i : indices()) {
    if (!out.empty() && dotted) out += '.';
    out += std::to_string(i);
  }
  return out;
}

bool term_less(const Term& a, const Term& b) {
  int da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  if (a.mask() == b.mask()) return false;
  // For equal degree, tuple-lexicographic order is decided by the lowest
  // differing variable: whichever term owns it comes first.
  std::uint64_t diff = a.mask() ^ b.mask();
  std::uint64_t low = diff & (~diff + 1);
  return (a.mask() & low) != 0;
}

ModelSupport::ModelSupport(std::vector<Term> terms, int p) : p_(p) {
  if (p < 0 || p > Term::kMaxVariables)
    throw std::invalid_argument("ModelSupport: bad variable count");
  for (const Term& t : terms) {
    if (p == 0 || (p < 64 && (t.mask() >> p) != 0))
      throw std::invalid_argument("ModelSupport: term exceeds variable count");
  }
  std::sort(terms.begin(), terms.end(), term_less);
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
  terms_ = std::move(terms);
}

bool ModelSupport::contains(const Term& t) const { return index_of(t) >= 0; }

int ModelSupport::index_of(const Term& t) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), t, term_less);
  if (it != terms_.end() && *it == t)
    return static_cast<int>(it - terms_.begin());
  return -1;
}

ModelSupport enumerate_candidate_terms(int p, int k) {
  if (k < 1 || k > p)
    throw std::invalid_argument("enumerate_candidate_terms: need 1 <= k <= p");
  std::vector<Term> terms;
  for (int d = 1; d <= k; ++d) {
    std::vector<int> c(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) c[static_cast<std::size_t>(i)] = i;
    while (true) {
      std::uint64_t m = 0;
      for (int i : c) m |= (std::uint64_t{1} << i);
      terms.push_back(Term(m));
      // advance the rightmost index that still has room
      int i = d - 1;
      while (i >= 0 && c[static_cast<std::size_t>(i)] == p - d + i) --i;
      if (i < 0) break;
      ++c[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < d; ++j)
        c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return ModelSupport(std::move(terms), p);
}

ModelSupport hierarchical_closure(const ModelSupport& s) {
  std::vector<Term> out;
  out.reserve(s.size());
  for (const Term& t : s) {
    // Every nonempty submask of t is a divisor; enumerate them directly.
    std::uint64_t m = t.mask();
    std::uint64_t sub = m;
    while (true) {
      out.push_back(Term(sub));
      sub = (sub - 1) & m;
      if (sub == 0) break;
    }
  }
  return ModelSupport(std::move(out), s.variable_count());
}

bool is_hierarchical(const ModelSupport& s) {
  for (const Term& t : s)
    for (const Term& f : t.facets())
      if (!s.contains(f)) return false;
  return true;
}

}  // namespace topolasso
