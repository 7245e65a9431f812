#pragma once

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace topolasso {

/// A square-free interaction term x_{i1}*...*x_{id} over up to 64 variables.
///
/// The participating variables are stored as a bit mask: bit (i-1) is set
/// when variable x_i (1-based) enters the product. The empty product is not
/// a valid term; models here carry no intercept.
class Term {
 public:
  static constexpr int kMaxVariables = 64;

  explicit Term(std::uint64_t variable_mask) : mask_(variable_mask) {
    if (mask_ == 0) throw std::invalid_argument("Term: empty variable set");
  }

  static Term from_indices(std::initializer_list<int> one_based) {
    return from_indices(std::vector<int>(one_based));
  }
  static Term from_indices(const std::vector<int>& one_based);

  std::uint64_t mask() const { return mask_; }
  int degree() const { return __builtin_popcountll(mask_); }

  /// 1-based variable indices, ascending.
  std::vector<int> indices() const;

  /// True when every variable of `other` also appears here.
  bool contains(const Term& other) const {
    return (mask_ & other.mask()) == other.mask();
  }

  /// All sub-terms of degree exactly (degree() - 1).
  std::vector<Term> facets() const;

  /// Compact label: "12" for x1*x2 when indices are single digits,
  /// dot-separated ("3.11") otherwise.
  std::string label() const;

  friend bool operator==(const Term& a, const Term& b) {
    return a.mask_ == b.mask_;
  }
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  std::uint64_t mask_;
};

/// Canonical term order: by degree, then lexicographically on the ascending
/// index tuples (so x1*x4 precedes x2*x3). Gives the stable column order of
/// augmented design matrices.
bool term_less(const Term& a, const Term& b);

/// An ordered set of distinct terms over p variables, kept in canonical
/// order. The image of a model's nonzero coefficients.
class ModelSupport {
 public:
  ModelSupport() : p_(0) {}
  ModelSupport(std::vector<Term> terms, int p);

  int variable_count() const { return p_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::vector<Term>& terms() const { return terms_; }
  const Term& operator[](std::size_t i) const { return terms_[i]; }

  bool contains(const Term& t) const;
  /// Position of `t` in canonical order, or -1.
  int index_of(const Term& t) const;

  bool operator==(const ModelSupport& other) const {
    return p_ == other.p_ && terms_ == other.terms_;
  }

  std::vector<Term>::const_iterator begin() const { return terms_.begin(); }
  std::vector<Term>::const_iterator end() const { return terms_.end(); }

 private:
  std::vector<Term> terms_;
  int p_;
};

/// All square-free terms of degree 1..k over p variables in canonical order;
/// sum of C(p, d) terms. Throws std::invalid_argument unless 1 <= k <= p.
ModelSupport enumerate_candidate_terms(int p, int k);

/// Smallest superset of `s` closed under taking nonempty sub-terms.
/// Idempotent and monotone.
ModelSupport hierarchical_closure(const ModelSupport& s);

/// True when every nonempty sub-term of every member is itself a member.
bool is_hierarchical(const ModelSupport& s);

}  // namespace topolasso
