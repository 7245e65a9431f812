#include <doctest.h>

#include "oracles.hpp"
#include "topolasso/homology.hpp"
#include "topolasso/terms.hpp"

using namespace topolasso;

namespace {

ModelSupport support_of(std::initializer_list<std::initializer_list<int>> lists,
                        int p) {
  std::vector<Term> terms;
  for (auto l : lists) terms.push_back(Term::from_indices(l));
  return ModelSupport(terms, p);
}

}  // namespace

TEST_CASE("Term basics") {
  Term t = Term::from_indices({2, 5});
  CHECK(t.degree() == 2);
  CHECK(t.indices() == std::vector<int>{2, 5});
  CHECK(t.label() == "25");
  CHECK(Term::from_indices({3, 11}).label() == "3.11");
  CHECK(t.contains(Term::from_indices({2})));
  CHECK_FALSE(t.contains(Term::from_indices({3})));
  CHECK_THROWS_AS(Term(0), std::invalid_argument);
}

TEST_CASE("canonical order is degree-major then lexicographic") {
  // x1x4 before x2x3, and degree dominates
  CHECK(term_less(Term::from_indices({1, 4}), Term::from_indices({2, 3})));
  CHECK(term_less(Term::from_indices({1, 2}), Term::from_indices({1, 3})));
  CHECK(term_less(Term::from_indices({8}), Term::from_indices({1, 2})));
  ModelSupport s = support_of({{2, 3}, {1, 4}, {3}, {1}}, 4);
  CHECK(s[0].label() == "1");
  CHECK(s[1].label() == "3");
  CHECK(s[2].label() == "14");
  CHECK(s[3].label() == "23");
}

TEST_CASE("ModelSupport rejects out-of-range terms and dedups") {
  CHECK_THROWS_AS(support_of({{5}}, 4), std::invalid_argument);
  ModelSupport s = support_of({{1}, {1}, {2}}, 3);
  CHECK(s.size() == 2);
}

TEST_CASE("enumerate_candidate_terms counts") {
  CHECK(enumerate_candidate_terms(3, 3).size() == 7);
  CHECK(enumerate_candidate_terms(8, 3).size() == 92);
  CHECK(enumerate_candidate_terms(11, 3).size() == 231);
  CHECK(enumerate_candidate_terms(8, 2).size() == 36);  // 8 mains + 28 pairs
  CHECK_THROWS_AS(enumerate_candidate_terms(3, 0), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_candidate_terms(3, 4), std::invalid_argument);

  ModelSupport full = enumerate_candidate_terms(3, 3);
  std::vector<std::string> labels;
  for (const Term& t : full) labels.push_back(t.label());
  CHECK(labels == std::vector<std::string>{"1", "2", "3", "12", "13", "23",
                                           "123"});
}

TEST_CASE("hierarchical_closure worked examples") {
  // {1,3,12,13,123} -> the full 7-term model
  ModelSupport closed =
      hierarchical_closure(support_of({{1}, {3}, {1, 2}, {1, 3}, {1, 2, 3}}, 3));
  CHECK(closed == enumerate_candidate_terms(3, 3));

  // {x1, x3, x1x2, x5x6} gains x2, x5, x6
  ModelSupport ex1 = hierarchical_closure(support_of({{1}, {3}, {1, 2}, {5, 6}}, 6));
  CHECK(ex1.size() == 7);
  CHECK(ex1.contains(Term::from_indices({2})));
  CHECK(ex1.contains(Term::from_indices({5})));
  CHECK(ex1.contains(Term::from_indices({6})));

  // already hierarchical set is a fixed point
  ModelSupport flat = support_of({{2}, {3}}, 3);
  CHECK(hierarchical_closure(flat) == flat);
}

TEST_CASE("closure is idempotent, monotone and size-expanding") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    ModelSupport s = oracles::random_support(10, 4, 1000 + seed, 12);
    ModelSupport c = hierarchical_closure(s);
    CHECK(c.size() >= s.size());
    CHECK((c.size() == s.size()) == is_hierarchical(s));
    for (const Term& t : s) CHECK(c.contains(t));
    CHECK(hierarchical_closure(c) == c);

    // monotone: closure of a subset is contained in closure of the set
    std::vector<Term> half(s.terms().begin(),
                           s.terms().begin() + static_cast<long>(s.size() / 2));
    ModelSupport sub(half, s.variable_count());
    ModelSupport csub = hierarchical_closure(sub);
    for (const Term& t : csub) CHECK(c.contains(t));
  }
}

TEST_CASE("to_simplicial_complex maps terms to simplices") {
  ModelSupport triangle =
      support_of({{1}, {2}, {3}, {1, 2}, {1, 3}, {2, 3}}, 3);
  SimplicialComplex c = to_simplicial_complex(triangle);
  CHECK(c.dimension() == 1);
  CHECK(c.count(0) == 3);
  CHECK(c.count(1) == 3);

  SimplicialComplex vertex = to_simplicial_complex(support_of({{3}}, 3));
  CHECK(vertex.dimension() == 0);
  CHECK(vertex.count(0) == 1);

  // non-closed input is rejected rather than silently mapped
  CHECK_THROWS_AS(to_simplicial_complex(support_of({{1, 2}}, 2)),
                  std::invalid_argument);

  // void support -> void complex
  SimplicialComplex v = to_simplicial_complex(ModelSupport({}, 3));
  CHECK(v.empty());
  CHECK(betti_numbers(v, 2).first == BettiVector{0, 0, 0});
}

TEST_CASE("fig. 2 right-hand model complex") {
  // isolated vertex x1, filled triangle {2,3,4}, edge {4,5}
  ModelSupport m2 = support_of({{1}, {2}, {3}, {4}, {5}, {2, 3}, {2, 4},
                                {3, 4}, {4, 5}, {2, 3, 4}},
                               5);
  REQUIRE(is_hierarchical(m2));
  SimplicialComplex c = to_simplicial_complex(m2);
  CHECK(c.count(0) == 5);
  CHECK(c.count(1) == 4);
  CHECK(c.count(2) == 1);
}

TEST_CASE("complex round-trips back to the closed support") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    ModelSupport s = oracles::random_support(10, 4, 777 + seed, 10);
    ModelSupport closed = hierarchical_closure(s);
    SimplicialComplex c = to_simplicial_complex(closed);
    CHECK(support_of_complex(c, closed.variable_count()) == closed);
    // closure property holds exhaustively
    for (int d = 1; d <= c.dimension(); ++d)
      for (SimplexMask m : c.simplices(d)) {
        SimplexMask v = m;
        while (v) {
          SimplexMask low = v & (~v + 1);
          CHECK(c.contains(m ^ low));
          v &= v - 1;
        }
      }
  }
}
