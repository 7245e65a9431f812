#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "topolasso/terms.hpp"

namespace topolasso {

/// A simplex as a vertex bit mask (bit i = vertex i, 0-based). A d-simplex
/// has d+1 bits set.
using SimplexMask = std::uint64_t;

inline int simplex_dimension(SimplexMask s) {
  return __builtin_popcountll(s) - 1;
}

/// An abstract simplicial complex on at most 64 vertices: a set of simplices
/// closed under taking nonempty subsets, stored grouped by dimension in
/// canonical (degree-major, then lexicographic) order.
class SimplicialComplex {
 public:
  /// The void complex (no simplices at all).
  SimplicialComplex() : vertex_universe_(0) {}

  /// Builds from an explicit simplex set; throws std::invalid_argument if the
  /// set is not closed under nonempty subsets.
  static SimplicialComplex from_simplices(std::vector<SimplexMask> simplices,
                                          int vertex_universe);

  /// Builds the downward closure of the given generators.
  static SimplicialComplex closure_of(const std::vector<SimplexMask>& generators,
                                      int vertex_universe);

  bool empty() const { return by_dim_.empty(); }
  /// Largest simplex dimension; -1 for the void complex.
  int dimension() const { return static_cast<int>(by_dim_.size()) - 1; }
  int vertex_universe() const { return vertex_universe_; }

  /// Number of d-simplices (m_d); 0 outside [0, dimension()].
  std::size_t count(int d) const {
    if (d < 0 || d > dimension()) return 0;
    return by_dim_[static_cast<std::size_t>(d)].size();
  }
  const std::vector<SimplexMask>& simplices(int d) const;
  bool contains(SimplexMask s) const;

  std::size_t total_simplices() const;

 private:
  // by_dim_[d] holds the d-simplices, sorted ascending by term_less on masks.
  std::vector<std::vector<SimplexMask>> by_dim_;
  int vertex_universe_;
};

/// Maps a hierarchically closed support to its simplicial complex: a term of
/// degree d+1 becomes a d-simplex on the term's variable indices. Throws
/// std::invalid_argument when `s` is not hierarchical.
SimplicialComplex to_simplicial_complex(const ModelSupport& s);

/// Reads the complex back as a term set over `p` variables.
ModelSupport support_of_complex(const SimplicialComplex& c, int p);

/// The Z2 matrix of the boundary map from d-chains to (d-1)-chains:
/// rows are (d-1)-simplices, columns are d-simplices in canonical order;
/// entry (j, i) = 1 iff row simplex j is a facet of column simplex i.
class BoundaryMatrix {
 public:
  BoundaryMatrix(std::size_t rows, std::size_t cols, int chain_dim);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  int chain_dimension() const { return dim_; }

  bool at(std::size_t r, std::size_t c) const {
    return (words_[r * words_per_row_ + c / 64] >> (c % 64)) & 1u;
  }
  void set(std::size_t r, std::size_t c) {
    words_[r * words_per_row_ + c / 64] |= (std::uint64_t{1} << (c % 64));
  }

  const std::vector<SimplexMask>& row_labels() const { return row_labels_; }
  const std::vector<SimplexMask>& col_labels() const { return col_labels_; }
  std::vector<SimplexMask>& row_labels() { return row_labels_; }
  std::vector<SimplexMask>& col_labels() { return col_labels_; }

  /// Number of ones in column c (d+1 for a well-formed boundary matrix).
  int column_ones(std::size_t c) const;

  /// Z2 matrix product this * rhs; used by the boundary-of-boundary checks.
  BoundaryMatrix multiply(const BoundaryMatrix& rhs) const;
  bool is_zero() const;

 private:
  friend int z2_reduce(BoundaryMatrix m);
  std::size_t rows_, cols_, words_per_row_;
  int dim_;
  std::vector<std::uint64_t> words_;  // row-major bit packing
  std::vector<SimplexMask> row_labels_, col_labels_;
};

/// Boundary matrix of the d-th boundary map (d >= 1). If the complex has no
/// d-simplices the result has zero columns. Throws for d < 1.
BoundaryMatrix boundary_matrix(const SimplicialComplex& c, int d);

/// Z2 rank by reduction to diagonal form: pick the first remaining one in
/// row-major order as pivot, swap it to the corner, cancel its row and
/// column, recurse on the rest. Works on a private copy.
int z2_reduce(BoundaryMatrix m);

/// Rank bookkeeping per dimension: simplex count m_d, cycle rank z_d,
/// boundary rank b_d and Betti number beta_d = z_d - b_d.
struct HomologySummary {
  struct Row {
    long m = 0;
    long z = 0;
    long b = 0;
    long beta = 0;
  };
  std::vector<Row> rows;  // index = dimension, 0..max_dim
  int max_dim = -1;
};

/// Betti numbers beta_0..beta_D as a fixed-length vector (padded with zeros).
using BettiVector = std::vector<long>;

/// Computes Betti numbers of `c` for dimensions 0..max_dim. Boundary ranks
/// above the complex dimension are zero, so the computation stops there and
/// the output is zero-padded. The void complex gives all zeros.
std::pair<BettiVector, HomologySummary> betti_numbers(const SimplicialComplex& c,
                                                      int max_dim);

/// The k-closed complex on m vertices: all C(m, k+1) k-simplices plus their
/// downward closure. Requires m >= k + 2.
SimplicialComplex d_closed_complex(int k, int m);

/// Closed form for the number of independent k-cycles of the k-closed
/// complex on d+2 vertices: C(d+1, k+1). Requires d >= k >= 1.
long long expected_independent_cycles(int k, int d);

/// Exact binomial coefficient (small arguments).
long long binomial(int n, int r);

}  // namespace topolasso
