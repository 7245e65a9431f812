#include "topolasso/homology.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace topolasso {

namespace {

// canonical order inside one dimension: lowest differing vertex first
bool mask_less(SimplexMask a, SimplexMask b) {
  if (a == b) return false;
  SimplexMask diff = a ^ b;
  SimplexMask low = diff & (~diff + 1);
  return (a & low) != 0;
}

std::vector<std::vector<SimplexMask>> group_by_dimension(
    std::vector<SimplexMask> simplices) {
  std::vector<std::vector<SimplexMask>> by_dim;
  for (SimplexMask s : simplices) {
    int d = simplex_dimension(s);
    if (d < 0) throw std::invalid_argument("SimplicialComplex: empty simplex");
    if (d >= static_cast<int>(by_dim.size()))
      by_dim.resize(static_cast<std::size_t>(d) + 1);
    by_dim[static_cast<std::size_t>(d)].push_back(s);
  }
  for (auto& level : by_dim) {
    std::sort(level.begin(), level.end(), mask_less);
    level.erase(std::unique(level.begin(), level.end()), level.end());
  }
  return by_dim;
}

}  // namespace

SimplicialComplex SimplicialComplex::from_simplices(
    std::vector<SimplexMask> simplices, int vertex_universe) {
  SimplicialComplex c;
  c.vertex_universe_ = vertex_universe;
  c.by_dim_ = group_by_dimension(std::move(simplices));
  // closure check: every facet of every simplex of dimension >= 1 must appear
  for (int d = 1; d <= c.dimension(); ++d) {
    for (SimplexMask s : c.by_dim_[static_cast<std::size_t>(d)]) {
      SimplexMask m = s;
      while (m) {
        SimplexMask low = m & (~m + 1);
        if (!c.contains(s ^ low))
          throw std::invalid_argument(
              "SimplicialComplex: set is not closed under subsets");
        m &= m - 1;
      }
    }
  }
  return c;
}

SimplicialComplex SimplicialComplex::closure_of(
    const std::vector<SimplexMask>& generators, int vertex_universe) {
  std::unordered_set<SimplexMask> all;
  for (SimplexMask g : generators) {
    if (g == 0) continue;
    SimplexMask sub = g;
    while (true) {
      all.insert(sub);
      sub = (sub - 1) & g;
      if (sub == 0) break;
    }
  }
  SimplicialComplex c;
  c.vertex_universe_ = vertex_universe;
  c.by_dim_ = group_by_dimension(
      std::vector<SimplexMask>(all.begin(), all.end()));
  return c;
}

const std::vector<SimplexMask>& SimplicialComplex::simplices(int d) const {
  static const std::vector<SimplexMask> kEmpty;
  if (d < 0 || d > dimension()) return kEmpty;
  return by_dim_[static_cast<std::size_t>(d)];
}

bool SimplicialComplex::contains(SimplexMask s) const {
  int d = simplex_dimension(s);
  if (d < 0 || d > dimension()) return false;
  const auto& level = by_dim_[static_cast<std::size_t>(d)];
  return std::binary_search(level.begin(), level.end(), s, mask_less);
}

std::size_t SimplicialComplex::total_simplices() const {
  std::size_t n = 0;
  for (const auto& level : by_dim_) n += level.size();
  return n;
}

SimplicialComplex to_simplicial_complex(const ModelSupport& s) {
  if (!is_hierarchical(s))
    throw std::invalid_argument(
        "to_simplicial_complex: support is not hierarchically closed");
  std::vector<SimplexMask> simplices;
  simplices.reserve(s.size());
  for (const Term& t : s) simplices.push_back(t.mask());
  SimplicialComplex c;
  // already closed, so from_simplices' check passes; reuse it for safety
  return SimplicialComplex::from_simplices(std::move(simplices),
                                           s.variable_count());
}

ModelSupport support_of_complex(const SimplicialComplex& c, int p) {
  std::vector<Term> terms;
  for (int d = 0; d <= c.dimension(); ++d)
    for (SimplexMask s : c.simplices(d)) terms.push_back(Term(s));
  return ModelSupport(std::move(terms), p);
}

BoundaryMatrix::BoundaryMatrix(std::size_t rows, std::size_t cols,
                               int chain_dim)
    : rows_(rows),
      cols_(cols),
      words_per_row_(cols == 0 ? 1 : (cols + 63) / 64),
      dim_(chain_dim),
      words_(rows * words_per_row_, 0) {}

int BoundaryMatrix::column_ones(std::size_t c) const {
  int n = 0;
  for (std::size_t r = 0; r < rows_; ++r) n += at(r, c) ? 1 : 0;
  return n;
}

BoundaryMatrix BoundaryMatrix::multiply(const BoundaryMatrix& rhs) const {
  if (cols_ != rhs.rows())
    throw std::invalid_argument("BoundaryMatrix::multiply: shape mismatch");
  BoundaryMatrix out(rows_, rhs.cols(), rhs.chain_dimension());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = 0; k < cols_; ++k) {
      if (!at(r, k)) continue;
      // out.row(r) ^= rhs.row(k)
      for (std::size_t w = 0; w < out.words_per_row_; ++w)
        out.words_[r * out.words_per_row_ + w] ^=
            rhs.words_[k * rhs.words_per_row_ + w];
    }
  }
  return out;
}

bool BoundaryMatrix::is_zero() const {
  for (std::uint64_t w : words_) {
    if (w != 0) return false;
  }
  return true;
}

BoundaryMatrix boundary_matrix(const SimplicialComplex& c, int d) {
  if (d < 1)
    throw std::invalid_argument("boundary_matrix: dimension must be >= 1");
  const auto& rows = c.simplices(d - 1);
  const auto& cols = c.simplices(d);
  BoundaryMatrix m(rows.size(), cols.size(), d);
  m.row_labels() = rows;
  m.col_labels() = cols;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    SimplexMask s = cols[i];
    SimplexMask v = s;
    while (v) {
      SimplexMask low = v & (~v + 1);
      SimplexMask facet = s ^ low;
      auto it = std::lower_bound(rows.begin(), rows.end(), facet, mask_less);
      m.set(static_cast<std::size_t>(it - rows.begin()), i);
      v &= v - 1;
    }
  }
  return m;
}

int z2_reduce(BoundaryMatrix m) {
  const std::size_t nr = m.rows_, nc = m.cols_, wpr = m.words_per_row_;
  std::vector<std::uint64_t>& w = m.words_;
  auto get = [&](std::size_t r, std::size_t c) -> bool {
    return (w[r * wpr + c / 64] >> (c % 64)) & 1u;
  };
  auto swap_rows = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < wpr; ++i)
      std::swap(w[a * wpr + i], w[b * wpr + i]);
  };
  auto swap_cols = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t r = 0; r < nr; ++r) {
      bool va = get(r, a), vb = get(r, b);
      if (va != vb) {
        w[r * wpr + a / 64] ^= (std::uint64_t{1} << (a % 64));
        w[r * wpr + b / 64] ^= (std::uint64_t{1} << (b % 64));
      }
    }
  };

  std::size_t x = 0;
  const std::size_t bound = std::min(nr, nc);
  while (x < bound) {
    // pivot search: first one in row-major order within the submatrix
    std::size_t pr = nr, pc = nc;
    for (std::size_t r = x; r < nr && pr == nr; ++r) {
      for (std::size_t c = x; c < nc; ++c) {
        if (get(r, c)) {
          pr = r;
          pc = c;
          break;
        }
      }
    }
    if (pr == nr) break;  // submatrix is all zero
    swap_rows(x, pr);
    swap_cols(x, pc);
    // cancel the remaining ones in column x (row additions) ...
    for (std::size_t r = x + 1; r < nr; ++r) {
      if (get(r, x)) {
        for (std::size_t i = 0; i < wpr; ++i)
          w[r * wpr + i] ^= w[x * wpr + i];
      }
    }
    // ... and in row x; with column x now clear below the pivot, adding
    // column x to column j only flips entry (x, j), so clear the row tail.
    for (std::size_t c = x + 1; c < nc; ++c) {
      if (get(x, c)) w[x * wpr + c / 64] ^= (std::uint64_t{1} << (c % 64));
    }
    ++x;
  }
  return static_cast<int>(x);
}

std::pair<BettiVector, HomologySummary> betti_numbers(
    const SimplicialComplex& c, int max_dim) {
  if (max_dim < 0) throw std::invalid_argument("betti_numbers: max_dim < 0");
  HomologySummary summary;
  summary.max_dim = max_dim;
  summary.rows.resize(static_cast<std::size_t>(max_dim) + 1);
  const int top = c.dimension();  // -1 for void

  // rank(A_{d}) for d = 1..top; ranks above the complex dimension are zero
  std::vector<long> rank(static_cast<std::size_t>(std::max(top, 0)) + 2, 0);
  for (int d = 1; d <= top; ++d)
    rank[static_cast<std::size_t>(d)] = z2_reduce(boundary_matrix(c, d));

  BettiVector betti(static_cast<std::size_t>(max_dim) + 1, 0);
  for (int d = 0; d <= max_dim; ++d) {
    auto& row = summary.rows[static_cast<std::size_t>(d)];
    row.m = static_cast<long>(c.count(d));
    long rank_d = (d >= 1 && d <= top) ? rank[static_cast<std::size_t>(d)] : 0;
    long rank_d1 = (d + 1 <= top) ? rank[static_cast<std::size_t>(d) + 1] : 0;
    row.z = (d == 0) ? row.m : row.m - rank_d;
    row.b = rank_d1;
    row.beta = row.z - row.b;
    betti[static_cast<std::size_t>(d)] = row.beta;
  }
  return {betti, summary};
}

SimplicialComplex d_closed_complex(int k, int m) {
  if (k < 1 || m < k + 2)
    throw std::invalid_argument("d_closed_complex: need k >= 1 and m >= k+2");
  if (m > 64) throw std::invalid_argument("d_closed_complex: m > 64");
  std::vector<SimplexMask> generators;
  std::vector<int> c(static_cast<std::size_t>(k) + 1);
  for (int i = 0; i <= k; ++i) c[static_cast<std::size_t>(i)] = i;
  const int r = k + 1;
  while (true) {
    SimplexMask mask = 0;
    for (int i : c) mask |= (SimplexMask{1} << i);
    generators.push_back(mask);
    int i = r - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == m - r + i) --i;
    if (i < 0) break;
    ++c[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < r; ++j)
      c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  }
  return SimplicialComplex::closure_of(generators, m);
}

long long binomial(int n, int r) {
  if (r < 0 || r > n) return 0;
  r = std::min(r, n - r);
  long long out = 1;
  for (int i = 1; i <= r; ++i) out = out * (n - r + i) / i;
  return out;
}

long long expected_independent_cycles(int k, int d) {
  if (k < 1 || d < k)
    throw std::invalid_argument(
        "expected_independent_cycles: need d >= k >= 1");
  return binomial(d + 1, k + 1);
}

}  // namespace topolasso
