#pragma once
#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ctau/linalg.hpp"
#include "ctau/num.hpp"

namespace ctau {

struct Arrow {
  std::string name;
  int src, tgt;
};

struct Quiver {
  std::vector<std::string> vnames;
  std::map<std::string, int> vindex;
  std::vector<Arrow> arrows;
  std::map<std::string, int> aindex;

  int add_vertex(const std::string& n) {
    auto it = vindex.find(n);
    if (it != vindex.end()) return it->second;
    vindex[n] = int(vnames.size());
    vnames.push_back(n);
    return int(vnames.size()) - 1;
  }
  int add_arrow(const std::string& n, int s, int t) {
    aindex[n] = int(arrows.size());
    arrows.push_back({n, s, t});
    return int(arrows.size()) - 1;
  }
  int vertex(const std::string& n) const {
    auto it = vindex.find(n);
    return it == vindex.end() ? -1 : it->second;
  }
  int arrow(const std::string& n) const {
    auto it = aindex.find(n);
    return it == aindex.end() ? -1 : it->second;
  }
  int nv() const { return int(vnames.size()); }
  int na() const { return int(arrows.size()); }
};

/* Arrow indices in application order: arrows[0] acts first. Textual terms are
   written right-to-left (composition order), so "ba" stores {a,b}. */
struct Path {
  int src = -1, tgt = -1;
  std::vector<int> arrows;
  int length() const { return int(arrows.size()); }
  friend bool operator==(const Path& p, const Path& q) {
    return p.src == q.src && p.tgt == q.tgt && p.arrows == q.arrows;
  }
  friend bool operator<(const Path& p, const Path& q) {
    return std::tie(p.src, p.tgt, p.arrows) < std::tie(q.src, q.tgt, q.arrows);
  }
};

inline Path trivial_path(int x) { return Path{x, x, {}}; }

/* First p, then q. */
inline Path path_then(const Path& p, const Path& q) {
  if (p.tgt != q.src) precondition_error("path composition mismatch");
  Path r{p.src, q.tgt, p.arrows};
  r.arrows.insert(r.arrows.end(), q.arrows.begin(), q.arrows.end());
  return r;
}

/* Relation term list: parallel paths, no duplicates, no zero coefficients. */
struct RelTerm {
  Rat coef;
  Path path;
};
using LinComb = std::vector<RelTerm>;

struct BoundQuiver {
  Quiver q;
  std::vector<LinComb> relations;
  int N = -1;  // nilpotency bound; set by check_admissible / algebra basis
  std::string name;

  bool monomial_ideal() const {
    for (auto& r : relations)
      if (r.size() != 1) return false;
    return true;
  }
};

std::string path_str(const BoundQuiver& bq, const Path& p);

/* Opposite algebra: arrows reversed, relation paths reversed. */
BoundQuiver opposite(const BoundQuiver& bq);

/* —— Path-space ideal reduction (length-graded linear algebra) ——
   Per ordered vertex pair: columns are all paths up to the working bound
   sorted longest-first, rows span {w·rho·u}; the reduced row-echelon form
   turns non-pivot columns into the normal-form basis of A(x,y). */
template <class K>
struct AlgebraBasisT {
  const BoundQuiver* bq = nullptr;
  int N = 0;       // least bound with every length-N path in the ideal
  int Lfinal = 0;  // paths enumerated up to this length (≥ N)

  struct PairData {
    std::vector<Path> cols;                    // sorted (length desc, arrows lex asc)
    std::map<std::vector<int>, int> colindex;  // arrows → column
    Mat<K> R;                                  // rref of the ideal span
    std::vector<int> pivots;
    std::vector<int> col_pivot_row;  // column → rref row, or -1 (normal form)
    std::vector<Path> basis;         // non-pivot columns
    std::vector<int> basis_col;      // their column ids
    std::map<std::vector<int>, int> basis_index;
  };
  std::vector<PairData> pd;  // x*nv + y
  int nv = 0;

  const PairData& pair(int x, int y) const { return pd[std::size_t(x) * nv + y]; }
  const std::vector<Path>& basis(int x, int y) const { return pair(x, y).basis; }
  int dim() const {
    int d = 0;
    for (auto& p : pd) d += int(p.basis.size());
    return d;
  }
  int basis_index(const Path& p) const {
    auto& P = pair(p.src, p.tgt);
    auto it = P.basis_index.find(p.arrows);
    return it == P.basis_index.end() ? -1 : it->second;
  }

  using Comb = std::vector<std::pair<K, Path>>;

  /* Normal form of a path: empty comb when the path lies in the ideal. */
  Comb reduce_path(const Path& p) const {
    if (p.length() >= N) return {};
    auto& P = pair(p.src, p.tgt);
    auto it = P.colindex.find(p.arrows);
    if (it == P.colindex.end()) precondition_error("path outside enumerated range");
    int c = it->second;
    Comb out;
    if (P.col_pivot_row[c] < 0) {
      out.push_back({K(1), p});
      return out;
    }
    int row = P.col_pivot_row[c];
    for (std::size_t j = 0; j < P.basis.size(); j++) {
      K v = P.R.at(row, P.basis_col[j]);
      if (!(v == K(0))) out.push_back({-v, P.basis[j]});
    }
    return out;
  }
  Comb reduce(const Comb& lc) const {
    std::map<Path, K> acc;
    for (auto& [c, p] : lc)
      for (auto& [c2, p2] : reduce_path(p)) acc[p2] += c * c2;
    Comb out;
    for (auto& [p, c] : acc)
      if (!(c == K(0))) out.push_back({c, p});
    return out;
  }
  bool is_zero(const Path& p) const { return reduce_path(p).empty(); }

  /* nf(first p, then q). */
  Comb mult(const Path& p, const Path& q) const {
    if (p.tgt != q.src) return {};
    if (p.length() + q.length() >= N) return {};
    return reduce_path(path_then(p, q));
  }

  static AlgebraBasisT build(const BoundQuiver& b, int cap = 32);
};

template <class K>
AlgebraBasisT<K> AlgebraBasisT<K>::build(const BoundQuiver& b, int cap) {
  AlgebraBasisT<K> ab;
  ab.bq = &b;
  ab.nv = b.q.nv();
  int maxrel = 2;
  for (auto& rel : b.relations) {
    if (rel.empty()) precondition_error("empty relation");
    int s = rel[0].path.src, t = rel[0].path.tgt;
    for (auto& tm : rel) {
      if (tm.path.length() < 2) precondition_error("not admissible: relation term of length < 2");
      if (tm.path.src != s || tm.path.tgt != t) precondition_error("relation terms not parallel");
      maxrel = std::max(maxrel, tm.path.length());
    }
  }

  // levels[l]: all paths of length l, grouped by (src, tgt)
  using PairKey = std::pair<int, int>;
  std::vector<std::map<PairKey, std::vector<Path>>> levels;
  levels.emplace_back();
  for (int x = 0; x < ab.nv; x++) levels[0][{x, x}].push_back(trivial_path(x));
  auto extend_to = [&](int upto) {
    while (int(levels.size()) - 1 < upto) {
      std::map<PairKey, std::vector<Path>> nxt;
      std::size_t count = 0;
      for (auto& [key, ps] : levels.back())
        for (auto& p : ps)
          for (int ai = 0; ai < b.q.na(); ai++) {
            if (b.q.arrows[std::size_t(ai)].src != p.tgt) continue;
            Path q = p;
            q.arrows.push_back(ai);
            q.tgt = b.q.arrows[std::size_t(ai)].tgt;
            nxt[{q.src, q.tgt}].push_back(q);
            if (++count > 200000) budget_error("path count explosion while searching for the nilpotency bound");
          }
      levels.push_back(std::move(nxt));
    }
  };
  auto paths_at = [&](int x, int y, int len) -> const std::vector<Path>* {
    auto it = levels[std::size_t(len)].find({x, y});
    return it == levels[std::size_t(len)].end() ? nullptr : &it->second;
  };

  int L = maxrel;
  for (;;) {
    if (L > cap) precondition_error("not admissible: no nilpotency bound within length cap " + std::to_string(cap));
    extend_to(L);

    ab.pd.assign(std::size_t(ab.nv) * ab.nv, PairData{});
    for (int x = 0; x < ab.nv; x++)
      for (int y = 0; y < ab.nv; y++) {
        PairData& P = ab.pd[std::size_t(x) * ab.nv + y];
        for (int len = L; len >= 0; len--)
          if (auto* ps = paths_at(x, y, len))
            for (auto& p : *ps) P.cols.push_back(p);
        std::sort(P.cols.begin(), P.cols.end(), [](const Path& p, const Path& q) {
          if (p.length() != q.length()) return p.length() > q.length();
          return p.arrows < q.arrows;
        });
        for (int c = 0; c < int(P.cols.size()); c++) P.colindex[P.cols[std::size_t(c)].arrows] = c;

        std::vector<std::vector<K>> rows;
        for (auto& rel : b.relations) {
          int s = rel[0].path.src, t = rel[0].path.tgt;
          int m = 0;
          for (auto& tm : rel) m = std::max(m, tm.path.length());
          for (int a = 0; a + m <= L; a++) {
            auto* ws = paths_at(x, s, a);
            if (!ws) continue;
            for (int bb = 0; a + m + bb <= L; bb++) {
              auto* us = paths_at(t, y, bb);
              if (!us) continue;
              for (auto& w : *ws)
                for (auto& u : *us) {
                  std::vector<K> row(P.cols.size(), K(0));
                  for (auto& tm : rel) {
                    Path full = path_then(path_then(w, tm.path), u);
                    row[std::size_t(P.colindex.at(full.arrows))] += FieldOps<K>::from_rat(tm.coef);
                  }
                  rows.push_back(std::move(row));
                  if (rows.size() > 200000) budget_error("relation span explosion");
                }
            }
          }
        }
        Mat<K> M(int(rows.size()), int(P.cols.size()));
        for (int i = 0; i < M.rows; i++)
          for (int j = 0; j < M.cols; j++) M.at(i, j) = rows[std::size_t(i)][std::size_t(j)];
        Rref<K> rr = rref(M);
        P.R = rr.R;
        P.pivots = rr.pivots;
        P.col_pivot_row.assign(P.cols.size(), -1);
        for (int i = 0; i < int(P.pivots.size()); i++) P.col_pivot_row[std::size_t(P.pivots[std::size_t(i)])] = i;
      }

    // least l such that every length-l path lies in the span
    auto col_dead = [&](const PairData& P, int c) {
      std::vector<K> v(P.cols.size(), K(0));
      v[std::size_t(c)] = K(1);
      for (int i = 0; i < int(P.pivots.size()); i++) {
        K coef = v[std::size_t(P.pivots[std::size_t(i)])];
        if (coef == K(0)) continue;
        for (int j = 0; j < int(P.cols.size()); j++) v[std::size_t(j)] -= coef * P.R.at(i, j);
      }
      for (auto& e : v)
        if (!(e == K(0))) return false;
      return true;
    };
    int lstar = -1;
    for (int l = 1; l <= L && lstar < 0; l++) {
      bool all_dead = true;
      for (auto& P : ab.pd)
        for (int c = 0; c < int(P.cols.size()) && all_dead; c++)
          if (P.cols[std::size_t(c)].length() == l && !col_dead(P, c)) all_dead = false;
      if (all_dead) lstar = l;
    }
    if (lstar >= 0 && L >= lstar + maxrel - 2) {
      ab.N = lstar;
      ab.Lfinal = L;
      break;
    }
    if (lstar >= 0)
      L = lstar + maxrel - 2;
    else
      L++;
  }

  for (auto& P : ab.pd) {
    std::vector<int> bc;
    for (int c = 0; c < int(P.cols.size()); c++)
      if (P.col_pivot_row[std::size_t(c)] < 0 && P.cols[std::size_t(c)].length() < ab.N) bc.push_back(c);
    std::sort(bc.begin(), bc.end(), [&](int c1, int c2) {
      const Path &p = P.cols[std::size_t(c1)], &q = P.cols[std::size_t(c2)];
      if (p.length() != q.length()) return p.length() < q.length();
      return p.arrows < q.arrows;
    });
    for (int c : bc) {
      P.basis_index[P.cols[std::size_t(c)].arrows] = int(P.basis.size());
      P.basis.push_back(P.cols[std::size_t(c)]);
      P.basis_col.push_back(c);
    }
  }
  return ab;
}

/* Computes the nilpotency bound over Q and stores it in bq.N. Errors when a
   relation term has length < 2 or no bound exists within the cap. */
int check_admissible(BoundQuiver& bq, int cap = 32);

/* —— Walks and the fundamental group —— */
struct WalkStep {
  int arrow;
  bool fwd;
};
struct Walk {
  int src = -1, tgt = -1;
  std::vector<WalkStep> steps;  // application order
};

Walk walk_inverse(const Quiver& q, const Walk& w);
Walk walk_then(const Quiver& q, const Walk& a, const Walk& b);
std::string walk_str(const BoundQuiver& bq, const Walk& w);

struct MinimalRelations {
  std::vector<LinComb> minimal;   // ≥ 2 terms, no proper sub-sum in the ideal
  std::vector<LinComb> monomial;  // single-term relations, tagged separately
};
MinimalRelations minimal_relations(const BoundQuiver& bq, int term_cap = 12);

}  // namespace ctau

#include "ctau/group.hpp"

namespace ctau {

/* Presentation of pi_1(Q,I) at x0: free on one generator per non-tree arrow
   (named by the chord), modulo relator words from minimal-relation homotopies. */
struct FundGroup {
  const BoundQuiver* bq = nullptr;
  int x0 = -1;
  std::vector<int> tree_arrows;
  std::vector<int> chord_arrows;        // generator order
  std::vector<std::string> gen_names;   // chord arrow names
  std::vector<Walk> tree_walk;          // x0 → v inside the tree
  std::vector<GroupElem> relators;      // nontrivial, post-simplification
  std::vector<int> live_gens;           // generators surviving simplification
  std::vector<bool> gen_killed;         // killed by a length-1 relator
  bool is_free = false;                 // no relators survive
  int free_rank() const { return int(live_gens.size()); }
};

FundGroup fundamental_group(const BoundQuiver& bq, int x0);

enum class HomotopyProfile { Free, FreeAbelian, Undecidable };
struct WalkClass {
  GroupElem word;  // over the presentation generators (killed ones erased)
  HomotopyProfile profile;
};
WalkClass walk_homotopy_class(const FundGroup& fg, const Walk& w);

}  // namespace ctau
