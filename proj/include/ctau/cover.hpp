#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ctau/group.hpp"
#include "ctau/tautilt.hpp"

namespace ctau {

/* ================================ Gradings ================================
   A grading assigns a group element to every arrow.  Walks pick up weights by
   left multiplication in application order, so the weight of a composite walk
   is the product of the step weights with the earliest step rightmost. */

struct Grading {
  const BoundQuiver* bq = nullptr;
  bool abelian = false;
  int rank = 0;
  std::vector<std::string> names;  // generator display names
  std::vector<GroupElem> weight;   // one entry per arrow; identity when ungraded

  GroupElem identity() const { return abelian ? abelian_identity(rank) : free_identity(rank); }
};

inline Grading make_grading(const BoundQuiver& bq, bool abelian, std::vector<std::string> names) {
  Grading g;
  g.bq = &bq;
  g.abelian = abelian;
  g.rank = int(names.size());
  g.names = std::move(names);
  g.weight.assign(std::size_t(bq.q.na()), g.identity());
  return g;
}

inline Grading trivial_grading(const BoundQuiver& bq) { return make_grading(bq, true, {}); }

inline GroupElem path_weight(const Grading& g, const Path& p) {
  GroupElem acc = g.identity();
  for (int a : p.arrows) acc = mul(g.weight[std::size_t(a)], acc);
  return acc;
}

inline GroupElem walk_weight(const Grading& g, const Walk& w) {
  GroupElem acc = g.identity();
  for (auto& s : w.steps) {
    const GroupElem& wa = g.weight[std::size_t(s.arrow)];
    acc = mul(s.fwd ? wa : inv(wa), acc);
  }
  return acc;
}

struct HomogeneityReport {
  bool ok = true;
  std::vector<std::string> violations;
};

/* Every relation must have all its terms of equal degree; otherwise the
   relation ideal is not generated in single degrees and no cover exists. */
inline HomogeneityReport check_homogeneous(const Grading& g) {
  HomogeneityReport rep;
  const BoundQuiver& bq = *g.bq;
  for (std::size_t ri = 0; ri < bq.relations.size(); ri++) {
    const LinComb& rel = bq.relations[ri];
    if (rel.empty()) continue;
    GroupElem w0 = path_weight(g, rel[0].path);
    for (auto& t : rel) {
      if (!(path_weight(g, t.path) == w0)) {
        rep.ok = false;
        std::ostringstream os;
        os << "relation " << ri << " mixes degrees: " << path_str(bq, rel[0].path) << " has degree "
           << word_str(w0, g.names) << " but " << path_str(bq, t.path) << " has degree "
           << word_str(path_weight(g, t.path), g.names);
        rep.violations.push_back(os.str());
        break;
      }
    }
  }
  return rep;
}

/* The finest grading a tree presentation of the walk groupoid affords: tree
   arrows weightless, each chord weighted by its own free generator.  The
   weight of a closed walk is then exactly its class in the chord free group. */
inline Grading universal_grading(const BoundQuiver& bq, const FundGroup& fg) {
  Grading g = make_grading(bq, false, fg.gen_names);
  int n = int(fg.chord_arrows.size());
  for (int i = 0; i < n; i++) g.weight[std::size_t(fg.chord_arrows[std::size_t(i)])] = free_gen(n, i);
  return g;
}

/* Abelianization of a free grading: same generators, commuting images. */
inline Grading abelianized_grading(const Grading& g) {
  if (g.abelian) precondition_error("abelianized_grading expects a free grading");
  Grading out;
  out.bq = g.bq;
  out.abelian = true;
  out.rank = g.rank;
  out.names = g.names;
  for (auto& w : g.weight) {
    GroupElem e = abelian_identity(g.rank);
    e.vec = abelianize(w);
    out.weight.push_back(e);
  }
  return out;
}

/* Rank-one quotient grading along the first tower stage.  Deeper stages are
   cut out by non-normal subgroups, so they are not group gradings at all;
   they are reached through build_stage_window instead. */
inline Grading quotient_grading(const Grading& univ, Tower& t, int stage) {
  if (univ.abelian) precondition_error("quotient_grading expects the free universal grading");
  if (univ.rank != int(t.base_names.size())) precondition_error("grading rank does not match the tower");
  if (stage == 0) return trivial_grading(*univ.bq);
  if (stage >= 2)
    precondition_error(
        "stage quotients beyond the first are not group gradings; "
        "build the stage window instead");
  Grading out;
  out.bq = univ.bq;
  out.abelian = true;
  out.rank = 1;
  out.names = {"g1"};
  for (auto& w : univ.weight) {
    GroupElem e = abelian_identity(1);
    e.vec[0] = quotient_hom_to_Z(t, w, 1);
    out.weight.push_back(e);
  }
  return out;
}

/* ============================== Cover windows =============================
   A finite ball of the (possibly infinite) cover, carried as an honest bound
   quiver.  Vertices are pairs (base vertex, fiber label); the fiber label of
   the head of a lifted arrow is obtained by left-multiplying the arrow weight
   onto the tail label and, for coset windows, re-canonicalizing.  Relations
   are the fully visible lifts of the base relations plus every window path of
   maximal length, which keeps truncation at the rim sound. */

struct CoverWindow {
  BoundQuiver wq;
  const BoundQuiver* base = nullptr;
  int center = -1;
  int radius = 0;
  int N = 0;        // base nilpotency bound
  bool galois = false;  // true when the deck translation action is available

  std::vector<std::string> names;   // fiber generator display names
  std::vector<GroupElem> weights;   // per base arrow
  std::function<GroupElem(const GroupElem&)> canon;  // fiber canonicalizer (coset windows)

  std::vector<int> base_vertex;     // window vertex -> base vertex
  std::vector<GroupElem> fiber;     // window vertex -> canonical fiber label
  std::vector<int> dist;            // window vertex -> BFS distance from the center
  std::vector<int> base_arrow;      // window arrow -> base arrow
  std::map<std::pair<int, std::string>, int> vix;  // (base vertex, fiber key) -> window vertex
  std::map<std::pair<int, int>, int> aix;          // (base arrow, window tail) -> window arrow

  GroupElem canonical(const GroupElem& g) const { return canon ? canon(g) : g; }

  /* Fiber step across a base arrow: along the arrow or against it. */
  GroupElem step(const GroupElem& h, int a, bool along) const {
    const GroupElem& w = weights[std::size_t(a)];
    return canonical(mul(along ? w : inv(w), h));
  }

  int find(int x, const GroupElem& g) const {
    auto it = vix.find({x, elem_key(canonical(g))});
    return it == vix.end() ? -1 : it->second;
  }
  int find_arrow(int a, int tail) const {
    auto it = aix.find({a, tail});
    return it == aix.end() ? -1 : it->second;
  }

  bool interior(int v) const { return dist[std::size_t(v)] <= radius - N; }
  bool tau_margin(int v) const { return dist[std::size_t(v)] <= radius - 2 * N; }

  std::string label(int v) const {
    std::string s = word_str(fiber[std::size_t(v)], names);
    for (auto& c : s)
      if (c == ' ') c = '.';
    return s;
  }
};

namespace detail {

inline int window_nilpotency(const BoundQuiver& bq) {
  if (bq.N >= 2) return bq.N;
  return AlgebraBasisT<Rat>::build(bq).N;
}

/* Shared window builder.  `canon` may be empty (plain grading windows). */
inline CoverWindow build_window_impl(const BoundQuiver& bq, std::vector<GroupElem> weights,
                                     std::vector<std::string> names, GroupElem id,
                                     std::function<GroupElem(const GroupElem&)> canon, bool galois,
                                     int center, int radius) {
  if (center < 0 || center >= bq.q.nv()) precondition_error("window center is not a vertex");
  CoverWindow cw;
  cw.base = &bq;
  cw.center = center;
  cw.radius = radius;
  cw.N = window_nilpotency(bq);
  cw.galois = galois;
  cw.names = std::move(names);
  cw.weights = std::move(weights);
  cw.canon = std::move(canon);
  if (radius < cw.N) precondition_error("window: radius below the nilpotency bound");

  cw.wq.name = bq.name + "|window";
  cw.wq.N = cw.N;

  auto add = [&](int x, const GroupElem& h, int d) -> int {
    int v = cw.wq.q.add_vertex(bq.q.vnames[std::size_t(x)] + "|" +
                               [&] {
                                 std::string s = word_str(h, cw.names);
                                 for (auto& c : s)
                                   if (c == ' ') c = '.';
                                 return s;
                               }());
    cw.base_vertex.push_back(x);
    cw.fiber.push_back(h);
    cw.dist.push_back(d);
    cw.vix[{x, elem_key(h)}] = v;
    return v;
  };

  std::deque<int> frontier;
  frontier.push_back(add(center, cw.canonical(id), 0));
  while (!frontier.empty()) {
    int v = frontier.front();
    frontier.pop_front();
    int d = cw.dist[std::size_t(v)];
    if (d == radius) continue;
    int x = cw.base_vertex[std::size_t(v)];
    GroupElem h = cw.fiber[std::size_t(v)];  // by value: add() grows cw.fiber
    for (int a = 0; a < bq.q.na(); a++) {
      const Arrow& A = bq.q.arrows[std::size_t(a)];
      if (A.src == x) {
        GroupElem h2 = cw.step(h, a, true);
        if (cw.find(A.tgt, h2) < 0) frontier.push_back(add(A.tgt, h2, d + 1));
      }
      if (A.tgt == x) {
        GroupElem h2 = cw.step(h, a, false);
        if (cw.find(A.src, h2) < 0) frontier.push_back(add(A.src, h2, d + 1));
      }
    }
  }

  for (int v = 0; v < cw.wq.q.nv(); v++) {
    int x = cw.base_vertex[std::size_t(v)];
    for (int a = 0; a < bq.q.na(); a++) {
      const Arrow& A = bq.q.arrows[std::size_t(a)];
      if (A.src != x) continue;
      int hv = cw.find(A.tgt, cw.step(cw.fiber[std::size_t(v)], a, true));
      if (hv < 0) continue;
      int wa = cw.wq.q.add_arrow(A.name + "|" + cw.label(v), v, hv);
      cw.base_arrow.push_back(a);
      cw.aix[{a, v}] = wa;
    }
  }

  // Lift each base relation at every window vertex where all terms fit.
  std::set<std::vector<int>> monomial_rows;
  for (int v = 0; v < cw.wq.q.nv(); v++) {
    int x = cw.base_vertex[std::size_t(v)];
    for (auto& rel : bq.relations) {
      if (rel.empty() || rel[0].path.src != x) continue;
      LinComb lifted;
      int head = -1;
      bool ok = true;
      for (auto& term : rel) {
        Path lp = trivial_path(v);
        int cur = v;
        for (int a : term.path.arrows) {
          int wa = cw.find_arrow(a, cur);
          if (wa < 0) {
            ok = false;
            break;
          }
          lp.arrows.push_back(wa);
          cur = cw.wq.q.arrows[std::size_t(wa)].tgt;
        }
        if (!ok) break;
        lp.tgt = cur;
        if (head < 0)
          head = cur;
        else if (head != cur)
          precondition_error("internal: homogeneous relation lift has mismatched heads");
        lifted.push_back({term.coef, lp});
      }
      if (!ok || lifted.empty()) continue;
      cw.wq.relations.push_back(lifted);
      if (lifted.size() == 1) monomial_rows.insert(lifted[0].path.arrows);
    }
  }

  // Truncation: every window path of the nilpotency length is declared zero.
  std::function<void(int, Path&)> walk_paths = [&](int v, Path& p) {
    if (p.length() == cw.N) {
      p.tgt = v;
      if (!monomial_rows.count(p.arrows)) {
        cw.wq.relations.push_back({{Rat(1), p}});
        monomial_rows.insert(p.arrows);
      }
      return;
    }
    for (int a = 0; a < bq.q.na(); a++) {
      int wa = cw.find_arrow(a, v);
      if (wa < 0 || bq.q.arrows[std::size_t(a)].src != cw.base_vertex[std::size_t(v)]) continue;
      p.arrows.push_back(wa);
      walk_paths(cw.wq.q.arrows[std::size_t(wa)].tgt, p);
      p.arrows.pop_back();
    }
  };
  for (int v = 0; v < cw.wq.q.nv(); v++) {
    Path p = trivial_path(v);
    walk_paths(v, p);
  }
  return cw;
}

}  // namespace detail

inline CoverWindow build_window(const Grading& g, int center, int radius) {
  auto rep = check_homogeneous(g);
  if (!rep.ok) precondition_error("grading is not homogeneous: " + rep.violations[0]);
  return detail::build_window_impl(*g.bq, g.weight, g.names, g.identity(), nullptr, true, center, radius);
}

/* Window of the coset cover at a tower stage.  Fibers are the canonical coset
   representatives a1^{-r1}···as^{-rs}; crossing an arrow multiplies the
   universal weight on the left and re-canonicalizes.  The subgroup is not
   normal beyond the first stage, so there is no deck action: galois=false. */
inline CoverWindow build_stage_window(const Grading& univ, Tower& t, int stage, int center, int radius) {
  if (univ.abelian) precondition_error("build_stage_window expects the free universal grading");
  if (univ.rank != int(t.base_names.size())) precondition_error("grading rank does not match the tower");
  if (stage < 1) precondition_error("stage windows start at stage 1");
  auto rep = check_homogeneous(univ);
  if (!rep.ok) precondition_error("grading is not homogeneous: " + rep.violations[0]);
  t.ensure_stage(stage);
  std::vector<GroupElem> a_elems;
  for (int i = 1; i <= stage; i++) a_elems.push_back(t.a_elem(i));
  Tower* tp = &t;
  auto canon = [tp, stage, a_elems](const GroupElem& h) {
    TailRewrite tr = rewrite_tail(*tp, inv(h), stage);
    GroupElem tail = free_identity(h.rank);
    for (int i = stage; i >= 1; i--) tail = mul(tail, pow(a_elems[std::size_t(i - 1)], tr.r[std::size_t(i - 1)]));
    return inv(tail);
  };
  return detail::build_window_impl(*univ.bq, univ.weight, univ.names, univ.identity(), canon, false, center,
                                   radius);
}

/* ========================= Covering-property check ======================== */

struct CoveringReport {
  bool ok = true;
  int checked = 0;
  std::vector<std::string> violations;
};

/* At every interior window vertex the arriving and departing basis paths,
   summed over a target fiber, must map bijectively onto the base basis.  The
   check builds the window path algebra, so keep it to small windows. */
template <class K>
CoveringReport covering_check(const CoverWindow& cw, const AlgebraBasisT<K>& base_ab, int cap = 32) {
  CoveringReport out;
  AlgebraBasisT<K> wab = AlgebraBasisT<K>::build(cw.wq, cap);
  const BoundQuiver& bq = *cw.base;
  auto project = [&](const Path& p) {
    Path q = trivial_path(cw.base_vertex[std::size_t(p.src)]);
    for (int wa : p.arrows) q.arrows.push_back(cw.base_arrow[std::size_t(wa)]);
    q.tgt = cw.base_vertex[std::size_t(p.tgt)];
    return q;
  };
  for (int v = 0; v < cw.wq.q.nv(); v++) {
    if (!cw.interior(v)) continue;
    int a = cw.base_vertex[std::size_t(v)];
    for (int b = 0; b < bq.q.nv(); b++) {
      for (int dir = 0; dir < 2; dir++) {
        int want = int(base_ab.basis(dir == 0 ? a : b, dir == 0 ? b : a).size());
        std::vector<Path> got;
        for (int z = 0; z < cw.wq.q.nv(); z++) {
          if (cw.base_vertex[std::size_t(z)] != b) continue;
          const auto& paths = dir == 0 ? wab.basis(v, z) : wab.basis(z, v);
          got.insert(got.end(), paths.begin(), paths.end());
        }
        Mat<K> m(want, int(got.size()));
        bool fits = true;
        for (std::size_t c = 0; c < got.size(); c++) {
          for (auto& [coef, p] : base_ab.reduce_path(project(got[c]))) {
            int r = base_ab.basis_index(p);
            if (r < 0) {
              fits = false;
              break;
            }
            m.at(r, int(c)) += coef;
          }
          if (!fits) break;
        }
        out.checked++;
        if (!fits || int(got.size()) != want || rank(m) != want) {
          out.ok = false;
          std::ostringstream os;
          os << (dir == 0 ? "departing" : "arriving") << " paths at " << cw.wq.q.vnames[std::size_t(v)]
             << " over base vertex " << bq.q.vnames[std::size_t(b)] << ": window count " << got.size()
             << " vs base dimension " << want;
          out.violations.push_back(os.str());
        }
      }
    }
  }
  return out;
}

/* ============================ Push-down functor =========================== */

namespace detail {

/* Window vertices over each target slot, in window-id order, plus the
   resulting offsets of each window block inside the assembled slot. */
template <class K>
void fiber_layout(const CoverWindow& cw, const RepT<K>& M, int slots,
                  const std::function<int(int)>& slot_of, std::vector<int>& slot_dim,
                  std::vector<int>& offset) {
  slot_dim.assign(std::size_t(slots), 0);
  offset.assign(std::size_t(cw.wq.q.nv()), -1);
  for (int v = 0; v < cw.wq.q.nv(); v++) {
    int s = slot_of(v);
    if (s < 0) {
      if (M.dim[std::size_t(v)] > 0)
        precondition_error("window: the support projects outside the target window; enlarge the radius");
      continue;
    }
    offset[std::size_t(v)] = slot_dim[std::size_t(s)];
    slot_dim[std::size_t(s)] += M.dim[std::size_t(v)];
  }
}

template <class K>
RepT<K> assemble_push(const CoverWindow& cw, const RepT<K>& M, const BoundQuiver& tgt,
                      const std::function<int(int)>& slot_of, const std::function<int(int, int)>& arrow_of) {
  if (M.bq != &cw.wq) precondition_error("push-down input does not live on this window");
  for (int v = 0; v < cw.wq.q.nv(); v++)
    if (M.dim[std::size_t(v)] > 0 && !cw.interior(v))
      precondition_error("window: support touches the boundary; enlarge the radius");
  std::vector<int> slot_dim, offset;
  fiber_layout(cw, M, tgt.q.nv(), slot_of, slot_dim, offset);
  std::vector<Mat<K>> mats;
  for (int b = 0; b < tgt.q.na(); b++) {
    const Arrow& A = tgt.q.arrows[std::size_t(b)];
    mats.push_back(Mat<K>(slot_dim[std::size_t(A.tgt)], slot_dim[std::size_t(A.src)]));
  }
  for (int wa = 0; wa < cw.wq.q.na(); wa++) {
    const Arrow& WA = cw.wq.q.arrows[std::size_t(wa)];
    if (M.dim[std::size_t(WA.src)] == 0 || M.dim[std::size_t(WA.tgt)] == 0) continue;
    int b = arrow_of(wa, WA.src);
    if (b < 0) precondition_error("window: an arrow at the support has no image in the target window");
    const Mat<K>& blk = M.mats[std::size_t(wa)];
    Mat<K>& dst = mats[std::size_t(b)];
    int r0 = offset[std::size_t(WA.tgt)], c0 = offset[std::size_t(WA.src)];
    for (int i = 0; i < blk.rows; i++)
      for (int j = 0; j < blk.cols; j++) dst.at(r0 + i, c0 + j) = blk.at(i, j);
  }
  RepT<K> out = make_rep(tgt, std::move(slot_dim), std::move(mats));
  return out;
}

}  // namespace detail

/* F_lambda: sum the fibers.  Requires interior support so that every arrow
   incident to the support is visible in the window. */
template <class K>
RepT<K> push_down(const CoverWindow& cw, const RepT<K>& M) {
  const BoundQuiver& bq = *cw.base;
  return detail::assemble_push<K>(
      cw, M, bq, [&](int v) { return cw.base_vertex[std::size_t(v)]; },
      [&](int wa, int) { return cw.base_arrow[std::size_t(wa)]; });
}

/* Intermediate push-down from a finer window onto a coset-stage window over
   the same base: fibers are funneled through the stage canonicalizer. */
template <class K>
RepT<K> push_down_to(const CoverWindow& top, const CoverWindow& mid, const RepT<K>& M) {
  if (top.base != mid.base) precondition_error("windows cover different algebras");
  if (!mid.canon) precondition_error("the intermediate window carries no fiber projection; use a stage window");
  auto slot_of = [&](int v) { return mid.find(top.base_vertex[std::size_t(v)], top.fiber[std::size_t(v)]); };
  auto arrow_of = [&](int wa, int tail) {
    int mt = slot_of(tail);
    if (mt < 0) return -1;
    return mid.find_arrow(top.base_arrow[std::size_t(wa)], mt);
  };
  return detail::assemble_push<K>(top, M, mid.wq, slot_of, arrow_of);
}

/* Push-down of a morphism: fiber-diagonal block assembly.  The returned map
   binds the supplied pushed-down source and target. */
template <class K>
RepMapT<K> push_down_map(const CoverWindow& cw, const RepT<K>& M, const RepT<K>& N, const RepMapT<K>& f,
                         const RepT<K>& pdM, const RepT<K>& pdN) {
  const BoundQuiver& bq = *cw.base;
  auto slot = [&](int v) { return cw.base_vertex[std::size_t(v)]; };
  std::vector<int> mdim, moff, ndim, noff;
  detail::fiber_layout(cw, M, bq.q.nv(), slot, mdim, moff);
  detail::fiber_layout(cw, N, bq.q.nv(), slot, ndim, noff);
  if (mdim != pdM.dim || ndim != pdN.dim) precondition_error("pushed modules do not match the morphism");
  RepMapT<K> out = zero_map(pdM, pdN);
  for (int v = 0; v < cw.wq.q.nv(); v++) {
    int x = slot(v);
    const Mat<K>& blk = f.f[std::size_t(v)];
    for (int i = 0; i < blk.rows; i++)
      for (int j = 0; j < blk.cols; j++)
        out.f[std::size_t(x)].at(noff[std::size_t(v)] + i, moff[std::size_t(v)] + j) = blk.at(i, j);
  }
  return out;
}

/* ============================ Deck translation ============================ */

namespace detail {

template <class K>
RepT<K> translate_impl(const CoverWindow& cw, const RepT<K>& M, const GroupElem& g, bool require_interior) {
  if (!cw.galois) precondition_error("translation needs a group window, not a coset window");
  std::vector<int> dims(std::size_t(cw.wq.q.nv()), 0);
  int moved = 0;
  for (int v = 0; v < cw.wq.q.nv(); v++) {
    int src = cw.find(cw.base_vertex[std::size_t(v)], mul(cw.fiber[std::size_t(v)], g));
    if (src >= 0 && M.dim[std::size_t(src)] > 0) {
      dims[std::size_t(v)] = M.dim[std::size_t(src)];
      moved += dims[std::size_t(v)];
      if (require_interior && !cw.interior(v))
        precondition_error("window: the translated support leaves the interior; enlarge the radius");
    }
  }
  if (moved != M.total()) precondition_error("window: the translate leaves the window; enlarge the radius");
  std::vector<Mat<K>> mats;
  for (int wa = 0; wa < cw.wq.q.na(); wa++) {
    const Arrow& WA = cw.wq.q.arrows[std::size_t(wa)];
    int rows = M.bq == &cw.wq ? dims[std::size_t(WA.tgt)] : dims[std::size_t(WA.src)];
    int cols = M.bq == &cw.wq ? dims[std::size_t(WA.src)] : dims[std::size_t(WA.tgt)];
    Mat<K> m(rows, cols);
    if (dims[std::size_t(WA.src)] > 0 && dims[std::size_t(WA.tgt)] > 0) {
      int tv = cw.find(cw.base_vertex[std::size_t(WA.src)], mul(cw.fiber[std::size_t(WA.src)], g));
      int wa2 = cw.find_arrow(cw.base_arrow[std::size_t(wa)], tv);
      if (wa2 < 0) precondition_error("window: the translate leaves the window; enlarge the radius");
      m = M.mats[std::size_t(wa2)];
    }
    mats.push_back(std::move(m));
  }
  return make_rep(*M.bq, std::move(dims), std::move(mats));
}

}  // namespace detail

/* M^g(x,h) = M(x, h·g): the deck translation acts by right multiplication on
   fiber labels.  Works for modules over the window and over its opposite,
   since the opposite keeps vertex and arrow indices aligned. */
template <class K>
RepT<K> translate(const CoverWindow& cw, const RepT<K>& M, const GroupElem& g) {
  return detail::translate_impl(cw, M, g, true);
}

/* ============================= Pull-up functor ============================ */

/* F^bullet: constant along fibers.  Infinite-dimensional over the full cover,
   so only the window restriction is materialized. */
template <class K>
RepT<K> pull_up_window(const CoverWindow& cw, const RepT<K>& V) {
  if (V.bq != cw.base) precondition_error("pull-up input does not live on the base algebra");
  std::vector<int> dims;
  for (int v = 0; v < cw.wq.q.nv(); v++) dims.push_back(V.dim[std::size_t(cw.base_vertex[std::size_t(v)])]);
  std::vector<Mat<K>> mats;
  for (int wa = 0; wa < cw.wq.q.na(); wa++) mats.push_back(V.mats[std::size_t(cw.base_arrow[std::size_t(wa)])]);
  return make_rep(cw.wq, std::move(dims), std::move(mats));
}

/* ========================== Window tau machinery ========================== */

/* A window together with path-algebra contexts for it and its opposite.
   Build it only for windows small enough to carry a full basis. */
template <class K>
struct WinCtx {
  CoverWindow cw;
  TautCtx<K> tc;
  explicit WinCtx(CoverWindow w) : cw(std::move(w)), tc(cw.wq) {}
  WinCtx(const WinCtx&) = delete;
  WinCtx& operator=(const WinCtx&) = delete;
};

/* tau computed on the window agrees with tau on the full cover as long as the
   support keeps two nilpotency lengths of margin from the rim. */
template <class K>
RepT<K> tau_window(const WinCtx<K>& w, const RepT<K>& M) {
  for (int v = 0; v < w.cw.wq.q.nv(); v++)
    if (M.dim[std::size_t(v)] > 0 && !w.cw.tau_margin(v))
      precondition_error("window: insufficient margin for tau at this radius; enlarge the radius");
  return tau(w.tc.alg, M);
}

namespace detail {

/* All g with supp(A) meeting supp(B^g) at a common base vertex, i.e. the
   translations that could possibly carry a nonzero morphism A -> B^g. */
inline std::vector<GroupElem> overlap_translates(const CoverWindow& cw, const std::vector<int>& suppA,
                                                 const std::vector<int>& suppB) {
  std::vector<GroupElem> out;
  std::set<std::string> seen;
  for (int va : suppA)
    for (int vb : suppB) {
      if (cw.base_vertex[std::size_t(va)] != cw.base_vertex[std::size_t(vb)]) continue;
      GroupElem g = mul(inv(cw.fiber[std::size_t(va)]), cw.fiber[std::size_t(vb)]);
      if (seen.insert(elem_key(g)).second) out.push_back(g);
    }
  return out;
}

template <class K>
std::vector<int> support(const RepT<K>& M) {
  std::vector<int> out;
  for (int v = 0; v < int(M.dim.size()); v++)
    if (M.dim[std::size_t(v)] > 0) out.push_back(v);
  return out;
}

}  // namespace detail

template <class K>
struct GtauRigidReport {
  bool rigid = true;        // Hom(M, (tau M)^g) = 0 for every overlapping g
  bool plain_rigid = true;  // Hom(M, tau M) = 0
  std::vector<GroupElem> overlaps;
  std::vector<GroupElem> failures;
};

template <class K>
GtauRigidReport<K> is_G_tau_rigid(const WinCtx<K>& w, const RepT<K>& M) {
  GtauRigidReport<K> rep;
  RepT<K> tm = tau_window(w, M);
  rep.plain_rigid = hom_dim(M, tm) == 0;
  rep.overlaps = detail::overlap_translates(w.cw, detail::support(M), detail::support(tm));
  for (auto& g : rep.overlaps) {
    RepT<K> tg = detail::translate_impl(w.cw, tm, g, false);
    if (hom_dim(M, tg) != 0) {
      rep.rigid = false;
      rep.failures.push_back(g);
    }
  }
  return rep;
}

/* Two routes to the same count: downstairs, the morphism space from the
   push-down of M to the base tau of the push-down of N; upstairs, the sum of
   the morphism spaces from M into every overlapping translate of tau N. */
template <class K>
struct NoHomReport {
  int downstairs = 0;
  int upstairs = 0;
  bool ok = false;
  std::vector<std::pair<GroupElem, int>> terms;
};

template <class K>
NoHomReport<K> nohom_check(const AlgCtx<K>& base, const WinCtx<K>& w, const RepT<K>& M, const RepT<K>& N) {
  NoHomReport<K> rep;
  RepT<K> pdM = push_down(w.cw, M);
  RepT<K> pdN = push_down(w.cw, N);
  RepT<K> tb = tau(base, pdN);
  rep.downstairs = hom_dim(pdM, tb);
  RepT<K> tn = tau_window(w, N);
  for (auto& g : detail::overlap_translates(w.cw, detail::support(M), detail::support(tn))) {
    RepT<K> tg = detail::translate_impl(w.cw, tn, g, false);
    int d = hom_dim(M, tg);
    if (d != 0) rep.terms.push_back({g, d});
    rep.upstairs += d;
  }
  rep.ok = rep.downstairs == rep.upstairs;
  return rep;
}

/* ============================== Orbit pairs =============================== */

/* A support pair up in the cover, one representative per translation orbit.
   The projective part is recorded downstairs, by base vertex. */
template <class K>
struct OrbitPairT {
  std::vector<RepT<K>> orbits;
  std::vector<int> proj_vertices;  // base vertices, sorted

  int positions() const { return int(orbits.size() + proj_vertices.size()); }
};

namespace detail {

template <class K>
std::string support_signature(const CoverWindow& cw, const RepT<K>& M) {
  std::ostringstream os;
  for (int v : support(M))
    os << cw.base_vertex[std::size_t(v)] << ":" << elem_key(cw.fiber[std::size_t(v)]) << ":"
       << M.dim[std::size_t(v)] << ";";
  return os.str();
}

}  // namespace detail

/* Deterministic orbit representative: translate a support point over the
   least populated base vertex onto the identity fiber, then keep the
   lexicographically least support signature among the candidates that fit. */
template <class K>
RepT<K> normalize_orbit(const CoverWindow& cw, const RepT<K>& M) {
  if (M.total() == 0) return M;
  auto supp = detail::support(M);
  int xmin = cw.base_vertex[std::size_t(supp[0])];
  for (int v : supp) xmin = std::min(xmin, cw.base_vertex[std::size_t(v)]);
  RepT<K> best = M;
  std::string best_sig = detail::support_signature(cw, M);
  bool found = false;
  for (int v : supp) {
    if (cw.base_vertex[std::size_t(v)] != xmin) continue;
    try {
      RepT<K> cand = detail::translate_impl(cw, M, cw.fiber[std::size_t(v)], false);
      std::string sig = detail::support_signature(cw, cand);
      if (!found || sig < best_sig) {
        best = std::move(cand);
        best_sig = std::move(sig);
        found = true;
      }
    } catch (const Error&) {
      // candidate translate does not fit this window; skip it
    }
  }
  return best;
}

/* Same translation orbit: some deck translate of A is isomorphic to B. */
template <class K>
bool same_orbit(const CoverWindow& cw, const RepT<K>& A, const RepT<K>& B, unsigned long seed = 20260819) {
  if (A.total() != B.total()) return false;
  if (A.total() == 0) return true;
  auto sa = detail::support(A), sb = detail::support(B);
  int xa = cw.base_vertex[std::size_t(sa[0])], xb = cw.base_vertex[std::size_t(sb[0])];
  for (int v : sa) xa = std::min(xa, cw.base_vertex[std::size_t(v)]);
  for (int v : sb) xb = std::min(xb, cw.base_vertex[std::size_t(v)]);
  if (xa != xb) return false;
  bool inconclusive = false;
  std::set<std::string> tried;
  for (int va : sa) {
    if (cw.base_vertex[std::size_t(va)] != xa) continue;
    for (int vb : sb) {
      if (cw.base_vertex[std::size_t(vb)] != xa) continue;
      GroupElem g = mul(inv(cw.fiber[std::size_t(vb)]), cw.fiber[std::size_t(va)]);
      if (!tried.insert(elem_key(g)).second) continue;
      try {
        RepT<K> ag = detail::translate_impl(cw, A, g, false);
        auto iso = is_isomorphic(ag, B, seed);
        if (iso.verdict == Tri::Yes) return true;
        if (iso.verdict == Tri::Inconclusive) inconclusive = true;
      } catch (const Error&) {
        // translate does not fit; that candidate alignment is unavailable
      }
    }
  }
  if (inconclusive) inconclusive_error("orbit comparison was inconclusive within the iso budget");
  return false;
}

/* The lifted full projective pair: one projective per base vertex, placed at
   the window vertex over that base vertex nearest the center. */
inline int nearest_over(const CoverWindow& cw, int x) {
  int best = -1;
  for (int v = 0; v < cw.wq.q.nv(); v++)
    if (cw.base_vertex[std::size_t(v)] == x && (best < 0 || cw.dist[std::size_t(v)] < cw.dist[std::size_t(best)]))
      best = v;
  if (best < 0) precondition_error("window: no lift of a base vertex inside the window");
  return best;
}

template <class K>
OrbitPairT<K> lifted_projective_pair(const WinCtx<K>& w) {
  OrbitPairT<K> p;
  for (int x = 0; x < w.cw.base->q.nv(); x++)
    p.orbits.push_back(projective(w.tc.alg.ab, nearest_over(w.cw, x)));
  return p;
}

/* Support pair validity up in the cover: orbit count plus dropped base
   vertices fills the base vertex count, the orbit push-downs avoid the
   dropped vertices, and every pair of orbits is rigid against every
   overlapping translate of the other's tau. */
template <class K>
bool is_support_G_tilting(const WinCtx<K>& w, const OrbitPairT<K>& p, unsigned long seed = 20260819) {
  for (std::size_t i = 0; i < p.orbits.size(); i++)
    for (std::size_t j = i + 1; j < p.orbits.size(); j++)
      if (same_orbit(w.cw, p.orbits[i], p.orbits[j], seed))
        precondition_error("duplicate orbits in the pair");
  if (p.positions() != w.cw.base->q.nv()) return false;
  for (auto& o : p.orbits)
    for (int v : detail::support(o))
      for (int x : p.proj_vertices)
        if (w.cw.base_vertex[std::size_t(v)] == x) return false;
  std::vector<RepT<K>> taus;
  for (auto& o : p.orbits) taus.push_back(tau_window(w, o));
  for (std::size_t i = 0; i < p.orbits.size(); i++)
    for (std::size_t j = 0; j < p.orbits.size(); j++)
      for (auto& g : detail::overlap_translates(w.cw, detail::support(p.orbits[i]), detail::support(taus[j]))) {
        RepT<K> tg = detail::translate_impl(w.cw, taus[j], g, false);
        if (hom_dim(p.orbits[i], tg) != 0) return false;
      }
  return true;
}

/* Push an orbit pair down to a base support pair, orbit by orbit. */
template <class K>
StPairT<K> push_down_pair(const CoverWindow& cw, const OrbitPairT<K>& p) {
  StPairT<K> out;
  for (auto& o : p.orbits) out.summands.push_back(push_down(cw, o));
  out.proj_vertices = p.proj_vertices;
  return out;
}

/* ============================== Orbit mutation ============================ */

/* Left mutation of an orbit pair at orbit k.  All deck translates of the
   other orbits that can see the chosen orbit enter the approximation; the
   cokernel decomposes into translates of a single new orbit (or vanishes,
   dropping the orbit and growing the projective-free part). */
template <class K>
OrbitPairT<K> orbit_mutate(const CoverWindow& cw, const OrbitPairT<K>& p, int k,
                           unsigned long seed = 20260819) {
  if (k < 0 || k >= int(p.orbits.size())) precondition_error("orbit index out of range");
  const RepT<K>& X = p.orbits[std::size_t(k)];
  std::vector<RepT<K>> targets;
  auto suppX = detail::support(X);
  for (int i = 0; i < int(p.orbits.size()); i++) {
    if (i == k) continue;
    for (auto& g : detail::overlap_translates(cw, suppX, detail::support(p.orbits[std::size_t(i)]))) {
      try {
        targets.push_back(detail::translate_impl(cw, p.orbits[std::size_t(i)], g, false));
      } catch (const Error&) {
        precondition_error("window: a required translate does not fit; enlarge the radius");
      }
    }
  }
  if (fac_contains(targets, X))
    precondition_error("orbit lies in Fac of the complement; this exchange is the right orbit mutation");
  LeftApprox<K> la = min_left_approx(X, targets);
  RepMapT<K> f{&X, &la.target, la.map.f};
  auto cok = cokernel(f);

  OrbitPairT<K> out;
  out.orbits = p.orbits;
  if (cok.rep.total() == 0) {
    out.orbits.erase(out.orbits.begin() + k);
  } else {
    auto pieces = decompose(cok.rep, seed);
    for (std::size_t i = 1; i < pieces.size(); i++)
      if (!same_orbit(cw, pieces[0].rep, pieces[i].rep, seed))
        precondition_error("internal: exchange cokernel spreads over several orbits");
    out.orbits[std::size_t(k)] = normalize_orbit(cw, pieces[0].rep);
  }
  std::vector<bool> hit(std::size_t(cw.base->q.nv()), false);
  for (auto& o : out.orbits)
    for (int v : detail::support(o)) hit[std::size_t(cw.base_vertex[std::size_t(v)])] = true;
  out.proj_vertices.clear();
  for (int x = 0; x < cw.base->q.nv(); x++)
    if (!hit[std::size_t(x)]) out.proj_vertices.push_back(x);
  return out;
}

namespace detail {

/* Orbit-pair dagger: transpose the non-projective orbits onto the opposite
   window, turn projective orbits into dropped vertices, and raise the dropped
   vertices as opposite projectives at their nearest lifts. */
template <class K>
struct OrbitDagger {
  OrbitPairT<K> pair;            // over the opposite window algebra
  std::vector<int> orbit_dst;    // old orbit index -> new index or -1
  std::map<int, int> vertex_dst; // old dropped vertex -> new orbit index
};

template <class K>
OrbitDagger<K> orbit_dagger(const CoverWindow& cw, const AlgCtx<K>& fwd, const AlgCtx<K>& bwd,
                            const OrbitPairT<K>& p) {
  OrbitDagger<K> d;
  d.orbit_dst.assign(p.orbits.size(), -1);
  for (std::size_t i = 0; i < p.orbits.size(); i++) {
    PresT<K> pr = min_proj_presentation(fwd.ab, p.orbits[i]);
    if (pr.p1_copies.empty()) continue;  // projective orbit: becomes a dropped vertex
    RepT<K> tr = transpose_rep(fwd, p.orbits[i]);
    d.orbit_dst[i] = int(d.pair.orbits.size());
    d.pair.orbits.push_back(make_rep(*bwd.bq, tr.dim, tr.mats));
  }
  std::vector<bool> hit(std::size_t(cw.base->q.nv()), false);
  for (std::size_t i = 0; i < p.orbits.size(); i++) {
    if (d.orbit_dst[i] >= 0) continue;
    PresT<K> pr = min_proj_presentation(fwd.ab, p.orbits[i]);
    for (auto& [v, c] : pr.p0_copies) hit[std::size_t(cw.base_vertex[std::size_t(v)])] = true, (void)c;
  }
  for (int x : p.proj_vertices) {
    d.vertex_dst[x] = int(d.pair.orbits.size());
    d.pair.orbits.push_back(projective(bwd.ab, nearest_over(cw, x)));
  }
  for (int x = 0; x < cw.base->q.nv(); x++)
    if (hit[std::size_t(x)]) d.pair.proj_vertices.push_back(x);
  return d;
}

}  // namespace detail

/* Right mutation of an orbit pair: dagger to the opposite window, mutate
   left there, dagger back. */
template <class K>
OrbitPairT<K> orbit_mutate_right(const WinCtx<K>& w, const OrbitPairT<K>& p, int k,
                                 unsigned long seed = 20260819) {
  if (k < 0 || k >= int(p.orbits.size())) precondition_error("orbit index out of range");
  const RepT<K>& X = p.orbits[std::size_t(k)];
  std::vector<RepT<K>> targets;
  auto suppX = detail::support(X);
  for (int i = 0; i < int(p.orbits.size()); i++) {
    if (i == k) continue;
    for (auto& g : detail::overlap_translates(w.cw, suppX, detail::support(p.orbits[std::size_t(i)])))
      targets.push_back(detail::translate_impl(w.cw, p.orbits[std::size_t(i)], g, false));
  }
  if (!fac_contains(targets, X))
    precondition_error("orbit lies outside Fac of the complement; this exchange is the left orbit mutation");
  auto d = detail::orbit_dagger(w.cw, w.tc.alg, w.tc.alg_op, p);
  int j = d.orbit_dst[std::size_t(k)];
  if (j < 0) precondition_error("internal: Fac-interior orbit claimed projective");
  OrbitPairT<K> m = orbit_mutate(w.cw, d.pair, j, seed);
  auto back = detail::orbit_dagger(w.cw, w.tc.alg_op, w.tc.alg, m);
  OrbitPairT<K> out;
  for (auto& o : back.pair.orbits) out.orbits.push_back(normalize_orbit(w.cw, o));
  out.proj_vertices = back.pair.proj_vertices;
  return out;
}

/* ===================== Commutation of the two mutations ===================== */

struct CommuteReport {
  bool ok = false;
  int nodes = 0;
  int depth_requested = 0;
  int depth_reached = 0;
  int radius_used = 0;
  std::string divergence;
};

namespace detail {

inline bool window_sized_error(const Error& e) {
  return std::string(e.what()).rfind("window:", 0) == 0;
}

template <class K>
CommuteReport commute_attempt(const TautCtx<K>& base, const Grading& g, int center, int depth, int radius,
                              unsigned long seed) {
  WinCtx<K> W(build_window(g, center, radius));
  CommuteReport rep;
  rep.depth_requested = depth;
  rep.radius_used = radius;

  struct Node {
    StPairT<K> down;
    OrbitPairT<K> up;
    int depth;
  };
  std::deque<Node> queue;
  std::map<std::string, std::vector<StPairT<K>>> seen;
  auto fresh = [&](const StPairT<K>& p) {
    auto& bucket = seen[pair_key(p)];
    for (auto& q : bucket)
      if (pair_isomorphic(p, q)) return false;
    bucket.push_back(p);
    return true;
  };

  Node root{full_projective_pair(base.alg), lifted_projective_pair(W), 0};
  fresh(root.down);
  queue.push_back(std::move(root));
  auto diverge = [&](const Node& n, const std::string& what) {
    rep.ok = false;
    rep.divergence = "at " + pair_label(*base.alg.bq, n.down) + " (depth " + std::to_string(n.depth) + "): " + what;
  };

  while (!queue.empty()) {
    Node n = std::move(queue.front());
    queue.pop_front();
    rep.nodes++;
    rep.depth_reached = std::max(rep.depth_reached, n.depth);

    if (int(n.up.orbits.size()) != int(n.down.summands.size())) {
      diverge(n, "orbit count differs from summand count");
      return rep;
    }
    std::vector<int> dp = n.down.proj_vertices, up = n.up.proj_vertices;
    std::sort(dp.begin(), dp.end());
    std::sort(up.begin(), up.end());
    if (dp != up) {
      diverge(n, "dropped vertex sets differ");
      return rep;
    }
    for (std::size_t i = 0; i < n.up.orbits.size(); i++) {
      RepT<K> pd = push_down(W.cw, n.up.orbits[i]);
      if (is_isomorphic(pd, n.down.summands[i], seed).verdict != Tri::Yes) {
        diverge(n, "push-down of orbit " + std::to_string(i) + " differs from the base summand");
        return rep;
      }
    }
    if (!is_support_tau_tilting(base.alg, n.down)) {
      diverge(n, "base pair stopped being support tau-tilting");
      return rep;
    }
    try {
      if (!is_support_G_tilting(W, n.up, seed)) {
        diverge(n, "orbit pair stopped being support tilting up in the cover");
        return rep;
      }
    } catch (const Error& e) {
      if (window_sized_error(e)) throw;
      diverge(n, std::string("orbit pair check failed: ") + e.what());
      return rep;
    }

    if (n.depth == depth) continue;
    for (int k = 0; k < int(n.down.summands.size()); k++) {
      bool down_legal = true, up_legal = true;
      StPairT<K> dnext;
      OrbitPairT<K> unext;
      try {
        dnext = mutate_left(n.down, k, seed);
      } catch (const Error& e) {
        if (std::string(e.what()).find("right mutation") == std::string::npos) throw;
        down_legal = false;
      }
      try {
        unext = orbit_mutate(W.cw, n.up, k, seed);
      } catch (const Error& e) {
        if (window_sized_error(e)) throw;
        if (std::string(e.what()).find("right orbit mutation") == std::string::npos) throw;
        up_legal = false;
      }
      if (down_legal != up_legal) {
        diverge(n, "position " + std::to_string(k) + " is left-legal on one side only");
        return rep;
      }
      if (!down_legal) continue;
      if (fresh(dnext)) queue.push_back({std::move(dnext), std::move(unext), n.depth + 1});
    }
  }
  rep.ok = true;
  return rep;
}

}  // namespace detail

/* Walk the left-mutation graph downstairs and upstairs in lockstep from the
   full projective pairs, checking at every node that push-down carries the
   orbit pair onto the base pair position by position.  Windows that turn out
   too small are doubled and the walk restarts, up to the radius cap. */
template <class K>
CommuteReport verify_commute(const TautCtx<K>& base, const Grading& g, int center, int depth, int radius0 = 8,
                             int radius_cap = 64, unsigned long seed = 20260819) {
  int radius = std::max(radius0, 2 * base.alg.ab.N + 2);
  for (;;) {
    try {
      return detail::commute_attempt(base, g, center, depth, radius, seed);
    } catch (const Error& e) {
      if (!detail::window_sized_error(e)) throw;
      if (radius >= radius_cap)
        budget_error("window radius cap " + std::to_string(radius_cap) +
                     " exceeded while verifying commutation: " + e.what());
      radius = std::min(radius * 2, radius_cap);
    }
  }
}

/* ============================== String modules ============================ */

namespace detail {

template <class K>
RepT<K> string_rep(const BoundQuiver& bq, const Walk& w,
                   const std::function<bool(const Path&)>& run_is_zero) {
  // positions 0..n along the walk, with their vertices
  std::vector<int> pos_vertex;
  int cur = w.src;
  pos_vertex.push_back(cur);
  for (auto& s : w.steps) {
    const Arrow& A = bq.q.arrows[std::size_t(s.arrow)];
    int from = s.fwd ? A.src : A.tgt;
    int to = s.fwd ? A.tgt : A.src;
    if (from != cur) precondition_error("illegal string: the walk does not chain");
    cur = to;
    pos_vertex.push_back(cur);
  }
  if (cur != w.tgt) precondition_error("illegal string: the walk does not chain");
  for (std::size_t i = 0; i + 1 < w.steps.size(); i++)
    if (w.steps[i].arrow == w.steps[i + 1].arrow && w.steps[i].fwd != w.steps[i + 1].fwd)
      precondition_error("illegal string: the walk is not reduced");

  // every maximal same-direction run must stay nonzero in the algebra
  std::size_t i = 0;
  while (i < w.steps.size()) {
    std::size_t j = i;
    while (j + 1 < w.steps.size() && w.steps[j + 1].fwd == w.steps[i].fwd) j++;
    Path p;
    if (w.steps[i].fwd) {
      p.src = pos_vertex[i];
      p.tgt = pos_vertex[j + 1];
      for (std::size_t s = i; s <= j; s++) p.arrows.push_back(w.steps[s].arrow);
    } else {
      p.src = pos_vertex[j + 1];
      p.tgt = pos_vertex[i];
      for (std::size_t s = j + 1; s-- > i;) p.arrows.push_back(w.steps[s].arrow);
    }
    if (run_is_zero(p)) precondition_error("illegal string: the walk runs through a relation");
    i = j + 1;
  }

  std::vector<int> dims(std::size_t(bq.q.nv()), 0);
  std::vector<int> pos_index(pos_vertex.size(), 0);
  for (std::size_t pI = 0; pI < pos_vertex.size(); pI++)
    pos_index[pI] = dims[std::size_t(pos_vertex[pI])]++;
  std::vector<Mat<K>> mats;
  for (int a = 0; a < bq.q.na(); a++) {
    const Arrow& A = bq.q.arrows[std::size_t(a)];
    mats.push_back(Mat<K>(dims[std::size_t(A.tgt)], dims[std::size_t(A.src)]));
  }
  for (std::size_t s = 0; s < w.steps.size(); s++) {
    int a = w.steps[s].arrow;
    std::size_t from = w.steps[s].fwd ? s : s + 1;  // position at the arrow source
    std::size_t to = w.steps[s].fwd ? s + 1 : s;    // position at the arrow target
    mats[std::size_t(a)].at(pos_index[to], pos_index[from]) = K(1);
  }
  return make_rep(bq, std::move(dims), std::move(mats));
}

}  // namespace detail

/* The string module of a reduced walk over a monomial algebra. */
template <class K>
RepT<K> string_module(const AlgebraBasisT<K>& ab, const Walk& w) {
  const BoundQuiver& bq = *ab.bq;
  if (!bq.monomial_ideal()) precondition_error("string modules need a monomial relation ideal");
  return detail::string_rep<K>(bq, w, [&](const Path& p) { return ab.is_zero(p); });
}

/* A string module on a window, with run legality checked downstairs on the
   base algebra (window paths are alive exactly when their projections are). */
template <class K>
RepT<K> lifted_string_module(const CoverWindow& cw, const AlgebraBasisT<K>& base_ab, const Walk& w) {
  if (!cw.base->monomial_ideal()) precondition_error("string modules need a monomial relation ideal");
  return detail::string_rep<K>(cw.wq, w, [&](const Path& p) {
    Path q = trivial_path(cw.base_vertex[std::size_t(p.src)]);
    for (int wa : p.arrows) q.arrows.push_back(cw.base_arrow[std::size_t(wa)]);
    q.tgt = cw.base_vertex[std::size_t(p.tgt)];
    return base_ab.is_zero(q);
  });
}

/* Unique walk lifting from the base into a window, starting at a chosen
   window vertex over the walk's source. */
inline Walk lift_string(const CoverWindow& cw, const Walk& w, int basepoint) {
  if (basepoint < 0 || basepoint >= cw.wq.q.nv()) precondition_error("basepoint is not a window vertex");
  if (cw.base_vertex[std::size_t(basepoint)] != w.src)
    precondition_error("basepoint does not lie over the walk source");
  Walk out;
  out.src = basepoint;
  int cur = basepoint;
  for (auto& s : w.steps) {
    const Arrow& A = cw.base->q.arrows[std::size_t(s.arrow)];
    if (s.fwd) {
      int wa = cw.find_arrow(s.arrow, cur);
      if (wa < 0) precondition_error("window: too small for the walk lift; enlarge the radius");
      out.steps.push_back({wa, true});
      cur = cw.wq.q.arrows[std::size_t(wa)].tgt;
    } else {
      int pv = cw.find(A.src, cw.step(cw.fiber[std::size_t(cur)], s.arrow, false));
      int wa = pv < 0 ? -1 : cw.find_arrow(s.arrow, pv);
      if (wa < 0 || cw.wq.q.arrows[std::size_t(wa)].tgt != cur)
        precondition_error("window: too small for the walk lift; enlarge the radius");
      out.steps.push_back({wa, false});
      cur = pv;
    }
  }
  out.tgt = cur;
  return out;
}

/* ========================= Fundamental domains =========================== */

/* Flags the window vertices whose fiber label is the canonical coset
   representative at the given stage: a connected fundamental domain for the
   stage subgroup acting on the universal window. */
inline std::vector<bool> fundamental_domain(const CoverWindow& cw, Tower& t, int stage) {
  if (!cw.galois) precondition_error("fundamental domains live on group windows");
  std::vector<bool> out(std::size_t(cw.wq.q.nv()), false);
  for (int v = 0; v < cw.wq.q.nv(); v++) {
    if (cw.fiber[std::size_t(v)].abelian) precondition_error("fundamental domains need free fiber labels");
    out[std::size_t(v)] = rewrite_tail(t, inv(cw.fiber[std::size_t(v)]), stage).head_trivial();
  }
  return out;
}

struct DomainCheck {
  bool ok = true;
  int bad_vertex = -1;
};

/* Does the flagged region contain the whole radius-r ball around the
   basepoint?  A sufficient-size diagnostic, not a gate. */
inline DomainCheck domain_encompasses(const CoverWindow& cw, const std::vector<bool>& flags, int basepoint,
                                      int r) {
  std::deque<std::pair<int, int>> q{{basepoint, 0}};
  std::set<int> seen{basepoint};
  while (!q.empty()) {
    auto [v, d] = q.front();
    q.pop_front();
    if (!flags[std::size_t(v)]) return {false, v};
    if (d == r) continue;
    for (int wa = 0; wa < cw.wq.q.na(); wa++) {
      const Arrow& A = cw.wq.q.arrows[std::size_t(wa)];
      int nb = A.src == v ? A.tgt : (A.tgt == v ? A.src : -1);
      if (nb >= 0 && seen.insert(nb).second) q.push_back({nb, d + 1});
    }
  }
  return {true, -1};
}

/* Lift a stage-window module to the universal window by copying it over a
   fundamental domain and zeroing the arrows that leave the domain.  The
   construction is verified: its push-down must come back isomorphic. */
template <class K>
RepT<K> lift_via_domain(const CoverWindow& gamma, const CoverWindow& stagew, Tower& t, int stage,
                        const RepT<K>& M, unsigned long seed = 20260819) {
  if (M.bq != &stagew.wq) precondition_error("the module does not live on the stage window");
  std::vector<bool> F = fundamental_domain(gamma, t, stage);
  auto proj = [&](int v) { return stagew.find(gamma.base_vertex[std::size_t(v)], gamma.fiber[std::size_t(v)]); };
  std::vector<int> dims(std::size_t(gamma.wq.q.nv()), 0);
  for (int v = 0; v < gamma.wq.q.nv(); v++) {
    int pv = proj(v);
    if (F[std::size_t(v)] && pv >= 0) dims[std::size_t(v)] = M.dim[std::size_t(pv)];
  }
  std::vector<Mat<K>> mats;
  for (int wa = 0; wa < gamma.wq.q.na(); wa++) {
    const Arrow& A = gamma.wq.q.arrows[std::size_t(wa)];
    Mat<K> m(dims[std::size_t(A.tgt)], dims[std::size_t(A.src)]);
    if (F[std::size_t(A.src)] && F[std::size_t(A.tgt)] && dims[std::size_t(A.src)] > 0 &&
        dims[std::size_t(A.tgt)] > 0) {
      int sa = stagew.find_arrow(gamma.base_arrow[std::size_t(wa)], proj(A.src));
      if (sa >= 0 && stagew.wq.q.arrows[std::size_t(sa)].tgt == proj(A.tgt)) m = M.mats[std::size_t(sa)];
    }
    mats.push_back(std::move(m));
  }
  RepT<K> N = rep_zero<K>(gamma.wq);
  try {
    N = make_rep(gamma.wq, std::move(dims), std::move(mats));
    RepT<K> back = push_down_to(gamma, stagew, N);
    if (is_isomorphic(back, M, seed).verdict != Tri::Yes) precondition_error("push-down mismatch");
  } catch (const Error&) {
    precondition_error(
        "domain too small for this module; enlarge the window radius or raise the tower stage");
  }
  return N;
}

/* Lift a base support pair to an orbit pair by replaying a left-mutation
   path from the projective pair, found by breadth-first search. */
template <class K>
struct MutPathLiftT {
  OrbitPairT<K> pair;
  int depth = 0;
  std::vector<int> steps;  // mutation positions along the replayed path
};

template <class K>
MutPathLiftT<K> lift_via_mutation_path(const WinCtx<K>& w, const TautCtx<K>& base, const StPairT<K>& target,
                                       int budget = 512, unsigned long seed = 20260819) {
  struct Node {
    StPairT<K> down;
    OrbitPairT<K> up;
    std::vector<int> steps;
  };
  std::deque<Node> queue;
  std::map<std::string, std::vector<StPairT<K>>> seen;
  auto fresh = [&](const StPairT<K>& p) {
    auto& bucket = seen[pair_key(p)];
    for (auto& q : bucket)
      if (pair_isomorphic(p, q)) return false;
    bucket.push_back(p);
    return true;
  };
  Node root{full_projective_pair(base.alg), lifted_projective_pair(w), {}};
  fresh(root.down);
  queue.push_back(std::move(root));
  int visited = 0;
  while (!queue.empty()) {
    Node n = std::move(queue.front());
    queue.pop_front();
    if (++visited > budget) break;
    if (pair_isomorphic(n.down, target)) return {std::move(n.up), int(n.steps.size()), std::move(n.steps)};
    for (int k = 0; k < int(n.down.summands.size()); k++) {
      StPairT<K> dnext;
      try {
        dnext = mutate_left(n.down, k, seed);
      } catch (const Error& e) {
        if (std::string(e.what()).find("right mutation") == std::string::npos) throw;
        continue;
      }
      if (!fresh(dnext)) continue;
      OrbitPairT<K> unext = orbit_mutate(w.cw, n.up, k, seed);
      std::vector<int> steps = n.steps;
      steps.push_back(k);
      queue.push_back({std::move(dnext), std::move(unext), std::move(steps)});
    }
  }
  budget_error("mutation-path search budget " + std::to_string(budget) + " exhausted before reaching the pair");
}

}  // namespace ctau
