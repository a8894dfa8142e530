#pragma once
#include <deque>
#include <sstream>

#include "ctau/rep.hpp"

namespace ctau {

/* A support pair: basic module given by its indecomposable summands, plus the
   vertex set whose projectives form the second component. */
template <class K>
struct StPairT {
  std::vector<RepT<K>> summands;
  std::vector<int> proj_vertices;  // sorted, unique

  int positions() const { return int(summands.size() + proj_vertices.size()); }
};

template <class K>
StPairT<K> full_projective_pair(const AlgCtx<K>& ctx) {
  StPairT<K> p;
  for (int x = 0; x < ctx.bq->q.nv(); x++) p.summands.push_back(projective(ctx.ab, x));
  return p;
}

template <class K>
std::vector<int> support_complement(const BoundQuiver& bq, const std::vector<RepT<K>>& summands) {
  std::vector<int> out;
  for (int x = 0; x < bq.q.nv(); x++) {
    bool zero = true;
    for (auto& s : summands)
      if (s.dim[std::size_t(x)] != 0) zero = false;
    if (zero) out.push_back(x);
  }
  return out;
}

template <class K>
bool is_tau_rigid_pair(const AlgCtx<K>& ctx, const StPairT<K>& p) {
  std::vector<RepT<K>> taus;
  for (auto& s : p.summands) taus.push_back(tau(ctx, s));
  for (auto& s : p.summands)
    for (auto& t : taus)
      if (hom_dim(s, t) != 0) return false;
  for (int x : p.proj_vertices)
    for (auto& s : p.summands)
      if (s.dim[std::size_t(x)] != 0) return false;  // Hom(P_x, M) = M(x)
  return true;
}

template <class K>
bool is_support_tau_tilting(const AlgCtx<K>& ctx, const StPairT<K>& p) {
  if (p.positions() != ctx.bq->q.nv()) return false;
  for (std::size_t i = 0; i < p.summands.size(); i++)
    for (std::size_t j = i + 1; j < p.summands.size(); j++)
      if (p.summands[i].dim == p.summands[j].dim &&
          is_isomorphic(p.summands[i], p.summands[j]).verdict == Tri::Yes)
        return false;  // not basic
  return is_tau_rigid_pair(ctx, p);
}

/* Left mutation at summand k: X must lie outside Fac of the complement; the
   exchange is the cokernel of the minimal left approximation into it. */
template <class K>
StPairT<K> mutate_left(const StPairT<K>& p, int k, unsigned long seed = 20260819) {
  if (k < 0 || k >= int(p.summands.size())) precondition_error("summand index out of range");
  const RepT<K>& X = p.summands[std::size_t(k)];
  std::vector<RepT<K>> others;
  for (int i = 0; i < int(p.summands.size()); i++)
    if (i != k) others.push_back(p.summands[std::size_t(i)]);
  if (fac_contains(others, X))
    precondition_error("summand lies in Fac of the complement; this exchange is the right mutation");

  LeftApprox<K> la = min_left_approx(X, others);
  RepMapT<K> f{&X, &la.target, la.map.f};
  auto cok = cokernel(f);

  StPairT<K> out;
  out.summands = p.summands;
  if (cok.rep.total() == 0) {
    out.summands.erase(out.summands.begin() + k);
  } else {
    auto pieces = decompose(cok.rep, seed);
    for (std::size_t i = 1; i < pieces.size(); i++)
      if (is_isomorphic(pieces[0].rep, pieces[i].rep).verdict != Tri::Yes)
        precondition_error("internal: exchange cokernel is not isotypic");
    out.summands[std::size_t(k)] = pieces[0].rep;
  }
  out.proj_vertices = support_complement(*X.bq, out.summands);
  return out;
}

/* The duality into pairs over the opposite algebra: non-projective summands
   transpose, projective summands move into the vertex set, and the old vertex
   set comes back as opposite projectives. */
template <class K>
struct DaggerResult {
  StPairT<K> pair;                  // over ctx.op
  std::vector<int> summand_dst;     // old summand index -> new index, or -1 if it became a vertex
  std::vector<int> summand_vertex;  // old summand index -> vertex it moved to, or -1
  std::map<int, int> vertex_dst;    // old proj vertex -> new summand index
};

template <class K>
DaggerResult<K> dagger(const AlgCtx<K>& ctx, const StPairT<K>& p) {
  DaggerResult<K> d;
  d.summand_dst.assign(p.summands.size(), -1);
  d.summand_vertex.assign(p.summands.size(), -1);
  for (std::size_t i = 0; i < p.summands.size(); i++) {
    RepT<K> tr = transpose_rep(ctx, p.summands[i]);
    if (tr.is_zero()) {
      auto [copies, reps] = detail::top_data(p.summands[i]);
      (void)reps;
      if (copies.size() != 1) precondition_error("internal: projective summand with non-simple top");
      d.summand_vertex[i] = copies[0].first;
      d.pair.proj_vertices.push_back(copies[0].first);
    } else {
      d.summand_dst[i] = int(d.pair.summands.size());
      d.pair.summands.push_back(std::move(tr));
    }
  }
  for (int x : p.proj_vertices) {
    d.vertex_dst[x] = int(d.pair.summands.size());
    d.pair.summands.push_back(projective(ctx.ab_op, x));
  }
  std::sort(d.pair.proj_vertices.begin(), d.pair.proj_vertices.end());
  return d;
}

/* Everything both mutation directions need: contexts for the algebra and for
   its opposite (whose own opposite is a fresh copy of the original). */
template <class K>
struct TautCtx {
  AlgCtx<K> alg;
  AlgCtx<K> alg_op;
  explicit TautCtx(const BoundQuiver& b) : alg(b), alg_op(alg.op) {}
  TautCtx(const TautCtx&) = delete;
  TautCtx& operator=(const TautCtx&) = delete;
};

namespace detail {
/* Rebind a pair living over a structural copy of `to` onto `to` itself. */
template <class K>
StPairT<K> rebind_pair(const BoundQuiver& to, const StPairT<K>& p) {
  StPairT<K> out;
  out.proj_vertices = p.proj_vertices;
  for (auto& s : p.summands) out.summands.push_back(make_rep(to, s.dim, s.mats));
  return out;
}
}  // namespace detail

/* Right mutation at summand k (X inside Fac of the complement): transport to
   the opposite side, left-mutate there, transport back. */
template <class K>
StPairT<K> mutate_right(const TautCtx<K>& tc, const StPairT<K>& p, int k, unsigned long seed = 20260819) {
  if (k < 0 || k >= int(p.summands.size())) precondition_error("summand index out of range");
  const RepT<K>& X = p.summands[std::size_t(k)];
  std::vector<RepT<K>> others;
  for (int i = 0; i < int(p.summands.size()); i++)
    if (i != k) others.push_back(p.summands[std::size_t(i)]);
  if (!fac_contains(others, X))
    precondition_error("summand lies outside Fac of the complement; this exchange is the left mutation");

  DaggerResult<K> d = dagger(tc.alg, p);
  // X is in Fac of the rest, hence non-projective, hence it transposed
  int j = d.summand_dst[std::size_t(k)];
  if (j < 0) precondition_error("internal: Fac-interior summand claimed projective");
  StPairT<K> m = mutate_left(d.pair, j, seed);
  DaggerResult<K> back = dagger(tc.alg_op, m);
  return detail::rebind_pair(*tc.alg.bq, back.pair);
}

/* Exchange at a vertex position x of the pair: the support grows back; this
   is the dagger shadow of a left mutation at the opposite projective. */
template <class K>
StPairT<K> mutate_at_proj_vertex(const TautCtx<K>& tc, const StPairT<K>& p, int x, unsigned long seed = 20260819) {
  if (std::find(p.proj_vertices.begin(), p.proj_vertices.end(), x) == p.proj_vertices.end())
    precondition_error("vertex is not in the pair's projective part");
  DaggerResult<K> d = dagger(tc.alg, p);
  StPairT<K> m = mutate_left(d.pair, d.vertex_dst.at(x), seed);
  DaggerResult<K> back = dagger(tc.alg_op, m);
  return detail::rebind_pair(*tc.alg.bq, back.pair);
}

enum class Direction { Left, Right };

/* Fac comparison of two pairs one mutation apart. */
template <class K>
Direction classify_direction(const StPairT<K>& p, const StPairT<K>& q) {
  auto contained = [](const StPairT<K>& a, const StPairT<K>& b) {  // Fac(b) ⊇ every summand of a
    for (auto& s : a.summands)
      if (!fac_contains(b.summands, s)) return false;
    return true;
  };
  bool l = contained(q, p), r = contained(p, q);
  if (l && !r) return Direction::Left;
  if (r && !l) return Direction::Right;
  precondition_error("the pairs are not related by a single mutation");
}

/* —— Mutation quiver BFS —— */

template <class K>
bool pair_isomorphic(const StPairT<K>& p, const StPairT<K>& q) {
  if (p.proj_vertices != q.proj_vertices) return false;
  if (p.summands.size() != q.summands.size()) return false;
  std::vector<bool> used(q.summands.size(), false);
  for (auto& s : p.summands) {
    bool hit = false;
    for (std::size_t j = 0; j < q.summands.size() && !hit; j++) {
      if (used[j] || s.dim != q.summands[j].dim) continue;
      auto r = is_isomorphic(s, q.summands[j]);
      if (r.verdict == Tri::Inconclusive) inconclusive_error("pair comparison: summand iso test inconclusive");
      if (r.verdict == Tri::Yes) {
        used[j] = true;
        hit = true;
      }
    }
    if (!hit) return false;
  }
  return true;
}

template <class K>
std::string pair_key(const StPairT<K>& p) {
  std::vector<std::string> parts;
  for (auto& s : p.summands) {
    std::ostringstream os;
    for (int d : s.dim) os << d << ",";
    os << "e" << hom_dim(s, s);
    parts.push_back(os.str());
  }
  std::sort(parts.begin(), parts.end());
  std::ostringstream os;
  for (auto& s : parts) os << s << ";";
  os << "|P";
  for (int x : p.proj_vertices) os << x << ",";
  return os.str();
}

struct MutEdge {
  int from, to;
  int pos;  // summand index, or summands.size()+i for the i-th vertex position
  Direction dir;
};

template <class K>
struct MutationQuiver {
  std::vector<StPairT<K>> nodes;
  std::vector<MutEdge> edges;
  bool truncated = false;
  std::string truncation_reason;
  std::vector<int> flagged;  // nodes whose dedup was inconclusive and were kept as new
};

template <class K>
MutationQuiver<K> mutation_quiver(const TautCtx<K>& tc, const StPairT<K>& seed, int budget = 10000,
                                  int dim_guard_factor = 4, unsigned long rng_seed = 20260819) {
  if (!is_support_tau_tilting(tc.alg, seed)) precondition_error("seed pair is not support tau-tilting");
  int dim_guard = dim_guard_factor * tc.alg.ab.dim();

  MutationQuiver<K> mq;
  std::map<std::string, std::vector<int>> by_key;
  auto find_or_add = [&](const StPairT<K>& p) -> std::pair<int, bool> {
    std::string key = pair_key(p);
    for (int id : by_key[key]) {
      try {
        if (pair_isomorphic(mq.nodes[std::size_t(id)], p)) return {id, false};
      } catch (const Error& e) {
        if (e.kind != Error::Kind::Inconclusive) throw;
        mq.flagged.push_back(int(mq.nodes.size()));
      }
    }
    mq.nodes.push_back(p);
    by_key[key].push_back(int(mq.nodes.size()) - 1);
    return {int(mq.nodes.size()) - 1, true};
  };

  find_or_add(seed);
  std::deque<int> frontier{0};
  while (!frontier.empty()) {
    int cur = frontier.front();
    frontier.pop_front();
    StPairT<K> p = mq.nodes[std::size_t(cur)];  // copy: nodes vector may grow
    int ns = int(p.summands.size());
    for (int pos = 0; pos < p.positions(); pos++) {
      StPairT<K> q;
      Direction dir = Direction::Left;
      if (pos < ns) {
        const RepT<K>& X = p.summands[std::size_t(pos)];
        std::vector<RepT<K>> others;
        for (int i = 0; i < ns; i++)
          if (i != pos) others.push_back(p.summands[std::size_t(i)]);
        if (!fac_contains(others, X)) {
          q = mutate_left(p, pos, rng_seed);
          dir = Direction::Left;
        } else {
          q = mutate_right(tc, p, pos, rng_seed);
          dir = Direction::Right;
        }
      } else {
        q = mutate_at_proj_vertex(tc, p, p.proj_vertices[std::size_t(pos - ns)], rng_seed);
        dir = Direction::Right;
      }
      int qdim = 0;
      for (auto& s : q.summands) qdim += s.total();
      if (qdim > dim_guard) {
        mq.truncated = true;
        mq.truncation_reason = "dimension guard (" + std::to_string(dim_guard) + ") reached";
        continue;
      }
      if (int(mq.nodes.size()) >= budget) {
        bool exists = false;
        try {
          std::string key = pair_key(q);
          for (int id : by_key[key])
            if (pair_isomorphic(mq.nodes[std::size_t(id)], q)) {
              mq.edges.push_back({cur, id, pos, dir});
              exists = true;
              break;
            }
        } catch (const Error&) {
        }
        if (!exists) {
          mq.truncated = true;
          mq.truncation_reason = "node budget (" + std::to_string(budget) + ") reached";
        }
        continue;
      }
      auto [id, fresh] = find_or_add(q);
      mq.edges.push_back({cur, id, pos, dir});
      if (fresh) frontier.push_back(id);
    }
  }
  return mq;
}

struct FinitenessReport {
  bool finite;
  int count;  // valid when finite
  std::string note;
};

template <class K>
FinitenessReport is_tau_tilting_finite(const TautCtx<K>& tc, int budget = 10000, int dim_guard_factor = 4) {
  auto mq = mutation_quiver(tc, full_projective_pair(tc.alg), budget, dim_guard_factor);
  if (mq.truncated) return {false, int(mq.nodes.size()), "unknown-exceeded: " + mq.truncation_reason};
  return {true, int(mq.nodes.size()), "closed under mutation"};
}

template <class K>
std::string pair_label(const BoundQuiver& bq, const StPairT<K>& p) {
  std::ostringstream os;
  if (p.summands.empty()) os << "0";
  for (std::size_t i = 0; i < p.summands.size(); i++) {
    if (i) os << "+";
    os << "(";
    for (std::size_t x = 0; x < p.summands[i].dim.size(); x++) {
      if (x) os << ",";
      os << p.summands[i].dim[x];
    }
    os << ")";
  }
  os << " | P={";
  for (std::size_t i = 0; i < p.proj_vertices.size(); i++) {
    if (i) os << ",";
    os << bq.q.vnames[std::size_t(p.proj_vertices[i])];
  }
  os << "}";
  return os.str();
}

template <class K>
std::string to_dot(const BoundQuiver& bq, const MutationQuiver<K>& mq, bool left_only = false) {
  std::ostringstream os;
  os << "digraph exchange {\n";
  for (std::size_t i = 0; i < mq.nodes.size(); i++)
    os << "  n" << i << " [label=\"" << pair_label(bq, mq.nodes[i]) << "\"];\n";
  for (auto& e : mq.edges) {
    if (left_only && e.dir != Direction::Left) continue;
    os << "  n" << e.from << " -> n" << e.to
       << (e.dir == Direction::Left ? " [style=solid]" : " [style=dashed]") << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace ctau
