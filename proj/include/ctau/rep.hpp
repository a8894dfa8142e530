#pragma once
#include <optional>
#include <random>

#include "ctau/quiver.hpp"

namespace ctau {

/* Covariant representation: mats[a] maps the source fiber into the target
   fiber, dim(ha) x dim(ta). */
template <class K>
struct RepT {
  const BoundQuiver* bq = nullptr;
  std::vector<int> dim;
  std::vector<Mat<K>> mats;

  int total() const {
    int t = 0;
    for (int d : dim) t += d;
    return t;
  }
  bool is_zero() const { return total() == 0; }
};

template <class K>
RepT<K> rep_zero(const BoundQuiver& bq) {
  RepT<K> m;
  m.bq = &bq;
  m.dim.assign(std::size_t(bq.q.nv()), 0);
  for (auto& a : bq.q.arrows) m.mats.push_back(Mat<K>(0, 0)), (void)a;
  return m;
}

template <class K>
RepT<K> simple(const BoundQuiver& bq, int x) {
  RepT<K> m = rep_zero<K>(bq);
  m.dim[std::size_t(x)] = 1;
  for (int a = 0; a < bq.q.na(); a++)
    m.mats[std::size_t(a)] = Mat<K>(bq.q.arrows[std::size_t(a)].tgt == x ? 1 : 0,
                                    bq.q.arrows[std::size_t(a)].src == x ? 1 : 0);
  return m;
}

template <class K>
Mat<K> eval_path(const RepT<K>& m, const Path& p) {
  Mat<K> acc = Mat<K>::eye(m.dim[std::size_t(p.src)]);
  for (int a : p.arrows) acc = mul(m.mats[std::size_t(a)], acc);
  return acc;
}

template <class K>
bool verify_relations(const RepT<K>& m) {
  for (auto& rel : m.bq->relations) {
    int s = rel[0].path.src, t = rel[0].path.tgt;
    Mat<K> acc(m.dim[std::size_t(t)], m.dim[std::size_t(s)]);
    for (auto& tm : rel) acc = add(acc, scale(FieldOps<K>::from_rat(tm.coef), eval_path(m, tm.path)));
    if (!acc.is_zero()) return false;
  }
  return true;
}

template <class K>
RepT<K> make_rep(const BoundQuiver& bq, std::vector<int> dims, std::vector<Mat<K>> mats) {
  RepT<K> m;
  m.bq = &bq;
  m.dim = std::move(dims);
  m.mats = std::move(mats);
  if (int(m.dim.size()) != bq.q.nv() || int(m.mats.size()) != bq.q.na())
    precondition_error("representation shape mismatch");
  for (int a = 0; a < bq.q.na(); a++) {
    const Arrow& A = bq.q.arrows[std::size_t(a)];
    if (m.mats[std::size_t(a)].rows != m.dim[std::size_t(A.tgt)] ||
        m.mats[std::size_t(a)].cols != m.dim[std::size_t(A.src)])
      precondition_error("matrix shape mismatch on arrow " + A.name);
  }
  if (!verify_relations(m)) precondition_error("relations are not satisfied");
  return m;
}

/* Indecomposable projective at x: fibers are the normal-form paths from x;
   arrows post-compose and reduce. */
template <class K>
RepT<K> projective(const AlgebraBasisT<K>& ab, int x) {
  const BoundQuiver& bq = *ab.bq;
  RepT<K> m = rep_zero<K>(bq);
  for (int y = 0; y < bq.q.nv(); y++) m.dim[std::size_t(y)] = int(ab.basis(x, y).size());
  for (int a = 0; a < bq.q.na(); a++) {
    const Arrow& A = bq.q.arrows[std::size_t(a)];
    const auto& src_b = ab.basis(x, A.src);
    const auto& tgt_b = ab.basis(x, A.tgt);
    Mat<K> mat(int(tgt_b.size()), int(src_b.size()));
    for (int j = 0; j < int(src_b.size()); j++) {
      Path ext = src_b[std::size_t(j)];
      ext.arrows.push_back(a);
      ext.tgt = A.tgt;
      for (auto& [c, p] : ab.reduce_path(ext)) mat.at(ab.basis_index(p), j) = c;
    }
    m.mats[std::size_t(a)] = mat;
  }
  return m;
}

template <class K>
struct SumStructure {
  std::vector<std::vector<int>> off;  // off[i][x]: block offset of piece i at x
};

template <class K>
RepT<K> direct_sum(const BoundQuiver& bq, const std::vector<RepT<K>>& parts, SumStructure<K>* st = nullptr) {
  RepT<K> m = rep_zero<K>(bq);
  if (st) st->off.assign(parts.size(), std::vector<int>(std::size_t(bq.q.nv()), 0));
  for (std::size_t i = 0; i < parts.size(); i++)
    for (int x = 0; x < bq.q.nv(); x++) {
      if (st) st->off[i][std::size_t(x)] = m.dim[std::size_t(x)];
      m.dim[std::size_t(x)] += parts[i].dim[std::size_t(x)];
    }
  for (int a = 0; a < bq.q.na(); a++) {
    const Arrow& A = bq.q.arrows[std::size_t(a)];
    Mat<K> mat(m.dim[std::size_t(A.tgt)], m.dim[std::size_t(A.src)]);
    int ro = 0, co = 0;
    for (auto& p : parts) {
      const Mat<K>& b = p.mats[std::size_t(a)];
      for (int i = 0; i < b.rows; i++)
        for (int j = 0; j < b.cols; j++) mat.at(ro + i, co + j) = b.at(i, j);
      ro += b.rows;
      co += b.cols;
    }
    m.mats[std::size_t(a)] = mat;
  }
  return m;
}

/* —— Maps —— */
template <class K>
struct RepMapT {
  const RepT<K>*src = nullptr, *tgt = nullptr;
  std::vector<Mat<K>> f;  // per vertex, tgt.dim[x] x src.dim[x]
};

template <class K>
bool verify_intertwine(const RepMapT<K>& f) {
  const BoundQuiver& bq = *f.src->bq;
  for (int a = 0; a < bq.q.na(); a++) {
    const Arrow& A = bq.q.arrows[std::size_t(a)];
    Mat<K> lhs = mul(f.f[std::size_t(A.tgt)], f.src->mats[std::size_t(a)]);
    Mat<K> rhs = mul(f.tgt->mats[std::size_t(a)], f.f[std::size_t(A.src)]);
    if (!(lhs == rhs)) return false;
  }
  return true;
}

template <class K>
RepMapT<K> zero_map(const RepT<K>& src, const RepT<K>& tgt) {
  RepMapT<K> f;
  f.src = &src;
  f.tgt = &tgt;
  for (int x = 0; x < src.bq->q.nv(); x++) f.f.push_back(Mat<K>(tgt.dim[std::size_t(x)], src.dim[std::size_t(x)]));
  return f;
}

template <class K>
RepMapT<K> identity_map(const RepT<K>& m) {
  RepMapT<K> f = zero_map(m, m);
  for (int x = 0; x < m.bq->q.nv(); x++) f.f[std::size_t(x)] = Mat<K>::eye(m.dim[std::size_t(x)]);
  return f;
}

template <class K>
RepMapT<K> compose(const RepMapT<K>& g, const RepMapT<K>& f) {  // g after f
  RepMapT<K> h = zero_map(*f.src, *g.tgt);
  for (std::size_t x = 0; x < h.f.size(); x++) h.f[x] = mul(g.f[x], f.f[x]);
  return h;
}

template <class K>
bool map_is_zero(const RepMapT<K>& f) {
  for (auto& m : f.f)
    if (!m.is_zero()) return false;
  return true;
}

template <class K>
bool map_is_iso(const RepMapT<K>& f) {
  for (std::size_t x = 0; x < f.f.size(); x++) {
    if (f.f[x].rows != f.f[x].cols) return false;
    if (f.f[x].rows > 0 && !inverse(f.f[x])) return false;
  }
  return true;
}

/* Basis of the intertwiner space Hom(M, N). */
template <class K>
std::vector<RepMapT<K>> hom_space(const RepT<K>& M, const RepT<K>& N) {
  if (M.bq != N.bq) precondition_error("hom_space across different algebras");
  const BoundQuiver& bq = *M.bq;
  std::vector<int> off(std::size_t(bq.q.nv()) + 1, 0);
  for (int x = 0; x < bq.q.nv(); x++)
    off[std::size_t(x) + 1] = off[std::size_t(x)] + N.dim[std::size_t(x)] * M.dim[std::size_t(x)];
  int nvars = off[std::size_t(bq.q.nv())];
  auto var = [&](int x, int i, int j) { return off[std::size_t(x)] + i * M.dim[std::size_t(x)] + j; };

  std::vector<std::vector<K>> rows;
  for (int a = 0; a < bq.q.na(); a++) {
    const Arrow& A = bq.q.arrows[std::size_t(a)];
    const Mat<K>&Ma = M.mats[std::size_t(a)], &Na = N.mats[std::size_t(a)];
    for (int i = 0; i < N.dim[std::size_t(A.tgt)]; i++)
      for (int j = 0; j < M.dim[std::size_t(A.src)]; j++) {
        std::vector<K> row(std::size_t(nvars), K(0));
        for (int k = 0; k < M.dim[std::size_t(A.tgt)]; k++) row[std::size_t(var(A.tgt, i, k))] += Ma.at(k, j);
        for (int k = 0; k < N.dim[std::size_t(A.src)]; k++) row[std::size_t(var(A.src, k, j))] -= Na.at(i, k);
        rows.push_back(std::move(row));
      }
  }
  Mat<K> sys(int(rows.size()), nvars);
  for (int i = 0; i < sys.rows; i++)
    for (int j = 0; j < sys.cols; j++) sys.at(i, j) = rows[std::size_t(i)][std::size_t(j)];
  Mat<K> null = nullspace(sys);

  std::vector<RepMapT<K>> out;
  for (int c = 0; c < null.cols; c++) {
    RepMapT<K> f = zero_map(M, N);
    for (int x = 0; x < bq.q.nv(); x++)
      for (int i = 0; i < N.dim[std::size_t(x)]; i++)
        for (int j = 0; j < M.dim[std::size_t(x)]; j++) f.f[std::size_t(x)].at(i, j) = null.at(var(x, i, j), c);
    out.push_back(std::move(f));
  }
  return out;
}

template <class K>
int hom_dim(const RepT<K>& M, const RepT<K>& N) {
  return int(hom_space(M, N).size());
}

/* —— Sub and quotient structure (all witnessed by maps) —— */

template <class K>
struct SubQuot {
  RepT<K> rep;
  RepMapT<K> map;  // kernel/image: inclusion into the ambient; cokernel: projection
};

/* Column-space basis of m. */
template <class K>
Mat<K> colspace(const Mat<K>& m) {
  Rref<K> r = rref(transpose(m));
  Mat<K> out(m.rows, r.rank);
  for (int i = 0; i < r.rank; i++)
    for (int j = 0; j < m.rows; j++) out.at(j, i) = r.R.at(i, j);
  return out;
}

namespace detail {
/* Coordinates of the columns of b in the column space spanned by basis. */
template <class K>
Mat<K> coords_in(const Mat<K>& basis, const Mat<K>& b) {
  auto s = solve(basis, b);
  if (!s) precondition_error("internal: vectors outside the spanned subspace");
  return *s;
}
}  // namespace detail

template <class K>
SubQuot<K> sub_rep(const RepT<K>& N, const std::vector<Mat<K>>& basis) {
  const BoundQuiver& bq = *N.bq;
  SubQuot<K> out;
  out.rep = rep_zero<K>(bq);
  for (int x = 0; x < bq.q.nv(); x++) out.rep.dim[std::size_t(x)] = basis[std::size_t(x)].cols;
  for (int a = 0; a < bq.q.na(); a++) {
    const Arrow& A = bq.q.arrows[std::size_t(a)];
    out.rep.mats[std::size_t(a)] =
        detail::coords_in(basis[std::size_t(A.tgt)], mul(N.mats[std::size_t(a)], basis[std::size_t(A.src)]));
  }
  out.map.f = basis;
  return out;
}

template <class K>
SubQuot<K> kernel(const RepMapT<K>& f) {
  std::vector<Mat<K>> basis;
  for (auto& m : f.f) basis.push_back(nullspace(m));
  SubQuot<K> out = sub_rep(*f.src, basis);
  out.map.src = nullptr;  // fixed below
  out.map.tgt = f.src;
  return out;
}

template <class K>
SubQuot<K> image(const RepMapT<K>& f) {
  std::vector<Mat<K>> basis;
  for (auto& m : f.f) basis.push_back(colspace(m));
  SubQuot<K> out = sub_rep(*f.tgt, basis);
  out.map.src = nullptr;
  out.map.tgt = f.tgt;
  return out;
}

/* Quotient of tgt by the image of f: rep + projection + a section. */
template <class K>
struct Quot {
  RepT<K> rep;
  RepMapT<K> proj;              // tgt -> rep
  std::vector<Mat<K>> section;  // rep coords -> ambient representatives
};

template <class K>
Quot<K> cokernel(const RepMapT<K>& f) {
  const RepT<K>& N = *f.tgt;
  const BoundQuiver& bq = *N.bq;
  Quot<K> out;
  out.rep = rep_zero<K>(bq);
  std::vector<Mat<K>> pis;
  for (int x = 0; x < bq.q.nv(); x++) {
    Mat<K> B = colspace(f.f[std::size_t(x)]);
    int n = N.dim[std::size_t(x)];
    // greedily extend B by unit vectors to an invertible frame [B | D]
    Mat<K> cur = B;
    std::vector<int> picked;
    for (int i = 0; i < n && cur.cols < n; i++) {
      Mat<K> e(n, 1);
      e.at(i, 0) = K(1);
      Mat<K> tryc = hcat(cur, e);
      if (rank(tryc) == tryc.cols) {
        cur = tryc;
        picked.push_back(i);
      }
    }
    if (cur.cols != n) precondition_error("internal: frame completion failed");
    auto Einv = inverse(cur);
    if (!Einv) precondition_error("internal: frame not invertible");
    Mat<K> pi(n - B.cols, n);
    for (int i = 0; i < n - B.cols; i++)
      for (int j = 0; j < n; j++) pi.at(i, j) = Einv->at(B.cols + i, j);
    Mat<K> D(n, n - B.cols);
    for (int i = 0; i < int(picked.size()); i++) D.at(picked[std::size_t(i)], i) = K(1);
    out.rep.dim[std::size_t(x)] = n - B.cols;
    pis.push_back(pi);
    out.section.push_back(D);
  }
  for (int a = 0; a < bq.q.na(); a++) {
    const Arrow& A = bq.q.arrows[std::size_t(a)];
    out.rep.mats[std::size_t(a)] =
        mul(pis[std::size_t(A.tgt)], mul(N.mats[std::size_t(a)], out.section[std::size_t(A.src)]));
  }
  out.proj.src = f.tgt;
  out.proj.f = pis;
  return out;
}

/* rad M = sum of incoming arrow images; top M = M / rad M. */
template <class K>
SubQuot<K> radical(const RepT<K>& M) {
  const BoundQuiver& bq = *M.bq;
  std::vector<Mat<K>> basis;
  for (int x = 0; x < bq.q.nv(); x++) {
    Mat<K> stack(M.dim[std::size_t(x)], 0);
    for (int a = 0; a < bq.q.na(); a++)
      if (bq.q.arrows[std::size_t(a)].tgt == x) stack = hcat(stack, M.mats[std::size_t(a)]);
    basis.push_back(colspace(stack));
  }
  SubQuot<K> out = sub_rep(M, basis);
  out.map.tgt = &M;
  return out;
}

/* —— Minimal projective presentation —— */
template <class K>
struct PresT {
  RepT<K> P1, P0;
  std::vector<std::pair<int, int>> p1_copies, p0_copies;  // (vertex, copy index)
  SumStructure<K> st1, st0;
  RepMapT<K> f;     // P1 -> P0, image in rad P0
  RepMapT<K> epi;   // P0 -> M
};

namespace detail {
/* Projective cover data: vertices with multiplicity = top dims, and the
   chosen top representatives per vertex. */
template <class K>
std::pair<std::vector<std::pair<int, int>>, std::vector<Mat<K>>> top_data(const RepT<K>& M) {
  auto rad = radical(M);
  RepMapT<K> incl = rad.map;
  incl.src = &rad.rep;
  auto q = cokernel(incl);
  std::vector<std::pair<int, int>> copies;
  for (int x = 0; x < M.bq->q.nv(); x++)
    for (int c = 0; c < q.rep.dim[std::size_t(x)]; c++) copies.push_back({x, c});
  return {copies, q.section};
}

template <class K>
RepMapT<K> cover_map(const AlgebraBasisT<K>& ab, const RepT<K>& M, const RepT<K>& P,
                     const std::vector<std::pair<int, int>>& copies, const SumStructure<K>& st,
                     const std::vector<Mat<K>>& reps) {
  const BoundQuiver& bq = *M.bq;
  RepMapT<K> phi = zero_map(P, M);
  for (std::size_t ci = 0; ci < copies.size(); ci++) {
    auto [x, c] = copies[ci];
    Mat<K> v(M.dim[std::size_t(x)], 1);
    for (int i = 0; i < v.rows; i++) v.at(i, 0) = reps[std::size_t(x)].at(i, c);
    for (int y = 0; y < bq.q.nv(); y++) {
      const auto& bpaths = ab.basis(x, y);
      for (int j = 0; j < int(bpaths.size()); j++) {
        Mat<K> img = mul(eval_path(M, bpaths[std::size_t(j)]), v);
        for (int i = 0; i < M.dim[std::size_t(y)]; i++)
          phi.f[std::size_t(y)].at(i, st.off[ci][std::size_t(y)] + j) = img.at(i, 0);
      }
    }
  }
  return phi;
}
}  // namespace detail

template <class K>
PresT<K> min_proj_presentation(const AlgebraBasisT<K>& ab, const RepT<K>& M) {
  const BoundQuiver& bq = *ab.bq;
  PresT<K> pr;

  auto [copies0, reps0] = detail::top_data(M);
  pr.p0_copies = copies0;
  std::vector<RepT<K>> parts0;
  for (auto& [x, c] : copies0) parts0.push_back(projective(ab, x)), (void)c;
  pr.P0 = direct_sum(bq, parts0, &pr.st0);
  pr.epi = detail::cover_map(ab, M, pr.P0, copies0, pr.st0, reps0);
  for (int x = 0; x < bq.q.nv(); x++)
    if (rank(pr.epi.f[std::size_t(x)]) != M.dim[std::size_t(x)])
      precondition_error("internal: projective cover is not surjective");
  pr.epi.src = nullptr;  // rebound below
  pr.epi.tgt = &M;

  auto ker = kernel(RepMapT<K>{&pr.P0, &M, pr.epi.f});
  auto [copies1, reps1] = detail::top_data(ker.rep);
  pr.p1_copies = copies1;
  std::vector<RepT<K>> parts1;
  for (auto& [x, c] : copies1) parts1.push_back(projective(ab, x)), (void)c;
  pr.P1 = direct_sum(bq, parts1, &pr.st1);
  RepMapT<K> psi = detail::cover_map(ab, ker.rep, pr.P1, copies1, pr.st1, reps1);
  // f = (kernel inclusion) ∘ psi
  pr.f = zero_map(pr.P1, pr.P0);
  for (int x = 0; x < bq.q.nv(); x++) pr.f.f[std::size_t(x)] = mul(ker.map.f[std::size_t(x)], psi.f[std::size_t(x)]);
  return pr;
}

/* —— Transpose, dual, tau —— */

/* Everything tau needs about one algebra, built once. */
template <class K>
struct AlgCtx {
  const BoundQuiver* bq;
  BoundQuiver op;
  AlgebraBasisT<K> ab, ab_op;

  explicit AlgCtx(const BoundQuiver& b, int cap = 32) : bq(&b), op(opposite(b)) {
    ab = AlgebraBasisT<K>::build(b, cap);
    ab_op = AlgebraBasisT<K>::build(op, cap);
  }
};

/* Reads the path-coordinate blocks of f: P1 -> P0 and assembles the starred
   map P0* -> P1* over the opposite algebra. */
template <class K>
RepMapT<K> star_map(const AlgCtx<K>& ctx, const PresT<K>& pr, const RepT<K>& P0s, const RepT<K>& P1s,
                    const SumStructure<K>& st0s, const SumStructure<K>& st1s) {
  const BoundQuiver& op = ctx.op;
  RepMapT<K> fs = zero_map(P0s, P1s);
  for (std::size_t i = 0; i < pr.p0_copies.size(); i++) {
    int xi = pr.p0_copies[i].first;
    for (std::size_t j = 0; j < pr.p1_copies.size(); j++) {
      int yj = pr.p1_copies[j].first;
      // u_ij: image of P1-copy-j's generator (trivial path = index 0 of its
      // block at yj), read off inside copy i's block of P0 at yj
      typename AlgebraBasisT<K>::Comb u;
      {
        const auto& paths = ctx.ab.basis(xi, yj);
        for (int t = 0; t < int(paths.size()); t++) {
          K c = pr.f.f[std::size_t(yj)].at(pr.st0.off[i][std::size_t(yj)] + t,
                                           pr.st1.off[j][std::size_t(yj)] + 0);
          if (!(c == K(0))) u.push_back({c, paths[std::size_t(t)]});
        }
      }
      // starred block: right-multiplication by the reversed u on op-paths
      for (int z = 0; z < op.q.nv(); z++) {
        const auto& cols = ctx.ab_op.basis(xi, z);
        for (int cidx = 0; cidx < int(cols.size()); cidx++) {
          for (auto& [c, upath] : u) {
            Path rev{upath.tgt, upath.src, upath.arrows};
            std::reverse(rev.arrows.begin(), rev.arrows.end());
            // op-path y_j -> x_i, then the op-basis path x_i -> z
            Path full = path_then(rev, cols[std::size_t(cidx)]);
            if (full.length() >= ctx.ab_op.N) continue;
            for (auto& [c2, q] : ctx.ab_op.reduce_path(full))
              fs.f[std::size_t(z)].at(st1s.off[j][std::size_t(z)] + ctx.ab_op.basis_index(q),
                                      st0s.off[i][std::size_t(z)] + cidx) += c * c2;
          }
        }
      }
    }
  }
  return fs;
}

template <class K>
RepT<K> transpose_rep(const AlgCtx<K>& ctx, const RepT<K>& M) {
  if (M.is_zero()) return rep_zero<K>(ctx.op);
  PresT<K> pr = min_proj_presentation(ctx.ab, M);
  std::vector<RepT<K>> parts0, parts1;
  for (auto& [x, c] : pr.p0_copies) parts0.push_back(projective(ctx.ab_op, x)), (void)c;
  for (auto& [x, c] : pr.p1_copies) parts1.push_back(projective(ctx.ab_op, x)), (void)c;
  SumStructure<K> st0s, st1s;
  RepT<K> P0s = direct_sum(ctx.op, parts0, &st0s);
  RepT<K> P1s = direct_sum(ctx.op, parts1, &st1s);
  if (pr.p1_copies.empty()) return rep_zero<K>(ctx.op);  // projective module
  RepMapT<K> fs = star_map(ctx, pr, P0s, P1s, st0s, st1s);
  fs.src = &P0s;
  fs.tgt = &P1s;
  return cokernel(fs).rep;
}

/* K-linear dual: a module over the opposite algebra becomes one over bq. */
template <class K>
RepT<K> dual_rep(const BoundQuiver& bq, const RepT<K>& V) {
  RepT<K> W = rep_zero<K>(bq);
  W.dim = V.dim;
  for (int a = 0; a < bq.q.na(); a++) W.mats[std::size_t(a)] = transpose(V.mats[std::size_t(a)]);
  return W;
}

template <class K>
RepT<K> tau(const AlgCtx<K>& ctx, const RepT<K>& M) {
  RepT<K> tr = transpose_rep(ctx, M);
  return dual_rep<K>(*ctx.bq, tr);
}

/* —— Isomorphism testing and decomposition —— */

enum class Tri { Yes, No, Inconclusive };

template <class K>
struct IsoResult {
  Tri verdict;
  std::optional<RepMapT<K>> witness;
};

template <class K>
IsoResult<K> is_isomorphic(const RepT<K>& M, const RepT<K>& N, unsigned long seed = 20260819, int budget = 64) {
  if (M.dim != N.dim) return {Tri::No, {}};
  if (M.total() == 0) return {Tri::Yes, zero_map(M, N)};
  auto h = hom_space(M, N);
  if (h.empty()) return {Tri::No, {}};
  if (hom_dim(M, M) != hom_dim(N, N) || int(h.size()) != hom_dim(N, M)) return {Tri::No, {}};
  for (auto& f : h)
    if (map_is_iso(f)) return {Tri::Yes, f};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, 16);
  for (int t = 0; t < budget; t++) {
    RepMapT<K> f = zero_map(M, N);
    for (auto& b : h) {
      K c = FieldOps<K>::from_rat(Rat(pick(rng)));
      for (std::size_t x = 0; x < f.f.size(); x++) f.f[x] = add(f.f[x], scale(c, b.f[x]));
    }
    if (map_is_iso(f)) return {Tri::Yes, f};
  }
  return {Tri::Inconclusive, {}};
}

template <class K>
struct Piece {
  RepT<K> rep;
  std::vector<Mat<K>> incl;  // columns: embedding into the ambient module
};

namespace detail {
template <class K>
K map_trace(const RepMapT<K>& f) {
  K t(0);
  for (auto& m : f.f)
    for (int i = 0; i < m.rows; i++) t += m.at(i, i);
  return t;
}

template <class K>
void split_rec(const RepT<K>& M, std::vector<Mat<K>> embed, std::vector<Piece<K>>& out, std::mt19937_64& rng,
               int budget) {
  if (M.total() == 0) return;
  auto ends = hom_space(M, M);
  if (ends.size() == 1) {
    out.push_back({M, embed});
    return;
  }
  int n = M.total();
  auto try_split = [&](const RepMapT<K>& phi) -> bool {
    // Fitting: M = ker phi^n ⊕ im phi^n when both are proper
    RepMapT<K> p = phi;
    for (int k = 1; k < n; k++) p = compose(p, phi);
    auto ker = kernel(RepMapT<K>{&M, &M, p.f});
    if (ker.rep.total() == 0 || ker.rep.total() == n) return false;
    auto im = image(RepMapT<K>{&M, &M, p.f});
    std::vector<Mat<K>> ke, ie;
    for (int x = 0; x < M.bq->q.nv(); x++) {
      ke.push_back(mul(embed[std::size_t(x)], ker.map.f[std::size_t(x)]));
      ie.push_back(mul(embed[std::size_t(x)], im.map.f[std::size_t(x)]));
    }
    split_rec(ker.rep, ke, out, rng, budget);
    split_rec(im.rep, ie, out, rng, budget);
    return true;
  };

  // deterministic candidates first: basis endos shifted by small scalars
  std::vector<K> shifts = {K(0), FieldOps<K>::from_rat(Rat(-1)), FieldOps<K>::from_rat(Rat(1)),
                           FieldOps<K>::from_rat(Rat(-2)), FieldOps<K>::from_rat(Rat(2)),
                           FieldOps<K>::from_rat(Rat(-3)), FieldOps<K>::from_rat(Rat(3))};
  for (auto& e : ends)
    for (auto& s : shifts) {
      RepMapT<K> phi = e;
      for (int x = 0; x < M.bq->q.nv(); x++)
        phi.f[std::size_t(x)] = add(phi.f[std::size_t(x)], scale(s, Mat<K>::eye(M.dim[std::size_t(x)])));
      if (try_split(phi)) return;
    }
  std::uniform_int_distribution<int> pick(0, 16);
  for (int t = 0; t < budget; t++) {
    RepMapT<K> phi = zero_map(M, M);
    for (auto& b : ends) {
      K c = FieldOps<K>::from_rat(Rat(pick(rng)));
      for (std::size_t x = 0; x < phi.f.size(); x++) phi.f[x] = add(phi.f[x], scale(c, b.f[x]));
    }
    for (auto& s : shifts) {
      RepMapT<K> ph = phi;
      for (int x = 0; x < M.bq->q.nv(); x++)
        ph.f[std::size_t(x)] = add(ph.f[std::size_t(x)], scale(s, Mat<K>::eye(M.dim[std::size_t(x)])));
      if (try_split(ph)) return;
    }
  }
  // no split found: decide locality via End/rad (trace form radical)
  int k = int(ends.size());
  Mat<K> gram(k, k);
  for (int i = 0; i < k; i++)
    for (int j = 0; j < k; j++)
      gram.at(i, j) = map_trace(compose(ends[std::size_t(i)], ends[std::size_t(j)]));
  int semisimple_dim = rank(gram);
  if (semisimple_dim == 1) {
    out.push_back({M, embed});  // local endomorphism ring
    return;
  }
  inconclusive_error("decomposition not found within budget; End/rad has dimension " +
                     std::to_string(semisimple_dim) + " (field too small?)");
}
}  // namespace detail

/* Indecomposable pieces with embeddings; stacking all embeddings is an iso
   from the direct sum onto M. */
template <class K>
std::vector<Piece<K>> decompose(const RepT<K>& M, unsigned long seed = 20260819, int budget = 64) {
  std::vector<Piece<K>> out;
  std::mt19937_64 rng(seed);
  std::vector<Mat<K>> id;
  for (int x = 0; x < M.bq->q.nv(); x++) id.push_back(Mat<K>::eye(M.dim[std::size_t(x)]));
  detail::split_rec(M, id, out, rng, budget);
  return out;
}

/* —— Fac membership and minimal left approximations —— */

template <class K>
bool fac_contains(const std::vector<RepT<K>>& gens, const RepT<K>& N) {
  if (N.total() == 0) return true;
  const BoundQuiver& bq = *N.bq;
  std::vector<Mat<K>> stacks;
  for (int x = 0; x < bq.q.nv(); x++) stacks.push_back(Mat<K>(N.dim[std::size_t(x)], 0));
  for (auto& g : gens)
    for (auto& f : hom_space(g, N))
      for (int x = 0; x < bq.q.nv(); x++) stacks[std::size_t(x)] = hcat(stacks[std::size_t(x)], f.f[std::size_t(x)]);
  for (int x = 0; x < bq.q.nv(); x++)
    if (rank(stacks[std::size_t(x)]) != N.dim[std::size_t(x)]) return false;
  return true;
}

/* Does g factor as h ∘ f for some module map h? */
template <class K>
bool factors_through(const RepMapT<K>& g, const RepMapT<K>& f) {
  const RepT<K>& U = *f.tgt;
  const RepT<K>& T = *g.tgt;
  const BoundQuiver& bq = *U.bq;
  std::vector<int> off(std::size_t(bq.q.nv()) + 1, 0);
  for (int x = 0; x < bq.q.nv(); x++)
    off[std::size_t(x) + 1] = off[std::size_t(x)] + T.dim[std::size_t(x)] * U.dim[std::size_t(x)];
  int nvars = off[std::size_t(bq.q.nv())];
  auto var = [&](int x, int i, int j) { return off[std::size_t(x)] + i * U.dim[std::size_t(x)] + j; };

  std::vector<std::vector<K>> rows;
  std::vector<K> rhs;
  // intertwine rows: h[ha]·U(a) = T(a)·h[ta]
  for (int a = 0; a < bq.q.na(); a++) {
    const Arrow& A = bq.q.arrows[std::size_t(a)];
    for (int i = 0; i < T.dim[std::size_t(A.tgt)]; i++)
      for (int j = 0; j < U.dim[std::size_t(A.src)]; j++) {
        std::vector<K> row(std::size_t(nvars), K(0));
        for (int k = 0; k < U.dim[std::size_t(A.tgt)]; k++)
          row[std::size_t(var(A.tgt, i, k))] += U.mats[std::size_t(a)].at(k, j);
        for (int k = 0; k < T.dim[std::size_t(A.src)]; k++)
          row[std::size_t(var(A.src, k, j))] -= T.mats[std::size_t(a)].at(i, k);
        rows.push_back(std::move(row));
        rhs.push_back(K(0));
      }
  }
  // factoring rows: h[x]·f[x] = g[x]
  for (int x = 0; x < bq.q.nv(); x++)
    for (int i = 0; i < T.dim[std::size_t(x)]; i++)
      for (int j = 0; j < f.src->dim[std::size_t(x)]; j++) {
        std::vector<K> row(std::size_t(nvars), K(0));
        for (int k = 0; k < U.dim[std::size_t(x)]; k++)
          row[std::size_t(var(x, i, k))] += f.f[std::size_t(x)].at(k, j);
        rows.push_back(std::move(row));
        rhs.push_back(g.f[std::size_t(x)].at(i, j));
      }
  Mat<K> A(int(rows.size()), nvars), b(int(rows.size()), 1);
  for (int i = 0; i < A.rows; i++) {
    for (int j = 0; j < A.cols; j++) A.at(i, j) = rows[std::size_t(i)][std::size_t(j)];
    b.at(i, 0) = rhs[std::size_t(i)];
  }
  return solve(A, b).has_value();
}

template <class K>
struct LeftApprox {
  RepT<K> target;                          // the minimal U'
  RepMapT<K> map;                          // X -> U'
  std::vector<std::pair<int, int>> parts;  // surviving (target index, copy)
};

/* Minimal left add(U_1 ⊕ ... ⊕ U_t)-approximation of X: start from the
   universal map through every hom basis element, then greedily drop copies
   while all generators of Hom(X, U_i) still factor. */
template <class K>
LeftApprox<K> min_left_approx(const RepT<K>& X, const std::vector<RepT<K>>& targets) {
  const BoundQuiver& bq = *X.bq;
  std::vector<std::vector<RepMapT<K>>> homs;
  for (auto& u : targets) homs.push_back(hom_space(X, u));

  struct Copy {
    int ti, c;
  };
  std::vector<Copy> copies;
  for (int i = 0; i < int(targets.size()); i++)
    for (int c = 0; c < int(homs[std::size_t(i)].size()); c++) copies.push_back({i, c});

  auto build = [&](const std::vector<Copy>& cs, RepT<K>& U, RepMapT<K>& f) {
    std::vector<RepT<K>> parts;
    for (auto& cp : cs) parts.push_back(targets[std::size_t(cp.ti)]);
    SumStructure<K> st;
    U = direct_sum(bq, parts, &st);
    f = zero_map(X, U);
    for (std::size_t k = 0; k < cs.size(); k++) {
      const RepMapT<K>& g = homs[std::size_t(cs[k].ti)][std::size_t(cs[k].c)];
      for (int x = 0; x < bq.q.nv(); x++)
        for (int i = 0; i < targets[std::size_t(cs[k].ti)].dim[std::size_t(x)]; i++)
          for (int j = 0; j < X.dim[std::size_t(x)]; j++)
            f.f[std::size_t(x)].at(st.off[k][std::size_t(x)] + i, j) = g.f[std::size_t(x)].at(i, j);
    }
  };

  auto approximates = [&](const std::vector<Copy>& cs) {
    RepT<K> U;
    RepMapT<K> f;
    build(cs, U, f);
    f.src = &X;
    f.tgt = &U;
    for (int i = 0; i < int(targets.size()); i++)
      for (auto& g : homs[std::size_t(i)]) {
        RepMapT<K> gg = g;
        gg.src = &X;
        gg.tgt = &targets[std::size_t(i)];
        if (!factors_through(gg, f)) return false;
      }
    return true;
  };

  // removal order: big summands first, then stable on indices
  std::vector<int> order(copies.size());
  for (std::size_t i = 0; i < order.size(); i++) order[i] = int(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    int da = targets[std::size_t(copies[std::size_t(a)].ti)].total();
    int db = targets[std::size_t(copies[std::size_t(b)].ti)].total();
    if (da != db) return da > db;
    return a < b;
  });

  std::vector<bool> kept(copies.size(), true);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int oi : order) {
      if (!kept[std::size_t(oi)]) continue;
      kept[std::size_t(oi)] = false;
      std::vector<Copy> cs;
      for (std::size_t k = 0; k < copies.size(); k++)
        if (kept[k]) cs.push_back(copies[k]);
      if (approximates(cs)) {
        changed = true;
      } else {
        kept[std::size_t(oi)] = true;
      }
    }
  }

  LeftApprox<K> out;
  std::vector<Copy> cs;
  for (std::size_t k = 0; k < copies.size(); k++)
    if (kept[k]) cs.push_back(copies[k]);
  build(cs, out.target, out.map);
  for (auto& cp : cs) out.parts.push_back({cp.ti, cp.c});
  return out;
}

}  // namespace ctau
