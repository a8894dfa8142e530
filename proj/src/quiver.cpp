#include "ctau/quiver.hpp"

#include <queue>
#include <sstream>

namespace ctau {

std::string path_str(const BoundQuiver& bq, const Path& p) {
  if (p.arrows.empty()) return "e_" + bq.q.vnames[std::size_t(p.src)];
  bool short_names = true;
  for (auto& a : bq.q.arrows) short_names &= a.name.size() == 1;
  std::string out;
  for (auto it = p.arrows.rbegin(); it != p.arrows.rend(); ++it) {
    if (!out.empty() && !short_names) out += '.';
    out += bq.q.arrows[std::size_t(*it)].name;
  }
  return out;
}

BoundQuiver opposite(const BoundQuiver& bq) {
  BoundQuiver op;
  op.name = bq.name + "^op";
  op.q.vnames = bq.q.vnames;
  op.q.vindex = bq.q.vindex;
  for (auto& a : bq.q.arrows) op.q.add_arrow(a.name, a.tgt, a.src);
  for (auto& rel : bq.relations) {
    LinComb r;
    for (auto& tm : rel) {
      Path p{tm.path.tgt, tm.path.src, tm.path.arrows};
      std::reverse(p.arrows.begin(), p.arrows.end());
      r.push_back({tm.coef, p});
    }
    op.relations.push_back(r);
  }
  op.N = bq.N;
  return op;
}

int check_admissible(BoundQuiver& bq, int cap) {
  auto ab = AlgebraBasisT<Rat>::build(bq, cap);
  bq.N = ab.N;
  return ab.N;
}

/* —— Walks —— */

static int step_src(const Quiver& q, const WalkStep& s) {
  return s.fwd ? q.arrows[std::size_t(s.arrow)].src : q.arrows[std::size_t(s.arrow)].tgt;
}
static int step_tgt(const Quiver& q, const WalkStep& s) {
  return s.fwd ? q.arrows[std::size_t(s.arrow)].tgt : q.arrows[std::size_t(s.arrow)].src;
}

Walk walk_inverse(const Quiver& q, const Walk& w) {
  (void)q;
  Walk r{w.tgt, w.src, {}};
  for (auto it = w.steps.rbegin(); it != w.steps.rend(); ++it) r.steps.push_back({it->arrow, !it->fwd});
  return r;
}

Walk walk_then(const Quiver& q, const Walk& a, const Walk& b) {
  (void)q;
  if (a.tgt != b.src) precondition_error("walk composition mismatch");
  Walk r{a.src, b.tgt, a.steps};
  r.steps.insert(r.steps.end(), b.steps.begin(), b.steps.end());
  return r;
}

std::string walk_str(const BoundQuiver& bq, const Walk& w) {
  if (w.steps.empty()) return "e_" + bq.q.vnames[std::size_t(w.src)];
  std::string out;
  for (auto it = w.steps.rbegin(); it != w.steps.rend(); ++it) {
    if (!out.empty()) out += '.';
    if (!it->fwd) out += '-';
    out += bq.q.arrows[std::size_t(it->arrow)].name;
  }
  return out;
}

/* —— Minimal relations —— */

MinimalRelations minimal_relations(const BoundQuiver& bq, int term_cap) {
  auto ab = AlgebraBasisT<Rat>::build(bq);
  auto in_ideal = [&](const LinComb& c) {
    AlgebraBasisT<Rat>::Comb lc;
    for (auto& tm : c) lc.push_back({tm.coef, tm.path});
    return ab.reduce(lc).empty();
  };

  MinimalRelations out;
  std::vector<LinComb> work(bq.relations.begin(), bq.relations.end());
  while (!work.empty()) {
    LinComb rel = work.back();
    work.pop_back();
    int r = int(rel.size());
    if (r == 0) continue;
    if (r == 1) {
      out.monomial.push_back(rel);
      continue;
    }
    if (r > term_cap) precondition_error("relation has more than " + std::to_string(term_cap) + " terms");
    bool split = false;
    for (unsigned mask = 1; mask + 1 < (1u << r) && !split; mask++) {
      LinComb sub, rest;
      for (int i = 0; i < r; i++) ((mask >> i) & 1u ? sub : rest).push_back(rel[std::size_t(i)]);
      if (in_ideal(sub)) {
        work.push_back(sub);
        work.push_back(rest);
        split = true;
      }
    }
    if (!split) out.minimal.push_back(rel);
  }
  std::reverse(out.minimal.begin(), out.minimal.end());
  std::reverse(out.monomial.begin(), out.monomial.end());
  return out;
}

/* —— Fundamental group —— */

static GroupElem raw_walk_class(const FundGroup& fg, const Walk& w) {
  const Quiver& q = fg.bq->q;
  std::vector<int> gen_of_arrow(std::size_t(q.na()), -1);
  for (int i = 0; i < int(fg.chord_arrows.size()); i++) gen_of_arrow[std::size_t(fg.chord_arrows[std::size_t(i)])] = i;
  GroupElem acc = free_identity(int(fg.chord_arrows.size()));
  int at = w.src;
  for (auto& s : w.steps) {
    if (step_src(q, s) != at) precondition_error("walk steps do not chain");
    at = step_tgt(q, s);
    int g = gen_of_arrow[std::size_t(s.arrow)];
    if (g < 0) continue;
    acc = mul(free_gen(acc.rank, g, s.fwd ? 1 : -1), acc);
  }
  if (at != w.tgt) precondition_error("walk endpoint mismatch");
  return acc;
}

FundGroup fundamental_group(const BoundQuiver& bq, int x0) {
  const Quiver& q = bq.q;
  if (x0 < 0 || x0 >= q.nv()) precondition_error("basepoint out of range");

  FundGroup fg;
  fg.bq = &bq;
  fg.x0 = x0;
  std::vector<bool> visited(std::size_t(q.nv()), false);
  std::vector<bool> in_tree(std::size_t(q.na()), false);
  fg.tree_walk.assign(std::size_t(q.nv()), Walk{});
  std::queue<int> bfs;
  visited[std::size_t(x0)] = true;
  fg.tree_walk[std::size_t(x0)] = Walk{x0, x0, {}};
  bfs.push(x0);
  while (!bfs.empty()) {
    int v = bfs.front();
    bfs.pop();
    for (int ai = 0; ai < q.na(); ai++) {
      const Arrow& a = q.arrows[std::size_t(ai)];
      if (a.src == v && !visited[std::size_t(a.tgt)]) {
        visited[std::size_t(a.tgt)] = true;
        in_tree[std::size_t(ai)] = true;
        fg.tree_arrows.push_back(ai);
        fg.tree_walk[std::size_t(a.tgt)] = fg.tree_walk[std::size_t(v)];
        fg.tree_walk[std::size_t(a.tgt)].steps.push_back({ai, true});
        fg.tree_walk[std::size_t(a.tgt)].tgt = a.tgt;
        bfs.push(a.tgt);
      } else if (a.tgt == v && !visited[std::size_t(a.src)]) {
        visited[std::size_t(a.src)] = true;
        in_tree[std::size_t(ai)] = true;
        fg.tree_arrows.push_back(ai);
        fg.tree_walk[std::size_t(a.src)] = fg.tree_walk[std::size_t(v)];
        fg.tree_walk[std::size_t(a.src)].steps.push_back({ai, false});
        fg.tree_walk[std::size_t(a.src)].tgt = a.src;
        bfs.push(a.src);
      }
    }
  }
  for (int v = 0; v < q.nv(); v++)
    if (!visited[std::size_t(v)]) precondition_error("quiver is not connected");
  for (int ai = 0; ai < q.na(); ai++)
    if (!in_tree[std::size_t(ai)]) {
      fg.chord_arrows.push_back(ai);
      fg.gen_names.push_back(q.arrows[std::size_t(ai)].name);
    }

  // relators: terms of one minimal relation are pairwise homotopic
  int rank = int(fg.chord_arrows.size());
  auto path_class = [&](const Path& p) {
    Walk pw{p.src, p.tgt, {}};
    for (int ai : p.arrows) pw.steps.push_back({ai, true});
    Walk closed = walk_then(q, fg.tree_walk[std::size_t(p.src)],
                            walk_then(q, pw, walk_inverse(q, fg.tree_walk[std::size_t(p.tgt)])));
    return raw_walk_class(fg, closed);
  };
  std::vector<GroupElem> rel;
  for (auto& mr : minimal_relations(bq).minimal) {
    GroupElem h1 = path_class(mr[0].path);
    for (std::size_t i = 1; i < mr.size(); i++) {
      GroupElem w = mul(h1, inv(path_class(mr[std::size_t(i)].path)));
      if (!w.is_identity()) rel.push_back(w);
    }
  }

  // Tietze pass: a relator that is a single generator power kills that generator
  fg.gen_killed.assign(std::size_t(rank), false);
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<GroupElem> nxt;
    for (auto& w : rel) {
      GroupElem v = free_identity(rank);
      for (auto& [g, e] : w.word)
        if (!fg.gen_killed[std::size_t(g)]) v = mul(v, free_gen(rank, g, e));
      if (v.is_identity()) {
        changed = true;
        continue;
      }
      if (v.word.size() == 1 && (v.word[0].second == 1 || v.word[0].second == -1)) {
        fg.gen_killed[std::size_t(v.word[0].first)] = true;
        changed = true;
        continue;
      }
      nxt.push_back(v);
    }
    rel = std::move(nxt);
  }
  fg.relators = rel;
  for (int g = 0; g < rank; g++)
    if (!fg.gen_killed[std::size_t(g)]) fg.live_gens.push_back(g);
  fg.is_free = fg.relators.empty();
  return fg;
}

static bool is_commutator_relator(const GroupElem& w) {
  if (w.word.size() != 4) return false;
  for (auto& [g, e] : w.word)
    if (e != 1 && e != -1) return false;
  int x = w.word[0].first, y = w.word[1].first;
  if (x == y) return false;
  if (w.word[2].first != x || w.word[3].first != y) return false;
  for (long v : abelianize(w))
    if (v != 0) return false;
  return true;
}

WalkClass walk_homotopy_class(const FundGroup& fg, const Walk& w) {
  if (w.src != fg.x0 || w.tgt != fg.x0) precondition_error("walk must be closed at the basepoint");
  GroupElem raw = raw_walk_class(fg, w);
  GroupElem word = free_identity(raw.rank);
  for (auto& [g, e] : raw.word)
    if (!fg.gen_killed[std::size_t(g)]) word = mul(word, free_gen(raw.rank, g, e));

  WalkClass out;
  if (fg.is_free) {
    out.word = word;
    out.profile = HomotopyProfile::Free;
    return out;
  }
  bool all_comm = !fg.relators.empty();
  std::set<std::pair<int, int>> pairs;
  for (auto& r : fg.relators) {
    if (!is_commutator_relator(r)) {
      all_comm = false;
      break;
    }
    pairs.insert({std::min(r.word[0].first, r.word[1].first), std::max(r.word[0].first, r.word[1].first)});
  }
  if (all_comm) {
    std::size_t need = fg.live_gens.size() * (fg.live_gens.size() - 1) / 2;
    all_comm = pairs.size() == need;
  }
  if (all_comm) {
    GroupElem ab = abelian_identity(word.rank);
    ab.vec = abelianize(word);
    out.word = ab;
    out.profile = HomotopyProfile::FreeAbelian;
    return out;
  }
  out.word = word;
  out.profile = HomotopyProfile::Undecidable;
  return out;
}

}  // namespace ctau
