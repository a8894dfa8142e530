#include "ctau/group.hpp"

#include <sstream>

namespace ctau {

GroupElem free_identity(int rank) {
  GroupElem g;
  g.abelian = false;
  g.rank = rank;
  return g;
}
GroupElem abelian_identity(int rank) {
  GroupElem g;
  g.abelian = true;
  g.rank = rank;
  g.vec.assign(std::size_t(rank), 0);
  return g;
}
GroupElem free_gen(int rank, int g0, long exp) {
  GroupElem g = free_identity(rank);
  if (exp != 0) g.word.push_back({g0, exp});
  return g;
}
GroupElem abelian_gen(int rank, int g0, long exp) {
  GroupElem g = abelian_identity(rank);
  g.vec[std::size_t(g0)] += exp;
  return g;
}

static void push_run(std::vector<std::pair<int, long>>& w, int gen, long exp) {
  if (exp == 0) return;
  if (!w.empty() && w.back().first == gen) {
    w.back().second += exp;
    if (w.back().second == 0) w.pop_back();
  } else {
    w.push_back({gen, exp});
  }
}

GroupElem mul(const GroupElem& a, const GroupElem& b) {
  if (a.abelian != b.abelian || a.rank != b.rank) precondition_error("group profile mismatch");
  if (a.abelian) {
    GroupElem r = a;
    for (int i = 0; i < a.rank; i++) r.vec[std::size_t(i)] += b.vec[std::size_t(i)];
    return r;
  }
  GroupElem r = a;
  for (auto& [g, e] : b.word) push_run(r.word, g, e);
  return r;
}

GroupElem inv(const GroupElem& a) {
  GroupElem r = a;
  if (a.abelian) {
    for (auto& v : r.vec) v = -v;
    return r;
  }
  r.word.clear();
  for (auto it = a.word.rbegin(); it != a.word.rend(); ++it) r.word.push_back({it->first, -it->second});
  return r;
}

GroupElem pow(const GroupElem& a, long n) {
  if (a.abelian) {
    GroupElem r = a;
    for (auto& v : r.vec) v *= n;
    return r;
  }
  GroupElem base = n < 0 ? inv(a) : a;
  long m = n < 0 ? -n : n;
  GroupElem r = free_identity(a.rank);
  for (long i = 0; i < m; i++) r = mul(r, base);
  return r;
}

std::vector<long> abelianize(const GroupElem& a) {
  if (a.abelian) return a.vec;
  std::vector<long> v(std::size_t(a.rank), 0);
  for (auto& [g, e] : a.word) v[std::size_t(g)] += e;
  return v;
}

long s_length(const GroupElem& a) {
  if (a.abelian) precondition_error("s_length needs the free profile; use l1_length");
  long n = 0;
  for (auto& [g, e] : a.word) n += (e < 0 ? -e : e);
  return n;
}
long l1_length(const GroupElem& a) {
  long n = 0;
  for (long v : abelianize(a)) n += (v < 0 ? -v : v);
  return n;
}

std::string word_str(const GroupElem& a, const std::vector<std::string>& names) {
  std::ostringstream os;
  bool first = true;
  auto emit = [&](const std::string& n, long e) {
    if (e == 0) return;
    if (!first) os << ' ';
    first = false;
    os << n;
    if (e != 1) os << '^' << e;
  };
  if (a.abelian) {
    for (int i = 0; i < a.rank; i++) emit(names[std::size_t(i)], a.vec[std::size_t(i)]);
  } else {
    for (auto& [g, e] : a.word) emit(names[std::size_t(g)], e);
  }
  return first ? "1" : os.str();
}

GroupElem word_parse(const std::string& s, const std::vector<std::string>& names, bool abelian) {
  GroupElem r = abelian ? abelian_identity(int(names.size())) : free_identity(int(names.size()));
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) {
    if (tok == "1") continue;
    long e = 1;
    std::string name = tok;
    auto caret = tok.find('^');
    if (caret != std::string::npos) {
      name = tok.substr(0, caret);
      std::string es = tok.substr(caret + 1);
      try {
        std::size_t used = 0;
        e = std::stol(es, &used);
        if (used != es.size()) throw std::invalid_argument(es);
      } catch (const std::exception&) {
        parse_error("bad exponent in word token '" + tok + "'");
      }
    }
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) parse_error("unknown generator '" + name + "'");
    int g = int(it - names.begin());
    r = mul(r, abelian ? abelian_gen(int(names.size()), g, e) : free_gen(int(names.size()), g, e));
  }
  return r;
}

std::string elem_key(const GroupElem& a) {
  std::ostringstream os;
  if (a.abelian) {
    os << "a:";
    for (long v : a.vec) os << v << ',';
  } else {
    os << "f:";
    for (auto& [g, e] : a.word) os << g << '^' << e << ',';
  }
  return os.str();
}

/* —— Tower —— */

Tower Tower::over(const std::vector<std::string>& names) {
  Tower t;
  t.base_names = names;
  std::vector<int> s0;
  for (int k = 0; k < int(names.size()); k++) s0.push_back(t.intern(0, 0, k));
  t.tracked_sets.push_back(s0);
  return t;
}

int Tower::intern(int stage, long j, int parent) {
  auto key = std::make_tuple(stage, j, parent);
  auto it = hindex.find(key);
  if (it != hindex.end()) return it->second;
  hindex[key] = int(handles.size());
  handles.push_back({stage, j, parent});
  return int(handles.size()) - 1;
}

GroupElem Tower::a_elem(int i) const { return materialize(a[std::size_t(i - 1)]); }

int Tower::find_tracked(int stage, const std::string& display_name) const {
  for (int h : tracked(stage))
    if (handle_name(h) == display_name) return h;
  return -1;
}

GroupElem Tower::materialize(int h) const {
  if (h < int(mat_cache.size()) && (!mat_cache[std::size_t(h)].word.empty() || mat_cache[std::size_t(h)].rank > 0))
    return mat_cache[std::size_t(h)];
  const Handle& H = handles[std::size_t(h)];
  GroupElem out;
  if (H.stage == 0) {
    out = free_gen(int(base_names.size()), H.parent);
  } else {
    GroupElem ai = materialize(a[std::size_t(H.stage - 1)]);
    out = mul(mul(pow(ai, H.j), materialize(H.parent)), pow(ai, -H.j));
  }
  if (int(mat_cache.size()) <= h) mat_cache.resize(std::size_t(h) + 1);
  mat_cache[std::size_t(h)] = out;
  return out;
}

std::string Tower::handle_name(int h) const { return word_str(materialize(h), base_names); }

std::vector<int> Tower::tracked(int stage, int /*window*/) const {
  if (stage >= int(tracked_sets.size())) precondition_error("stage not yet built");
  return tracked_sets[std::size_t(stage)];
}

void Tower::ensure_stage(int i, int window) {
  while (stages() < i) {
    int s = stages();
    const auto& cand = tracked_sets[std::size_t(s)];
    if (cand.empty()) precondition_error("tower exhausted: no generators left at stage " + std::to_string(s));
    int best = -1;
    long best_len = 0;
    std::string best_name;
    for (int h : cand) {
      long len = s_length(materialize(h));
      std::string nm = handle_name(h);
      if (best < 0 || len < best_len || (len == best_len && nm < best_name)) {
        best = h;
        best_len = len;
        best_name = nm;
      }
    }
    choose_next(best, window);
  }
}

void Tower::choose_next(int handle, int window) {
  int s = stages();
  const auto& cand = tracked_sets[std::size_t(s)];
  if (std::find(cand.begin(), cand.end(), handle) == cand.end())
    precondition_error("chosen generator is not in the current tracked set");
  a.push_back(handle);
  std::vector<int> nxt;
  for (int p : cand) {
    if (p == handle) continue;
    for (long j = -window; j <= window; j++) nxt.push_back(intern(s + 1, j, p));
  }
  tracked_sets.push_back(nxt);
}

TailRewrite rewrite_tail(Tower& t, const GroupElem& g, int stage) {
  if (g.abelian) precondition_error("rewrite_tail needs the free profile");
  if (g.rank != int(t.base_names.size())) precondition_error("rank mismatch");
  t.ensure_stage(stage);

  std::vector<std::pair<int, int>> letters;  // (handle, ±1)
  for (auto& [gen, exp] : g.word) {
    int h = t.intern(0, 0, gen);
    int sgn = exp < 0 ? -1 : 1;
    for (long k = 0; k < (exp < 0 ? -exp : exp); k++) letters.push_back({h, sgn});
  }

  TailRewrite out;
  out.r.assign(std::size_t(stage), 0);
  for (int i = 1; i <= stage; i++) {
    int ah = t.a[std::size_t(i - 1)];
    long c = 0;
    std::vector<std::pair<int, int>> nxt;
    for (auto& [h, e] : letters) {
      if (h == ah) {
        c += e;
        continue;
      }
      std::pair<int, int> L{t.intern(i, c, h), e};
      if (!nxt.empty() && nxt.back().first == L.first && nxt.back().second == -L.second)
        nxt.pop_back();
      else
        nxt.push_back(L);
    }
    out.r[std::size_t(i - 1)] = c;
    letters = std::move(nxt);
  }
  out.head = letters;
  GroupElem he = free_identity(g.rank);
  for (auto& [h, e] : letters) he = mul(he, e > 0 ? t.materialize(h) : inv(t.materialize(h)));
  out.head_elem = he;
  return out;
}

int stage_for_length(Tower& t, long r, int stage_cap, int window) {
  if (r <= 1) return 0;
  for (int i = 0; i <= stage_cap; i++) {
    t.ensure_stage(i, window);
    bool ok = true;
    for (int h : t.tracked(i, window)) {
      if (s_length(t.materialize(h)) < r) {
        ok = false;
        break;
      }
    }
    if (ok) return i;
  }
  budget_error("stage_for_length exceeded the stage cap " + std::to_string(stage_cap));
}

long quotient_hom_to_Z(Tower& t, const GroupElem& g, int i) {
  TailRewrite rw = rewrite_tail(t, g, i);
  for (int k = 0; k + 1 < i; k++)
    if (rw.r[std::size_t(k)] != 0)
      precondition_error("element is outside G_" + std::to_string(i - 1) + ": stage " + std::to_string(k + 1) +
                         " exponent is " + std::to_string(rw.r[std::size_t(k)]));
  return rw.r[std::size_t(i - 1)];
}

}  // namespace ctau
