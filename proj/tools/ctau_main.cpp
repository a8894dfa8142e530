#include <iostream>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ctau/cover.hpp"
#include "ctau/io.hpp"
#include "json.hpp"

using namespace ctau;
using nlohmann::json;

namespace {

struct Out {
  bool as_json = false;
  json j;
  std::ostringstream text;

  void line(const std::string& s) { text << s << "\n"; }
  void flush() {
    if (as_json)
      std::cout << j.dump() << "\n";
    else
      std::cout << text.str();
  }
};

std::string dims_str(const std::vector<int>& d) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < d.size(); i++) {
    if (i) os << ",";
    os << d[i];
  }
  os << ")";
  return os.str();
}

int vertex_or_fail(const BoundQuiver& bq, const std::string& name) {
  int x = bq.q.vertex(name);
  if (x < 0) precondition_error("unknown vertex '" + name + "'");
  return x;
}

int pick_center(const BoundQuiver& bq, const std::string& opt, int fallback) {
  return opt.empty() ? fallback : vertex_or_fail(bq, opt);
}

int pick_radius(const BoundQuiver& bq, int opt) {
  if (opt > 0) return opt;
  int n = bq.N >= 2 ? bq.N : AlgebraBasisT<Rat>::build(bq).N;
  return std::max(8, 2 * n + 2);
}

/* Count distinct window vertices visited by a walk. */
int distinct_positions(const Walk& w, const CoverWindow& cw) {
  std::set<int> seen{w.src};
  int cur = w.src;
  for (auto& s : w.steps) {
    const Arrow& A = cw.wq.q.arrows[std::size_t(s.arrow)];
    cur = s.fwd ? A.tgt : A.src;
    seen.insert(cur);
  }
  return int(seen.size());
}

std::vector<std::string> walk_position_names(const Walk& w, const Quiver& q) {
  std::vector<std::string> out{q.vnames[std::size_t(w.src)]};
  int cur = w.src;
  for (auto& s : w.steps) {
    const Arrow& A = q.arrows[std::size_t(s.arrow)];
    cur = s.fwd ? A.tgt : A.src;
    out.push_back(q.vnames[std::size_t(cur)]);
  }
  return out;
}

/* ------------------------------ algebra check ---------------------------- */

int run_algebra_check(Out& out, const std::string& path, const std::string& base) {
  BoundQuiver bq = load_algebra(path);
  for (auto& rel : bq.relations)
    for (auto& t : rel)
      if (t.path.length() < 2)
        precondition_error("relation term of length " + std::to_string(t.path.length()) +
                           ": the ideal is not admissible");
  auto ab = AlgebraBasisT<Rat>::build(bq);
  int x0 = pick_center(bq, base, 0);
  FundGroup fg = fundamental_group(bq, x0);

  out.line("algebra " + path + ": " + std::to_string(bq.q.nv()) + " vertices, " +
           std::to_string(bq.q.na()) + " arrows, " + std::to_string(bq.relations.size()) +
           " relations");
  std::ostringstream pi;
  if (fg.is_free)
    pi << "pi1 free rank " << fg.free_rank();
  else
    pi << "pi1 not free here (" << fg.live_gens.size() << " generators with relators)";
  out.line("admissible, dim " + std::to_string(ab.dim()) + ", " + pi.str());
  std::string gens;
  for (std::size_t i = 0; i < fg.gen_names.size(); i++) gens += (i ? ", " : "") + fg.gen_names[i];
  out.line("nilpotency bound " + std::to_string(ab.N) + "; basepoint " +
           bq.q.vnames[std::size_t(x0)] + "; generators " + (gens.empty() ? "none" : gens));

  out.j = json{{"verb", "algebra check"},
               {"file", path},
               {"vertices", bq.q.nv()},
               {"arrows", bq.q.na()},
               {"relations", bq.relations.size()},
               {"admissible", true},
               {"dim", ab.dim()},
               {"nilpotency", ab.N},
               {"basepoint", bq.q.vnames[std::size_t(x0)]},
               {"pi1_free", fg.is_free},
               {"pi1_rank", fg.is_free ? fg.free_rank() : -1},
               {"generators", fg.gen_names}};
  return 0;
}

/* -------------------------------- module tau ----------------------------- */

int run_module_tau(Out& out, const std::string& path) {
  LoadedModule lm = load_module(path);
  TautCtx<Rat> tc(*lm.bq);
  RepT<Rat> t = tau(tc.alg, lm.rep);
  int self = hom_dim(lm.rep, t);
  out.line("module " + path + ": dim " + dims_str(lm.rep.dim) + ", total " +
           std::to_string(lm.rep.total()));
  out.line("tau: dim " + dims_str(t.dim) + ", total " + std::to_string(t.total()));
  out.line("hom(M, tau M) = " + std::to_string(self) + "; tau-rigid: " + (self == 0 ? "yes" : "no"));
  out.j = json{{"verb", "module tau"},
               {"file", path},
               {"dim", lm.rep.dim},
               {"tau_dim", t.dim},
               {"hom_to_tau", self},
               {"tau_rigid", self == 0}};
  return 0;
}

/* ----------------------------- tautilt enumerate ------------------------- */

int run_enumerate(Out& out, const std::string& path, int budget, int guard, const std::string& dot,
                  unsigned long seed) {
  BoundQuiver bq = load_algebra(path);
  TautCtx<Rat> tc(bq);
  auto mq = mutation_quiver(tc, full_projective_pair(tc.alg), budget, guard, seed);

  // undirected exchange graph, for shape reporting
  std::set<std::pair<int, int>> und;
  for (auto& e : mq.edges) und.insert({std::min(e.from, e.to), std::max(e.from, e.to)});
  std::map<int, int> deg;
  for (auto& [a, b] : und) {
    deg[a]++;
    deg[b]++;
  }
  bool pentagon = !mq.truncated && mq.nodes.size() == 5 && und.size() == 5;
  if (pentagon)
    for (auto& [v, d] : deg) pentagon = pentagon && d == 2;

  out.line("seed " + std::to_string(seed));
  out.line(std::to_string(mq.nodes.size()) + (mq.truncated ? " pairs so far" : " pairs") +
           (pentagon ? ", pentagon" : ""));
  for (std::size_t i = 0; i < mq.nodes.size(); i++)
    out.line("  " + std::to_string(i) + ": " + pair_label(bq, mq.nodes[i]));
  out.line("exchanges: " + std::to_string(und.size()));

  std::vector<std::string> labels;
  for (auto& n : mq.nodes) labels.push_back(pair_label(bq, n));
  out.j = json{{"verb", "tautilt enumerate"}, {"file", path},          {"seed", seed},
               {"pairs", mq.nodes.size()},    {"exchanges", und.size()}, {"pentagon", pentagon},
               {"truncated", mq.truncated},   {"labels", labels}};

  if (!dot.empty()) {
    std::string d = to_dot(bq, mq);
    if (dot == "-") {
      if (!out.as_json) std::cout << out.text.str();
      out.text.str("");
      std::cout << d;
    } else {
      std::ofstream f(dot);
      if (!f) precondition_error("cannot write " + dot);
      f << d;
      out.line("dot written to " + dot);
    }
  }
  if (mq.truncated) {
    out.flush();
    budget_error(mq.truncation_reason);
  }
  return 0;
}

/* ------------------------------- cover verbs ----------------------------- */

struct CoverArgs {
  std::string alg, grd, center, walk, steps;
  int radius = 0, depth = 2, radius0 = 8, cap = 64;
  unsigned long seed = 20260819;
};

int run_cover_window(Out& out, const CoverArgs& a) {
  BoundQuiver bq = load_algebra(a.alg);
  Grading g = load_grading(bq, a.grd);
  int center = pick_center(bq, a.center, 0);
  int radius = pick_radius(bq, a.radius);
  CoverWindow cw = build_window(g, center, radius);
  int interior = 0;
  for (int v = 0; v < cw.wq.q.nv(); v++)
    if (cw.interior(v)) interior++;
  auto ab = AlgebraBasisT<Rat>::build(bq);
  auto cov = covering_check(cw, ab);

  out.line("window over " + a.alg + " with grading " + a.grd);
  out.line("center " + bq.q.vnames[std::size_t(center)] + ", radius " + std::to_string(radius) +
           ", nilpotency " + std::to_string(cw.N));
  out.line(std::to_string(cw.wq.q.nv()) + " vertices (" + std::to_string(interior) +
           " interior), " + std::to_string(cw.wq.q.na()) + " arrows, " +
           std::to_string(cw.wq.relations.size()) + " relations");
  out.line(std::string("covering check: ") + (cov.ok ? "ok" : "FAILED") + " (" +
           std::to_string(cov.checked) + " local bijections)");
  out.j = json{{"verb", "cover window"},
               {"algebra", a.alg},
               {"grading", a.grd},
               {"center", bq.q.vnames[std::size_t(center)]},
               {"radius", radius},
               {"vertices", cw.wq.q.nv()},
               {"interior", interior},
               {"arrows", cw.wq.q.na()},
               {"relations", cw.wq.relations.size()},
               {"covering_ok", cov.ok},
               {"local_bijections", cov.checked}};
  return cov.ok ? 0 : 1;
}

int run_cover_lift_string(Out& out, const CoverArgs& a) {
  BoundQuiver bq = load_algebra(a.alg);
  Grading g = load_grading(bq, a.grd);
  if (a.walk.empty()) precondition_error("--walk is required");
  Walk u = parse_walk(bq, a.walk);
  auto ab = AlgebraBasisT<Rat>::build(bq);
  int center = pick_center(bq, a.center, u.src);
  int radius = pick_radius(bq, a.radius);
  CoverWindow cw = build_window(g, center, radius);
  int bp = nearest_over(cw, u.src);
  Walk lifted = lift_string(cw, u, bp);
  RepT<Rat> M = lifted_string_module(cw, ab, lifted);
  auto names = walk_position_names(lifted, cw.wq.q);
  int distinct = distinct_positions(lifted, cw);

  out.line("walk " + a.walk + " lifts from " + cw.wq.q.vnames[std::size_t(bp)] + ":");
  std::string seq;
  for (std::size_t i = 0; i < names.size(); i++) seq += (i ? " -> " : "") + names[i];
  out.line("  " + seq);
  out.line(std::to_string(names.size()) + " positions, " + std::to_string(distinct) +
           " distinct; string module total " + std::to_string(M.total()));
  out.j = json{{"verb", "cover lift-string"},
               {"algebra", a.alg},
               {"grading", a.grd},
               {"walk", a.walk},
               {"positions", names},
               {"distinct", distinct},
               {"module_total", M.total()}};
  return 0;
}

int run_cover_pushdown(Out& out, const CoverArgs& a) {
  BoundQuiver bq = load_algebra(a.alg);
  Grading g = load_grading(bq, a.grd);
  if (a.walk.empty()) precondition_error("--walk is required");
  Walk u = parse_walk(bq, a.walk);
  TautCtx<Rat> tc(bq);
  RepT<Rat> Mu = string_module(tc.alg.ab, u);
  int center = pick_center(bq, a.center, u.src);
  int radius = pick_radius(bq, a.radius);
  CoverWindow cw = build_window(g, center, radius);
  Walk lifted = lift_string(cw, u, nearest_over(cw, u.src));
  RepT<Rat> M = lifted_string_module(cw, tc.alg.ab, lifted);
  RepT<Rat> pd = push_down(cw, M);
  auto iso = is_isomorphic(pd, Mu, a.seed);
  if (iso.verdict == Tri::Inconclusive) inconclusive_error("isomorphism test was inconclusive");
  bool ok = iso.verdict == Tri::Yes;

  out.line("seed " + std::to_string(a.seed));
  out.line("base string module: dim " + dims_str(Mu.dim) + ", total " + std::to_string(Mu.total()));
  out.line("lifted module total " + std::to_string(M.total()) + "; push-down dim " +
           dims_str(pd.dim));
  out.line(std::string("push-down isomorphic to the base string module: ") + (ok ? "yes" : "NO"));
  out.j = json{{"verb", "cover pushdown"}, {"algebra", a.alg},       {"grading", a.grd},
               {"walk", a.walk},           {"seed", a.seed},         {"base_dim", Mu.dim},
               {"pushdown_dim", pd.dim},   {"isomorphic", ok}};
  return ok ? 0 : 1;
}

int run_cover_mutate_orbit(Out& out, const CoverArgs& a) {
  BoundQuiver bq = load_algebra(a.alg);
  Grading g = load_grading(bq, a.grd);
  TautCtx<Rat> tc(bq);
  int center = pick_center(bq, a.center, 0);
  int radius = pick_radius(bq, a.radius);
  WinCtx<Rat> W(build_window(g, center, radius));

  std::vector<int> steps;
  if (!a.steps.empty()) {
    std::istringstream is(a.steps);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      try {
        std::size_t used = 0;
        steps.push_back(std::stoi(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        parse_error("bad step index '" + tok + "'");
      }
    }
  }

  out.line("seed " + std::to_string(a.seed));
  OrbitPairT<Rat> p = lifted_projective_pair(W);
  out.line("start: " + pair_label(bq, push_down_pair(W.cw, p)));
  json jsteps = json::array();
  for (std::size_t i = 0; i < steps.size(); i++) {
    p = orbit_mutate(W.cw, p, steps[i], a.seed);
    std::string lbl = pair_label(bq, push_down_pair(W.cw, p));
    out.line("step " + std::to_string(i + 1) + ": orbit " + std::to_string(steps[i]) + " -> " + lbl);
    jsteps.push_back(lbl);
  }
  bool valid = is_support_G_tilting(W, p, a.seed);
  out.line(std::string("final pair is support tilting up in the cover: ") + (valid ? "yes" : "NO"));
  out.j = json{{"verb", "cover mutate-orbit"},
               {"algebra", a.alg},
               {"grading", a.grd},
               {"seed", a.seed},
               {"steps", jsteps},
               {"final", pair_label(bq, push_down_pair(W.cw, p))},
               {"valid", valid}};
  return valid ? 0 : 1;
}

int run_cover_verify_commute(Out& out, const CoverArgs& a) {
  BoundQuiver bq = load_algebra(a.alg);
  Grading g = load_grading(bq, a.grd);
  TautCtx<Rat> tc(bq);
  int center = pick_center(bq, a.center, 0);
  CommuteReport rep = verify_commute(tc, g, center, a.depth, a.radius0, a.cap, a.seed);

  out.line("seed " + std::to_string(a.seed));
  out.line("commutation walk: depth requested " + std::to_string(rep.depth_requested) +
           ", reached " + std::to_string(rep.depth_reached));
  out.line("nodes checked: " + std::to_string(rep.nodes) + ", window radius " +
           std::to_string(rep.radius_used));
  out.line(rep.ok ? "ok: push-down and mutation commute at every node"
                  : "DIVERGENCE: " + rep.divergence);
  out.j = json{{"verb", "cover verify-commute"},
               {"algebra", a.alg},
               {"grading", a.grd},
               {"seed", a.seed},
               {"depth_requested", rep.depth_requested},
               {"depth_reached", rep.depth_reached},
               {"nodes", rep.nodes},
               {"radius", rep.radius_used},
               {"ok", rep.ok},
               {"divergence", rep.divergence}};
  return rep.ok ? 0 : 1;
}

/* ------------------------------ paper-example ---------------------------- */

const char* kExampleAlgebra =
    "vertex 1\nvertex 2\nvertex 3\nvertex 4\n"
    "arrow a 1 2\narrow b 2 3\narrow c 3 4\narrow d 1 3\narrow e 2 4\n"
    "relation ba\nrelation cb\n";
const char* kExampleWalk = "-c.e.a.-d.b";

int run_paper_example(Out& out, unsigned long seed) {
  BoundQuiver bq = parse_algebra(kExampleAlgebra, "example");
  TautCtx<Rat> tc(bq);
  int x0 = bq.q.vertex("2");
  FundGroup fg = fundamental_group(bq, x0);
  out.line("seed " + std::to_string(seed));
  out.line("example algebra: dim " + std::to_string(tc.alg.ab.dim()) + ", nilpotency " +
           std::to_string(tc.alg.ab.N) + "; pi1 free rank " + std::to_string(fg.free_rank()));

  Walk u = parse_walk(bq, kExampleWalk);
  RepT<Rat> Mu = string_module(tc.alg.ab, u);
  out.line("M(u): dim " + dims_str(Mu.dim));

  Grading ug = universal_grading(bq, fg);
  Tower t = Tower::over(fg.gen_names);
  t.ensure_stage(2);

  auto lift_and_check = [&](const CoverWindow& cw, const char* what) -> bool {
    Walk lw = lift_string(cw, u, nearest_over(cw, u.src));
    RepT<Rat> M = lifted_string_module(cw, tc.alg.ab, lw);
    RepT<Rat> pd = push_down(cw, M);
    bool ok = is_isomorphic(pd, Mu, seed).verdict == Tri::Yes;
    out.line(std::string(what) + ": lift has " + std::to_string(distinct_positions(lw, cw)) +
             " distinct positions; push-down isomorphic: " + (ok ? "yes" : "NO"));
    return ok;
  };

  Grading gz = quotient_grading(ug, t, 1);
  CoverWindow w1 = build_window(gz, x0, 9);
  bool ok1 = lift_and_check(w1, "rank-1 window");

  Grading gab = abelianized_grading(ug);
  CoverWindow w2 = build_window(gab, x0, 9);
  bool ok2 = lift_and_check(w2, "rank-2 window");

  CoverWindow ws2 = build_stage_window(ug, t, 2, x0, 9);
  bool ok2s = lift_and_check(ws2, "stage-2 coset window");

  CoverWindow gw = build_window(ug, x0, 9);
  Walk us = lift_string(ws2, u, nearest_over(ws2, u.src));
  RepT<Rat> Ms = lifted_string_module(ws2, tc.alg.ab, us);
  RepT<Rat> N = lift_via_domain(gw, ws2, t, 2, Ms, seed);
  bool okd = is_isomorphic(push_down(gw, N), Mu, seed).verdict == Tri::Yes;
  out.line(std::string("fundamental-domain lift to the free window: push-down isomorphic: ") +
           (okd ? "yes" : "NO"));

  bool all = ok1 && ok2 && ok2s && okd;
  out.line(all ? "OK: F_λ M(u₁) ≅ M(u); F_λ M(u₂) ≅ M(u); lift via F₂ domain OK"
               : "FAIL: a round trip did not close");
  out.j = json{{"verb", "paper-example"}, {"seed", seed},           {"dim", tc.alg.ab.dim()},
               {"pi1_rank", fg.free_rank()}, {"m_u_dim", Mu.dim},   {"rank1_ok", ok1},
               {"rank2_ok", ok2},         {"stage2_ok", ok2s},      {"domain_ok", okd},
               {"ok", all}};
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tau-tilting over coverings of bound quiver algebras"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "emit one JSON line instead of text");

  std::string alg_path, mod_path, base, dot;
  int budget = 10000, guard = 4;
  unsigned long seed = 20260819;
  CoverArgs ca;

  auto* algebra = app.add_subcommand("algebra", "algebra-level reports");
  algebra->require_subcommand(1);
  auto* acheck = algebra->add_subcommand("check", "admissibility, dimension, fundamental group");
  acheck->add_option("algebra", alg_path, "algebra file")->required();
  acheck->add_option("--base", base, "fundamental-group basepoint (vertex name)");

  auto* module = app.add_subcommand("module", "module-level reports");
  module->require_subcommand(1);
  auto* mtau = module->add_subcommand("tau", "Auslander-Reiten translate of a module file");
  mtau->add_option("module", mod_path, "module file")->required();

  auto* tautilt = app.add_subcommand("tautilt", "support tau-tilting theory");
  tautilt->require_subcommand(1);
  auto* tenum = tautilt->add_subcommand("enumerate", "walk the mutation graph from the projectives");
  tenum->add_option("algebra", alg_path, "algebra file")->required();
  tenum->add_option("--budget", budget, "node budget");
  tenum->add_option("--guard", guard, "dimension guard factor");
  tenum->add_option("--dot", dot, "write the exchange graph in DOT ('-' for stdout)");
  tenum->add_option("--seed", seed, "seed for isomorphism tests");

  auto* cover = app.add_subcommand("cover", "covering-theory verbs");
  cover->require_subcommand(1);
  auto add_cover_common = [&](CLI::App* sc, bool wants_walk) {
    sc->add_option("algebra", ca.alg, "algebra file")->required();
    sc->add_option("grading", ca.grd, "grading file")->required();
    sc->add_option("--center", ca.center, "window center (vertex name)");
    sc->add_option("--radius", ca.radius, "window radius");
    sc->add_option("--seed", ca.seed, "seed for randomized checks");
    if (wants_walk) sc->add_option("--walk", ca.walk, "walk in composition order, e.g. -c.e.a.-d.b");
  };
  auto* cwindow = cover->add_subcommand("window", "build a cover window and check it");
  add_cover_common(cwindow, false);
  auto* clift = cover->add_subcommand("lift-string", "lift a string walk into the window");
  add_cover_common(clift, true);
  auto* cpush = cover->add_subcommand("pushdown", "lift a string, push it down, compare");
  add_cover_common(cpush, true);
  auto* cmut = cover->add_subcommand("mutate-orbit", "orbit mutations from the lifted projectives");
  add_cover_common(cmut, false);
  cmut->add_option("--steps", ca.steps, "comma-separated orbit indices to mutate");
  auto* cverify = cover->add_subcommand("verify-commute", "lockstep mutation walk downstairs and upstairs");
  add_cover_common(cverify, false);
  cverify->add_option("--depth", ca.depth, "mutation depth to walk");
  cverify->add_option("--radius0", ca.radius0, "starting window radius");
  cverify->add_option("--cap", ca.cap, "window radius cap");

  auto* pex = app.add_subcommand("paper-example", "run the canned worked-example scenario");
  pex->add_option("--seed", seed, "seed for isomorphism tests");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Out out;
  out.as_json = as_json;
  int rc = 0;
  try {
    if (acheck->parsed())
      rc = run_algebra_check(out, alg_path, base);
    else if (mtau->parsed())
      rc = run_module_tau(out, mod_path);
    else if (tenum->parsed())
      rc = run_enumerate(out, alg_path, budget, guard, dot, seed);
    else if (cwindow->parsed())
      rc = run_cover_window(out, ca);
    else if (clift->parsed())
      rc = run_cover_lift_string(out, ca);
    else if (cpush->parsed())
      rc = run_cover_pushdown(out, ca);
    else if (cmut->parsed())
      rc = run_cover_mutate_orbit(out, ca);
    else if (cverify->parsed())
      rc = run_cover_verify_commute(out, ca);
    else if (pex->parsed())
      rc = run_paper_example(out, seed);
    else
      precondition_error("pick a subcommand (see --help)");
  } catch (const Error& e) {
    if (as_json)
      std::cout << json{{"error", e.what()}, {"exit", int(e.kind)}}.dump() << "\n";
    else
      std::cerr << "error: " << e.what() << "\n";
    return int(e.kind);
  }
  out.flush();
  return rc;
}
