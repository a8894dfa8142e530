#include "ctau/io.hpp"

#include <fstream>
#include <sstream>

namespace ctau {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

namespace {

struct Line {
  int no;
  std::vector<std::string> toks;
};

std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> out;
  std::istringstream is(text);
  std::string line;
  int no = 0;
  while (std::getline(is, line)) {
    no++;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    Line L{no, {}};
    std::string tok;
    while (ls >> tok) L.toks.push_back(tok);
    if (!L.toks.empty()) out.push_back(L);
  }
  return out;
}

[[noreturn]] void fail(const std::string& name, int line, const std::string& msg) {
  parse_error(name + ":" + std::to_string(line) + ": " + msg);
}

/* Splits a textual arrow string (composition order) into arrow ids in
   application order. Maximal munch unless '.' separators are present. */
std::vector<int> munch_arrows(const Quiver& q, const std::string& s, const std::string& name, int line) {
  std::vector<std::string> names;
  if (s.find('.') != std::string::npos) {
    std::string cur;
    for (char ch : s + ".") {
      if (ch == '.') {
        if (cur.empty()) fail(name, line, "empty arrow between dots in '" + s + "'");
        names.push_back(cur);
        cur.clear();
      } else
        cur += ch;
    }
  } else {
    std::size_t pos = 0;
    while (pos < s.size()) {
      std::size_t best = 0;
      for (auto& [an, ai] : q.aindex)
        if (an.size() > best && s.compare(pos, an.size(), an) == 0) best = an.size();
      if (best == 0) fail(name, line, "no arrow name matches at '" + s.substr(pos) + "'");
      names.push_back(s.substr(pos, best));
      pos += best;
    }
  }
  std::vector<int> ids;
  for (auto it = names.rbegin(); it != names.rend(); ++it) {  // to application order
    int ai = q.arrow(*it);
    if (ai < 0) fail(name, line, "unknown arrow '" + *it + "'");
    ids.push_back(ai);
  }
  for (std::size_t i = 0; i + 1 < ids.size(); i++)
    if (q.arrows[std::size_t(ids[i])].tgt != q.arrows[std::size_t(ids[i + 1])].src)
      fail(name, line, "term '" + s + "' is not composable");
  return ids;
}

RelTerm parse_term(const Quiver& q, std::string tok, Rat sign, const std::string& name, int line) {
  Rat coef = sign;
  auto star = tok.find('*');
  if (star != std::string::npos) {
    try {
      coef *= rat_parse(tok.substr(0, star));
    } catch (const Error&) {
      fail(name, line, "bad coefficient '" + tok.substr(0, star) + "'");
    }
    tok = tok.substr(star + 1);
  }
  auto ids = munch_arrows(q, tok, name, line);
  if (ids.empty()) fail(name, line, "empty relation term");
  Path p;
  p.arrows = ids;
  p.src = q.arrows[std::size_t(ids.front())].src;
  p.tgt = q.arrows[std::size_t(ids.back())].tgt;
  return {coef, p};
}

}  // namespace

BoundQuiver parse_algebra(const std::string& text, const std::string& name) {
  BoundQuiver bq;
  bq.name = name;
  for (auto& L : tokenize(text)) {
    const auto& t = L.toks;
    if (t[0] == "vertex") {
      if (t.size() != 2) fail(name, L.no, "vertex wants one id");
      if (bq.q.vertex(t[1]) >= 0) fail(name, L.no, "duplicate vertex '" + t[1] + "'");
      bq.q.add_vertex(t[1]);
    } else if (t[0] == "arrow") {
      if (t.size() != 4) fail(name, L.no, "arrow wants: arrow <id> <src> <tgt>");
      if (bq.q.arrow(t[1]) >= 0) fail(name, L.no, "duplicate arrow '" + t[1] + "'");
      int s = bq.q.vertex(t[2]), tg = bq.q.vertex(t[3]);
      if (s < 0) fail(name, L.no, "unknown vertex '" + t[2] + "'");
      if (tg < 0) fail(name, L.no, "unknown vertex '" + t[3] + "'");
      bq.q.add_arrow(t[1], s, tg);
    } else if (t[0] == "relation") {
      if (t.size() < 2) fail(name, L.no, "empty relation");
      LinComb rel;
      Rat sign = 1;
      bool expect_term = true;
      for (std::size_t i = 1; i < t.size(); i++) {
        std::string tok = t[i];
        if (tok == "+" || tok == "-") {
          if (expect_term) fail(name, L.no, "dangling sign");
          sign = tok == "-" ? -1 : 1;
          expect_term = true;
          continue;
        }
        if (!expect_term) fail(name, L.no, "missing +/- between terms");
        if (tok.size() > 1 && (tok[0] == '+' || tok[0] == '-')) {
          if (tok[0] == '-') sign *= -1;
          tok = tok.substr(1);
        }
        rel.push_back(parse_term(bq.q, tok, sign, name, L.no));
        sign = 1;
        expect_term = false;
      }
      if (expect_term) fail(name, L.no, "relation ends with a sign");
      int s = rel[0].path.src, tg = rel[0].path.tgt;
      for (auto& tm : rel)
        if (tm.path.src != s || tm.path.tgt != tg) fail(name, L.no, "relation terms are not parallel");
      bq.relations.push_back(rel);
    } else {
      fail(name, L.no, "unknown directive '" + t[0] + "'");
    }
  }
  return bq;
}

BoundQuiver load_algebra(const std::string& path) { return parse_algebra(read_file(path), path); }

Grading parse_grading(const BoundQuiver& bq, const std::string& text, const std::string& name) {
  auto lines = tokenize(text);
  if (lines.empty()) parse_error(name + ": empty grading file");
  bool have_group = false;
  Grading g;
  std::vector<bool> seen(std::size_t(bq.q.na()), false);
  for (auto& L : lines) {
    const auto& t = L.toks;
    if (t[0] == "group") {
      if (have_group) fail(name, L.no, "second group line");
      if (t.size() < 2) fail(name, L.no, "group wants: abelian <rank> | free <names...>");
      if (t[1] == "abelian") {
        if (t.size() != 3) fail(name, L.no, "group abelian wants a rank");
        int rank = 0;
        try {
          std::size_t used = 0;
          rank = std::stoi(t[2], &used);
          if (used != t[2].size() || rank < 0) throw std::invalid_argument(t[2]);
        } catch (const std::exception&) {
          fail(name, L.no, "bad rank '" + t[2] + "'");
        }
        std::vector<std::string> names;
        for (int i = 1; i <= rank; i++) names.push_back("g" + std::to_string(i));
        g = make_grading(bq, true, std::move(names));
      } else if (t[1] == "free") {
        if (t.size() < 3) fail(name, L.no, "group free wants generator names");
        g = make_grading(bq, false, {t.begin() + 2, t.end()});
      } else {
        fail(name, L.no, "unknown group kind '" + t[1] + "' (want abelian or free)");
      }
      have_group = true;
    } else if (t[0] == "weight") {
      if (!have_group) fail(name, L.no, "weight before the group line");
      if (t.size() < 3) fail(name, L.no, "weight wants: weight <arrow> <word>");
      int a = bq.q.arrow(t[1]);
      if (a < 0) fail(name, L.no, "unknown arrow '" + t[1] + "'");
      if (seen[std::size_t(a)]) fail(name, L.no, "duplicate weight for arrow '" + t[1] + "'");
      seen[std::size_t(a)] = true;
      std::string word;
      for (std::size_t i = 2; i < t.size(); i++) word += (i > 2 ? " " : "") + t[i];
      try {
        g.weight[std::size_t(a)] = word_parse(word, g.names, g.abelian);
      } catch (const Error& e) {
        fail(name, L.no, e.what());
      }
    } else {
      fail(name, L.no, "unknown directive '" + t[0] + "'");
    }
  }
  if (!have_group) parse_error(name + ": missing group line");
  return g;
}

Grading load_grading(const BoundQuiver& bq, const std::string& path) {
  return parse_grading(bq, read_file(path), path);
}

LoadedModule parse_module(const std::string& text, const std::string& name, const std::string& dir) {
  auto lines = tokenize(text);
  if (lines.empty() || lines[0].toks[0] != "module")
    parse_error(name + ": module files start with 'module over <algebra file>'");
  {
    const auto& t = lines[0].toks;
    if (t.size() != 3 || t[1] != "over") fail(name, lines[0].no, "want: module over <algebra file>");
  }
  LoadedModule out;
  std::string apath = lines[0].toks[2];
  if (!apath.empty() && apath[0] != '/' && !dir.empty()) apath = dir + "/" + apath;
  out.bq = std::make_unique<BoundQuiver>(load_algebra(apath));
  const BoundQuiver& bq = *out.bq;

  std::vector<int> dims(std::size_t(bq.q.nv()), 0);
  std::vector<bool> have_map(std::size_t(bq.q.na()), false);
  std::vector<Mat<Rat>> mats(std::size_t(bq.q.na()));
  std::vector<std::pair<int, Line>> map_lines;
  for (std::size_t li = 1; li < lines.size(); li++) {
    const auto& L = lines[li];
    const auto& t = L.toks;
    if (t[0] == "dim") {
      if (t.size() != 3) fail(name, L.no, "dim wants: dim <vertex> <n>");
      int x = bq.q.vertex(t[1]);
      if (x < 0) fail(name, L.no, "unknown vertex '" + t[1] + "'");
      try {
        std::size_t used = 0;
        dims[std::size_t(x)] = std::stoi(t[2], &used);
        if (used != t[2].size() || dims[std::size_t(x)] < 0) throw std::invalid_argument(t[2]);
      } catch (const std::exception&) {
        fail(name, L.no, "bad dimension '" + t[2] + "'");
      }
    } else if (t[0] == "map") {
      if (t.size() < 3) fail(name, L.no, "map wants: map <arrow> <rows>");
      int a = bq.q.arrow(t[1]);
      if (a < 0) fail(name, L.no, "unknown arrow '" + t[1] + "'");
      if (have_map[std::size_t(a)]) fail(name, L.no, "duplicate map for arrow '" + t[1] + "'");
      have_map[std::size_t(a)] = true;
      map_lines.push_back({a, L});
    } else {
      fail(name, L.no, "unknown directive '" + t[0] + "'");
    }
  }
  // matrices are sized by the final dims, so parse them after all dim lines
  for (int a = 0; a < bq.q.na(); a++) {
    const Arrow& A = bq.q.arrows[std::size_t(a)];
    mats[std::size_t(a)] = Mat<Rat>(dims[std::size_t(A.tgt)], dims[std::size_t(A.src)]);
  }
  for (auto& [a, L] : map_lines) {
    const Arrow& A = bq.q.arrows[std::size_t(a)];
    Mat<Rat>& m = mats[std::size_t(a)];
    std::string body;
    for (std::size_t i = 2; i < L.toks.size(); i++) body += L.toks[i];
    std::vector<std::vector<Rat>> rows;
    std::vector<Rat> row;
    std::string cur;
    auto flush_entry = [&](char where) {
      if (cur.empty()) fail(name, L.no, std::string("empty matrix entry before '") + where + "'");
      try {
        row.push_back(rat_parse(cur));
      } catch (const Error&) {
        fail(name, L.no, "bad matrix entry '" + cur + "'");
      }
      cur.clear();
    };
    for (char ch : body + ";") {
      if (ch == ',') {
        flush_entry(',');
      } else if (ch == ';') {
        flush_entry(';');
        rows.push_back(std::move(row));
        row.clear();
      } else {
        cur += ch;
      }
    }
    if (int(rows.size()) != m.rows)
      fail(name, L.no, "arrow '" + A.name + "' wants " + std::to_string(m.rows) + " rows, got " +
                           std::to_string(rows.size()));
    for (int i = 0; i < m.rows; i++) {
      if (int(rows[std::size_t(i)].size()) != m.cols)
        fail(name, L.no, "arrow '" + A.name + "' wants " + std::to_string(m.cols) +
                             " columns, got " + std::to_string(rows[std::size_t(i)].size()));
      for (int j = 0; j < m.cols; j++) m.at(i, j) = rows[std::size_t(i)][std::size_t(j)];
    }
  }
  try {
    out.rep = make_rep(bq, std::move(dims), std::move(mats));
  } catch (const Error& e) {
    parse_error(name + ": " + e.what());
  }
  return out;
}

LoadedModule load_module(const std::string& path) {
  auto slash = path.find_last_of('/');
  std::string dir = slash == std::string::npos ? std::string() : path.substr(0, slash);
  return parse_module(read_file(path), path, dir);
}

Walk parse_walk(const BoundQuiver& bq, const std::string& s) {
  const Quiver& q = bq.q;
  struct Tok {
    std::string name;
    bool fwd;
  };
  std::vector<Tok> toks;
  if (s.find('.') != std::string::npos) {
    std::string cur;
    for (char ch : s + ".") {
      if (ch == '.') {
        if (cur.empty()) parse_error("empty step between dots in walk '" + s + "'");
        bool fwd = true;
        if (cur[0] == '-' || cur[0] == '~') {
          fwd = false;
          cur = cur.substr(1);
        }
        toks.push_back({cur, fwd});
        cur.clear();
      } else
        cur += ch;
    }
  } else {
    std::size_t pos = 0;
    while (pos < s.size()) {
      bool fwd = true;
      if (s[pos] == '-' || s[pos] == '~') {
        fwd = false;
        pos++;
      }
      std::size_t best = 0;
      for (auto& [an, ai] : q.aindex)
        if (an.size() > best && s.compare(pos, an.size(), an) == 0) best = an.size();
      if (best == 0) parse_error("no arrow name matches at '" + s.substr(pos) + "' in walk");
      toks.push_back({s.substr(pos, best), fwd});
      pos += best;
    }
  }
  Walk w;
  for (auto it = toks.rbegin(); it != toks.rend(); ++it) {  // to application order
    int ai = q.arrow(it->name);
    if (ai < 0) parse_error("unknown arrow '" + it->name + "' in walk");
    w.steps.push_back({ai, it->fwd});
  }
  if (w.steps.empty()) parse_error("empty walk");
  auto sstart = [&](const WalkStep& st) {
    return st.fwd ? q.arrows[std::size_t(st.arrow)].src : q.arrows[std::size_t(st.arrow)].tgt;
  };
  auto send = [&](const WalkStep& st) {
    return st.fwd ? q.arrows[std::size_t(st.arrow)].tgt : q.arrows[std::size_t(st.arrow)].src;
  };
  w.src = sstart(w.steps.front());
  w.tgt = send(w.steps.back());
  for (std::size_t i = 0; i + 1 < w.steps.size(); i++)
    if (send(w.steps[i]) != sstart(w.steps[i + 1])) parse_error("walk steps do not chain in '" + s + "'");
  return w;
}

}  // namespace ctau
