#pragma once
#include <algorithm>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "ctau/error.hpp"

namespace ctau {

/* Element of a finitely generated free group (reduced runs, leftmost factor
   written first) or of Z^rank (exponent vector). */
struct GroupElem {
  bool abelian = false;
  int rank = 0;
  std::vector<std::pair<int, long>> word;  // free profile: (gen, exp != 0), adjacent gens differ
  std::vector<long> vec;                   // abelian profile

  bool is_identity() const { return abelian ? std::all_of(vec.begin(), vec.end(), [](long v) { return v == 0; }) : word.empty(); }
  friend bool operator==(const GroupElem& a, const GroupElem& b) {
    return a.abelian == b.abelian && a.rank == b.rank && a.word == b.word && a.vec == b.vec;
  }
  friend bool operator<(const GroupElem& a, const GroupElem& b) {
    return std::tie(a.abelian, a.rank, a.word, a.vec) < std::tie(b.abelian, b.rank, b.word, b.vec);
  }
};

GroupElem free_identity(int rank);
GroupElem abelian_identity(int rank);
GroupElem free_gen(int rank, int g, long exp = 1);
GroupElem abelian_gen(int rank, int g, long exp = 1);
GroupElem mul(const GroupElem& a, const GroupElem& b);
GroupElem inv(const GroupElem& a);
GroupElem pow(const GroupElem& a, long n);
std::vector<long> abelianize(const GroupElem& a);

/* Word length over the standard generators. Errors on the abelian profile;
   use l1_length there. */
long s_length(const GroupElem& a);
long l1_length(const GroupElem& a);

/* "u v^-1 u^2" syntax; "1" is the identity. */
std::string word_str(const GroupElem& a, const std::vector<std::string>& names);
GroupElem word_parse(const std::string& s, const std::vector<std::string>& names, bool abelian = false);

/* Canonical key for map lookups. */
std::string elem_key(const GroupElem& a);

/* —— Iterated-quotient tower over a free group ——
   Stage i replaces the generating set S_{i-1} by
   S_i = { a_i^j x a_i^{-j} : x in S_{i-1}\{a_i}, j in Z } with a_i the chosen
   letter; G_i = <S_i> is the kernel of the a_i-exponent map G_{i-1} -> Z.
   Generators are tracked by handles (j, parent) over the base alphabet. */
struct Tower {
  std::vector<std::string> base_names;  // S_0

  struct Handle {
    int stage;   // generator of S_stage
    long j;      // conjugation exponent (stage ≥ 1)
    int parent;  // handle id in S_{stage-1} (stage ≥ 1), or base gen id at stage 0
  };
  std::vector<Handle> handles;
  std::map<std::tuple<int, long, int>, int> hindex;

  std::vector<int> a;  // a[i] = handle id (in S_i) chosen as a_{i+1}
  int stages() const { return int(a.size()); }

  int intern(int stage, long j, int parent);
  GroupElem materialize(int handle) const;     // as a base word
  std::string handle_name(int handle) const;   // canonical display name
  GroupElem a_elem(int i) const;               // a_i as a base word (i ≥ 1)

  /* Extends the tower through stage i, choosing each a_k as the minimal
     s-length generator in the tracked window (lexicographic tie-break). */
  void ensure_stage(int i, int window = 3);

  /* Overrides the automatic rule for the next a_{stages()+1}. */
  void choose_next(int handle, int window = 3);
  int find_tracked(int stage, const std::string& display_name) const;

  std::vector<int> tracked(int stage, int window = 3) const;

  static Tower over(const std::vector<std::string>& names);

private:
  mutable std::vector<GroupElem> mat_cache;
  std::vector<std::vector<int>> tracked_sets;  // tracked generators per stage
};

/* g = head · a_s^{r_s} ··· a_1^{r_1} with head in G_s. The head is returned
   both as a reduced letter word over S_s handles and materialized. */
struct TailRewrite {
  std::vector<std::pair<int, int>> head;  // (handle, ±1) letters, freely reduced
  GroupElem head_elem;                     // base-word materialization
  std::vector<long> r;                     // r[0] = r_1, ..., r[s-1] = r_s
  bool head_trivial() const { return head.empty(); }
};
TailRewrite rewrite_tail(Tower& t, const GroupElem& g, int stage);

/* Least stage whose tracked generating set has every member of s-length ≥ r. */
int stage_for_length(Tower& t, long r, int stage_cap = 16, int window = 3);

/* The a_i-exponent map G_{i-1} -> Z; errors when g is outside G_{i-1}. */
long quotient_hom_to_Z(Tower& t, const GroupElem& g, int i);

}  // namespace ctau
