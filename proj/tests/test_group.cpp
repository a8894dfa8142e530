#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ctau/group.hpp"

using namespace ctau;

static const std::vector<std::string> UV = {"u", "v"};
static GroupElem W(const std::string& s) { return word_parse(s, UV); }

/* Tower over {u,v} with a_1 = v pinned, matching the worked examples. */
static Tower uv_tower() {
  Tower t = Tower::over(UV);
  t.choose_next(t.find_tracked(0, "v"));
  return t;
}

static GroupElem random_word(std::mt19937_64& rng, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len), pick(0, 3);
  GroupElem g = free_identity(2);
  int n = len(rng);
  for (int i = 0; i < n; i++) {
    int p = pick(rng);
    g = mul(g, free_gen(2, p / 2, p % 2 ? 1 : -1));
  }
  return g;
}

TEST_CASE("group element arithmetic") {
  CHECK(mul(W("u"), W("u^-1")).is_identity());
  CHECK(mul(W("u v"), W("v^-1")) == W("u"));
  GroupElem x = abelian_gen(2, 0), y = abelian_gen(2, 1, 2);
  GroupElem s = mul(x, y);
  CHECK(s.vec == std::vector<long>{1, 2});
  CHECK(mul(s, inv(s)).is_identity());

  CHECK_THROWS_AS(mul(x, W("u")), Error);  // profile mismatch

  CHECK(pow(W("u v"), 2) == W("u v u v"));
  CHECK(pow(W("u"), -3) == W("u^-3"));
}

TEST_CASE("s-length") {
  CHECK(s_length(free_identity(2)) == 0);
  CHECK(s_length(W("u v u^-1")) == 3);
  CHECK(s_length(W("u^3")) == 3);
  CHECK_THROWS_WITH_AS(s_length(abelian_gen(2, 0)), doctest::Contains("l1_length"), Error);
  GroupElem a = abelian_identity(2);
  a.vec = {3, -2};
  CHECK(l1_length(a) == 5);
}

TEST_CASE("word syntax round-trips") {
  for (std::string s : {"u v^-1 u^2", "1", "v^3", "u^-1 v u"}) {
    CHECK(word_str(word_parse(s, UV), UV) == s);
  }
  CHECK_THROWS_AS(word_parse("w", UV), Error);
  CHECK_THROWS_AS(word_parse("u^x", UV), Error);
  // parsing reduces: adjacent inverse letters cancel
  CHECK(word_parse("u u^-1 v", UV) == W("v"));
}

TEST_CASE("tail rewriting: worked examples with a_1 = v") {
  Tower t = uv_tower();
  CHECK(word_str(t.a_elem(1), UV) == "v");

  TailRewrite r1 = rewrite_tail(t, W("u v^2"), 1);
  REQUIRE(r1.r.size() == 1);
  CHECK(r1.r[0] == 2);
  CHECK(r1.head.size() == 1);
  CHECK(r1.head_elem == W("u"));  // u = v^0 u v^0 as an S_1 letter

  TailRewrite r2 = rewrite_tail(t, W("v^3"), 1);
  CHECK(r2.head_trivial());
  CHECK(r2.r[0] == 3);

  TailRewrite r3 = rewrite_tail(t, W("v u v^-1 u"), 1);
  CHECK(r3.r[0] == 0);
  CHECK(r3.head.size() == 2);  // (v u v^-1)(u), both S_1 letters
  CHECK(r3.head_elem == W("v u v^-1 u"));
}

TEST_CASE("tail rewriting: randomized round-trip through stage 3") {
  Tower t = uv_tower();
  std::mt19937_64 rng(20260819);
  for (int trial = 0; trial < 200; trial++) {
    GroupElem g = random_word(rng, 12);
    for (int s = 1; s <= 3; s++) {
      TailRewrite rw = rewrite_tail(t, g, s);
      GroupElem back = rw.head_elem;
      for (int i = s; i >= 1; i--) back = mul(back, pow(t.a_elem(i), rw.r[std::size_t(i - 1)]));
      CHECK(back == g);
    }
  }
}

TEST_CASE("quotient map to Z: values and additivity") {
  Tower t = uv_tower();
  CHECK(quotient_hom_to_Z(t, W("v^2"), 1) == 2);
  CHECK(quotient_hom_to_Z(t, W("u"), 1) == 0);
  CHECK(quotient_hom_to_Z(t, W("v u v^-1"), 1) == 0);

  std::mt19937_64 rng(977);
  for (int trial = 0; trial < 200; trial++) {
    GroupElem g = random_word(rng, 10), h = random_word(rng, 10);
    CHECK(quotient_hom_to_Z(t, mul(g, h), 1) == quotient_hom_to_Z(t, g, 1) + quotient_hom_to_Z(t, h, 1));
  }

  // stage 2 is defined on G_1 only
  CHECK_THROWS_WITH_AS(quotient_hom_to_Z(t, W("v"), 2), doctest::Contains("outside G_1"), Error);

  // random G_1 elements: products of conjugates v^j u^±1 v^-j. The stage-2
  // map sends a_2 = u to 1 and every other S_1 generator to 0, so only the
  // bare (j = 0) factors count. Factors have zero net v-exponent, so the
  // conjugation depth seen by each u-letter is exactly its own j.
  std::uniform_int_distribution<int> jd(-3, 3), sd(0, 1), nd(0, 4);
  auto rand_g1 = [&]() {
    GroupElem g = free_identity(2);
    int n = nd(rng);
    long usum = 0;
    for (int i = 0; i < n; i++) {
      long j = jd(rng);
      long e = sd(rng) ? 1 : -1;
      if (j == 0) usum += e;
      g = mul(g, mul(mul(pow(W("v"), j), pow(W("u"), e)), pow(W("v"), -j)));
    }
    return std::make_pair(g, usum);
  };
  for (int trial = 0; trial < 200; trial++) {
    auto [g, ug] = rand_g1();
    auto [h, uh] = rand_g1();
    CHECK(quotient_hom_to_Z(t, g, 2) == ug);
    CHECK(quotient_hom_to_Z(t, mul(g, h), 2) == ug + uh);
  }
}

TEST_CASE("stage generators map to zero at their own stage") {
  Tower t = uv_tower();
  t.ensure_stage(2);
  for (int i = 1; i <= 2; i++)
    for (int h : t.tracked(i)) CHECK(quotient_hom_to_Z(t, t.materialize(h), i) == 0);
}

TEST_CASE("stage_for_length") {
  Tower t0 = uv_tower();
  CHECK(stage_for_length(t0, 0) == 0);
  CHECK(stage_for_length(t0, 1) == 0);

  Tower t = uv_tower();
  CHECK(stage_for_length(t, 2) == 2);
  // the automatic continuation picked a_2 = u (the shortest S_1 generator)
  CHECK(word_str(t.a_elem(2), UV) == "u");
  // S_2 tracked generators all have length >= 3
  for (int h : t.tracked(2)) CHECK(s_length(t.materialize(h)) >= 3);
}

TEST_CASE("automatic choice breaks ties lexicographically") {
  Tower t = Tower::over({"u", "v"});
  t.ensure_stage(1);
  CHECK(word_str(t.a_elem(1), UV) == "u");  // both length 1; u < v
}

TEST_CASE("s-length subadditivity") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 100; trial++) {
    GroupElem g = random_word(rng, 12), h = random_word(rng, 12);
    CHECK(s_length(mul(g, h)) <= s_length(g) + s_length(h));
  }
}

TEST_CASE("tower misuse") {
  Tower t = uv_tower();
  CHECK_THROWS_AS(rewrite_tail(t, abelian_gen(1, 0), 1), Error);
  Tower one = Tower::over({"u"});
  one.ensure_stage(1);  // a_1 = u, S_1 empty
  CHECK_THROWS_WITH_AS(one.ensure_stage(2), doctest::Contains("exhausted"), Error);
}
