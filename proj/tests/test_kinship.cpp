#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "cool/kinship.hpp"

using namespace cool::kinship;

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

// Table entries that only hold on one side of the family; the sampler filters them.
const std::set<std::pair<std::string, std::string>> kConditional = {
    {"grandchild", "pibling"},
    {"sibling-in-law", "parent"},
};

}  // namespace

TEST_CASE("lexicon: inverses are involutive and nouns round-trip") {
  for (const auto& r : relations()) {
    CAPTURE(r);
    auto inv = inverse(r);
    REQUIRE(inv);
    CHECK(inverse(*inv) == r);
    for (auto g : {Gender::male, Gender::female}) {
      auto parsed = parse_noun(noun(r, g));
      REQUIRE(parsed);
      CHECK(parsed->first == r);
      CHECK(parsed->second == g);
    }
  }
  CHECK(noun("pibling", Gender::female) == "aunt");
  CHECK(noun("child", Gender::male) == "son");
  CHECK_FALSE(inverse("cousin"));
  CHECK_FALSE(parse_noun("cousin"));
}

TEST_CASE("compose: hand-checked entries") {
  CHECK(compose("parent", "parent") == "grandparent");
  CHECK(compose("parent", "sibling") == "pibling");
  CHECK(compose("spouse", "parent") == "parent-in-law");
  CHECK(compose("sibling", "child") == "nibling");
  CHECK(compose("child", "child") == "grandchild");
  CHECK_FALSE(compose("grandparent", "grandparent"));
  CHECK(compose_chain({"child", "child", "sibling"}) == "grandchild");
  CHECK(compose_chain({"spouse", "child", "child"}) == "grandchild");
  CHECK_FALSE(compose_chain({"grandparent", "grandparent", "child"}));
}

TEST_CASE("graph: relations are mutually inverse") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 5; ++t) {
    auto g = FamilyGraph::random(rng);
    int n = static_cast<int>(g.people().size());
    REQUIRE(n > 4);
    for (int b = 0; b < n; ++b) {
      for (int p = 0; p < n; ++p) {
        auto rs = g.relations_between(b, p);
        if (b == p) CHECK(rs.empty());
        CHECK(rs.size() <= 1);
        for (const auto& r : rs) CHECK(contains(g.relations_between(p, b), *inverse(r)));
      }
    }
  }
}

TEST_CASE("graph oracle agrees with every unconditional composition entry") {
  std::mt19937_64 rng(17);
  std::size_t checked = 0;
  for (int t = 0; t < 4; ++t) {
    auto g = FamilyGraph::random(rng);
    int n = static_cast<int>(g.people().size());
    for (int b = 0; b < n; ++b) {
      for (int q = 0; q < n; ++q) {
        for (const auto& r1 : g.relations_between(b, q)) {
          for (int p = 0; p < n; ++p) {
            if (p == b) continue;
            for (const auto& r2 : g.relations_between(q, p)) {
              auto c = compose(r1, r2);
              if (!c || kConditional.count({r1, r2})) continue;
              CAPTURE(r1);
              CAPTURE(r2);
              CHECK(contains(g.relations_between(b, p), *c));
              ++checked;
            }
          }
        }
      }
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("sampled chains are connected and their answer matches the table") {
  std::mt19937_64 rng(23);
  for (int length : {2, 3, 4}) {
    for (int i = 0; i < 100; ++i) {
      auto c = sample_chain(rng, length);
      REQUIRE(c.edges.size() == static_cast<std::size_t>(length));
      std::vector<std::string> rels;
      for (std::size_t k = 0; k < c.edges.size(); ++k) {
        const auto& e = c.edges[k];
        rels.push_back(e.relation);
        CHECK(parse_noun(e.noun)->first == e.relation);
        if (k == 0) CHECK(e.from == 0);
        if (k > 0) CHECK(e.from == c.edges[k - 1].to);
      }
      CHECK(compose_chain(rels) == c.answer_relation);
      CHECK(parse_noun(c.answer_noun)->first == c.answer_relation);
      std::set<std::string> distinct(c.names.begin(), c.names.end());
      CHECK(distinct.size() == c.names.size());
    }
  }
}
