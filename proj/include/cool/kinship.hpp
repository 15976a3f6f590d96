#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace cool::kinship {

enum class Gender { male, female };

/// Gender-neutral relation names used inside the relational DSL.
const std::vector<std::string>& relations();
std::optional<std::string> inverse(const std::string& relation);
/// Gendered surface noun, e.g. ("pibling", female) -> "aunt".
std::string noun(const std::string& relation, Gender g);
/// Inverse of noun(); nullopt for words outside the lexicon.
std::optional<std::pair<std::string, Gender>> parse_noun(const std::string& word);

/// If q is b's r1 and p is q's r2, p is b's compose(r1, r2).
std::optional<std::string> compose(const std::string& r1, const std::string& r2);
/// Left fold of compose over a chain.
std::optional<std::string> compose_chain(const std::vector<std::string>& chain);

struct Person {
  std::string name;
  Gender gender;
  int spouse = -1;
  int father = -1;
  int mother = -1;
  std::vector<int> children;
};

/// Monogamous family tree: every child has both parents, spouses marry in
/// from outside, so each pair of relatives stands in at most one relation.
class FamilyGraph {
 public:
  static FamilyGraph random(std::mt19937_64& rng, int generations = 4);

  const std::vector<Person>& people() const { return people_; }
  /// Every relation r such that `p` is `b`'s r. Normally zero or one entry.
  std::vector<std::string> relations_between(int b, int p) const;

 private:
  int add(Gender g, std::mt19937_64& rng);
  std::vector<int> parents(int i) const;
  std::vector<int> siblings(int i) const;

  std::vector<Person> people_;
  std::vector<bool> name_used_;
};

struct Edge {
  int from;  // (to) is (from)s noun
  int to;
  std::string relation;
  std::string noun;
};

struct Chain {
  std::vector<std::string> names;  // names[0] is the queried-about person
  std::vector<Edge> edges;
  std::string answer_relation;
  std::string answer_noun;
};

/// Samples a chain of `length` edges whose table composition is defined and
/// agrees with the relation read off the graph.
Chain sample_chain(std::mt19937_64& rng, int length);

}  // namespace cool::kinship
