#include "cool/kinship.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace cool::kinship {

namespace {

struct Entry {
  const char* relation;
  const char* male;
  const char* female;
  const char* inverse;
};

const Entry kLexicon[] = {
    {"child", "son", "daughter", "parent"},
    {"parent", "father", "mother", "child"},
    {"sibling", "brother", "sister", "sibling"},
    {"spouse", "husband", "wife", "spouse"},
    {"grandchild", "grandson", "granddaughter", "grandparent"},
    {"grandparent", "grandfather", "grandmother", "grandchild"},
    {"pibling", "uncle", "aunt", "nibling"},
    {"nibling", "nephew", "niece", "pibling"},
    {"child-in-law", "son-in-law", "daughter-in-law", "parent-in-law"},
    {"parent-in-law", "father-in-law", "mother-in-law", "child-in-law"},
    {"sibling-in-law", "brother-in-law", "sister-in-law", "sibling-in-law"},
};

const std::map<std::pair<std::string, std::string>, std::string>& table() {
  static const std::map<std::pair<std::string, std::string>, std::string> t = {
      {{"child", "child"}, "grandchild"},
      {{"child", "parent"}, "spouse"},
      {{"child", "sibling"}, "child"},
      {{"child", "spouse"}, "child-in-law"},
      {{"parent", "child"}, "sibling"},
      {{"parent", "parent"}, "grandparent"},
      {{"parent", "sibling"}, "pibling"},
      {{"parent", "spouse"}, "parent"},
      {{"sibling", "child"}, "nibling"},
      {{"sibling", "parent"}, "parent"},
      {{"sibling", "sibling"}, "sibling"},
      {{"sibling", "spouse"}, "sibling-in-law"},
      {{"sibling", "grandparent"}, "grandparent"},
      {{"sibling", "pibling"}, "pibling"},
      {{"spouse", "child"}, "child"},
      {{"spouse", "parent"}, "parent-in-law"},
      {{"spouse", "sibling"}, "sibling-in-law"},
      {{"spouse", "grandchild"}, "grandchild"},
      {{"spouse", "child-in-law"}, "child-in-law"},
      {{"spouse", "nibling"}, "nibling"},
      {{"grandchild", "sibling"}, "grandchild"},
      // only right when the pibling is on the grandparent's side; the sampler
      // keeps chains where the graph agrees
      {{"grandchild", "pibling"}, "child"},
      {{"grandparent", "spouse"}, "grandparent"},
      {{"pibling", "spouse"}, "pibling"},
      {{"nibling", "sibling"}, "nibling"},
      {{"child-in-law", "spouse"}, "child"},
      {{"child-in-law", "child"}, "grandchild"},
      {{"parent-in-law", "spouse"}, "parent-in-law"},
      {{"sibling-in-law", "child"}, "nibling"},
      // holds for a spouse's sibling, not for a sibling's spouse
      {{"sibling-in-law", "parent"}, "parent-in-law"},
  };
  return t;
}

const char* kMaleNames[] = {
    "Aaron",  "Adam",   "Albert", "Alfred", "Arthur", "Bernard", "Bruce",  "Carl",   "Charles", "Clarence",
    "Daniel", "David",  "Don",    "Edgar",  "Edward", "Felix",   "Frank",  "Gerald", "Gordon",  "Harold",
    "Henry",  "Hugh",   "Isaac",  "Jack",   "James",  "Joshua",  "Julian", "Kevin",  "Lewis",   "Martin",
    "Nathan", "Oliver", "Oscar",  "Patrick", "Paul",  "Peter",   "Ralph",  "Robert", "Samuel",  "Simon",
    "Thomas", "Victor", "Walter", "Wesley", "William"};
const char* kFemaleNames[] = {
    "Ada",     "Alice",  "Amelia", "Anna",   "Beatrice", "Carol",  "Clara",  "Daisy",  "Diana",  "Dolores",
    "Edith",   "Eleanor", "Elsie", "Emma",   "Felicia",  "Flora",  "Grace",  "Hannah", "Helen",  "Irene",
    "Ivy",     "Jane",   "Joan",   "Juanita", "Julia",   "Laura",  "Lena",   "Lucy",   "Lynn",   "Mabel",
    "Margaret", "Martha", "Mary",  "Nora",   "Olive",    "Pearl",  "Rose",   "Ruth",   "Sarah",  "Sophie",
    "Stella",  "Susan",  "Vera",   "Violet", "Wendy"};
constexpr std::size_t kNamesPerGender = std::size(kMaleNames);
static_assert(std::size(kMaleNames) == std::size(kFemaleNames));

}  // namespace

const std::vector<std::string>& relations() {
  static const std::vector<std::string> r = [] {
    std::vector<std::string> out;
    for (const auto& e : kLexicon) out.emplace_back(e.relation);
    return out;
  }();
  return r;
}

std::optional<std::string> inverse(const std::string& relation) {
  for (const auto& e : kLexicon)
    if (relation == e.relation) return std::string(e.inverse);
  return std::nullopt;
}

std::string noun(const std::string& relation, Gender g) {
  for (const auto& e : kLexicon)
    if (relation == e.relation) return g == Gender::male ? e.male : e.female;
  throw std::invalid_argument("unknown relation " + relation);
}

std::optional<std::pair<std::string, Gender>> parse_noun(const std::string& word) {
  for (const auto& e : kLexicon) {
    if (word == e.male) return std::make_pair(std::string(e.relation), Gender::male);
    if (word == e.female) return std::make_pair(std::string(e.relation), Gender::female);
  }
  return std::nullopt;
}

std::optional<std::string> compose(const std::string& r1, const std::string& r2) {
  auto it = table().find({r1, r2});
  if (it == table().end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> compose_chain(const std::vector<std::string>& chain) {
  if (chain.empty()) return std::nullopt;
  std::optional<std::string> acc = chain.front();
  for (std::size_t i = 1; i < chain.size() && acc; ++i) acc = compose(*acc, chain[i]);
  return acc;
}

// ---------------------------------------------------------------------------

int FamilyGraph::add(Gender g, std::mt19937_64& rng) {
  if (name_used_.empty()) name_used_.assign(2 * kNamesPerGender, false);
  std::size_t offset = g == Gender::male ? 0 : kNamesPerGender;
  std::uniform_int_distribution<std::size_t> pick(0, kNamesPerGender - 1);
  std::size_t k = pick(rng);
  for (std::size_t tries = 0; name_used_[offset + k] && tries < kNamesPerGender; ++tries)
    k = (k + 1) % kNamesPerGender;
  if (name_used_[offset + k]) throw std::runtime_error("family too large for the name pool");
  name_used_[offset + k] = true;
  Person p;
  p.name = g == Gender::male ? kMaleNames[k] : kFemaleNames[k];
  p.gender = g;
  people_.push_back(p);
  return static_cast<int>(people_.size()) - 1;
}

FamilyGraph FamilyGraph::random(std::mt19937_64& rng, int generations) {
  FamilyGraph g;
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution marries(0.75);
  std::uniform_int_distribution<int> kids(1, 3);

  auto marry = [&](int a) {
    int b = g.add(g.people_[a].gender == Gender::male ? Gender::female : Gender::male, rng);
    g.people_[a].spouse = b;
    g.people_[b].spouse = a;
    return b;
  };

  std::vector<int> couples{g.add(Gender::male, rng)};
  marry(couples[0]);
  for (int gen = 1; gen < generations; ++gen) {
    std::vector<int> next;
    for (int a : couples) {
      int b = g.people_[a].spouse;
      int father = g.people_[a].gender == Gender::male ? a : b;
      int mother = father == a ? b : a;
      int n = kids(rng);
      for (int i = 0; i < n && g.people_.size() + 2 <= 2 * kNamesPerGender - 4; ++i) {
        int c = g.add(coin(rng) ? Gender::male : Gender::female, rng);
        g.people_[c].father = father;
        g.people_[c].mother = mother;
        g.people_[father].children.push_back(c);
        g.people_[mother].children.push_back(c);
        if (gen + 1 < generations && marries(rng)) {
          marry(c);
          next.push_back(c);
        }
      }
    }
    couples = std::move(next);
    if (couples.empty()) break;
  }
  return g;
}

std::vector<int> FamilyGraph::parents(int i) const {
  std::vector<int> out;
  if (people_[i].father >= 0) out.push_back(people_[i].father);
  if (people_[i].mother >= 0) out.push_back(people_[i].mother);
  return out;
}

std::vector<int> FamilyGraph::siblings(int i) const {
  std::vector<int> out;
  if (people_[i].father < 0) return out;
  for (int c : people_[people_[i].father].children)
    if (c != i) out.push_back(c);
  return out;
}

std::vector<std::string> FamilyGraph::relations_between(int b, int p) const {
  auto in = [](const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); };
  std::vector<std::string> out;
  if (b == p) return out;
  const Person& B = people_[b];

  if (in(B.children, p)) out.push_back("child");
  if (in(parents(b), p)) out.push_back("parent");
  if (in(siblings(b), p)) out.push_back("sibling");
  if (B.spouse == p) out.push_back("spouse");

  bool grandchild = false, nibling = false, child_in_law = false;
  for (int c : B.children) {
    grandchild |= in(people_[c].children, p);
    child_in_law |= people_[c].spouse == p;
  }
  for (int s : siblings(b)) nibling |= in(people_[s].children, p);
  if (B.spouse >= 0)
    for (int s : siblings(B.spouse)) nibling |= in(people_[s].children, p);
  if (grandchild) out.push_back("grandchild");

  bool grandparent = false, pibling = false;
  for (int q : parents(b)) {
    grandparent |= in(parents(q), p);
    for (int s : siblings(q)) pibling |= s == p || people_[s].spouse == p;
  }
  if (grandparent) out.push_back("grandparent");
  if (pibling) out.push_back("pibling");
  if (nibling) out.push_back("nibling");
  if (child_in_law) out.push_back("child-in-law");

  bool parent_in_law = B.spouse >= 0 && in(parents(B.spouse), p);
  if (parent_in_law) out.push_back("parent-in-law");
  bool sibling_in_law = B.spouse >= 0 && in(siblings(B.spouse), p);
  for (int s : siblings(b)) sibling_in_law |= people_[s].spouse == p;
  if (sibling_in_law) out.push_back("sibling-in-law");
  return out;
}

Chain sample_chain(std::mt19937_64& rng, int length) {
  if (length < 1) throw std::invalid_argument("chain length must be positive");
  for (int attempt = 0; attempt < 100000; ++attempt) {
    FamilyGraph g = FamilyGraph::random(rng, 4);
    const auto& people = g.people();
    int n = static_cast<int>(people.size());
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::vector<int> path{pick(rng)};
    std::vector<std::string> rels;
    bool stuck = false;
    for (int step = 0; step < length && !stuck; ++step) {
      std::vector<std::pair<int, std::string>> options;
      for (int p = 0; p < n; ++p) {
        if (std::find(path.begin(), path.end(), p) != path.end()) continue;
        auto r = g.relations_between(path.back(), p);
        if (r.size() == 1) options.emplace_back(p, r[0]);
      }
      if (options.empty()) {
        stuck = true;
        break;
      }
      auto [p, r] = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
      path.push_back(p);
      rels.push_back(r);
    }
    if (stuck) continue;
    auto truth = g.relations_between(path.front(), path.back());
    if (truth.size() != 1) continue;
    auto composed = compose_chain(rels);
    if (!composed || *composed != truth[0]) continue;

    Chain c;
    for (int i : path) c.names.push_back(people[i].name);
    for (int i = 0; i < length; ++i) {
      const Person& to = people[path[i + 1]];
      c.edges.push_back({i, i + 1, rels[i], noun(rels[i], to.gender)});
    }
    c.answer_relation = truth[0];
    c.answer_noun = noun(truth[0], people[path.back()].gender);
    return c;
  }
  throw std::runtime_error("could not sample a kinship chain");
}

}  // namespace cool::kinship
