#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "cool/ir.hpp"
#include "cool/syntax.hpp"

namespace cool {

/// Compiled rule-head pattern.
///
/// Capture kinds:
///   a            grounded subtree
///   #a           any subtree
///   #?a          any subtree, or absent as an operand of + or -
///   $a           subtree containing a nonterminal
///   immediate:a  number literal
/// A name that is already bound matches only a structurally equal subtree.
/// Identifiers in the noun slot of a phrase are literals; `#a` there captures
/// an identifier noun.
struct Pattern {
  enum class Kind {
    number,
    string,
    noun,
    grounded,
    any,
    optional,
    nonterminal,
    immediate,
    noun_capture,
    op,
    relation,
    gender,
    set,
  };
  Kind kind;
  std::string name;  // capture name, literal text or operator symbol
  Rational value;
  std::vector<Pattern> kids;
};

/// Capture name -> bound subtree. A null pointer records an absent `#?`.
using Bindings = std::map<std::string, NodePtr>;

Pattern compile_pattern(const Syntax& s);
void capture_names(const Pattern& p, std::set<std::string>& out);

/// Every way `pattern` matches `node` given the existing bindings.
std::vector<Bindings> match_here(const Pattern& pattern, const NodePtr& node, const Bindings& base);

struct Match {
  Location location;
  Bindings bindings;
};

/// Matches at every subtree in pre-order, leftmost first.
std::vector<Match> match_all(const Pattern& pattern, const NodePtr& root, const Bindings& base = {},
                             bool root_only = false);

}  // namespace cool
