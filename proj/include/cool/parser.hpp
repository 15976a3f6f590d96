#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cool/ir.hpp"
#include "cool/syntax.hpp"

namespace cool {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int column, std::string token);
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& token() const { return token_; }

 private:
  int line_;
  int column_;
  std::string token_;
};

struct Declaration {
  std::string name;
  SyntaxPtr value;
};

struct TaskSpec {
  std::set<std::string> domain_hint;
  SyntaxPtr statement;
  PartialProgram goal;
  std::vector<Declaration> declarations;
  /// Variables named by `name-->"#FILE(SCREEN)"` after the statement.
  std::vector<std::string> report;
  /// From an `Ans:` comment; the kinship noun for relational answers.
  std::optional<std::string> gold_answer;
  int line = 0;
};

/// A task file keeps its items in source order so it can be printed back.
struct TaskFile {
  struct Item {
    enum class Kind { load, declaration, task, report };
    Kind kind;
    std::string name;   // library, declared or reported variable
    SyntaxPtr value;    // declaration value or task statement
    std::optional<std::string> gold;
  };
  std::vector<Item> items;
  std::vector<TaskSpec> tasks;
};

std::vector<RuleSource> parse_rules(std::string_view text);
TaskFile parse_task_file(std::string_view text);
std::vector<TaskSpec> parse_tasks(std::string_view text);
SyntaxPtr parse_expression(std::string_view text);

bool task_files_equal(const TaskFile& a, const TaskFile& b);
std::string to_source(const TaskFile& file);

/// Lowers a goal statement: `$name` nodes and bare identifiers sharing a
/// `$name` become nonterminals.
NodePtr lower_goal(const Syntax& statement);

}  // namespace cool
