#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace lnu::logic {

/// Propositional formula over variables x1..xn (stored 0-based).
class Formula {
 public:
  enum class Kind { variable, negation, conjunction, disjunction, implication };

  static Formula var(std::size_t index);
  static Formula negate(Formula f);
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula imply(Formula a, Formula b);

  Kind kind() const { return kind_; }
  std::size_t index() const { return index_; }
  const Formula& operand(std::size_t i) const { return args_.at(i); }

  /// One past the largest variable index.
  std::size_t arity() const;
  /// Round-trips through `parse_formula`.
  std::string to_string() const;

  friend bool operator==(const Formula&, const Formula&) = default;

 private:
  Formula(Kind kind, std::size_t index, std::vector<Formula> args)
      : kind_(kind), index_(index), args_(std::move(args)) {}

  Kind kind_;
  std::size_t index_;
  std::vector<Formula> args_;
};

/// Classical evaluation; IMPLY(a, b) = OR(NOT a, b).
bool hard_eval(const Formula& f, const std::vector<bool>& assignment);

/// Parses e.g. "(x1 | x2) & !x3". Operators by increasing precedence:
/// "->" (right assoc), "|", "&", "!". Variables are x1, x2, ... (1-based).
Formula parse_formula(std::string_view text);

/// (x1 OR x2) AND NOT x3
Formula toy_formula();

}  // namespace lnu::logic
