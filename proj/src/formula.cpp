#include "lnu/formula.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

#include "lnu/tensor.hpp"

namespace lnu::logic {

Formula Formula::var(std::size_t index) { return Formula(Kind::variable, index, {}); }

Formula Formula::negate(Formula f) { return Formula(Kind::negation, 0, {std::move(f)}); }

Formula Formula::conj(Formula a, Formula b) {
  return Formula(Kind::conjunction, 0, {std::move(a), std::move(b)});
}

Formula Formula::disj(Formula a, Formula b) {
  return Formula(Kind::disjunction, 0, {std::move(a), std::move(b)});
}

Formula Formula::imply(Formula a, Formula b) {
  return Formula(Kind::implication, 0, {std::move(a), std::move(b)});
}

std::size_t Formula::arity() const {
  if (kind_ == Kind::variable) return index_ + 1;
  std::size_t n = 0;
  for (const auto& a : args_) n = std::max(n, a.arity());
  return n;
}

std::string Formula::to_string() const {
  switch (kind_) {
    case Kind::variable: return fmt::format("x{}", index_ + 1);
    case Kind::negation: return "!" + args_[0].to_string();
    case Kind::conjunction:
      return fmt::format("({} & {})", args_[0].to_string(), args_[1].to_string());
    case Kind::disjunction:
      return fmt::format("({} | {})", args_[0].to_string(), args_[1].to_string());
    case Kind::implication:
      return fmt::format("({} -> {})", args_[0].to_string(), args_[1].to_string());
  }
  return {};
}

bool hard_eval(const Formula& f, const std::vector<bool>& assignment) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::variable:
      if (f.index() >= assignment.size()) {
        throw ValidationError(fmt::format("variable x{} out of range for assignment of length {}",
                                          f.index() + 1, assignment.size()));
      }
      return assignment[f.index()];
    case K::negation: return !hard_eval(f.operand(0), assignment);
    case K::conjunction: return hard_eval(f.operand(0), assignment) && hard_eval(f.operand(1), assignment);
    case K::disjunction: return hard_eval(f.operand(0), assignment) || hard_eval(f.operand(1), assignment);
    case K::implication: return !hard_eval(f.operand(0), assignment) || hard_eval(f.operand(1), assignment);
  }
  return false;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Formula parse() {
    Formula f = implication();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return f;
  }

 private:
  Formula implication() {
    Formula lhs = disjunction();
    if (accept("->")) return Formula::imply(std::move(lhs), implication());
    return lhs;
  }

  Formula disjunction() {
    Formula lhs = conjunction();
    while (accept("|")) lhs = Formula::disj(std::move(lhs), conjunction());
    return lhs;
  }

  Formula conjunction() {
    Formula lhs = unary();
    while (accept("&")) lhs = Formula::conj(std::move(lhs), unary());
    return lhs;
  }

  Formula unary() {
    if (accept("!") || accept("~")) return Formula::negate(unary());
    if (accept("(")) {
      Formula inner = implication();
      if (!accept(")")) fail("expected ')'");
      return inner;
    }
    skip_space();
    if (pos_ < text_.size() && (text_[pos_] == 'x' || text_[pos_] == 'X')) {
      ++pos_;
      std::size_t begin = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (begin == pos_) fail("expected variable number after 'x'");
      const std::size_t n = std::stoul(std::string(text_.substr(begin, pos_ - begin)));
      if (n == 0) fail("variables are numbered from x1");
      return Formula::var(n - 1);
    }
    fail("expected variable, '!' or '('");
  }

  bool accept(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(std::string_view what) const {
    throw ConfigError(fmt::format("formula '{}': {} at offset {}", text_, what, pos_));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse_formula(std::string_view text) { return Parser(text).parse(); }

Formula toy_formula() {
  return Formula::conj(Formula::disj(Formula::var(0), Formula::var(1)),
                       Formula::negate(Formula::var(2)));
}

}  // namespace lnu::logic
