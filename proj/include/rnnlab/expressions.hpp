#pragma once

// Arithmetic-expression grammar:
//   S -> S op T | T;  T -> a | ( S );  op -> + | - | * | /
// with parentheses depth bounded. Provides the corpus generator, the
// validity checker with failure reasons, and the generation-accuracy
// metric over '$'-separated strings.

#include "rnnlab/rng.hpp"
#include "rnnlab/stream.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rnnlab {

inline Alphabet expr_alphabet() { return Alphabet::chars("a()+-*/$"); }

struct ExprConfig {
  int max_depth = 5;
  int length = 200000;
  double p_extend = 0.45;  // S -> S op T, off at the expression-length cap
  double p_paren = 0.35;   // T -> (S), off at the depth cap
  int max_expr_len = 60;

  void validate() const {
    if (max_depth < 1) throw std::invalid_argument("expr: max_depth must be >= 1");
    if (length < 1) throw std::invalid_argument("expr: length must be > 0");
    if (p_extend <= 0 || p_extend >= 1 || p_paren <= 0 || p_paren >= 1)
      throw std::invalid_argument("expr: production weights must be in (0,1)");
  }
};

namespace detail {

inline void gen_term(std::string& e, size_t expr_start, int depth,
                     const ExprConfig& cfg, Rng& rng);

inline void gen_expr(std::string& e, size_t expr_start, int depth,
                     const ExprConfig& cfg, Rng& rng) {
  static const char ops[4] = {'+', '-', '*', '/'};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  gen_term(e, expr_start, depth, cfg, rng);
  while (e.size() - expr_start < static_cast<size_t>(cfg.max_expr_len) &&
         u(rng) < cfg.p_extend) {
    e += ops[std::uniform_int_distribution<int>(0, 3)(rng)];
    gen_term(e, expr_start, depth, cfg, rng);
  }
}

inline void gen_term(std::string& e, size_t expr_start, int depth,
                     const ExprConfig& cfg, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (depth < cfg.max_depth && u(rng) < cfg.p_paren) {
    e += '(';
    gen_expr(e, expr_start, depth + 1, cfg, rng);
    e += ')';
  } else {
    e += 'a';
  }
}

}  // namespace detail

// "$ expr $ expr $ ..." until the corpus reaches cfg.length symbols;
// always ends at a '$'.
inline std::string gen_expr_corpus(const ExprConfig& cfg, uint64_t seed) {
  cfg.validate();
  Rng rng = make_rng(seed);
  std::string c = "$";
  while (c.size() < static_cast<size_t>(cfg.length)) {
    detail::gen_expr(c, c.size(), 0, cfg, rng);
    c += '$';
  }
  return c;
}

enum class ExprReason {
  ok,
  bad_operator_sequence,
  empty_parentheses,
  unbalanced_minus,  // a ')' closing more than was opened
  unbalanced_plus,   // '(' never closed
  depth_exceeded,
  empty,
  other_syntax,
};

inline const char* reason_name(ExprReason r) {
  switch (r) {
    case ExprReason::ok: return "ok";
    case ExprReason::bad_operator_sequence: return "bad-operator-sequence";
    case ExprReason::empty_parentheses: return "empty-parentheses";
    case ExprReason::unbalanced_minus: return "unbalanced-minus";
    case ExprReason::unbalanced_plus: return "unbalanced-plus";
    case ExprReason::depth_exceeded: return "depth-exceeded";
    case ExprReason::empty: return "empty";
    case ExprReason::other_syntax: return "other-syntax";
  }
  return "?";
}

namespace detail {

inline bool expr_char_ok(char c) {
  return c == 'a' || c == '(' || c == ')' || c == '+' || c == '-' ||
         c == '*' || c == '/';
}
inline bool is_op(char c) {
  return c == '+' || c == '-' || c == '*' || c == '/';
}

// Recursive-descent check reporting the first failure.
struct ExprParser {
  const std::string& s;
  int max_depth;
  size_t i = 0;
  ExprReason fail = ExprReason::ok;

  explicit ExprParser(const std::string& str, int md) : s(str), max_depth(md) {}

  bool at_end() const { return i >= s.size(); }
  char peek() const { return s[i]; }

  bool term(int depth) {
    if (at_end()) {
      fail = ExprReason::bad_operator_sequence;  // dangling operator / empty
      return false;
    }
    char c = peek();
    if (c == 'a') {
      ++i;
      return true;
    }
    if (c == '(') {
      if (depth + 1 > max_depth) {
        fail = ExprReason::depth_exceeded;
        return false;
      }
      ++i;
      if (!at_end() && peek() == ')') {
        fail = ExprReason::empty_parentheses;
        return false;
      }
      if (!expr(depth + 1)) return false;
      if (at_end()) {
        fail = ExprReason::unbalanced_plus;
        return false;
      }
      if (peek() != ')') {
        fail = ExprReason::other_syntax;
        return false;
      }
      ++i;
      return true;
    }
    if (is_op(c)) {
      fail = ExprReason::bad_operator_sequence;
      return false;
    }
    if (c == ')') {
      fail = depth == 0 ? ExprReason::unbalanced_minus
                        : ExprReason::empty_parentheses;
      return false;
    }
    fail = ExprReason::other_syntax;
    return false;
  }

  bool expr(int depth) {
    if (!term(depth)) return false;
    while (!at_end() && is_op(peek())) {
      ++i;
      if (!term(depth)) return false;
    }
    return true;
  }
};

}  // namespace detail

// True iff s derives from the grammar with parentheses depth <= max_depth.
inline std::pair<bool, ExprReason> expr_valid(const std::string& s,
                                              int max_depth) {
  for (char c : s) {
    if (c == '$') throw std::invalid_argument("expr_valid: '$' in expression");
    if (!detail::expr_char_ok(c))
      throw std::invalid_argument(std::string("expr_valid: invalid symbol '") +
                                  c + "'");
  }
  if (s.empty()) return {false, ExprReason::empty};
  detail::ExprParser p(s, max_depth);
  if (!p.expr(0)) return {false, p.fail};
  if (!p.at_end()) {
    // successful parse with trailing input
    if (p.peek() == ')') return {false, ExprReason::unbalanced_minus};
    return {false, ExprReason::other_syntax};
  }
  return {true, ExprReason::ok};
}

struct GenerationReport {
  double accuracy = 0.0;
  int n_valid = 0;
  int n_total = 0;
  std::vector<ExprReason> reasons;  // one per substring
};

// Splits on '$' (segments strictly between consecutive '$'), drops the
// trailing incomplete fragment; empty segments count as invalid.
inline GenerationReport generation_accuracy(const std::string& s,
                                            int max_depth) {
  GenerationReport rep;
  size_t first = s.find('$');
  if (first == std::string::npos)
    throw std::runtime_error("generation_accuracy: no '$' in string");
  size_t pos = first;
  while (true) {
    size_t next = s.find('$', pos + 1);
    if (next == std::string::npos) break;
    std::string piece = s.substr(pos + 1, next - pos - 1);
    ExprReason r =
        piece.empty() ? ExprReason::empty : expr_valid(piece, max_depth).second;
    rep.reasons.push_back(r);
    rep.n_valid += r == ExprReason::ok;
    ++rep.n_total;
    pos = next;
  }
  if (rep.n_total == 0)
    throw std::runtime_error("generation_accuracy: no complete substring");
  rep.accuracy = static_cast<double>(rep.n_valid) / rep.n_total;
  return rep;
}

// Next-symbol prediction stream over the expression alphabet.
inline LabeledStream expr_stream(const std::string& corpus) {
  if (corpus.size() < 2)
    throw std::invalid_argument("expr_stream: corpus too short");
  LabeledStream s;
  s.input_alphabet = expr_alphabet();
  s.target_alphabet = expr_alphabet();
  s.input.reserve(corpus.size() - 1);
  s.target.reserve(corpus.size() - 1);
  for (size_t i = 0; i + 1 < corpus.size(); ++i) {
    s.input.push_back(s.input_alphabet.index(std::string(1, corpus[i])));
    s.target.push_back(s.input_alphabet.index(std::string(1, corpus[i + 1])));
  }
  return s;
}

}  // namespace rnnlab
