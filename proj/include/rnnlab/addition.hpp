#pragma once

// Base-B addition task: two digit streams read left to right (least
// significant digit first), '$' marking the end of a sum in both inputs
// at once. The expected output at a digit pair is the sum digit, at '$'
// it is the pending carry.

#include "rnnlab/rng.hpp"
#include "rnnlab/stream.hpp"

#include <stdexcept>
#include <string>

namespace rnnlab {

struct AdditionConfig {
  int base = 2;
  int length = 200000;
  double sep_prob = 0.1;

  void validate() const {
    if (base < 2) throw std::invalid_argument("addition: base must be >= 2");
    if (sep_prob <= 0.0 || sep_prob >= 1.0)
      throw std::invalid_argument("addition: sep_prob must be in (0,1)");
    if (length < 1) throw std::invalid_argument("addition: length must be > 0");
  }
};

namespace detail {
inline int addition_digit(char c, int base) {
  int d = c - '0';
  if (d < 0 || d >= base)
    throw std::invalid_argument(std::string("addition: digit '") + c +
                                "' out of range for base");
  return d;
}
}  // namespace detail

inline std::string addition_oracle(const std::string& in1,
                                   const std::string& in2, int base) {
  if (in1.size() != in2.size())
    throw std::invalid_argument("addition: input length mismatch");
  std::string out;
  out.reserve(in1.size());
  int carry = 0;
  for (size_t i = 0; i < in1.size(); ++i) {
    bool s1 = in1[i] == '$', s2 = in2[i] == '$';
    if (s1 != s2) throw std::invalid_argument("addition: misaligned '$'");
    if (s1) {
      out += char('0' + carry);
      carry = 0;
    } else {
      int sum = detail::addition_digit(in1[i], base) +
                detail::addition_digit(in2[i], base) + carry;
      out += char('0' + sum % base);
      carry = sum / base;
    }
  }
  return out;
}

// Carry pending before each position (the carry "from the previous
// step"); used to split activation plots by carry context.
inline std::vector<int> carry_sequence(const std::string& in1,
                                       const std::string& in2, int base) {
  std::vector<int> ctx;
  ctx.reserve(in1.size());
  int carry = 0;
  for (size_t i = 0; i < in1.size(); ++i) {
    ctx.push_back(carry);
    if (in1[i] == '$') {
      carry = 0;
    } else {
      int sum = detail::addition_digit(in1[i], base) +
                detail::addition_digit(in2[i], base) + carry;
      carry = sum / base;
    }
  }
  return ctx;
}

struct AdditionData {
  std::string in1, in2, out;
};

inline AdditionData gen_addition_strings(const AdditionConfig& cfg,
                                         uint64_t seed) {
  cfg.validate();
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> dig(0, cfg.base - 1);
  AdditionData d;
  for (int i = 0; i < cfg.length; ++i) {
    if (u(rng) < cfg.sep_prob) {
      d.in1 += '$';
      d.in2 += '$';
    } else {
      d.in1 += char('0' + dig(rng));
      d.in2 += char('0' + dig(rng));
    }
  }
  d.out = addition_oracle(d.in1, d.in2, cfg.base);
  return d;
}

// Inputs become pair tokens ("d1d2" / "$$"), targets single digits.
inline LabeledStream addition_stream(const AdditionData& d, int base) {
  LabeledStream s;
  s.input_alphabet = Alphabet::digit_pairs(base);
  s.target_alphabet = Alphabet::digits(base);
  s.input.reserve(d.in1.size());
  s.target.reserve(d.in1.size());
  for (size_t i = 0; i < d.in1.size(); ++i) {
    std::string pair{d.in1[i], d.in2[i]};
    s.input.push_back(s.input_alphabet.index(pair));
    s.target.push_back(s.target_alphabet.index(std::string(1, d.out[i])));
  }
  s.validate();
  return s;
}

}  // namespace rnnlab
