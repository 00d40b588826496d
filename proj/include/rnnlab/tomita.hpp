#pragma once

// The seven Tomita grammars as hand-built DFAs over {a, b}, and the
// '$'-separated labeled stream generator used for training. The target
// at each position is the oracle verdict on the symbols seen since the
// last '$'; at a '$' position it is the verdict on the empty string.

#include "rnnlab/rng.hpp"
#include "rnnlab/stream.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rnnlab {

struct TomitaDfa {
  int n = 0;
  int start = 0;
  std::vector<std::array<int, 2>> delta;  // [state][symbol], a=0 b=1
  std::vector<char> accept;
};

inline const TomitaDfa& tomita_dfa(int id) {
  static const std::vector<TomitaDfa> dfas = [] {
    std::vector<TomitaDfa> v(8);
    // Tomita 1: a*
    v[1] = {2, 0, {{0, 1}, {1, 1}}, {1, 0}};
    // Tomita 2: (ab)*
    // 0 = between pairs (accept), 1 = saw a, 2 = dead
    v[2] = {3, 0, {{1, 2}, {2, 0}, {2, 2}}, {1, 0, 0}};
    // Tomita 3: no odd run of a's immediately followed by an odd run
    // of b's. 0 = safe, 1 = odd a-run, 2 = even a-run,
    // 3 = odd b-run after odd a-run, 4 = even b-run after odd a-run,
    // 5 = dead.
    v[3] = {6,
            0,
            {{1, 0}, {2, 3}, {1, 0}, {5, 4}, {1, 3}, {5, 5}},
            {1, 1, 1, 0, 1, 0}};
    // Tomita 4: fewer than 3 consecutive b's.
    // state = trailing b count 0..2, 3 = dead
    v[4] = {4, 0, {{0, 1}, {0, 2}, {0, 3}, {3, 3}}, {1, 1, 1, 0}};
    // Tomita 5: even length and even number of a's.
    // state = 2*(len parity) + (a parity)
    v[5] = {4, 0, {{3, 2}, {2, 3}, {1, 0}, {0, 1}}, {1, 0, 0, 0}};
    // Tomita 6: (#a - #b) mod 3 == 0. state = difference mod 3
    v[6] = {3, 0, {{1, 2}, {2, 0}, {0, 1}}, {1, 0, 0}};
    // Tomita 7: b* a* b* a*. phases 0..3, 4 = dead
    v[7] = {5,
            0,
            {{1, 0}, {1, 2}, {3, 2}, {3, 4}, {4, 4}},
            {1, 1, 1, 1, 0}};
    return v;
  }();
  if (id < 1 || id > 7) throw std::invalid_argument("tomita id must be 1..7");
  return dfas[id];
}

inline int tomita_symbol(char c) {
  if (c == 'a') return 0;
  if (c == 'b') return 1;
  throw std::invalid_argument(std::string("tomita: invalid symbol '") + c +
                              "'");
}

inline bool tomita_accepts(int id, const std::string& s) {
  const TomitaDfa& d = tomita_dfa(id);
  int q = d.start;
  for (char c : s) q = d.delta[q][tomita_symbol(c)];
  return d.accept[q];
}

namespace detail {

// f[l][s] = number of length-l strings from state s ending in a state of
// the wanted class. Used to sample uniformly within (length, class).
inline std::vector<std::vector<uint64_t>> tomita_counts(const TomitaDfa& d,
                                                        bool want,
                                                        int max_len) {
  std::vector<std::vector<uint64_t>> f(max_len + 1,
                                       std::vector<uint64_t>(d.n, 0));
  for (int s = 0; s < d.n; ++s) f[0][s] = (d.accept[s] != 0) == want;
  for (int l = 1; l <= max_len; ++l)
    for (int s = 0; s < d.n; ++s)
      f[l][s] = f[l - 1][d.delta[s][0]] + f[l - 1][d.delta[s][1]];
  return f;
}

// Uniform string of the wanted class: length uniform over the lengths
// that contain at least one such string, string uniform within length.
inline std::string sample_tomita_string(
    const TomitaDfa& d, const std::vector<std::vector<uint64_t>>& f,
    int max_len, Rng& rng) {
  std::vector<int> lengths;
  for (int l = 0; l <= max_len; ++l)
    if (f[l][d.start] > 0) lengths.push_back(l);
  if (lengths.empty())
    throw std::runtime_error("tomita generator: class unattainable");
  int len = lengths[std::uniform_int_distribution<size_t>(
      0, lengths.size() - 1)(rng)];
  std::string s;
  int q = d.start;
  for (int l = len; l >= 1; --l) {
    uint64_t wa = f[l - 1][d.delta[q][0]];
    uint64_t wb = f[l - 1][d.delta[q][1]];
    uint64_t pick = std::uniform_int_distribution<uint64_t>(0, wa + wb - 1)(rng);
    if (pick < wa) {
      s += 'a';
      q = d.delta[q][0];
    } else {
      s += 'b';
      q = d.delta[q][1];
    }
  }
  return s;
}

}  // namespace detail

inline Alphabet tomita_input_alphabet() { return Alphabet::chars("ab$"); }
inline Alphabet binary_target_alphabet() { return Alphabet::chars("01"); }

// Labels a '$'-separated text: the target at each position is the
// verdict on the symbols since the last '$' ('$' itself labels the
// empty string).
inline LabeledStream tomita_label_text(int id, const std::string& text) {
  const TomitaDfa& d = tomita_dfa(id);
  LabeledStream s;
  s.input_alphabet = tomita_input_alphabet();
  s.target_alphabet = binary_target_alphabet();
  int q = d.start;
  for (char c : text) {
    s.input.push_back(s.input_alphabet.index(std::string(1, c)));
    if (c == '$') {
      q = d.start;
      s.target.push_back(d.accept[d.start] ? 1 : 0);
    } else {
      q = d.delta[q][tomita_symbol(c)];
      s.target.push_back(d.accept[q] ? 1 : 0);
    }
  }
  return s;
}

// '$'-separated stream of n_strings strings, alternating accepted and
// rejected, lengths uniform over 0..max_len within each class.
inline LabeledStream gen_tomita_stream(int id, int n_strings, int max_len,
                                       uint64_t seed) {
  if (n_strings <= 0) throw std::invalid_argument("n_strings must be > 0");
  const TomitaDfa& d = tomita_dfa(id);
  auto fpos = detail::tomita_counts(d, true, max_len);
  auto fneg = detail::tomita_counts(d, false, max_len);
  Rng rng = make_rng(seed);

  std::string text = "$";
  for (int i = 0; i < n_strings; ++i) {
    bool want = (i % 2) == 0;
    text += detail::sample_tomita_string(d, want ? fpos : fneg, max_len, rng);
    text += '$';
  }
  return tomita_label_text(id, text);
}

}  // namespace rnnlab
