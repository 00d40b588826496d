#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rnnlab/addition.hpp"
#include "rnnlab/eval.hpp"
#include "rnnlab/expressions.hpp"
#include "rnnlab/tomita.hpp"

#include <algorithm>
#include <regex>
#include <set>
#include <string>
#include <vector>

using namespace rnnlab;

// Independent brute-force checkers, written from the grammar
// descriptions with no shared code with the DFA tables.
static bool brute_tomita(int id, const std::string& s) {
  long na = std::count(s.begin(), s.end(), 'a');
  long nb = std::count(s.begin(), s.end(), 'b');
  switch (id) {
    case 1:
      return nb == 0;
    case 2: {
      if (s.size() % 2) return false;
      for (size_t i = 0; i < s.size(); i += 2)
        if (s[i] != 'a' || s[i + 1] != 'b') return false;
      return true;
    }
    case 3: {
      // no odd run of a's immediately followed by an odd run of b's
      size_t i = 0;
      while (i < s.size()) {
        if (s[i] != 'a') {
          ++i;
          continue;
        }
        size_t j = i;
        while (j < s.size() && s[j] == 'a') ++j;
        size_t k = j;
        while (k < s.size() && s[k] == 'b') ++k;
        if ((j - i) % 2 == 1 && (k - j) % 2 == 1) return false;
        i = k;
      }
      return true;
    }
    case 4:
      return s.find("bbb") == std::string::npos;
    case 5:
      return s.size() % 2 == 0 && na % 2 == 0;
    case 6:
      return ((na - nb) % 3 + 3) % 3 == 0;
    case 7: {
      static const std::regex re("b*a*b*a*");
      return std::regex_match(s, re);
    }
  }
  return false;
}

TEST_CASE("tomita oracles match brute force exhaustively to length 10") {
  for (int id = 1; id <= 7; ++id) {
    long n_checked = 0;
    for (int len = 0; len <= 10; ++len) {
      for (long mask = 0; mask < (1L << len); ++mask) {
        std::string s;
        for (int i = 0; i < len; ++i) s += (mask >> i) & 1 ? 'b' : 'a';
        if (tomita_accepts(id, s) != brute_tomita(id, s)) {
          CAPTURE(id);
          CAPTURE(s);
          REQUIRE(tomita_accepts(id, s) == brute_tomita(id, s));
        }
        ++n_checked;
      }
    }
    CHECK(n_checked == 2047);
  }
}

TEST_CASE("tomita spot checks") {
  for (int id = 1; id <= 7; ++id) CHECK(tomita_accepts(id, ""));
  CHECK_FALSE(tomita_accepts(5, "ab"));  // one a is odd
  CHECK_FALSE(tomita_accepts(4, "abbba"));
  CHECK_FALSE(tomita_accepts(6, "aab"));
  CHECK(tomita_accepts(6, "aaabbb"));  // difference 0 is a multiple of 3
  CHECK(tomita_accepts(3, "aabb"));
  CHECK_FALSE(tomita_accepts(3, "ab"));
  CHECK_THROWS(tomita_accepts(1, "abc"));
  CHECK_THROWS(tomita_dfa(0));
  CHECK_THROWS(tomita_dfa(8));
}

TEST_CASE("tomita target alignment on a fixed text") {
  LabeledStream s = tomita_label_text(2, "$abab$");
  Alphabet in = tomita_input_alphabet();
  std::vector<int> want_in = {in.index("$"), in.index("a"), in.index("b"),
                              in.index("a"), in.index("b"), in.index("$")};
  CHECK(s.input == want_in);
  CHECK(s.target == std::vector<int>{1, 0, 1, 0, 1, 1});
}

TEST_CASE("tomita stream generator statistics and labels") {
  for (int id : {1, 5, 6}) {
    LabeledStream s = gen_tomita_stream(id, 400, 15, 42);
    Alphabet in = tomita_input_alphabet();
    int sep = in.index("$");
    CHECK(s.input.front() == sep);
    CHECK(s.input.back() == sep);

    // re-derive every label and segment class with the brute checker
    std::string seg;
    int n_pos = 0, n_seg = 0;
    for (size_t t = 0; t < s.size(); ++t) {
      if (s.input[t] == sep) {
        if (t > 0) {
          CHECK(seg.size() <= 15);
          n_pos += brute_tomita(id, seg);
          ++n_seg;
        }
        seg.clear();
        CHECK(s.target[t] == (brute_tomita(id, "") ? 1 : 0));
      } else {
        seg += in.token(s.input[t])[0];
        CHECK(s.target[t] == (brute_tomita(id, seg) ? 1 : 0));
      }
    }
    CHECK(n_seg == 400);
    CHECK(std::abs(n_pos - 200) <= 20);  // class balance within 5%
  }

  LabeledStream a = gen_tomita_stream(3, 50, 10, 9);
  LabeledStream b = gen_tomita_stream(3, 50, 10, 9);
  CHECK(a.input == b.input);
  CHECK(gen_tomita_stream(3, 50, 10, 10).input != a.input);
  CHECK_THROWS(gen_tomita_stream(2, 0, 10, 1));
}

TEST_CASE("addition oracle fixed instances") {
  CHECK(addition_oracle("$0101110101011010$01011101",
                        "$1101010110101011$01011010", 2) ==
        "01010011000001100100101000");
  CHECK(addition_oracle("$", "$", 2) == "0");
  CHECK(addition_oracle("$97$", "$15$", 10) == "0031");
  CHECK(addition_oracle("", "", 2) == "");
  CHECK(addition_oracle("11$", "11$", 2) == "011");

  CHECK_THROWS(addition_oracle("$1", "1$", 2));
  CHECK_THROWS(addition_oracle("2", "1", 2));
  CHECK_THROWS(addition_oracle("11", "1", 2));
}

TEST_CASE("addition carry sequence") {
  auto c = carry_sequence("$97$", "$15$", 10);
  CHECK(c == std::vector<int>{0, 0, 1, 1});
  auto c2 = carry_sequence("11$1", "11$1", 2);
  CHECK(c2 == std::vector<int>{0, 1, 1, 0});
}

TEST_CASE("addition oracle concatenates at '$' boundaries") {
  Rng rng = make_rng(77);
  for (int base : {2, 10}) {
    std::uniform_int_distribution<int> dig(0, base - 1);
    std::uniform_int_distribution<int> len(0, 12);
    for (int trial = 0; trial < 50; ++trial) {
      auto part = [&](bool sep_end) {
        std::string s1, s2;
        int n = len(rng);
        for (int i = 0; i < n; ++i) {
          s1 += char('0' + dig(rng));
          s2 += char('0' + dig(rng));
        }
        if (sep_end) {
          s1 += '$';
          s2 += '$';
        }
        return std::pair(s1, s2);
      };
      auto [a1, a2] = part(true);
      auto [b1, b2] = part(false);
      CHECK(addition_oracle(a1 + b1, a2 + b2, base) ==
            addition_oracle(a1, a2, base) + addition_oracle(b1, b2, base));
    }
  }
}

TEST_CASE("addition data generator") {
  AdditionConfig cfg;
  cfg.base = 2;
  cfg.length = 200000;
  AdditionData d = gen_addition_strings(cfg, 5);
  CHECK(d.in1.size() == 200000);
  CHECK(d.in2.size() == 200000);
  CHECK(d.out == addition_oracle(d.in1, d.in2, 2));

  long n_sep = std::count(d.in1.begin(), d.in1.end(), '$');
  double f = static_cast<double>(n_sep) / cfg.length;
  CHECK(f == doctest::Approx(0.1).epsilon(0.05));
  for (size_t i = 0; i < d.in1.size(); ++i)
    CHECK((d.in1[i] == '$') == (d.in2[i] == '$'));

  AdditionData d2 = gen_addition_strings(cfg, 5);
  CHECK(d.in1 == d2.in1);
  CHECK(gen_addition_strings(cfg, 6).in1 != d.in1);

  AdditionConfig bad = cfg;
  bad.base = 1;
  CHECK_THROWS(gen_addition_strings(bad, 1));
  bad = cfg;
  bad.sep_prob = 0.0;
  CHECK_THROWS(gen_addition_strings(bad, 1));
}

TEST_CASE("addition stream encodes pair tokens and digit targets") {
  AdditionData d;
  d.in1 = "$97$";
  d.in2 = "$15$";
  d.out = addition_oracle(d.in1, d.in2, 10);
  LabeledStream s = addition_stream(d, 10);
  CHECK(s.input_alphabet.is_pair());
  CHECK(s.input_alphabet.size() == 101);
  CHECK(s.target_alphabet.size() == 10);
  for (size_t i = 0; i < d.in1.size(); ++i) {
    std::string tok = s.input_alphabet.token(s.input[i]);
    CHECK(tok[0] == d.in1[i]);
    CHECK(tok[1] == d.in2[i]);
    CHECK(s.target_alphabet.token(s.target[i])[0] == d.out[i]);
  }
}

// Grammar closure: all derivable strings of length <= L using
// parentheses depth <= D. Independent of the recursive-descent parser.
static std::set<std::string> enumerate_valid(int L, int D) {
  std::vector<std::set<std::string>> S(D + 1);
  for (int d = 0; d <= D; ++d) {
    std::set<std::string> t = {"a"};
    if (d >= 1)
      for (const auto& s : S[d - 1])
        if (s.size() + 2 <= static_cast<size_t>(L)) t.insert("(" + s + ")");
    std::set<std::string> s = t;
    for (bool changed = true; changed;) {
      changed = false;
      std::set<std::string> add;
      for (const auto& x : s)
        for (char op : {'+', '-', '*', '/'})
          for (const auto& y : t)
            if (x.size() + 1 + y.size() <= static_cast<size_t>(L)) {
              std::string z = x + op + y;
              if (!s.count(z)) add.insert(z);
            }
      if (!add.empty()) {
        s.insert(add.begin(), add.end());
        changed = true;
      }
    }
    S[d] = std::move(s);
  }
  return S[D];
}

TEST_CASE("expr_valid matches grammar enumeration exhaustively to length 7") {
  const std::string sym = "a()+-*/";
  std::set<std::string> valid = enumerate_valid(7, 5);
  CHECK(valid.count("a") == 1);
  CHECK(valid.count("(a)+a") == 1);
  CHECK(valid.count("((a))") == 1);

  long n_valid_seen = 0;
  std::string s;
  // iterate all strings of length 1..7 over the 7 symbols
  for (int len = 1; len <= 7; ++len) {
    std::vector<int> idx(len, 0);
    for (;;) {
      s.clear();
      for (int i : idx) s += sym[i];
      bool got = expr_valid(s, 5).first;
      bool want = valid.count(s) > 0;
      if (got != want) {
        CAPTURE(s);
        REQUIRE(got == want);
      }
      n_valid_seen += got;
      int p = len - 1;
      while (p >= 0 && idx[p] == 6) idx[p--] = 0;
      if (p < 0) break;
      ++idx[p];
    }
  }
  CHECK(n_valid_seen == static_cast<long>(valid.size()));
}

TEST_CASE("grammar strings always have odd length") {
  // a is length 1; each extension adds 2, each wrapping adds 2
  Rng rng = make_rng(3);
  std::uniform_int_distribution<int> pick(0, 6);
  const std::string sym = "a()+-*/";
  for (int trial = 0; trial < 20000; ++trial) {
    std::string s;
    for (int i = 0; i < 8; ++i) s += sym[pick(rng)];
    CHECK_FALSE(expr_valid(s, 5).first);
  }
}

TEST_CASE("expr_valid verdicts and reasons on published examples") {
  auto [v1, r1] = expr_valid("a-((a)+a)*/a+(a)", 5);
  CHECK_FALSE(v1);
  CHECK(r1 == ExprReason::bad_operator_sequence);

  auto [v2, r2] = expr_valid("(a+())-a*(((a)))", 5);
  CHECK_FALSE(v2);
  CHECK(r2 == ExprReason::empty_parentheses);

  auto [v3, r3] = expr_valid("a-((a))+a)/a+(a)", 5);
  CHECK_FALSE(v3);
  CHECK(r3 == ExprReason::unbalanced_minus);

  CHECK_FALSE(expr_valid("((a(a))+a*a/((a))", 5).first);
  // 'a(' adjacency is not derivable, so this one is rejected too
  CHECK_FALSE(expr_valid("((a(a))+a*a/((a)))", 5).first);

  CHECK(expr_valid("a", 5).first);
  CHECK(expr_valid("(((((a)))))", 5).first);
  CHECK(expr_valid("a+a*a-(a/a)", 5).first);
}

TEST_CASE("expr_valid failure reasons") {
  CHECK(expr_valid("", 5).second == ExprReason::empty);
  CHECK(expr_valid("(a", 5).second == ExprReason::unbalanced_plus);
  CHECK(expr_valid("a)", 5).second == ExprReason::unbalanced_minus);
  CHECK(expr_valid("a+", 5).second == ExprReason::bad_operator_sequence);
  CHECK(expr_valid("+a", 5).second == ExprReason::bad_operator_sequence);
  CHECK(expr_valid("()", 5).second == ExprReason::empty_parentheses);
  CHECK(expr_valid("((((((a))))))", 5).second == ExprReason::depth_exceeded);
  CHECK(expr_valid("((((((a))))))", 6).first);
  CHECK_THROWS(expr_valid("a$a", 5));
  CHECK_THROWS(expr_valid("b", 5));
  CHECK(std::string(reason_name(ExprReason::bad_operator_sequence)) ==
        "bad-operator-sequence");
}

TEST_CASE("expression corpus generator") {
  ExprConfig cfg;
  cfg.length = 200000;
  std::string c = gen_expr_corpus(cfg, 11);
  CHECK(c.size() >= 200000);
  CHECK(c.front() == '$');
  CHECK(c.back() == '$');
  for (char ch : c) CHECK(expr_alphabet().contains(std::string(1, ch)));

  GenerationReport rep = generation_accuracy(c, cfg.max_depth);
  CHECK(rep.accuracy == 1.0);
  CHECK(rep.n_total > 1000);

  // the depth cap is actually reached somewhere in a corpus this long
  int depth = 0, max_depth = 0;
  for (char ch : c) {
    if (ch == '(') max_depth = std::max(max_depth, ++depth);
    if (ch == ')') --depth;
    if (ch == '$') depth = 0;
  }
  CHECK(max_depth == 5);

  CHECK(gen_expr_corpus(cfg, 11) == c);
  CHECK(gen_expr_corpus(cfg, 12) != c);

  // every expression respects the length cap
  size_t longest = 0, prev = 0;
  for (size_t i = 1; i < c.size(); ++i)
    if (c[i] == '$') {
      longest = std::max(longest, i - prev - 1);
      prev = i;
    }
  // one last term may be appended after the cap check
  CHECK(longest <= static_cast<size_t>(cfg.max_expr_len) + 62);
}

TEST_CASE("generation accuracy") {
  GenerationReport r = generation_accuracy("$a+a$a$", 5);
  CHECK(r.accuracy == 1.0);
  CHECK(r.n_total == 2);

  r = generation_accuracy("$a+$a$", 5);
  CHECK(r.accuracy == 0.5);
  CHECK(r.reasons[0] == ExprReason::bad_operator_sequence);

  // prefix before the first '$' and trailing fragment are dropped
  r = generation_accuracy(")(a$a$a+a", 5);
  CHECK(r.n_total == 1);
  CHECK(r.accuracy == 1.0);

  r = generation_accuracy("$$a$", 5);
  CHECK(r.n_total == 2);
  CHECK(r.reasons[0] == ExprReason::empty);
  CHECK(r.accuracy == 0.5);

  CHECK_THROWS(generation_accuracy("aaa", 5));
  CHECK_THROWS(generation_accuracy("a$a", 5));  // no complete substring
}

TEST_CASE("expr stream is next-symbol prediction") {
  std::string c = "$a+a$(a)$";
  LabeledStream s = expr_stream(c);
  CHECK(s.size() == c.size() - 1);
  for (size_t i = 0; i < s.size(); ++i) {
    CHECK(s.input_alphabet.token(s.input[i])[0] == c[i]);
    CHECK(s.target_alphabet.token(s.target[i])[0] == c[i + 1]);
  }
  CHECK_THROWS(expr_stream("$"));
}

TEST_CASE("autoregressive sampling stays in the alphabet") {
  Alphabet a = expr_alphabet();
  Model m = init_params(Arch::elman, {a.size(), 6, 0, a.size()}, 21);
  std::string g = generate_string(m, a, 300, 4);
  CHECK(g.size() == 300);
  for (char ch : g) CHECK(a.contains(std::string(1, ch)));
  CHECK(generate_string(m, a, 300, 4) == g);
  CHECK(generate_string(m, a, 300, 5) != g);
}
