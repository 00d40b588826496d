#pragma once

// Alphabets over string tokens, one-hot encodings and symbol streams.
// Tokens are either single characters ("a", "$") or digit pairs ("37",
// "$$") for the addition task, where the encoding is the concatenation
// of two one-hots over {0..B-1, $}.

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace rnnlab {

class Alphabet {
 public:
  Alphabet() = default;

  static Alphabet plain(std::vector<std::string> symbols) {
    Alphabet a;
    a.symbols_ = std::move(symbols);
    a.build_index();
    a.encoding_dim_ = static_cast<int>(a.symbols_.size());
    return a;
  }

  // Single characters over a string, e.g. "ab$".
  static Alphabet chars(const std::string& s) {
    std::vector<std::string> v;
    for (char c : s) v.emplace_back(1, c);
    return plain(std::move(v));
  }

  // Digit-pair alphabet for base-B addition: tokens "d1d2" for all
  // digit combinations plus the separator pair "$$". Encoded as two
  // concatenated one-hots over {0..B-1, $}.
  static Alphabet digit_pairs(int base) {
    if (base < 2 || base > 10)
      throw std::invalid_argument("digit_pairs: base must be in [2,10]");
    Alphabet a;
    for (int d1 = 0; d1 < base; ++d1)
      for (int d2 = 0; d2 < base; ++d2)
        a.symbols_.push_back(std::string() + char('0' + d1) + char('0' + d2));
    a.symbols_.push_back("$$");
    a.build_index();
    a.pair_base_ = base;
    a.encoding_dim_ = 2 * (base + 1);
    return a;
  }

  static Alphabet digits(int base) {
    std::vector<std::string> v;
    for (int d = 0; d < base; ++d) v.emplace_back(1, char('0' + d));
    return plain(std::move(v));
  }

  int size() const { return static_cast<int>(symbols_.size()); }
  int encoding_dim() const { return encoding_dim_; }
  bool is_pair() const { return pair_base_ > 0; }
  int pair_base() const { return pair_base_; }

  bool contains(const std::string& tok) const { return index_.count(tok) > 0; }

  int index(const std::string& tok) const {
    auto it = index_.find(tok);
    if (it == index_.end())
      throw std::invalid_argument("unknown symbol: '" + tok + "'");
    return it->second;
  }

  const std::string& token(int i) const { return symbols_.at(i); }
  const std::vector<std::string>& tokens() const { return symbols_; }

  void encode_into(int idx, Eigen::Ref<Eigen::VectorXd> out) const {
    out.setZero();
    if (!is_pair()) {
      out[idx] = 1.0;
      return;
    }
    // pair tokens: halves index digits over {0..B-1, $}, '$' last
    const int half = pair_base_ + 1;
    if (idx == size() - 1) {  // "$$"
      out[pair_base_] = 1.0;
      out[half + pair_base_] = 1.0;
    } else {
      out[idx / pair_base_] = 1.0;
      out[half + idx % pair_base_] = 1.0;
    }
  }

  Eigen::VectorXd encode(const std::string& tok) const {
    Eigen::VectorXd v(encoding_dim_);
    encode_into(index(tok), v);
    return v;
  }

  // Argmax decode, ties broken toward the lowest index. Accepts either a
  // class-score vector (length = size) or, for pair alphabets, an encoded
  // vector (length = encoding_dim) decoded half by half.
  std::string decode_argmax(const Eigen::VectorXd& v) const {
    if (static_cast<int>(v.size()) == size() && !(is_pair() && size() == encoding_dim_))
      return symbols_[argmax(v, 0, size())];
    if (is_pair() && static_cast<int>(v.size()) == encoding_dim_) {
      const int half = pair_base_ + 1;
      int a = argmax(v, 0, half);
      int b = argmax(v, half, 2 * half) - half;
      auto part = [&](int d) {
        return d == pair_base_ ? std::string("$") : std::string(1, char('0' + d));
      };
      return part(a) + part(b);
    }
    throw std::invalid_argument("decode_argmax: dimension mismatch");
  }

  bool operator==(const Alphabet& o) const {
    return symbols_ == o.symbols_ && pair_base_ == o.pair_base_;
  }

 private:
  static int argmax(const Eigen::VectorXd& v, int lo, int hi) {
    int best = lo;
    for (int i = lo + 1; i < hi; ++i)
      if (v[i] > v[best]) best = i;
    return best;
  }

  void build_index() {
    for (int i = 0; i < static_cast<int>(symbols_.size()); ++i) {
      if (!index_.emplace(symbols_[i], i).second)
        throw std::invalid_argument("duplicate symbol: " + symbols_[i]);
    }
    if (symbols_.size() < 2)
      throw std::invalid_argument("alphabet needs at least 2 symbols");
  }

  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
  int pair_base_ = 0;
  int encoding_dim_ = 0;
};

// A sequence of symbol ids over one alphabet.
struct SymbolSeq {
  Alphabet alphabet;
  std::vector<int> ids;

  static SymbolSeq from_tokens(const Alphabet& a,
                               const std::vector<std::string>& toks) {
    SymbolSeq s;
    s.alphabet = a;
    s.ids.reserve(toks.size());
    for (const auto& t : toks) s.ids.push_back(a.index(t));
    return s;
  }

  static SymbolSeq from_chars(const Alphabet& a, const std::string& text) {
    SymbolSeq s;
    s.alphabet = a;
    s.ids.reserve(text.size());
    for (char c : text) s.ids.push_back(a.index(std::string(1, c)));
    return s;
  }

  std::string to_text() const {
    std::string out;
    for (int id : ids) out += alphabet.token(id);
    return out;
  }

  size_t size() const { return ids.size(); }
};

}  // namespace rnnlab
