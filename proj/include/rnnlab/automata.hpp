#pragma once

// From recurrent-state traces to minimized Moore/Mealy machines:
// record (noise off), select active units, binarize by sign, build a
// frequency-weighted transition structure, prune rare transitions,
// determinize by majority, minimize by partition refinement.

#include "rnnlab/eval.hpp"
#include "rnnlab/model.hpp"
#include "rnnlab/stream.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace rnnlab {

// Per-timestep recurrent activations plus input/output/target symbols.
struct StateTrace {
  Alphabet input_alphabet, target_alphabet;
  MatrixXd h;                // hidden x T, noise off
  std::vector<int> input;    // input-alphabet ids
  std::vector<int> output;   // network argmax class per step
  std::vector<int> target;

  int length() const { return static_cast<int>(input.size()); }
};

inline StateTrace record_trace(const Model& m, const LabeledStream& s) {
  StateTrace tr;
  tr.input_alphabet = s.input_alphabet;
  tr.target_alphabet = s.target_alphabet;
  tr.h.resize(m.dims.hidden, s.size());
  tr.input = s.input;
  tr.target = s.target;
  tr.output.reserve(s.size());
  VectorXd h = VectorXd::Zero(m.dims.hidden);
  VectorXd cell = VectorXd::Zero(m.dims.hidden);
  VectorXd x(m.dims.input);
  VectorXd noise = VectorXd::Zero(m.dims.hidden);
  for (size_t t = 0; t < s.size(); ++t) {
    s.input_alphabet.encode_into(s.input[t], x);
    StepResult r = model_step(m, x, h, cell, noise);
    h = r.h;
    if (m.arch == Arch::lstm) cell = r.c;
    tr.h.col(t) = r.h;
    tr.output.push_back(predicted_class(m.out_kind, r.y));
  }
  return tr;
}

// Units whose max |h| over the trace exceeds the threshold, ascending.
inline std::vector<int> select_active_units(const StateTrace& tr,
                                            double amp_threshold = 0.5) {
  if (tr.length() == 0) throw std::invalid_argument("empty trace");
  std::vector<int> units;
  for (int u = 0; u < tr.h.rows(); ++u)
    if (tr.h.row(u).cwiseAbs().maxCoeff() > amp_threshold) units.push_back(u);
  if (units.empty())
    throw std::runtime_error("select_active_units: no unit exceeds threshold");
  return units;
}

struct BinaryStateSeq {
  std::vector<int> units;      // active-unit indices, ascending
  std::vector<uint64_t> bits;  // per-timestep pattern, bit i = units[i]
  long n_near_zero = 0;        // recorded |h| < 0.1 (binarization unreliable)
};

inline BinaryStateSeq binarize(const StateTrace& tr,
                               const std::vector<int>& units) {
  if (units.empty()) throw std::invalid_argument("binarize: no units");
  if (units.size() > 64) throw std::invalid_argument("binarize: > 64 units");
  BinaryStateSeq b;
  b.units = units;
  b.bits.reserve(tr.length());
  for (int t = 0; t < tr.length(); ++t) {
    uint64_t pat = 0;
    for (size_t i = 0; i < units.size(); ++i) {
      double v = tr.h(units[i], t);
      if (v > 0) pat |= uint64_t{1} << i;
      if (std::abs(v) < 0.1) ++b.n_near_zero;
    }
    b.bits.push_back(pat);
  }
  return b;
}

enum class MachineKind { moore, mealy };

inline const char* kind_name(MachineKind k) {
  return k == MachineKind::moore ? "moore" : "mealy";
}

// Frequency-weighted transition structure over binarized states.
struct Automaton {
  MachineKind kind = MachineKind::mealy;
  Alphabet input_alphabet, output_alphabet;
  std::vector<uint64_t> patterns;  // state id -> bit pattern
  int start = 0;
  // state -> input -> (next state, output) -> count
  std::vector<std::map<int, std::map<std::pair<int, int>, long>>> trans;
  std::vector<std::map<int, long>> state_out;  // moore: output counts per state

  int n_states() const { return static_cast<int>(patterns.size()); }
  long total_count() const {
    long n = 0;
    for (const auto& by_in : trans)
      for (const auto& [in, outs] : by_in)
        for (const auto& [o, c] : outs) n += c;
    return n;
  }
};

// Counts every observed (state_t, input_{t+1}) -> (state_{t+1}, output_{t+1})
// event. Start state is the state at the first '$' input (step 0 if none).
inline Automaton build_automaton(const BinaryStateSeq& bits,
                                 const StateTrace& tr, MachineKind kind) {
  if (bits.bits.size() != static_cast<size_t>(tr.length()))
    throw std::invalid_argument("build_automaton: length mismatch");
  Automaton a;
  a.kind = kind;
  a.input_alphabet = tr.input_alphabet;
  a.output_alphabet = tr.target_alphabet;
  std::map<uint64_t, int> id_of;
  auto state_id = [&](uint64_t pat) {
    auto it = id_of.find(pat);
    if (it != id_of.end()) return it->second;
    int id = static_cast<int>(a.patterns.size());
    id_of.emplace(pat, id);
    a.patterns.push_back(pat);
    a.trans.emplace_back();
    a.state_out.emplace_back();
    return id;
  };
  const int T = tr.length();
  std::vector<int> sid(T);
  for (int t = 0; t < T; ++t) sid[t] = state_id(bits.bits[t]);
  int start_step = 0;
  int dollar = tr.input_alphabet.contains("$")
                   ? tr.input_alphabet.index("$")
                   : (tr.input_alphabet.contains("$$")
                          ? tr.input_alphabet.index("$$")
                          : -1);
  if (dollar >= 0)
    for (int t = 0; t < T; ++t)
      if (tr.input[t] == dollar) {
        start_step = t;
        break;
      }
  a.start = sid[start_step];
  for (int t = 0; t + 1 < T; ++t)
    a.trans[sid[t]][tr.input[t + 1]][{sid[t + 1], tr.output[t + 1]}] += 1;
  if (kind == MachineKind::moore)
    for (int t = 0; t < T; ++t) a.state_out[sid[t]][tr.output[t]] += 1;
  return a;
}

// Removes outcomes whose within-cell probability is below min_prob, then
// drops states unreachable from the start.
inline Automaton prune_transitions(const Automaton& a, double min_prob = 0.001) {
  if (min_prob < 0 || min_prob >= 1)
    throw std::invalid_argument("prune_transitions: min_prob in [0,1)");
  Automaton p = a;
  if (min_prob > 0) {
    for (auto& by_in : p.trans) {
      for (auto& [in, outs] : by_in) {
        long total = 0;
        for (const auto& [o, c] : outs) total += c;
        for (auto it = outs.begin(); it != outs.end();) {
          if (static_cast<double>(it->second) / total < min_prob)
            it = outs.erase(it);
          else
            ++it;
        }
      }
      // drop emptied cells
      for (auto it = by_in.begin(); it != by_in.end();)
        it = it->second.empty() ? by_in.erase(it) : std::next(it);
    }
  }
  // reachability
  std::vector<char> seen(p.n_states(), 0);
  std::queue<int> q;
  q.push(p.start);
  seen[p.start] = 1;
  while (!q.empty()) {
    int s = q.front();
    q.pop();
    for (const auto& [in, outs] : p.trans[s])
      for (const auto& [o, c] : outs)
        if (!seen[o.first]) {
          seen[o.first] = 1;
          q.push(o.first);
        }
  }
  std::vector<int> remap(p.n_states(), -1);
  Automaton r;
  r.kind = p.kind;
  r.input_alphabet = p.input_alphabet;
  r.output_alphabet = p.output_alphabet;
  for (int s = 0; s < p.n_states(); ++s)
    if (seen[s]) {
      remap[s] = static_cast<int>(r.patterns.size());
      r.patterns.push_back(p.patterns[s]);
    }
  r.trans.resize(r.patterns.size());
  r.state_out.resize(r.patterns.size());
  for (int s = 0; s < p.n_states(); ++s) {
    if (!seen[s]) continue;
    for (const auto& [in, outs] : p.trans[s])
      for (const auto& [o, c] : outs)
        if (seen[o.first])
          r.trans[remap[s]][in][{remap[o.first], o.second}] = c;
    r.state_out[remap[s]] = p.state_out[s];
  }
  r.start = remap[p.start];
  return r;
}

// Deterministic machine; -1 marks transitions never observed.
struct Dfa {
  MachineKind kind = MachineKind::mealy;
  Alphabet input_alphabet, output_alphabet;
  int start = 0;
  std::vector<std::vector<int>> next;  // state x input
  std::vector<std::vector<int>> out;   // mealy: state x input
  std::vector<int> state_out;          // moore
  std::vector<uint64_t> patterns;      // representative patterns
  double conflict_ratio = 0.0;         // discarded count mass / total
  // (state, input, discarded fraction) for nondeterministic cells
  std::vector<std::tuple<int, int, double>> conflicts;

  int n_states() const { return static_cast<int>(next.size()); }
  int n_inputs() const { return input_alphabet.size(); }
};

// Keeps the highest-count outcome per (state, input); ties broken by the
// lexicographically smallest next-state bit pattern, then output id.
inline Dfa determinize_majority(const Automaton& a) {
  Dfa d;
  d.kind = a.kind;
  d.input_alphabet = a.input_alphabet;
  d.output_alphabet = a.output_alphabet;
  d.start = a.start;
  d.patterns = a.patterns;
  const int n = a.n_states(), ni = a.input_alphabet.size();
  d.next.assign(n, std::vector<int>(ni, -1));
  d.out.assign(n, std::vector<int>(ni, -1));
  long discarded = 0, total = 0;
  for (int s = 0; s < n; ++s) {
    for (const auto& [in, outs] : a.trans[s]) {
      long cell_total = 0, best_count = -1;
      std::pair<int, int> best{-1, -1};
      for (const auto& [o, c] : outs) {
        cell_total += c;
        bool better = c > best_count;
        if (c == best_count) {
          auto key = std::make_pair(a.patterns[o.first], o.second);
          auto bkey = std::make_pair(a.patterns[best.first], best.second);
          better = key < bkey;
        }
        if (better) {
          best = o;
          best_count = c;
        }
      }
      d.next[s][in] = best.first;
      d.out[s][in] = best.second;
      total += cell_total;
      if (cell_total > best_count) {
        discarded += cell_total - best_count;
        d.conflicts.emplace_back(
            s, in, static_cast<double>(cell_total - best_count) / cell_total);
      }
    }
  }
  d.conflict_ratio = total ? static_cast<double>(discarded) / total : 0.0;
  if (a.kind == MachineKind::moore) {
    d.state_out.assign(n, -1);
    for (int s = 0; s < n; ++s) {
      long best_count = -1;
      for (const auto& [tok, c] : a.state_out[s])
        if (c > best_count) {
          best_count = c;
          d.state_out[s] = tok;
        }
    }
  }
  return d;
}

namespace detail {

// Hopcroft partition refinement on a completed machine. Returns the
// block index of every state. Initial partition: Moore by state output,
// Mealy by per-input output row.
inline std::vector<int> refine_partition(const Dfa& d, int n_total,
                                         const std::vector<std::vector<int>>& next) {
  const int ni = d.n_inputs();
  // initial blocks by output signature
  std::map<std::vector<int>, int> sig_block;
  std::vector<int> block_of(n_total);
  std::vector<std::vector<int>> blocks;
  for (int s = 0; s < n_total; ++s) {
    std::vector<int> sig;
    if (d.kind == MachineKind::moore) {
      sig.push_back(s < d.n_states() ? d.state_out[s] : -2);
    } else {
      if (s < d.n_states())
        sig = d.out[s];
      else
        sig.assign(ni, -2);
    }
    auto [it, fresh] = sig_block.emplace(sig, static_cast<int>(blocks.size()));
    if (fresh) blocks.emplace_back();
    block_of[s] = it->second;
    blocks[it->second].push_back(s);
  }
  // predecessor lists
  std::vector<std::vector<std::vector<int>>> pre(
      ni, std::vector<std::vector<int>>(n_total));
  for (int s = 0; s < n_total; ++s)
    for (int c = 0; c < ni; ++c) pre[c][next[s][c]].push_back(s);

  std::set<std::pair<int, int>> work;  // (block, symbol)
  for (int b = 0; b < static_cast<int>(blocks.size()); ++b)
    for (int c = 0; c < ni; ++c) work.emplace(b, c);

  while (!work.empty()) {
    auto [bA, c] = *work.begin();
    work.erase(work.begin());
    // X = states whose c-successor lies in block bA
    std::vector<int> X;
    for (int s : blocks[bA])
      for (int q : pre[c][s]) X.push_back(q);
    if (X.empty()) continue;
    std::map<int, std::vector<int>> touched;  // block -> members in X
    for (int q : X) touched[block_of[q]].push_back(q);
    for (auto& [bB, inX] : touched) {
      if (inX.size() == blocks[bB].size()) continue;  // subset == whole block
      // split bB into inX and the rest
      int bNew = static_cast<int>(blocks.size());
      std::vector<int> rest;
      std::set<int> inX_set(inX.begin(), inX.end());
      for (int q : blocks[bB])
        if (!inX_set.count(q)) rest.push_back(q);
      blocks[bB] = rest;
      blocks.push_back(inX);
      for (int q : inX) block_of[q] = bNew;
      for (int cc = 0; cc < ni; ++cc) {
        if (work.count({bB, cc})) {
          work.emplace(bNew, cc);
        } else {
          // add the smaller half
          if (blocks[bNew].size() <= blocks[bB].size())
            work.emplace(bNew, cc);
          else
            work.emplace(bB, cc);
        }
      }
    }
  }
  return block_of;
}

}  // namespace detail

// Partition-refinement minimization. Undefined transitions are routed to
// an implicit sink during refinement and restored to -1 afterwards. The
// result is canonically numbered by BFS from the start state, inputs in
// alphabet order.
inline Dfa minimize(const Dfa& d) {
  const int n = d.n_states(), ni = d.n_inputs();
  if (n == 0) return d;
  bool has_undef = false;
  for (const auto& row : d.next)
    for (int v : row) has_undef |= v < 0;
  const int n_total = n + (has_undef ? 1 : 0);
  const int sink = n;  // valid only if has_undef
  std::vector<std::vector<int>> next(n_total, std::vector<int>(ni, sink));
  for (int s = 0; s < n; ++s)
    for (int c = 0; c < ni; ++c)
      next[s][c] = d.next[s][c] < 0 ? sink : d.next[s][c];
  std::vector<int> block_of = detail::refine_partition(d, n_total, next);

  int sink_block = has_undef ? block_of[sink] : -1;
  // BFS over blocks from the start block
  std::vector<int> order_of_block(
      *std::max_element(block_of.begin(), block_of.end()) + 1, -1);
  std::vector<int> rep;  // representative state per new id
  std::queue<int> q;
  auto visit = [&](int block, int rep_state) {
    if (block == sink_block || order_of_block[block] >= 0) return;
    order_of_block[block] = static_cast<int>(rep.size());
    rep.push_back(rep_state);
    q.push(rep_state);
  };
  // representative = smallest original state id in the block
  std::vector<int> block_rep(order_of_block.size(), -1);
  for (int s = 0; s < n; ++s)
    if (block_rep[block_of[s]] < 0) block_rep[block_of[s]] = s;
  visit(block_of[d.start], block_rep[block_of[d.start]]);
  while (!q.empty()) {
    int s = q.front();
    q.pop();
    for (int c = 0; c < ni; ++c) {
      int t = d.next[s][c];
      if (t >= 0) visit(block_of[t], block_rep[block_of[t]]);
    }
  }

  Dfa m;
  m.kind = d.kind;
  m.input_alphabet = d.input_alphabet;
  m.output_alphabet = d.output_alphabet;
  m.start = 0;
  const int nm = static_cast<int>(rep.size());
  m.next.assign(nm, std::vector<int>(ni, -1));
  m.out.assign(nm, std::vector<int>(ni, -1));
  if (d.kind == MachineKind::moore) m.state_out.assign(nm, -1);
  m.patterns.assign(nm, 0);
  for (int id = 0; id < nm; ++id) {
    int s = rep[id];
    m.patterns[id] = s < static_cast<int>(d.patterns.size()) ? d.patterns[s] : 0;
    if (d.kind == MachineKind::moore) m.state_out[id] = d.state_out[s];
    for (int c = 0; c < ni; ++c) {
      int t = d.next[s][c];
      if (t < 0) continue;
      int tb = block_of[t];
      if (tb == sink_block) continue;
      m.next[id][c] = order_of_block[tb];
      m.out[id][c] = d.out[s][c];
    }
  }
  return m;
}

struct FidelityReport {
  double fidelity = 0.0;
  long n_steps = 0;
  long n_mismatch = 0;
  long n_unseen = 0;
};

// Fraction of steps where the machine's emitted output matches the
// network's output along the trace, both starting at their start states
// (aligned at the first '$'). Unseen (state, input) pairs count as
// mismatches.
inline FidelityReport dfa_fidelity(const Dfa& d, const StateTrace& tr) {
  if (d.n_states() == 0) throw std::runtime_error("fidelity: empty machine");
  FidelityReport rep;
  int dollar = tr.input_alphabet.contains("$")
                   ? tr.input_alphabet.index("$")
                   : (tr.input_alphabet.contains("$$")
                          ? tr.input_alphabet.index("$$")
                          : -1);
  int p = 0;
  if (dollar >= 0)
    for (int t = 0; t < tr.length(); ++t)
      if (tr.input[t] == dollar) {
        p = t;
        break;
      }
  int state = d.start;
  for (int t = p + 1; t < tr.length(); ++t) {
    int in = tr.input[t];
    int nxt = d.next[state][in];
    if (nxt < 0) {
      ++rep.n_unseen;
      ++rep.n_mismatch;
      ++rep.n_steps;
      continue;  // stay; machine has no move
    }
    int emitted = d.kind == MachineKind::mealy ? d.out[state][in]
                                               : d.state_out[nxt];
    rep.n_mismatch += emitted != tr.output[t];
    ++rep.n_steps;
    state = nxt;
  }
  rep.fidelity = rep.n_steps
                     ? 1.0 - static_cast<double>(rep.n_mismatch) / rep.n_steps
                     : 1.0;
  return rep;
}

// --- DOT export (deterministic node/edge ordering) ---

inline std::string export_dot(const Automaton& a) {
  std::ostringstream os;
  os << "digraph automaton {\n  rankdir=LR;\n";
  if (a.n_states() > 0) {
    os << "  __start [shape=point];\n";
    for (int s = 0; s < a.n_states(); ++s) {
      os << "  q" << s << " [label=\"q" << s;
      if (a.kind == MachineKind::moore) {
        long best = -1;
        int tok = -1;
        for (const auto& [o, c] : a.state_out[s])
          if (c > best) {
            best = c;
            tok = o;
          }
        if (tok >= 0) os << "/" << a.output_alphabet.token(tok);
      }
      os << "\"];\n";
    }
    os << "  __start -> q" << a.start << ";\n";
    for (int s = 0; s < a.n_states(); ++s)
      for (const auto& [in, outs] : a.trans[s])
        for (const auto& [o, c] : outs) {
          os << "  q" << s << " -> q" << o.first << " [label=\""
             << a.input_alphabet.token(in);
          if (a.kind == MachineKind::mealy)
            os << "/" << a.output_alphabet.token(o.second);
          os << "\"];\n";
        }
  }
  os << "}\n";
  return os.str();
}

inline std::string export_dot(const Dfa& d) {
  std::ostringstream os;
  os << "digraph dfa {\n  rankdir=LR;\n";
  if (d.n_states() > 0) {
    os << "  __start [shape=point];\n";
    for (int s = 0; s < d.n_states(); ++s) {
      os << "  q" << s << " [label=\"q" << s;
      if (d.kind == MachineKind::moore && d.state_out[s] >= 0)
        os << "/" << d.output_alphabet.token(d.state_out[s]);
      os << "\"];\n";
    }
    os << "  __start -> q" << d.start << ";\n";
    for (int s = 0; s < d.n_states(); ++s)
      for (int c = 0; c < d.n_inputs(); ++c) {
        if (d.next[s][c] < 0) continue;
        os << "  q" << s << " -> q" << d.next[s][c] << " [label=\""
           << d.input_alphabet.token(c);
        if (d.kind == MachineKind::mealy)
          os << "/" << d.output_alphabet.token(d.out[s][c]);
        os << "\"];\n";
      }
  }
  os << "}\n";
  return os.str();
}

// Generative random walk on a (pruned) machine whose input and output
// alphabets coincide: the emitted output symbol is fed back as the next
// input. Returns n emitted symbols.
inline std::string random_walk_generate(const Automaton& a, int n,
                                        uint64_t seed) {
  if (!(a.input_alphabet == a.output_alphabet))
    throw std::invalid_argument("random walk needs matching alphabets");
  int dollar = a.input_alphabet.index("$");
  {
    auto it = a.trans[a.start].find(dollar);
    if (it == a.trans[a.start].end())
      throw std::runtime_error("random walk: no '$' transition from start");
  }
  Rng rng = make_rng(seed);
  std::string out;
  int state = a.start, cur = dollar;
  for (int i = 0; i < n; ++i) {
    auto it = a.trans[state].find(cur);
    if (it == a.trans[state].end()) {
      state = a.start;  // dead end after pruning: resynchronize
      cur = dollar;
      out += '$';
      continue;
    }
    long total = 0;
    for (const auto& [o, c] : it->second) total += c;
    long pick = std::uniform_int_distribution<long>(0, total - 1)(rng);
    std::pair<int, int> chosen = it->second.begin()->first;
    for (const auto& [o, c] : it->second) {
      if (pick < c) {
        chosen = o;
        break;
      }
      pick -= c;
    }
    state = chosen.first;
    cur = chosen.second;
    out += a.output_alphabet.token(cur);
  }
  return out;
}

}  // namespace rnnlab
