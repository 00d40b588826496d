#pragma once

// Sequential (noise-off) evaluation and autoregressive sampling.

#include "rnnlab/model.hpp"
#include "rnnlab/stream.hpp"

#include <string>

namespace rnnlab {

// Fraction of positions where the predicted class equals the target,
// consuming the whole stream from a zero initial state with noise off.
inline double classification_accuracy(const Model& m, const LabeledStream& s) {
  VectorXd h = VectorXd::Zero(m.dims.hidden);
  VectorXd cell = VectorXd::Zero(m.dims.hidden);
  VectorXd x(m.dims.input);
  VectorXd noise = VectorXd::Zero(m.dims.hidden);
  long correct = 0;
  for (size_t t = 0; t < s.size(); ++t) {
    s.input_alphabet.encode_into(s.input[t], x);
    StepResult r = model_step(m, x, h, cell, noise);
    h = r.h;
    if (m.arch == Arch::lstm) cell = r.c;
    correct += predicted_class(m.out_kind, r.y) == s.target[t];
  }
  return s.size() ? static_cast<double>(correct) / s.size() : 0.0;
}

// Autoregressive sampling: feed '$', then repeatedly sample the next
// symbol from the output distribution and feed it back. Returns exactly
// n sampled symbols (the initial '$' is not included).
inline std::string generate_string(const Model& m, const Alphabet& alphabet,
                                   int n, uint64_t seed) {
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  VectorXd h = VectorXd::Zero(m.dims.hidden);
  VectorXd cell = VectorXd::Zero(m.dims.hidden);
  VectorXd x(m.dims.input);
  VectorXd noise = VectorXd::Zero(m.dims.hidden);
  int cur = alphabet.index("$");
  std::string out;
  for (int i = 0; i < n; ++i) {
    alphabet.encode_into(cur, x);
    StepResult r = model_step(m, x, h, cell, noise);
    h = r.h;
    if (m.arch == Arch::lstm) cell = r.c;
    int next;
    if (m.out_kind == OutputKind::binary_sigmoid) {
      next = u(rng) < r.y[0] ? 1 : 0;
    } else {
      double roll = u(rng), acc = 0.0;
      next = static_cast<int>(r.y.size()) - 1;
      for (int k = 0; k < r.y.size(); ++k) {
        acc += r.y[k];
        if (roll < acc) {
          next = k;
          break;
        }
      }
    }
    out += alphabet.token(next);
    cur = next;
  }
  return out;
}

}  // namespace rnnlab
