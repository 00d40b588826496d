#pragma once

// Parameter containers and forward dynamics for the three architectures:
// noisy Elman, Dual (noisy recurrent layer + feedforward readout layer),
// and a standard forget-gate LSTM.
//
// Recurrent update (Elman and Dual):
//   h_t = tanh(W_xh x_t + W_hh h_{t-1} + noise o h_{t-1} + b_h)
// Dual adds a feedforward layer fed by the input and the current h_t:
//   c_t = tanh(W_xc x_t + W_hc h_t + b_c),  y_t = out(W_cy c_t + b_y)
// The noise vector is resampled at every step during training and is
// zero at evaluation/extraction time.

#include "rnnlab/alphabet.hpp"
#include "rnnlab/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace rnnlab {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Arch { elman, dual, lstm };

inline const char* arch_name(Arch a) {
  switch (a) {
    case Arch::elman: return "elman";
    case Arch::dual: return "dual";
    case Arch::lstm: return "lstm";
  }
  return "?";
}

inline Arch arch_from_name(const std::string& s) {
  if (s == "elman") return Arch::elman;
  if (s == "dual") return Arch::dual;
  if (s == "lstm") return Arch::lstm;
  throw std::invalid_argument("unknown architecture: " + s);
}

// Output nonlinearity: a single sigmoid unit for binary targets, a
// normalized exponential over classes otherwise.
enum class OutputKind { binary_sigmoid, softmax };

struct Dims {
  int input = 0;   // encoding dimension of the input alphabet
  int hidden = 0;  // recurrent units
  int ff = 0;      // feedforward units (Dual only)
  int output = 0;  // 1 for binary targets, n_classes otherwise
};

// Parameter slot indices per architecture. Biases are stored as n x 1
// matrices so all parameters live in one uniform container.
namespace elman_p {
enum { Wxh, Whh, Why, bh, by, count };
}
namespace dual_p {
enum { Wxh, Whh, bh, Wxc, Whc, bc, Wcy, by, count };
}
namespace lstm_p {
enum { Wxi, Whi, bi, Wxf, Whf, bf, Wxo, Who, bo, Wxg, Whg, bg, Why, by, count };
}

inline const std::vector<std::string>& param_names(Arch a) {
  static const std::vector<std::string> elman = {"W_xh", "W_hh", "W_hy", "b_h",
                                                 "b_y"};
  static const std::vector<std::string> dual = {"W_xh", "W_hh", "b_h", "W_xc",
                                                "W_hc", "b_c",  "W_cy", "b_y"};
  static const std::vector<std::string> lstm = {
      "W_xi", "W_hi", "b_i", "W_xf", "W_hf", "b_f", "W_xo",
      "W_ho", "b_o",  "W_xg", "W_hg", "b_g", "W_hy", "b_y"};
  switch (a) {
    case Arch::elman: return elman;
    case Arch::dual: return dual;
    case Arch::lstm: return lstm;
  }
  return elman;
}

// Which parameters the L1 penalty applies to. Elman: all weight
// matrices, no biases. Dual: only the recurrent-layer weights W_xh,
// W_hh and W_hc. LSTM: the gate weight matrices, no biases.
inline const std::vector<bool>& regularized_mask(Arch a) {
  static const std::vector<bool> elman = {true, true, true, false, false};
  static const std::vector<bool> dual = {true, true,  false, false,
                                         true, false, false, false};
  static const std::vector<bool> lstm = {true, true, false, true, true,
                                         false, true, true, false, true,
                                         true, false, false, false};
  switch (a) {
    case Arch::elman: return elman;
    case Arch::dual: return dual;
    case Arch::lstm: return lstm;
  }
  return elman;
}

struct Model {
  Arch arch = Arch::elman;
  Dims dims;
  OutputKind out_kind = OutputKind::softmax;
  std::vector<MatrixXd> w;

  int n_params() const {
    int n = 0;
    for (const auto& m : w) n += static_cast<int>(m.size());
    return n;
  }
};

namespace detail {
inline MatrixXd uniform_fan_in(int rows, int cols, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
  std::uniform_real_distribution<double> u(-bound, bound);
  MatrixXd m(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) m(r, c) = u(rng);
  return m;
}
}  // namespace detail

// Each weight entry uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)];
// biases zero except the LSTM forget-gate bias, initialized to 1.
inline Model init_params(Arch arch, Dims dims, uint64_t seed) {
  if (dims.input < 1 || dims.hidden < 1 || dims.output < 1)
    throw std::invalid_argument("init_params: non-positive dims");
  if (arch == Arch::dual && dims.ff < 1)
    throw std::invalid_argument("init_params: dual needs ff units");
  Rng rng = make_rng(seed);
  Model m;
  m.arch = arch;
  m.dims = dims;
  m.out_kind =
      dims.output == 1 ? OutputKind::binary_sigmoid : OutputKind::softmax;
  const int in = dims.input, h = dims.hidden, f = dims.ff, out = dims.output;
  auto W = [&](int r, int c) { return detail::uniform_fan_in(r, c, rng); };
  auto B = [](int r, double v = 0.0) {
    return MatrixXd::Constant(r, 1, v);
  };
  switch (arch) {
    case Arch::elman:
      m.w = {W(h, in), W(h, h), W(out, h), B(h), B(out)};
      break;
    case Arch::dual:
      m.w = {W(h, in), W(h, h), B(h),   W(f, in),
             W(f, h),  B(f),    W(out, f), B(out)};
      break;
    case Arch::lstm:
      m.w = {W(h, in), W(h, h), B(h),      W(h, in), W(h, h),
             B(h, 1.0), W(h, in), W(h, h), B(h),     W(h, in),
             W(h, h),  B(h),    W(out, h), B(out)};
      break;
  }
  return m;
}

// mean 0, std nu; nu = 0 gives the zero vector. Filled column-major.
inline void sample_noise_into(double nu, Eigen::Ref<MatrixXd> out, Rng& rng) {
  if (nu == 0.0) {
    out.setZero();
    return;
  }
  std::normal_distribution<double> n(0.0, nu);
  for (int c = 0; c < out.cols(); ++c)
    for (int r = 0; r < out.rows(); ++r) out(r, c) = n(rng);
}

inline VectorXd sample_noise(double nu, int dim, Rng& rng) {
  if (nu < 0) throw std::invalid_argument("sample_noise: nu < 0");
  MatrixXd m(dim, 1);
  sample_noise_into(nu, m, rng);
  return m.col(0);
}

// Output nonlinearity applied column by column to logits.
inline void apply_output_inplace(OutputKind kind, MatrixXd& z) {
  if (kind == OutputKind::binary_sigmoid) {
    z = 1.0 / (1.0 + (-z.array()).exp());
    return;
  }
  for (int c = 0; c < z.cols(); ++c) {
    auto col = z.col(c).array();
    col -= col.maxCoeff();
    col = col.exp();
    col /= col.sum();
  }
}

// --- single-sequence steps (used by trace recording and tests) ---

struct StepResult {
  VectorXd h;
  VectorXd c;     // Dual feedforward activation; LSTM cell
  VectorXd y;
};

inline StepResult elman_step(const Model& m, const VectorXd& x,
                             const VectorXd& h_prev, const VectorXd& noise) {
  using namespace elman_p;
  if (x.size() != m.dims.input || h_prev.size() != m.dims.hidden ||
      noise.size() != m.dims.hidden)
    throw std::invalid_argument("elman_step: dimension mismatch");
  StepResult r;
  r.h = (m.w[Wxh] * x + m.w[Whh] * h_prev +
         noise.cwiseProduct(h_prev) + m.w[bh].col(0))
            .array()
            .tanh();
  MatrixXd z = m.w[Why] * r.h + m.w[by].col(0);
  apply_output_inplace(m.out_kind, z);
  r.y = z.col(0);
  return r;
}

inline StepResult dual_step(const Model& m, const VectorXd& x,
                            const VectorXd& h_prev, const VectorXd& noise) {
  using namespace dual_p;
  if (x.size() != m.dims.input || h_prev.size() != m.dims.hidden ||
      noise.size() != m.dims.hidden)
    throw std::invalid_argument("dual_step: dimension mismatch");
  StepResult r;
  r.h = (m.w[Wxh] * x + m.w[Whh] * h_prev +
         noise.cwiseProduct(h_prev) + m.w[bh].col(0))
            .array()
            .tanh();
  r.c = (m.w[Wxc] * x + m.w[Whc] * r.h + m.w[bc].col(0)).array().tanh();
  MatrixXd z = m.w[Wcy] * r.c + m.w[by].col(0);
  apply_output_inplace(m.out_kind, z);
  r.y = z.col(0);
  return r;
}

inline StepResult lstm_step(const Model& m, const VectorXd& x,
                            const VectorXd& h_prev, const VectorXd& cell_prev) {
  using namespace lstm_p;
  if (x.size() != m.dims.input || h_prev.size() != m.dims.hidden)
    throw std::invalid_argument("lstm_step: dimension mismatch");
  auto sig = [](VectorXd v) -> VectorXd {
    return 1.0 / (1.0 + (-v.array()).exp());
  };
  VectorXd gi = sig(m.w[Wxi] * x + m.w[Whi] * h_prev + m.w[bi].col(0));
  VectorXd gf = sig(m.w[Wxf] * x + m.w[Whf] * h_prev + m.w[bf].col(0));
  VectorXd go = sig(m.w[Wxo] * x + m.w[Who] * h_prev + m.w[bo].col(0));
  VectorXd gg =
      (m.w[Wxg] * x + m.w[Whg] * h_prev + m.w[bg].col(0)).array().tanh();
  StepResult r;
  r.c = gf.cwiseProduct(cell_prev) + gi.cwiseProduct(gg);
  r.h = go.cwiseProduct(r.c.array().tanh().matrix());
  MatrixXd z = m.w[Why] * r.h + m.w[by].col(0);
  apply_output_inplace(m.out_kind, z);
  r.y = z.col(0);
  return r;
}

// Uniform step over architectures; noise ignored for LSTM.
inline StepResult model_step(const Model& m, const VectorXd& x,
                             const VectorXd& h_prev, const VectorXd& cell_prev,
                             const VectorXd& noise) {
  switch (m.arch) {
    case Arch::elman: return elman_step(m, x, h_prev, noise);
    case Arch::dual: return dual_step(m, x, h_prev, noise);
    case Arch::lstm: return lstm_step(m, x, h_prev, cell_prev);
  }
  throw std::logic_error("model_step: bad arch");
}

// Predicted class of one output column: thresholded sigmoid for binary,
// argmax otherwise (ties to the lowest index).
inline int predicted_class(OutputKind kind, const Eigen::Ref<const VectorXd>& y) {
  if (kind == OutputKind::binary_sigmoid) return y[0] > 0.5 ? 1 : 0;
  int best = 0;
  for (int i = 1; i < y.size(); ++i)
    if (y[i] > y[best]) best = i;
  return best;
}

// Output dimension for a target alphabet: 1 (sigmoid) for two classes,
// class count (softmax) otherwise.
inline int output_dim_for(const Alphabet& target) {
  return target.size() == 2 ? 1 : target.size();
}

}  // namespace rnnlab
