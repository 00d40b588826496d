#pragma once

// Cross-entropy + L1 loss, truncated BPTT over lane/window slices, SGD,
// the linear noise schedule and finite-difference gradient verification.
//
// Hidden state carries across consecutive windows of a lane and is
// detached at window boundaries; it resets to zero at the start of every
// epoch. Per-window loss is the mean cross-entropy over timesteps and
// lanes plus the L1 term added once.

#include "rnnlab/model.hpp"
#include "rnnlab/stream.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

namespace rnnlab {

struct TrainConfig {
  double lr = 0.01;
  double l1 = 0.1;
  int batch_size = 10;
  int unfold_len = 25;
  int epochs = 1000;
  double noise_max = 1.0;
  int noise_ramp_end = 500;
  uint64_t seed = 1;
  int restarts = 10;
  int workers = 1;  // parallel restarts
};

// nu = noise_max * min(1, epoch / noise_ramp_end)
inline double noise_at_epoch(const TrainConfig& cfg, int epoch) {
  if (cfg.noise_ramp_end <= 0) return cfg.noise_max;
  double f = static_cast<double>(epoch) / cfg.noise_ramp_end;
  return cfg.noise_max * std::min(1.0, f);
}

constexpr double kProbFloor = 1e-12;

// -log y[target] for softmax outputs; binary cross-entropy against the
// single sigmoid unit otherwise. Probabilities floored at 1e-12.
inline double cross_entropy(const VectorXd& y, int target, OutputKind kind) {
  if (kind == OutputKind::binary_sigmoid) {
    double p = std::clamp(y[0], kProbFloor, 1.0 - kProbFloor);
    return target ? -std::log(p) : -std::log(1.0 - p);
  }
  return -std::log(std::max(y[target], kProbFloor));
}

inline double l1_penalty(const Model& m, double lambda) {
  if (lambda == 0.0) return 0.0;
  const auto& mask = regularized_mask(m.arch);
  double s = 0.0;
  for (size_t i = 0; i < m.w.size(); ++i)
    if (mask[i]) s += m.w[i].cwiseAbs().sum();
  return lambda * s;
}

struct Grads {
  std::vector<MatrixXd> g;

  static Grads zeros_like(const Model& m) {
    Grads gr;
    gr.g.reserve(m.w.size());
    for (const auto& w : m.w) gr.g.emplace_back(MatrixXd::Zero(w.rows(), w.cols()));
    return gr;
  }
  void set_zero() {
    for (auto& m : g) m.setZero();
  }
};

// w <- w - r * g
inline void sgd_step(Model& m, const Grads& gr, double lr) {
  for (size_t i = 0; i < m.w.size(); ++i) m.w[i].noalias() -= lr * gr.g[i];
}

// Per-lane recurrent state carried across windows.
struct CarryState {
  MatrixXd h;     // hidden x batch
  MatrixXd cell;  // LSTM only
  void reset(const Model& m, int batch) {
    h = MatrixXd::Zero(m.dims.hidden, batch);
    if (m.arch == Arch::lstm) cell = MatrixXd::Zero(m.dims.hidden, batch);
  }
};

// Forward/backward engine over one window for a fixed shape. Buffers are
// allocated once and reused across windows and epochs.
class BpttRunner {
 public:
  BpttRunner(const Model& shape, int unfold_len, int batch)
      : arch_(shape.arch),
        out_kind_(shape.out_kind),
        T_(unfold_len),
        B_(batch) {
    const int in = shape.dims.input, h = shape.dims.hidden,
              f = shape.dims.ff, out = shape.dims.output;
    auto alloc = [&](std::vector<MatrixXd>& v, int r, int c) {
      v.assign(T_ + 1, MatrixXd::Zero(r, c));
    };
    alloc(X_, in, B_);
    alloc(H_, h, B_);
    alloc(Y_, out, B_);
    if (arch_ != Arch::lstm) alloc(N_, h, B_);
    if (arch_ == Arch::dual) alloc(C_, f, B_);
    if (arch_ == Arch::lstm) {
      alloc(Gi_, h, B_);
      alloc(Gf_, h, B_);
      alloc(Go_, h, B_);
      alloc(Gg_, h, B_);
      alloc(Cell_, h, B_);
    }
  }

  int unfold_len() const { return T_; }
  int batch() const { return B_; }

  // Samples fresh noise for every step of the window (Elman/Dual).
  void sample_noise(double nu, Rng& rng) {
    if (arch_ == Arch::lstm) return;
    for (int t = 1; t <= T_; ++t) sample_noise_into(nu, N_[t], rng);
  }
  void zero_noise() {
    if (arch_ == Arch::lstm) return;
    for (int t = 1; t <= T_; ++t) N_[t].setZero();
  }
  std::vector<MatrixXd>& noise_buffers() { return N_; }

  // Runs one window. Returns the mean cross-entropy over the window
  // (without the L1 term). If grads is non-null, accumulates exact
  // gradients of (mean CE + l1 * sum|w_reg|) into it. If correct is
  // non-null, counts positions whose predicted class equals the target.
  double run(const Model& m, const LabeledStream& s, const BatchPlan& p,
             int window, CarryState& carry, double l1, Grads* grads,
             long* correct = nullptr) {
    forward(m, s, p, window, carry);
    double ce = loss_and_count(s, p, window, correct);
    if (grads) backward(m, s, p, window, l1, *grads);
    // detach: outgoing carry is the final state
    carry.h = H_[T_];
    if (arch_ == Arch::lstm) carry.cell = Cell_[T_];
    return ce;
  }

 private:
  void load_inputs(const Model& m, const LabeledStream& s, const BatchPlan& p,
                   int window) {
    for (int t = 1; t <= T_; ++t) {
      X_[t].setZero();
      for (int b = 0; b < B_; ++b) {
        int id = s.input[p.pos(b, window, t - 1)];
        s.input_alphabet.encode_into(id, X_[t].col(b));
      }
    }
  }

  void forward(const Model& m, const LabeledStream& s, const BatchPlan& p,
               int window, const CarryState& carry) {
    load_inputs(m, s, p, window);
    H_[0] = carry.h;
    if (arch_ == Arch::lstm) Cell_[0] = carry.cell;
    for (int t = 1; t <= T_; ++t) {
      switch (arch_) {
        case Arch::elman: {
          using namespace elman_p;
          H_[t].noalias() = m.w[Wxh] * X_[t];
          H_[t].noalias() += m.w[Whh] * H_[t - 1];
          H_[t] += N_[t].cwiseProduct(H_[t - 1]);
          H_[t].colwise() += m.w[bh].col(0);
          H_[t] = H_[t].array().tanh();
          Y_[t].noalias() = m.w[Why] * H_[t];
          Y_[t].colwise() += m.w[by].col(0);
          break;
        }
        case Arch::dual: {
          using namespace dual_p;
          H_[t].noalias() = m.w[Wxh] * X_[t];
          H_[t].noalias() += m.w[Whh] * H_[t - 1];
          H_[t] += N_[t].cwiseProduct(H_[t - 1]);
          H_[t].colwise() += m.w[bh].col(0);
          H_[t] = H_[t].array().tanh();
          C_[t].noalias() = m.w[Wxc] * X_[t];
          C_[t].noalias() += m.w[Whc] * H_[t];
          C_[t].colwise() += m.w[bc].col(0);
          C_[t] = C_[t].array().tanh();
          Y_[t].noalias() = m.w[Wcy] * C_[t];
          Y_[t].colwise() += m.w[by].col(0);
          break;
        }
        case Arch::lstm: {
          using namespace lstm_p;
          auto gate = [&](MatrixXd& g, int Wx, int Wh, int b, bool sig) {
            g.noalias() = m.w[Wx] * X_[t];
            g.noalias() += m.w[Wh] * H_[t - 1];
            g.colwise() += m.w[b].col(0);
            if (sig)
              g = 1.0 / (1.0 + (-g.array()).exp());
            else
              g = g.array().tanh();
          };
          gate(Gi_[t], Wxi, Whi, bi, true);
          gate(Gf_[t], Wxf, Whf, bf, true);
          gate(Go_[t], Wxo, Who, bo, true);
          gate(Gg_[t], Wxg, Whg, bg, false);
          Cell_[t] = Gf_[t].cwiseProduct(Cell_[t - 1]) +
                     Gi_[t].cwiseProduct(Gg_[t]);
          H_[t] = Go_[t].cwiseProduct(Cell_[t].array().tanh().matrix());
          Y_[t].noalias() = m.w[Why] * H_[t];
          Y_[t].colwise() += m.w[by].col(0);
          break;
        }
      }
      apply_output_inplace(out_kind_, Y_[t]);
    }
  }

  double loss_and_count(const LabeledStream& s, const BatchPlan& p, int window,
                        long* correct) {
    double ce = 0.0;
    for (int t = 1; t <= T_; ++t) {
      for (int b = 0; b < B_; ++b) {
        int target = s.target[p.pos(b, window, t - 1)];
        ce += cross_entropy(Y_[t].col(b), target, out_kind_);
        if (correct)
          *correct += predicted_class(out_kind_, Y_[t].col(b)) == target;
      }
    }
    return ce / (T_ * B_);
  }

  // dZ for the output layer at step t: (prediction - target) / (T*B)
  void output_delta(const LabeledStream& s, const BatchPlan& p, int window,
                    int t, MatrixXd& dz) {
    const double scale = 1.0 / (T_ * B_);
    dz = Y_[t];
    for (int b = 0; b < B_; ++b) {
      int target = s.target[p.pos(b, window, t - 1)];
      if (out_kind_ == OutputKind::binary_sigmoid)
        dz(0, b) -= target;
      else
        dz(target, b) -= 1.0;
    }
    dz *= scale;
  }

  void backward(const Model& m, const LabeledStream& s, const BatchPlan& p,
                int window, double l1, Grads& gr) {
    const int h = m.dims.hidden;
    MatrixXd dH = MatrixXd::Zero(h, B_);
    MatrixXd dz, dA, dC;
    MatrixXd dCell;
    if (arch_ == Arch::lstm) dCell = MatrixXd::Zero(h, B_);
    for (int t = T_; t >= 1; --t) {
      output_delta(s, p, window, t, dz);
      switch (arch_) {
        case Arch::elman: {
          using namespace elman_p;
          gr.g[Why].noalias() += dz * H_[t].transpose();
          gr.g[by].col(0) += dz.rowwise().sum();
          dH.noalias() += m.w[Why].transpose() * dz;
          dA = dH.cwiseProduct((1.0 - H_[t].array().square()).matrix());
          gr.g[Wxh].noalias() += dA * X_[t].transpose();
          gr.g[Whh].noalias() += dA * H_[t - 1].transpose();
          gr.g[bh].col(0) += dA.rowwise().sum();
          dH.noalias() = m.w[Whh].transpose() * dA;
          dH += N_[t].cwiseProduct(dA);
          break;
        }
        case Arch::dual: {
          using namespace dual_p;
          gr.g[Wcy].noalias() += dz * C_[t].transpose();
          gr.g[by].col(0) += dz.rowwise().sum();
          dC.noalias() = m.w[Wcy].transpose() * dz;
          dC = dC.cwiseProduct((1.0 - C_[t].array().square()).matrix());
          gr.g[Wxc].noalias() += dC * X_[t].transpose();
          gr.g[Whc].noalias() += dC * H_[t].transpose();
          gr.g[bc].col(0) += dC.rowwise().sum();
          dH.noalias() += m.w[Whc].transpose() * dC;
          dA = dH.cwiseProduct((1.0 - H_[t].array().square()).matrix());
          gr.g[Wxh].noalias() += dA * X_[t].transpose();
          gr.g[Whh].noalias() += dA * H_[t - 1].transpose();
          gr.g[bh].col(0) += dA.rowwise().sum();
          dH.noalias() = m.w[Whh].transpose() * dA;
          dH += N_[t].cwiseProduct(dA);
          break;
        }
        case Arch::lstm: {
          using namespace lstm_p;
          gr.g[Why].noalias() += dz * H_[t].transpose();
          gr.g[by].col(0) += dz.rowwise().sum();
          dH.noalias() += m.w[Why].transpose() * dz;
          MatrixXd tc = Cell_[t].array().tanh();
          MatrixXd dGo = dH.cwiseProduct(tc);
          dCell += dH.cwiseProduct(Go_[t])
                       .cwiseProduct((1.0 - tc.array().square()).matrix());
          MatrixXd dGi = dCell.cwiseProduct(Gg_[t]);
          MatrixXd dGf = dCell.cwiseProduct(Cell_[t - 1]);
          MatrixXd dGg = dCell.cwiseProduct(Gi_[t]);
          // pre-activation deltas
          dGi = dGi.cwiseProduct(Gi_[t])
                    .cwiseProduct((1.0 - Gi_[t].array()).matrix());
          dGf = dGf.cwiseProduct(Gf_[t])
                    .cwiseProduct((1.0 - Gf_[t].array()).matrix());
          dGo = dGo.cwiseProduct(Go_[t])
                    .cwiseProduct((1.0 - Go_[t].array()).matrix());
          dGg = dGg.cwiseProduct((1.0 - Gg_[t].array().square()).matrix());
          auto acc = [&](const MatrixXd& d, int Wx, int Wh, int b) {
            gr.g[Wx].noalias() += d * X_[t].transpose();
            gr.g[Wh].noalias() += d * H_[t - 1].transpose();
            gr.g[b].col(0) += d.rowwise().sum();
          };
          acc(dGi, Wxi, Whi, bi);
          acc(dGf, Wxf, Whf, bf);
          acc(dGo, Wxo, Who, bo);
          acc(dGg, Wxg, Whg, bg);
          dH.noalias() = m.w[Whi].transpose() * dGi;
          dH.noalias() += m.w[Whf].transpose() * dGf;
          dH.noalias() += m.w[Who].transpose() * dGo;
          dH.noalias() += m.w[Whg].transpose() * dGg;
          dCell = dCell.cwiseProduct(Gf_[t]);
          break;
        }
      }
    }
    if (l1 != 0.0) {
      const auto& mask = regularized_mask(m.arch);
      for (size_t i = 0; i < m.w.size(); ++i)
        if (mask[i])
          gr.g[i] += l1 * m.w[i].array().sign().matrix();
    }
  }

  Arch arch_;
  OutputKind out_kind_;
  int T_, B_;
  std::vector<MatrixXd> X_, H_, C_, Y_, N_;
  std::vector<MatrixXd> Gi_, Gf_, Go_, Gg_, Cell_;
};

struct EvalResult {
  double ce = 0.0;
  double acc = 0.0;
};

// Batched forward evaluation, noise off. Lanes reset to zero state; the
// tail not covered by the lane grid is dropped.
inline EvalResult evaluate_batched(const Model& m, const LabeledStream& s,
                                   int batch, int unfold_len) {
  BatchPlan p = plan_batches(s, batch, unfold_len);
  BpttRunner runner(m, unfold_len, batch);
  runner.zero_noise();
  CarryState carry;
  carry.reset(m, batch);
  double ce_sum = 0.0;
  long correct = 0;
  for (int w = 0; w < p.n_windows; ++w)
    ce_sum += runner.run(m, s, p, w, carry, 0.0, nullptr, &correct);
  EvalResult r;
  r.ce = ce_sum / p.n_windows;
  r.acc = static_cast<double>(correct) / p.covered();
  return r;
}

struct LossReport {
  std::vector<double> train_ce, l1, test_ce, test_acc;

  void write_csv(std::ostream& os) const {
    os << "epoch,train_ce,l1,test_ce,test_acc\n";
    for (size_t e = 0; e < train_ce.size(); ++e)
      os << e << ',' << train_ce[e] << ',' << l1[e] << ',' << test_ce[e]
         << ',' << test_acc[e] << '\n';
  }
};

struct RestartOutcome {
  Model model;
  LossReport report;
  bool aborted = false;
  std::string diagnostic;
  double final_test_ce = std::numeric_limits<double>::infinity();
};

// One full training run from a fresh initialization.
inline RestartOutcome train_one(Arch arch, const LabeledStream& train_s,
                                const LabeledStream& test_s, int hidden,
                                int ff, const TrainConfig& cfg,
                                uint64_t restart_seed) {
  Dims dims;
  dims.input = train_s.input_alphabet.encoding_dim();
  dims.hidden = hidden;
  dims.ff = ff;
  dims.output = output_dim_for(train_s.target_alphabet);

  RestartOutcome out;
  out.model = init_params(arch, dims, restart_seed);
  Rng rng = make_rng(restart_seed, 0xb1a);
  BatchPlan plan = plan_batches(train_s, cfg.batch_size, cfg.unfold_len);
  BpttRunner runner(out.model, cfg.unfold_len, cfg.batch_size);
  Grads grads = Grads::zeros_like(out.model);
  CarryState carry;
  // window loss = (sum of CE over lanes and timesteps + l1 * sum|w|)
  // normalized by window size, so the penalty coefficient next to the
  // mean CE is l1 / (batch * unfold)
  const double l1_eff = cfg.l1 / (cfg.batch_size * cfg.unfold_len);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double nu = noise_at_epoch(cfg, epoch);
    carry.reset(out.model, cfg.batch_size);
    double ce_sum = 0.0;
    for (int w = 0; w < plan.n_windows; ++w) {
      runner.sample_noise(nu, rng);
      grads.set_zero();
      double ce = runner.run(out.model, train_s, plan, w, carry, l1_eff, &grads);
      if (!std::isfinite(ce)) {
        std::ostringstream d;
        d << "non-finite loss at epoch " << epoch << " window " << w;
        out.aborted = true;
        out.diagnostic = d.str();
        return out;
      }
      sgd_step(out.model, grads, cfg.lr);
      ce_sum += ce;
    }
    out.report.train_ce.push_back(ce_sum / plan.n_windows);
    out.report.l1.push_back(l1_penalty(out.model, l1_eff));
    EvalResult ev =
        evaluate_batched(out.model, test_s, cfg.batch_size, cfg.unfold_len);
    out.report.test_ce.push_back(ev.ce);
    out.report.test_acc.push_back(ev.acc);
  }
  if (!out.report.test_ce.empty()) out.final_test_ce = out.report.test_ce.back();
  return out;
}

struct TrainResult {
  Model model;
  LossReport report;
  int best_restart = -1;
  std::vector<double> restart_test_ce;
};

// Runs cfg.restarts independent initializations and returns the one with
// the lowest final test cross-entropy. Restarts may run on a worker
// pool; selection is by restart index order and thus deterministic.
inline TrainResult train(Arch arch, const LabeledStream& train_s,
                         const LabeledStream& test_s, int hidden, int ff,
                         const TrainConfig& cfg) {
  if (train_s.size() == 0 || test_s.size() == 0)
    throw std::invalid_argument("train: empty stream");
  if (cfg.epochs == 0) {
    Dims dims;
    dims.input = train_s.input_alphabet.encoding_dim();
    dims.hidden = hidden;
    dims.ff = ff;
    dims.output = output_dim_for(train_s.target_alphabet);
    TrainResult r;
    r.model = init_params(arch, dims, make_rng(cfg.seed, 0)());
    r.best_restart = 0;
    return r;
  }

  std::vector<RestartOutcome> outcomes(cfg.restarts);
  auto run_range = [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      uint64_t rs = make_rng(cfg.seed, static_cast<uint64_t>(i))();
      outcomes[i] = train_one(arch, train_s, test_s, hidden, ff, cfg, rs);
    }
  };
  int workers = std::max(1, std::min(cfg.workers, cfg.restarts));
  if (workers == 1) {
    run_range(0, cfg.restarts);
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < workers; ++k)
      pool.emplace_back([&, k] {
        for (int i = k; i < cfg.restarts; i += workers) {
          uint64_t rs = make_rng(cfg.seed, static_cast<uint64_t>(i))();
          outcomes[i] = train_one(arch, train_s, test_s, hidden, ff, cfg, rs);
        }
      });
    for (auto& t : pool) t.join();
  }

  TrainResult r;
  int n_aborted = 0;
  for (int i = 0; i < cfg.restarts; ++i) {
    r.restart_test_ce.push_back(outcomes[i].final_test_ce);
    if (outcomes[i].aborted) {
      ++n_aborted;
      continue;
    }
    if (r.best_restart < 0 ||
        outcomes[i].final_test_ce < outcomes[r.best_restart].final_test_ce)
      r.best_restart = i;
  }
  if (r.best_restart < 0)
    throw std::runtime_error("train: all restarts aborted (" +
                             outcomes[0].diagnostic + ")");
  r.model = std::move(outcomes[r.best_restart].model);
  r.report = std::move(outcomes[r.best_restart].report);
  (void)n_aborted;
  return r;
}

// --- finite-difference gradient verification ---

// Maximum relative error between analytic BPTT gradients and central
// finite differences with frozen noise, over every parameter entry.
inline double gradcheck(Arch arch, Dims dims, uint64_t seed,
                        int window_len = 8, int batch = 2, double nu = 0.5,
                        double lambda = 0.05, double eps = 1e-5) {
  Rng rng = make_rng(seed);
  Model m = init_params(arch, dims, rng());
  // random stream covering exactly one window per lane
  int n_out = m.out_kind == OutputKind::binary_sigmoid ? 2 : dims.output;
  LabeledStream s;
  {
    std::vector<std::string> in_toks, out_toks;
    // synthetic alphabets sized to the model dims
    for (int i = 0; i < dims.input; ++i) in_toks.push_back("i" + std::to_string(i));
    for (int i = 0; i < n_out; ++i) out_toks.push_back("o" + std::to_string(i));
    s.input_alphabet = Alphabet::plain(in_toks);
    s.target_alphabet = Alphabet::plain(out_toks);
    std::uniform_int_distribution<int> di(0, dims.input - 1), dt(0, n_out - 1);
    for (int i = 0; i < window_len * batch; ++i) {
      s.input.push_back(di(rng));
      s.target.push_back(dt(rng));
    }
  }
  BatchPlan plan = plan_batches(s, batch, window_len);
  BpttRunner runner(m, window_len, batch);
  runner.sample_noise(nu, rng);  // frozen for the whole check
  auto loss_at = [&](const Model& mm) {
    CarryState carry;
    carry.reset(mm, batch);
    double ce = runner.run(mm, s, plan, 0, carry, 0.0, nullptr);
    return ce + l1_penalty(mm, lambda);
  };

  Grads grads = Grads::zeros_like(m);
  CarryState carry;
  carry.reset(m, batch);
  runner.run(m, s, plan, 0, carry, lambda, &grads);

  double max_rel = 0.0;
  Model probe = m;
  for (size_t k = 0; k < m.w.size(); ++k) {
    for (int i = 0; i < m.w[k].size(); ++i) {
      double orig = probe.w[k].data()[i];
      probe.w[k].data()[i] = orig + eps;
      double lp = loss_at(probe);
      probe.w[k].data()[i] = orig - eps;
      double lm = loss_at(probe);
      probe.w[k].data()[i] = orig;
      double num = (lp - lm) / (2 * eps);
      double ana = grads.g[k].data()[i];
      double rel = std::abs(num - ana) /
                   std::max({1.0, std::abs(num), std::abs(ana)});
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

}  // namespace rnnlab
