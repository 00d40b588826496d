// Command-line surface: data generation, training, evaluation, machine
// extraction, string generation, activation dumps, gradient checks and
// the table-reproduction harness.

#include "rnnlab/addition.hpp"
#include "rnnlab/automata.hpp"
#include "rnnlab/eval.hpp"
#include "rnnlab/experiment.hpp"
#include "rnnlab/expressions.hpp"
#include "rnnlab/serialize.hpp"
#include "rnnlab/tomita.hpp"
#include "rnnlab/train.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#ifndef RNNLAB_VERSION
#define RNNLAB_VERSION "0.1.0"
#endif

namespace fs = std::filesystem;
using namespace rnnlab;

namespace {

// --- configuration file: JSON fields act as defaults, flags override ---

struct ConfigFile {
  json j = json::object();
  std::set<std::string> known;

  template <class T>
  void apply(const std::string& key, T& field) {
    known.insert(key);
    if (j.contains(key)) field = j.at(key).get<T>();
  }

  void check_unknown() const {
    for (const auto& [k, v] : j.items())
      if (!known.count(k))
        throw std::runtime_error("config: unknown key '" + k + "'");
  }
};

ConfigFile load_config(int argc, char** argv) {
  ConfigFile c;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") {
      std::ifstream f(argv[i + 1]);
      if (!f)
        throw std::runtime_error(std::string("cannot read config ") +
                                 argv[i + 1]);
      try {
        f >> c.j;
      } catch (const json::exception& e) {
        throw std::runtime_error("config parse error: " +
                                 std::string(e.what()));
      }
    }
  return c;
}

fs::path output_root() {
  if (const char* env = std::getenv("RNNLAB_OUT")) return fs::path(env);
  return fs::path("runs");
}

fs::path make_run_dir(const std::string& name) {
  fs::path dir = output_root() / name;
  fs::create_directories(dir);
  return dir;
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const json& options) {
  json m = {{"tool", "rnnlab"},
            {"version", RNNLAB_VERSION},
            {"command", command},
            {"options", options}};
  write_text_file((dir / "manifest.json").string(), m.dump(1) + "\n");
}

// --- task plumbing ---

struct TaskOpts {
  std::string task;  // tomita | addition | expressions
  int tomita_id = 1;
  int base = 2;
  int n_strings = 2000;  // tomita strings per corpus
  int max_len = 15;      // tomita max string length
  int length = 200000;   // addition / expressions corpus length
  double sep_prob = 0.1;
  int max_depth = 5;
};

void add_task_options(CLI::App* cmd, TaskOpts& t, ConfigFile& cfg) {
  cfg.apply("task", t.task);
  cfg.apply("tomita_id", t.tomita_id);
  cfg.apply("base", t.base);
  cfg.apply("n_strings", t.n_strings);
  cfg.apply("max_len", t.max_len);
  cfg.apply("length", t.length);
  cfg.apply("sep_prob", t.sep_prob);
  cfg.apply("max_depth", t.max_depth);
  cmd->add_option("--task", t.task, "tomita, addition or expressions")
      ->required(t.task.empty());
  cmd->add_option("--tomita-id", t.tomita_id, "grammar 1..7")
      ->capture_default_str();
  cmd->add_option("--base", t.base, "addition base")->capture_default_str();
  cmd->add_option("--n-strings", t.n_strings, "tomita strings per corpus")
      ->capture_default_str();
  cmd->add_option("--max-len", t.max_len, "tomita max string length")
      ->capture_default_str();
  cmd->add_option("--length", t.length, "corpus length in symbols")
      ->capture_default_str();
  cmd->add_option("--sep-prob", t.sep_prob, "addition '$' probability")
      ->capture_default_str();
  cmd->add_option("--max-depth", t.max_depth, "expression depth bound")
      ->capture_default_str();
}

std::string gen_corpus_text(const TaskOpts& t, uint64_t seed) {
  if (t.task == "tomita") {
    LabeledStream s = gen_tomita_stream(t.tomita_id, t.n_strings, t.max_len,
                                        seed);
    std::string text;
    for (int id : s.input) text += s.input_alphabet.token(id);
    return text;
  }
  if (t.task == "addition") {
    AdditionConfig c;
    c.base = t.base;
    c.length = t.length;
    c.sep_prob = t.sep_prob;
    AdditionData d = gen_addition_strings(c, seed);
    return d.in1 + "\n" + d.in2 + "\n" + d.out + "\n";
  }
  if (t.task == "expressions") {
    ExprConfig c;
    c.length = t.length;
    c.max_depth = t.max_depth;
    return gen_expr_corpus(c, seed);
  }
  throw std::runtime_error("unknown task: " + t.task);
}

LabeledStream load_stream(const TaskOpts& t, const std::string& path) {
  std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) throw std::runtime_error("empty data file: " + path);
  if (t.task == "tomita") return tomita_label_text(t.tomita_id, lines[0]);
  if (t.task == "addition") {
    if (lines.size() < 2)
      throw std::runtime_error("addition data needs two input lines: " + path);
    AdditionData d;
    d.in1 = lines[0];
    d.in2 = lines[1];
    d.out = addition_oracle(d.in1, d.in2, t.base);
    if (lines.size() >= 3 && !lines[2].empty() && lines[2] != d.out)
      throw std::runtime_error("addition data: output line disagrees with "
                               "the oracle: " + path);
    return addition_stream(d, t.base);
  }
  if (t.task == "expressions") return expr_stream(lines[0]);
  throw std::runtime_error("unknown task: " + t.task);
}

void check_alphabets(const SavedModel& sm, const LabeledStream& s) {
  if (!(sm.input_alphabet == s.input_alphabet) ||
      !(sm.target_alphabet == s.target_alphabet))
    throw std::runtime_error(
        "model and data alphabets disagree (wrong task or base?)");
}

// Shared extraction pipeline: trace -> binarize -> automaton -> prune ->
// determinize -> minimize.
struct Extraction {
  StateTrace trace;
  std::vector<int> units;
  BinaryStateSeq bits;
  Automaton automaton;
  Automaton pruned;
  Dfa dfa;
  Dfa minimal;
};

Extraction extract_machine(const Model& m, const LabeledStream& s,
                           MachineKind kind, double min_prob) {
  Extraction e;
  e.trace = record_trace(m, s);
  e.units = select_active_units(e.trace);
  e.bits = binarize(e.trace, e.units);
  e.automaton = build_automaton(e.bits, e.trace, kind);
  e.pruned = prune_transitions(e.automaton, min_prob);
  e.dfa = determinize_majority(e.pruned);
  e.minimal = minimize(e.dfa);
  return e;
}

// --- subcommands ---

int cmd_gen_data(const TaskOpts& t, uint64_t seed, const std::string& out) {
  std::string text = gen_corpus_text(t, seed);
  if (text.back() != '\n') text += '\n';
  write_text_file(out, text);
  std::cout << "wrote " << out << " (" << text.size() - 1 << " characters)\n";
  return 0;
}

struct TrainOpts {
  TaskOpts task;
  std::string train_path, test_path;
  std::string arch = "elman";
  int hidden = 10;
  int ff = 10;
  TrainConfig cfg;
  std::string run_dir;
};

int cmd_train(const TrainOpts& o, const json& resolved) {
  LabeledStream tr = load_stream(o.task, o.train_path);
  LabeledStream te = load_stream(o.task, o.test_path);
  Arch arch = arch_from_name(o.arch);
  int ff = arch == Arch::dual ? o.ff : 0;

  TrainResult r = train(arch, tr, te, o.hidden, ff, o.cfg);

  fs::path dir = o.run_dir.empty()
                     ? make_run_dir("train-" + o.task.task + "-" + o.arch +
                                    "-seed" + std::to_string(o.cfg.seed))
                     : fs::path(o.run_dir);
  fs::create_directories(dir);
  write_manifest(dir, "train", resolved);

  SavedModel sm;
  sm.model = r.model;
  sm.input_alphabet = tr.input_alphabet;
  sm.target_alphabet = tr.target_alphabet;
  sm.seed = o.cfg.seed;
  sm.config_echo = train_config_to_json(o.cfg);
  save_model((dir / "model.json").string(), sm);

  std::ofstream loss(dir / "loss.csv");
  r.report.write_csv(loss);

  double acc = classification_accuracy(r.model, te);
  std::cout << "best restart " << r.best_restart << " of "
            << r.restart_test_ce.size() << "\n"
            << "final test ce " << r.report.test_ce.back() << "\n"
            << "test accuracy " << acc << "\n"
            << "model: " << (dir / "model.json").string() << "\n";
  return 0;
}

int cmd_eval(const TaskOpts& t, const std::string& model_path,
             const std::string& data_path) {
  SavedModel sm = load_model(model_path);
  LabeledStream s = load_stream(t, data_path);
  check_alphabets(sm, s);
  double acc = classification_accuracy(sm.model, s);
  EvalResult ev = evaluate_batched(sm.model, s, 10, 25);
  std::cout << "accuracy " << acc << "\n"
            << "cross entropy " << ev.ce << "\n";
  return 0;
}

struct ExtractOpts {
  TaskOpts task;
  std::string model_path, data_path;
  std::string kind;  // moore | mealy | empty = by architecture
  double min_prob = 0.001;
  std::string run_dir;
};

int cmd_extract(const ExtractOpts& o, const json& resolved) {
  SavedModel sm = load_model(o.model_path);
  LabeledStream s = load_stream(o.task, o.data_path);
  check_alphabets(sm, s);

  MachineKind kind;
  if (o.kind == "moore")
    kind = MachineKind::moore;
  else if (o.kind == "mealy")
    kind = MachineKind::mealy;
  else if (o.kind.empty())
    kind = sm.model.arch == Arch::elman ? MachineKind::moore
                                        : MachineKind::mealy;
  else
    throw std::runtime_error("unknown machine kind: " + o.kind);

  Extraction e = extract_machine(sm.model, s, kind, o.min_prob);

  fs::path dir = o.run_dir.empty() ? make_run_dir("extract-" + o.task.task)
                                   : fs::path(o.run_dir);
  fs::create_directories(dir);
  write_manifest(dir, "extract", resolved);
  write_text_file((dir / "automaton.json").string(),
                  machine_to_json(e.pruned).dump(1) + "\n");
  write_text_file((dir / "automaton.dot").string(), export_dot(e.pruned));
  write_text_file((dir / "machine.json").string(),
                  machine_to_json(e.minimal).dump(1) + "\n");
  write_text_file((dir / "machine.dot").string(), export_dot(e.minimal));

  FidelityReport f = dfa_fidelity(e.minimal, e.trace);
  {
    std::ofstream fc(dir / "fidelity.csv");
    fc << "fidelity,n_steps,n_mismatch,n_unseen,conflict_ratio\n"
       << f.fidelity << ',' << f.n_steps << ',' << f.n_mismatch << ','
       << f.n_unseen << ',' << e.dfa.conflict_ratio << "\n";
  }

  std::cout << "active units " << e.units.size() << " of "
            << sm.model.dims.hidden << "\n"
            << "near-zero activations " << e.bits.n_near_zero << "\n"
            << "observed states " << e.automaton.n_states() << ", pruned "
            << e.pruned.n_states() << ", minimized " << e.minimal.n_states()
            << "\n"
            << "conflict ratio " << e.dfa.conflict_ratio << "\n"
            << "fidelity " << f.fidelity << "\n"
            << "machine: " << (dir / "machine.dot").string() << "\n";
  return 0;
}

struct GenerateOpts {
  std::string model_path;
  int n = 50000;
  uint64_t seed = 1;
  int max_depth = 5;
  std::string run_dir;
};

int cmd_generate(const GenerateOpts& o, const json& resolved) {
  SavedModel sm = load_model(o.model_path);
  std::string g = generate_string(sm.model, sm.input_alphabet, o.n, o.seed);

  fs::path dir = o.run_dir.empty() ? make_run_dir("generate") : fs::path(o.run_dir);
  fs::create_directories(dir);
  write_manifest(dir, "generate", resolved);
  write_text_file((dir / "generated.txt").string(), g + "\n");

  GenerationReport rep = generation_accuracy(g, o.max_depth);
  {
    std::ofstream rc(dir / "report.csv");
    rc << "index,valid,reason\n";
    for (size_t i = 0; i < rep.reasons.size(); ++i)
      rc << i << ',' << (rep.reasons[i] == ExprReason::ok) << ','
         << reason_name(rep.reasons[i]) << "\n";
  }
  std::cout << "generated " << o.n << " symbols, " << rep.n_total
            << " complete substrings\n"
            << "generation accuracy " << rep.accuracy << "\n"
            << "output: " << (dir / "generated.txt").string() << "\n";
  return 0;
}

struct ActivationsOpts {
  TaskOpts task;
  std::string model_path, data_path, out;
};

int cmd_activations(const ActivationsOpts& o) {
  SavedModel sm = load_model(o.model_path);
  LabeledStream s = load_stream(o.task, o.data_path);
  check_alphabets(sm, s);
  StateTrace tr = record_trace(sm.model, s);

  std::vector<int> carry;
  if (o.task.task == "addition") {
    std::vector<std::string> lines = read_lines(o.data_path);
    carry = carry_sequence(lines[0], lines[1], o.task.base);
  }

  std::ofstream f(o.out);
  if (!f) throw std::runtime_error("cannot write " + o.out);
  f << "t,input,carry";
  for (int u = 0; u < tr.h.rows(); ++u) f << ",h" << u;
  f << "\n";
  for (int t = 0; t < tr.length(); ++t) {
    f << t << ',' << tr.input_alphabet.token(tr.input[t]) << ','
      << (carry.empty() ? std::string() : std::to_string(carry[t]));
    for (int u = 0; u < tr.h.rows(); ++u) f << ',' << tr.h(u, t);
    f << "\n";
  }
  std::cout << "wrote " << o.out << " (" << tr.length() << " rows, "
            << tr.h.rows() << " units)\n";
  return 0;
}

int cmd_gradcheck(const std::string& arch, int hidden, int ff,
                  uint64_t seed) {
  Arch a = arch_from_name(arch);
  Dims dims{3, hidden, a == Arch::dual ? ff : 0, 3};
  double err = gradcheck(a, dims, seed);
  std::cout << "gradcheck " << arch << " hidden " << hidden
            << " max relative error " << err << "\n";
  if (err >= 1e-4) {
    std::cerr << "FAIL: error above 1e-4\n";
    return 1;
  }
  return 0;
}

struct ReproduceOpts {
  std::string table = "dual";
  double scale = 0.3;
  uint64_t seed = 1;
  int workers = 1;
  std::string run_dir;
};

int cmd_reproduce(const ReproduceOpts& o, const json& resolved) {
  if (o.scale < 1.0)
    std::cout << "note: scaled run (x" << o.scale
              << "); full protocol is 10 repetitions x 10 restarts\n";
  ExperimentReport rep = run_expression_table(o.table, o.scale, o.seed,
                                              o.workers, &std::cout);
  fs::path dir = o.run_dir.empty() ? make_run_dir("reproduce-" + o.table)
                                   : fs::path(o.run_dir);
  fs::create_directories(dir);
  write_manifest(dir, "reproduce", resolved);
  {
    std::ofstream csv(dir / "table.csv");
    rep.write_csv(csv);
  }
  {
    std::ofstream txt(dir / "table.txt");
    rep.print(txt);
  }
  rep.print(std::cout);
  std::cout << "table: " << (dir / "table.csv").string() << "\n";
  return 0;
}

void add_train_config_options(CLI::App* cmd, TrainConfig& c, ConfigFile& cfg) {
  cfg.apply("lr", c.lr);
  cfg.apply("l1", c.l1);
  cfg.apply("batch_size", c.batch_size);
  cfg.apply("unfold_len", c.unfold_len);
  cfg.apply("epochs", c.epochs);
  cfg.apply("noise_max", c.noise_max);
  cfg.apply("noise_ramp_end", c.noise_ramp_end);
  cfg.apply("seed", c.seed);
  cfg.apply("restarts", c.restarts);
  cfg.apply("workers", c.workers);
  cmd->add_option("--lr", c.lr, "learning rate")->capture_default_str();
  cmd->add_option("--l1", c.l1, "L1 strength")->capture_default_str();
  cmd->add_option("--batch", c.batch_size, "batch size")
      ->capture_default_str();
  cmd->add_option("--unfold", c.unfold_len, "BPTT unfold length")
      ->capture_default_str();
  cmd->add_option("--epochs", c.epochs, "training epochs")
      ->capture_default_str();
  cmd->add_option("--noise-max", c.noise_max, "noise ceiling")
      ->capture_default_str();
  cmd->add_option("--noise-ramp-end", c.noise_ramp_end,
                  "epoch at which noise reaches the ceiling")
      ->capture_default_str();
  cmd->add_option("--seed", c.seed, "master seed")->capture_default_str();
  cmd->add_option("--restarts", c.restarts, "independent restarts")
      ->capture_default_str();
  cmd->add_option("--workers", c.workers, "restart worker threads")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  try {
    ConfigFile cfg = load_config(argc, argv);

    CLI::App app{"recurrent-network training and automaton extraction"};
    app.require_subcommand(1);
    std::string config_path;

    // gen-data
    TaskOpts gd_task;
    uint64_t gd_seed = 1;
    std::string gd_out = "data.txt";
    auto* gd = app.add_subcommand("gen-data", "generate a task corpus");
    gd->add_option("--config", config_path, "JSON config file");
    add_task_options(gd, gd_task, cfg);
    cfg.apply("seed", gd_seed);
    cfg.apply("out", gd_out);
    gd->add_option("--seed", gd_seed, "generator seed")->capture_default_str();
    gd->add_option("--out", gd_out, "output file")->capture_default_str();

    // train
    TrainOpts to;
    auto* tc = app.add_subcommand("train", "train a network");
    tc->add_option("--config", config_path, "JSON config file");
    add_task_options(tc, to.task, cfg);
    cfg.apply("train_data", to.train_path);
    cfg.apply("test_data", to.test_path);
    cfg.apply("arch", to.arch);
    cfg.apply("hidden", to.hidden);
    cfg.apply("ff", to.ff);
    cfg.apply("run_dir", to.run_dir);
    tc->add_option("--train-data", to.train_path, "training corpus")
        ->required(to.train_path.empty());
    tc->add_option("--test-data", to.test_path, "test corpus")
        ->required(to.test_path.empty());
    tc->add_option("--arch", to.arch, "elman, dual or lstm")
        ->capture_default_str();
    tc->add_option("--hidden", to.hidden, "recurrent units")
        ->capture_default_str();
    tc->add_option("--ff", to.ff, "feedforward units (dual)")
        ->capture_default_str();
    tc->add_option("--run-dir", to.run_dir, "output directory");
    add_train_config_options(tc, to.cfg, cfg);

    // eval
    TaskOpts ev_task;
    std::string ev_model, ev_data;
    auto* ec = app.add_subcommand("eval", "evaluate a trained model");
    ec->add_option("--config", config_path, "JSON config file");
    add_task_options(ec, ev_task, cfg);
    cfg.apply("model", ev_model);
    cfg.apply("data", ev_data);
    ec->add_option("--model", ev_model, "model file")
        ->required(ev_model.empty());
    ec->add_option("--data", ev_data, "data file")->required(ev_data.empty());

    // extract
    ExtractOpts xo;
    auto* xc = app.add_subcommand("extract", "extract a finite machine");
    xc->add_option("--config", config_path, "JSON config file");
    add_task_options(xc, xo.task, cfg);
    cfg.apply("model", xo.model_path);
    cfg.apply("data", xo.data_path);
    cfg.apply("kind", xo.kind);
    cfg.apply("min_prob", xo.min_prob);
    cfg.apply("run_dir", xo.run_dir);
    xc->add_option("--model", xo.model_path, "model file")
        ->required(xo.model_path.empty());
    xc->add_option("--data", xo.data_path, "data file")
        ->required(xo.data_path.empty());
    xc->add_option("--kind", xo.kind, "moore or mealy (default by arch)");
    xc->add_option("--min-prob", xo.min_prob, "pruning threshold")
        ->capture_default_str();
    xc->add_option("--run-dir", xo.run_dir, "output directory");

    // generate
    GenerateOpts go;
    auto* gc = app.add_subcommand("generate", "sample symbols from a model");
    gc->add_option("--config", config_path, "JSON config file");
    cfg.apply("model", go.model_path);
    cfg.apply("n", go.n);
    cfg.apply("seed", go.seed);
    cfg.apply("max_depth", go.max_depth);
    cfg.apply("run_dir", go.run_dir);
    gc->add_option("--model", go.model_path, "model file")
        ->required(go.model_path.empty());
    gc->add_option("--n", go.n, "symbols to generate")->capture_default_str();
    gc->add_option("--seed", go.seed, "sampling seed")->capture_default_str();
    gc->add_option("--max-depth", go.max_depth, "validity depth bound")
        ->capture_default_str();
    gc->add_option("--run-dir", go.run_dir, "output directory");

    // activations
    ActivationsOpts ao;
    ao.out = "activations.csv";
    auto* ac = app.add_subcommand("activations",
                                  "dump per-unit activations as CSV");
    ac->add_option("--config", config_path, "JSON config file");
    add_task_options(ac, ao.task, cfg);
    cfg.apply("model", ao.model_path);
    cfg.apply("data", ao.data_path);
    cfg.apply("out", ao.out);
    ac->add_option("--model", ao.model_path, "model file")
        ->required(ao.model_path.empty());
    ac->add_option("--data", ao.data_path, "data file")
        ->required(ao.data_path.empty());
    ac->add_option("--out", ao.out, "output CSV")->capture_default_str();

    // gradcheck
    std::string gk_arch = "elman";
    int gk_hidden = 3, gk_ff = 3;
    uint64_t gk_seed = 1;
    auto* kc = app.add_subcommand("gradcheck",
                                  "finite-difference gradient verification");
    kc->add_option("--config", config_path, "JSON config file");
    cfg.apply("arch", gk_arch);
    cfg.apply("hidden", gk_hidden);
    cfg.apply("ff", gk_ff);
    cfg.apply("seed", gk_seed);
    kc->add_option("--arch", gk_arch, "elman, dual or lstm")
        ->capture_default_str();
    kc->add_option("--hidden", gk_hidden, "recurrent units")
        ->capture_default_str();
    kc->add_option("--ff", gk_ff, "feedforward units (dual)")
        ->capture_default_str();
    kc->add_option("--seed", gk_seed, "seed")->capture_default_str();

    // reproduce
    ReproduceOpts ro;
    auto* rc = app.add_subcommand("reproduce",
                                  "reproduce an expression-generation table");
    rc->add_option("--config", config_path, "JSON config file");
    cfg.apply("table", ro.table);
    cfg.apply("scale", ro.scale);
    cfg.apply("seed", ro.seed);
    cfg.apply("workers", ro.workers);
    cfg.apply("run_dir", ro.run_dir);
    rc->add_option("--table", ro.table, "elman, dual or lstm")
        ->capture_default_str();
    rc->add_option("--scale", ro.scale, "protocol scale in (0,1]")
        ->capture_default_str();
    rc->add_option("--seed", ro.seed, "master seed")->capture_default_str();
    rc->add_option("--workers", ro.workers, "restart worker threads")
        ->capture_default_str();
    rc->add_option("--run-dir", ro.run_dir, "output directory");

    cfg.check_unknown();

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      return app.exit(e);
    }

    auto resolved = [&](std::initializer_list<std::pair<std::string, json>> kv) {
      json j = json::object();
      for (const auto& [k, v] : kv) j[k] = v;
      return j;
    };

    if (gd->parsed()) return cmd_gen_data(gd_task, gd_seed, gd_out);
    if (tc->parsed())
      return cmd_train(
          to, resolved({{"task", to.task.task},
                        {"arch", to.arch},
                        {"hidden", to.hidden},
                        {"ff", to.ff},
                        {"train_data", to.train_path},
                        {"test_data", to.test_path},
                        {"train_config", train_config_to_json(to.cfg)}}));
    if (ec->parsed()) return cmd_eval(ev_task, ev_model, ev_data);
    if (xc->parsed())
      return cmd_extract(xo, resolved({{"task", xo.task.task},
                                       {"model", xo.model_path},
                                       {"data", xo.data_path},
                                       {"kind", xo.kind},
                                       {"min_prob", xo.min_prob}}));
    if (gc->parsed())
      return cmd_generate(go, resolved({{"model", go.model_path},
                                        {"n", go.n},
                                        {"seed", go.seed},
                                        {"max_depth", go.max_depth}}));
    if (ac->parsed()) return cmd_activations(ao);
    if (kc->parsed())
      return cmd_gradcheck(gk_arch, gk_hidden, gk_ff, gk_seed);
    if (rc->parsed())
      return cmd_reproduce(ro, resolved({{"table", ro.table},
                                         {"scale", ro.scale},
                                         {"seed", ro.seed}}));
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
