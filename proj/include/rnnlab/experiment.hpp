#pragma once

// Expression-generation experiment harness: trains a row of network
// configurations, measures generation accuracy, and aggregates
// mean/std/min/max over repetitions. A scale factor in (0,1] shrinks
// repetitions, restarts, epochs and corpus sizes for desk runs.

#include "rnnlab/eval.hpp"
#include "rnnlab/expressions.hpp"
#include "rnnlab/train.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace rnnlab {

struct TableRow {
  std::string config_label;  // e.g. "noise = 1.0, L1 = 0.1"
  std::string units_label;   // e.g. "15 - 20"
  Arch arch = Arch::elman;
  int hidden = 10;
  int ff = 0;
  double noise_max = 1.0;
  double l1 = 0.0;
};

inline std::vector<TableRow> expression_table_rows(const std::string& table) {
  std::vector<TableRow> rows;
  auto label = [](double nu, double l1) {
    std::ostringstream os;
    os << "noise = " << std::fixed << std::setprecision(1) << nu
       << ", L1 = " << l1;
    return os.str();
  };
  if (table == "elman") {
    for (double nu : {0.0, 1.0})
      for (double l1 : {0.0, 0.1})
        for (int h : {10, 20, 30})
          rows.push_back({label(nu, l1), std::to_string(h), Arch::elman, h, 0,
                          nu, l1});
  } else if (table == "dual") {
    for (double l1 : {0.0, 0.1})
      for (int h : {5, 10, 15})
        for (int ff : {10, 20})
          rows.push_back({label(1.0, l1),
                          std::to_string(h) + " - " + std::to_string(ff),
                          Arch::dual, h, ff, 1.0, l1});
  } else if (table == "lstm") {
    for (double l1 : {0.0, 0.1})
      for (int h : {10, 20, 30})
        rows.push_back({"L1 = " + (l1 ? std::string("0.1") : std::string("0.0")),
                        std::to_string(h), Arch::lstm, h, 0, 0.0, l1});
  } else {
    throw std::invalid_argument("unknown table: " + table +
                                " (expected elman, dual or lstm)");
  }
  return rows;
}

struct ExperimentScale {
  int repetitions = 10;
  int restarts = 10;
  int epochs = 1000;
  int corpus_length = 200000;
  int generate_length = 50000;
};

inline ExperimentScale scaled_protocol(double scale) {
  if (scale <= 0.0 || scale > 1.0)
    throw std::invalid_argument("scale must be in (0,1]");
  ExperimentScale s;
  auto up = [](double v) { return static_cast<int>(std::ceil(v)); };
  s.repetitions = up(10 * scale);
  s.restarts = up(10 * scale);
  s.epochs = up(1000 * scale);
  s.corpus_length = std::max(20000, up(200000 * scale));
  s.generate_length = std::max(5000, up(50000 * scale));
  return s;
}

struct RowResult {
  TableRow row;
  std::vector<double> acc;  // per repetition, percent

  double mean() const {
    double s = 0;
    for (double a : acc) s += a;
    return acc.empty() ? 0.0 : s / acc.size();
  }
  double stddev() const {
    if (acc.size() < 2) return 0.0;
    double m = mean(), s = 0;
    for (double a : acc) s += (a - m) * (a - m);
    return std::sqrt(s / acc.size());
  }
  double min() const {
    double v = acc.empty() ? 0.0 : acc[0];
    for (double a : acc) v = std::min(v, a);
    return v;
  }
  double max() const {
    double v = acc.empty() ? 0.0 : acc[0];
    for (double a : acc) v = std::max(v, a);
    return v;
  }
};

struct ExperimentReport {
  std::string table;
  double scale = 1.0;
  ExperimentScale protocol;
  std::vector<RowResult> rows;

  void print(std::ostream& os) const {
    os << "Table: " << table;
    if (scale < 1.0)
      os << "  [scaled x" << scale << ": " << protocol.repetitions
         << " repetitions, " << protocol.restarts << " restarts, "
         << protocol.epochs << " epochs]";
    os << "\n";
    os << "Config                    Units    Test          Min    Max\n";
    for (const RowResult& r : rows) {
      std::ostringstream t;
      t << std::fixed << std::setprecision(1) << r.mean() << "+-"
        << r.stddev();
      os << std::left << std::setw(26) << r.row.config_label << std::setw(9)
         << r.row.units_label << std::setw(14) << t.str() << std::fixed
         << std::setprecision(1) << std::setw(7) << r.min() << r.max()
         << "\n";
    }
  }

  void write_csv(std::ostream& os) const {
    os << "table,scale,config,units,repetition,accuracy\n";
    for (const RowResult& r : rows)
      for (size_t i = 0; i < r.acc.size(); ++i)
        os << table << ',' << scale << ",\"" << r.row.config_label << "\","
           << r.row.units_label << ',' << i << ',' << r.acc[i] << "\n";
  }
};

// Trains one configuration once and returns its generation accuracy in
// percent. Corpora and model seeds derive from (seed, repetition).
inline double run_expression_repetition(const TableRow& row,
                                        const ExperimentScale& sc,
                                        uint64_t seed, int repetition,
                                        int workers = 1) {
  ExprConfig ec;
  ec.length = sc.corpus_length;
  uint64_t base = make_rng(seed, 100 + repetition)();
  std::string train_corpus = gen_expr_corpus(ec, base);
  std::string test_corpus = gen_expr_corpus(ec, base + 1);
  LabeledStream tr = expr_stream(train_corpus);
  LabeledStream te = expr_stream(test_corpus);

  TrainConfig cfg;
  cfg.batch_size = 20;
  cfg.epochs = sc.epochs;
  cfg.restarts = sc.restarts;
  cfg.noise_max = row.noise_max;
  cfg.l1 = row.l1;
  cfg.seed = base + 2;
  cfg.workers = workers;
  TrainResult r = train(row.arch, tr, te, row.hidden, row.ff, cfg);

  std::string g = generate_string(r.model, te.input_alphabet,
                                  sc.generate_length, base + 3);
  try {
    return 100.0 * generation_accuracy(g, ec.max_depth).accuracy;
  } catch (const std::runtime_error&) {
    return 0.0;  // no complete '$'-delimited substring generated
  }
}

inline ExperimentReport run_expression_table(const std::string& table,
                                             double scale, uint64_t seed,
                                             int workers = 1,
                                             std::ostream* progress = nullptr) {
  ExperimentReport rep;
  rep.table = table;
  rep.scale = scale;
  rep.protocol = scaled_protocol(scale);
  for (const TableRow& row : expression_table_rows(table)) {
    RowResult rr;
    rr.row = row;
    for (int i = 0; i < rep.protocol.repetitions; ++i) {
      double acc = run_expression_repetition(row, rep.protocol, seed, i,
                                             workers);
      rr.acc.push_back(acc);
      if (progress)
        *progress << table << " " << row.config_label << " units "
                  << row.units_label << " rep " << i << ": " << acc << "%\n"
                  << std::flush;
    }
    rep.rows.push_back(std::move(rr));
  }
  return rep;
}

}  // namespace rnnlab
