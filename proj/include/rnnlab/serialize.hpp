#pragma once

// JSON persistence for models and extracted machines, plus small file
// helpers. Weights round-trip exactly: doubles are emitted in shortest
// round-trip decimal form.

#include "rnnlab/automata.hpp"
#include "rnnlab/model.hpp"
#include "rnnlab/train.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rnnlab {

using nlohmann::json;

constexpr int kModelFormatVersion = 1;

inline json alphabet_to_json(const Alphabet& a) {
  if (a.is_pair()) return {{"kind", "digit_pairs"}, {"base", a.pair_base()}};
  return {{"kind", "plain"}, {"symbols", a.tokens()}};
}

inline Alphabet alphabet_from_json(const json& j) {
  if (j.at("kind") == "digit_pairs")
    return Alphabet::digit_pairs(j.at("base").get<int>());
  return Alphabet::plain(j.at("symbols").get<std::vector<std::string>>());
}

inline json train_config_to_json(const TrainConfig& c) {
  return {{"lr", c.lr},
          {"l1", c.l1},
          {"batch_size", c.batch_size},
          {"unfold_len", c.unfold_len},
          {"epochs", c.epochs},
          {"noise_max", c.noise_max},
          {"noise_ramp_end", c.noise_ramp_end},
          {"seed", c.seed},
          {"restarts", c.restarts},
          {"workers", c.workers}};
}

inline TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  if (j.contains("lr")) c.lr = j["lr"];
  if (j.contains("l1")) c.l1 = j["l1"];
  if (j.contains("batch_size")) c.batch_size = j["batch_size"];
  if (j.contains("unfold_len")) c.unfold_len = j["unfold_len"];
  if (j.contains("epochs")) c.epochs = j["epochs"];
  if (j.contains("noise_max")) c.noise_max = j["noise_max"];
  if (j.contains("noise_ramp_end")) c.noise_ramp_end = j["noise_ramp_end"];
  if (j.contains("seed")) c.seed = j["seed"];
  if (j.contains("restarts")) c.restarts = j["restarts"];
  if (j.contains("workers")) c.workers = j["workers"];
  return c;
}

// A trained model together with the alphabets it was trained on.
struct SavedModel {
  Model model;
  Alphabet input_alphabet;
  Alphabet target_alphabet;
  uint64_t seed = 0;
  json config_echo;  // training-config echo, informational
};

inline json model_to_json(const SavedModel& sm) {
  const Model& m = sm.model;
  json params = json::object();
  const auto& names = param_names(m.arch);
  for (size_t i = 0; i < m.w.size(); ++i) {
    json rows = json::array();
    for (int r = 0; r < m.w[i].rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < m.w[i].cols(); ++c) row.push_back(m.w[i](r, c));
      rows.push_back(std::move(row));
    }
    params[names[i]] = std::move(rows);
  }
  return {{"format", "rnnlab-model"},
          {"version", kModelFormatVersion},
          {"arch", arch_name(m.arch)},
          {"dims",
           {{"input", m.dims.input},
            {"hidden", m.dims.hidden},
            {"ff", m.dims.ff},
            {"output", m.dims.output}}},
          {"alphabets",
           {{"input", alphabet_to_json(sm.input_alphabet)},
            {"target", alphabet_to_json(sm.target_alphabet)}}},
          {"seed", sm.seed},
          {"train_config", sm.config_echo},
          {"params", params}};
}

inline SavedModel model_from_json(const json& j) {
  if (j.value("format", "") != "rnnlab-model")
    throw std::runtime_error("model file: unrecognized format");
  if (j.at("version").get<int>() != kModelFormatVersion)
    throw std::runtime_error("model file: unsupported version");
  SavedModel sm;
  Model& m = sm.model;
  m.arch = arch_from_name(j.at("arch").get<std::string>());
  const auto& d = j.at("dims");
  m.dims = {d.at("input"), d.at("hidden"), d.at("ff"), d.at("output")};
  m.out_kind =
      m.dims.output == 1 ? OutputKind::binary_sigmoid : OutputKind::softmax;
  sm.input_alphabet = alphabet_from_json(j.at("alphabets").at("input"));
  sm.target_alphabet = alphabet_from_json(j.at("alphabets").at("target"));
  sm.seed = j.value("seed", 0);
  if (j.contains("train_config")) sm.config_echo = j["train_config"];
  const auto& names = param_names(m.arch);
  const auto& params = j.at("params");
  for (const auto& name : names) {
    const auto& rows = params.at(name);
    Eigen::MatrixXd w(rows.size(), rows.at(0).size());
    for (size_t r = 0; r < rows.size(); ++r)
      for (size_t c = 0; c < rows[r].size(); ++c) w(r, c) = rows[r][c];
    m.w.push_back(std::move(w));
  }
  return sm;
}

inline void save_model(const std::string& path, const SavedModel& sm) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << model_to_json(sm).dump(1) << "\n";
}

inline SavedModel load_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("model file parse error: " + std::string(e.what()));
  }
  return model_from_json(j);
}

// --- extracted machines ---

inline json machine_to_json(const Automaton& a) {
  json edges = json::array();
  for (int s = 0; s < a.n_states(); ++s)
    for (const auto& [in, outs] : a.trans[s]) {
      long total = 0;
      for (const auto& [o, c] : outs) total += c;
      for (const auto& [o, c] : outs)
        edges.push_back({{"from", s},
                         {"input", a.input_alphabet.token(in)},
                         {"output", a.output_alphabet.token(o.second)},
                         {"to", o.first},
                         {"count", c},
                         {"prob", static_cast<double>(c) / total}});
    }
  json states = json::array();
  for (int s = 0; s < a.n_states(); ++s) {
    json st = {{"id", s}, {"pattern", a.patterns[s]}};
    if (a.kind == MachineKind::moore) {
      json outs = json::object();
      for (const auto& [tok, c] : a.state_out[s])
        outs[a.output_alphabet.token(tok)] = c;
      st["outputs"] = outs;
    }
    states.push_back(st);
  }
  return {{"kind", kind_name(a.kind)},
          {"states", states},
          {"start", a.start},
          {"edges", edges}};
}

inline json machine_to_json(const Dfa& d) {
  json edges = json::array();
  for (int s = 0; s < d.n_states(); ++s)
    for (int c = 0; c < d.n_inputs(); ++c) {
      if (d.next[s][c] < 0) continue;
      int out = d.kind == MachineKind::mealy ? d.out[s][c]
                                             : d.state_out[d.next[s][c]];
      json e = {{"from", s},
                {"input", d.input_alphabet.token(c)},
                {"to", d.next[s][c]},
                {"count", 1},
                {"prob", 1.0}};
      if (out >= 0) e["output"] = d.output_alphabet.token(out);
      edges.push_back(std::move(e));
    }
  json states = json::array();
  for (int s = 0; s < d.n_states(); ++s) {
    json st = {{"id", s}, {"pattern", d.patterns[s]}};
    if (d.kind == MachineKind::moore && d.state_out[s] >= 0)
      st["output"] = d.output_alphabet.token(d.state_out[s]);
    states.push_back(st);
  }
  return {{"kind", kind_name(d.kind)},
          {"states", states},
          {"start", d.start},
          {"conflict_ratio", d.conflict_ratio},
          {"edges", edges}};
}

// --- plain files ---

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::vector<std::string> lines;
  std::string l;
  while (std::getline(f, l)) lines.push_back(l);
  return lines;
}

}  // namespace rnnlab
