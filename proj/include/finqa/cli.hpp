#pragma once

// Command-line front end. `run` is kept separate from main() so tests can drive it with
// captured streams. Exit codes: 0 success, 1 domain error, 2 usage error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "finqa/attention.hpp"
#include "finqa/dataset.hpp"
#include "finqa/dsl.hpp"
#include "finqa/equivalence.hpp"
#include "finqa/error.hpp"
#include "finqa/executor.hpp"
#include "finqa/fusion.hpp"
#include "finqa/grammar.hpp"

namespace finqa::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

struct CliConfig {
  std::string program;
  std::string program_b;
  std::string dataset_path;
  std::string predictions_path;
  std::string output_path;
  std::string record_id;
  std::string table_path;
  std::string vocab_path;
  std::string candidates_path;
  std::string weights_path;
  std::vector<std::string> score_paths;
  std::vector<std::string> facts;
  std::vector<std::string> gold;
  Tolerances tolerances;
  std::uint64_t seed = 42;
  std::size_t top_k = 5;
  int neg_rate = 3;
  int oracle_trials = 0;
  double grad_tol = 1e-4;
  std::size_t attn_n = 4, attn_d = 8, attn_k = 2;
  bool json = false;
};

namespace detail {

inline std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline const DatasetRecord& find_record(const std::vector<DatasetRecord>& data, const std::string& id) {
  for (const auto& r : data)
    if (r.id == id) return r;
  throw Error(Errc::InvalidArgument, "no record with id '" + id + "'");
}

inline int cmd_parse(const CliConfig& c, std::ostream& out) {
  Program p = parse_program(c.program);
  if (c.json) {
    out << ordered_json{{"program", serialize_program(p)}, {"steps", p.steps.size()}}.dump() << "\n";
  } else {
    out << serialize_program(p) << "\n";
  }
  return kExitOk;
}

inline int cmd_exec(const CliConfig& c, std::ostream& out) {
  Program p = parse_program(c.program);
  FinTable table;
  std::optional<DatasetRecord> record;
  if (!c.dataset_path.empty()) {
    if (c.record_id.empty()) throw Error(Errc::InvalidArgument, "--dataset needs --id");
    record = find_record(load_dataset(c.dataset_path), c.record_id);
    table = record->table;
  } else if (!c.table_path.empty()) {
    auto j = finqa::detail::read_json_file(c.table_path);
    if (!j.is_array()) throw Error(Errc::SchemaError, "table file must be an array of rows");
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : j) {
      if (!row.is_array()) throw Error(Errc::SchemaError, "table row is not an array");
      std::vector<std::string> cells;
      for (const auto& cell : row) cells.push_back(finqa::detail::json_scalar_text(cell));
      rows.push_back(std::move(cells));
    }
    table = table_from_rows(rows);
  }
  Answer a = execute_program(p, table);
  std::optional<bool> match;
  if (record) match = compare_answers(a, record->exe_ans, c.tolerances);
  if (c.json) {
    ordered_json j{{"answer", to_string(a)}};
    if (match) j["gold"] = record->exe_ans_text, j["match"] = *match;
    out << j.dump() << "\n";
  } else {
    out << to_string(a) << "\n";
    if (match) out << "gold: " << record->exe_ans_text << " match: " << (*match ? "yes" : "no") << "\n";
  }
  return kExitOk;
}

inline int cmd_equiv(const CliConfig& c, std::ostream& out) {
  Program a = parse_program(c.program);
  Program b = parse_program(c.program_b);
  SymbolTable symbols;
  CanonicalForm fa = canonicalize(symbolize(a, symbols));
  CanonicalForm fb = canonicalize(symbolize(b, symbols));
  const bool eq = fa == fb;
  std::optional<bool> oracle;
  if (c.oracle_trials > 0) oracle = random_eval_oracle(a, b, c.oracle_trials, c.seed);
  if (c.json) {
    ordered_json j{{"equivalent", eq}, {"canonical_a", fa.text}, {"canonical_b", fb.text}};
    if (oracle) j["oracle_equivalent"] = *oracle;
    out << j.dump() << "\n";
  } else {
    out << (eq ? "equivalent" : "not equivalent") << "\n";
    out << "a: " << fa.text << "\n";
    out << "b: " << fb.text << "\n";
    if (oracle) out << "oracle: " << (*oracle ? "equivalent" : "not equivalent") << "\n";
  }
  return kExitOk;
}

inline VocabPartition load_vocab(const std::string& path) {
  auto j = finqa::detail::read_json_file(path);
  if (!j.is_object()) throw Error(Errc::SchemaError, "vocabulary file must be an object");
  auto list = [&](const char* key) {
    std::vector<std::string> out;
    if (j.contains(key))
      for (const auto& t : j.at(key)) out.push_back(finqa::detail::json_scalar_text(t));
    return out;
  };
  std::size_t memory = j.value("memory", kMaxProgramSteps);
  return VocabPartition(list("numbers"), list("constants"), list("rows"), memory);
}

/// Without a vocabulary file, the arguments appearing in the program itself form one.
inline VocabPartition vocab_from_tokens(const std::vector<std::string>& tokens) {
  std::set<std::string> numbers, constants, rows;
  for (const auto& t : tokens) {
    if (t == kCloseToken || t == kNoneToken || t.ends_with("(") || t.starts_with("#")) continue;
    if (finqa::detail::is_numeral(t)) {
      numbers.insert(t);
    } else if (t.starts_with("const_")) {
      constants.insert(t);
    } else {
      rows.insert(t);
    }
  }
  return VocabPartition({numbers.begin(), numbers.end()}, {constants.begin(), constants.end()},
                        {rows.begin(), rows.end()});
}

inline int cmd_mask_trace(const CliConfig& c, std::ostream& out, std::ostream& err) {
  auto tokens = tokenize_program(c.program);
  VocabPartition vocab = c.vocab_path.empty() ? vocab_from_tokens(tokens) : load_vocab(c.vocab_path);
  DecodeState s = initial_state();
  ordered_json trace = ordered_json::array();
  int status = kExitOk;
  for (std::size_t pos = 0; pos <= tokens.size(); ++pos) {
    TokenMask mask = valid_mask(s, vocab);
    std::vector<std::string> valid;
    for (std::size_t i = 0; i < vocab.size(); ++i)
      if (mask[i]) valid.push_back(vocab.token(i));
    const std::string next = pos < tokens.size() ? tokens[pos] : "(end)";
    if (c.json) {
      trace.push_back({{"position", pos}, {"state", describe(s)}, {"next", next}, {"valid", valid}});
    } else {
      out << pos << "\t" << describe(s) << "\tnext=" << next << "\tvalid:";
      for (const auto& v : valid) out << " " << v;
      out << "\n";
    }
    if (pos == tokens.size()) break;
    try {
      s = advance(s, vocab, tokens[pos]);
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      status = kExitDomain;
      break;
    }
  }
  if (c.json) out << trace.dump() << "\n";
  return status;
}

inline int cmd_eval(const CliConfig& c, std::ostream& out) {
  auto data = load_dataset(c.dataset_path);
  auto preds = load_predictions(c.predictions_path);
  EvalReport report = evaluate(data, preds, c.tolerances);
  auto j = report_to_json(report);
  if (!c.output_path.empty()) {
    std::ofstream f(c.output_path);
    if (!f) throw Error(Errc::IoError, "cannot write '" + c.output_path + "'");
    f << j.dump(2) << "\n";
  }
  if (c.json) {
    out << j.dump(2) << "\n";
  } else {
    out << format_summary(report);
  }
  return kExitOk;
}

inline int cmd_self_check(const CliConfig& c, std::ostream& out) {
  auto data = load_dataset(c.dataset_path);
  SelfCheckReport r = gold_self_check(data, c.tolerances);
  if (c.json) {
    ordered_json mism = ordered_json::array();
    for (const auto& m : r.mismatches) mism.push_back({{"id", m.id}, {"computed", m.computed}, {"expected", m.expected}});
    out << ordered_json{{"fraction", round6(r.fraction)}, {"matched", r.matched}, {"total", r.total}, {"mismatches", mism}}.dump(2)
        << "\n";
  } else {
    out << "gold self-check: " << r.matched << "/" << r.total << " = " << fmt(r.fraction) << "\n";
    for (const auto& m : r.mismatches) out << "mismatch\t" << m.id << "\tcomputed=" << m.computed << "\texpected=" << m.expected << "\n";
  }
  return kExitOk;
}

inline std::vector<ScoreMap> load_score_file(const std::string& path) {
  auto j = finqa::detail::read_json_file(path);
  std::vector<ScoreMap> maps;
  auto one = [&](const nlohmann::json& obj) {
    if (!obj.is_object() || !obj.contains("scores") || !obj.at("scores").is_object()) {
      throw Error(Errc::SchemaError, "'" + path + "': expected {\"model\": ..., \"scores\": {...}}");
    }
    ScoreMap m;
    for (const auto& item : obj.at("scores").items()) {
      if (!item.value().is_number()) throw Error(Errc::SchemaError, "'" + path + "': score for '" + item.key() + "' is not a number");
      m.emplace(item.key(), item.value().get<double>());
    }
    maps.push_back(std::move(m));
  };
  if (j.is_array()) {
    for (const auto& obj : j) one(obj);
  } else {
    one(j);
  }
  return maps;
}

inline void gold_and_facts(const CliConfig& c, std::vector<std::string>& facts, std::set<std::string>& gold) {
  facts = c.facts;
  gold.insert(c.gold.begin(), c.gold.end());
  if (!c.dataset_path.empty()) {
    if (c.record_id.empty()) throw Error(Errc::InvalidArgument, "--dataset needs --id");
    auto data = load_dataset(c.dataset_path);
    const auto& rec = find_record(data, c.record_id);
    if (facts.empty()) facts = fact_ids(rec);
    if (gold.empty()) gold = rec.gold_inds;
  }
}

inline int cmd_fuse_retriever(const CliConfig& c, std::ostream& out) {
  std::vector<ScoreMap> maps;
  for (const auto& path : c.score_paths) {
    auto more = load_score_file(path);
    maps.insert(maps.end(), more.begin(), more.end());
  }
  ScoreMap avg = average_retriever_scores(maps);
  auto ranked = rank_top_k(avg, c.top_k);
  std::vector<std::string> facts;
  std::set<std::string> gold;
  gold_and_facts(c, facts, gold);
  std::optional<double> recall;
  if (!gold.empty()) recall = recall_at_k(ranked, gold, c.top_k);
  if (c.json) {
    ordered_json items = ordered_json::array();
    for (const auto& f : ranked) items.push_back({{"fact", f}, {"score", avg.at(f)}});
    ordered_json j{{"models", maps.size()}, {"top_k", items}};
    if (recall) j["recall_at_k"] = *recall;
    out << j.dump() << "\n";
  } else {
    for (std::size_t i = 0; i < ranked.size(); ++i) out << i + 1 << "\t" << ranked[i] << "\t" << fmt(avg.at(ranked[i])) << "\n";
    if (recall) out << "recall@" << c.top_k << ": " << fmt(*recall) << "\n";
  }
  return kExitOk;
}

inline int cmd_sample_negatives(const CliConfig& c, std::ostream& out) {
  std::vector<std::string> facts;
  std::set<std::string> gold;
  gold_and_facts(c, facts, gold);
  auto neg = sample_negatives(facts, gold, c.neg_rate, c.seed);
  if (c.json) {
    out << ordered_json{{"negatives", neg}}.dump() << "\n";
  } else {
    for (const auto& f : neg) out << f << "\n";
  }
  return kExitOk;
}

inline int cmd_fuse_generator(const CliConfig& c, std::ostream& out) {
  auto j = finqa::detail::read_json_file(c.candidates_path);
  if (!j.is_array()) throw Error(Errc::SchemaError, "candidates file must be an array");
  std::vector<CandidateProgram> candidates;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& obj = j[i];
    if (!obj.is_object() || !obj.contains("program") || !obj.contains("scores") || !obj.at("scores").is_array()) {
      throw Error(Errc::SchemaError, "candidate " + std::to_string(i) + ": needs 'program' and 'scores'");
    }
    candidates.push_back({parse_program(obj.at("program").get<std::string>()), obj.at("scores").get<std::vector<double>>()});
  }
  if (candidates.empty()) throw Error(Errc::EmptyInput, "no candidates");
  std::vector<double> raw(candidates.front().per_model_scores.size(), 1.0);
  if (!c.weights_path.empty()) {
    auto w = finqa::detail::read_json_file(c.weights_path);
    if (!w.is_array()) throw Error(Errc::SchemaError, "weights file must be a JSON list of numbers");
    raw = w.get<std::vector<double>>();
  }
  FusionResult r = weighted_program_fusion(candidates, FusionWeights(raw));
  if (c.json) {
    out << ordered_json{{"program", serialize_program(r.program)}, {"fused_score", r.fused_score}, {"canonical", r.form.text}}.dump()
        << "\n";
  } else {
    out << serialize_program(r.program) << "\n";
    out << "fused_score: " << fmt(r.fused_score) << "\n";
    out << "canonical: " << r.form.text << "\n";
  }
  return kExitOk;
}

inline int cmd_attn_check(const CliConfig& c, std::ostream& out) {
  using namespace attn;
  AttentionConfig cfg{c.attn_n, c.attn_d, c.attn_k};
  cfg.validate();
  std::mt19937_64 rng(c.seed);
  Matrix h = Matrix::random(cfg.n, cfg.d, rng);
  Matrix wq = Matrix::random(cfg.d, cfg.d, rng), wk = Matrix::random(cfg.d, cfg.d, rng), wv = Matrix::random(cfg.d, cfg.d, rng);
  RelPositionTable rel{cfg.k, Matrix::random(2 * cfg.k, cfg.d, rng)};
  ProjectionSet proj = ProjectionSet::random(cfg.d, rng);

  auto standard = grad_check_standard(h, wq, wk, wv, c.grad_tol);
  auto disentangled = grad_check_disentangled(h, rel, proj, c.grad_tol);
  const bool ok = standard.passed() && disentangled.passed();
  if (c.json) {
    out << ordered_json{{"seed", c.seed},
                        {"tol", c.grad_tol},
                        {"standard_attention", standard.max_rel_error},
                        {"disentangled_attention", disentangled.max_rel_error},
                        {"passed", ok}}
               .dump()
        << "\n";
  } else {
    out << "standard_attention\tmax_rel_error=" << fmt(standard.max_rel_error, "%.3e") << "\t"
        << (standard.passed() ? "pass" : "FAIL") << "\n";
    out << "disentangled_attention\tmax_rel_error=" << fmt(disentangled.max_rel_error, "%.3e") << "\t"
        << (disentangled.passed() ? "pass" : "FAIL") << "\n";
  }
  return ok ? kExitOk : kExitDomain;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CliConfig c;
  CLI::App app{"Reasoning-program toolkit for financial question answering", "finqa"};
  app.require_subcommand(1);

  auto add_tolerances = [&](CLI::App* sub) {
    sub->add_option("--abs-tol", c.tolerances.abs_tol, "Absolute tolerance for numeric answers")->check(CLI::NonNegativeNumber);
    sub->add_option("--rel-tol", c.tolerances.rel_tol, "Relative tolerance for numeric answers")->check(CLI::NonNegativeNumber);
    sub->add_flag("--percent-lenient", c.tolerances.percent_lenient, "Also accept answers off by a factor of 100");
  };
  auto add_json = [&](CLI::App* sub) { sub->add_flag("--json", c.json, "Machine-readable output"); };

  auto* parse = app.add_subcommand("parse", "Parse a program and print its canonical spelling");
  parse->add_option("program", c.program, "Program text")->required();
  add_json(parse);

  auto* exec = app.add_subcommand("exec", "Execute a program, optionally against a record's table");
  exec->add_option("program", c.program, "Program text")->required();
  exec->add_option("--dataset", c.dataset_path, "Dataset file holding the record");
  exec->add_option("--id", c.record_id, "Record id within --dataset");
  exec->add_option("--table", c.table_path, "JSON table (array of rows, header first)");
  add_tolerances(exec);
  add_json(exec);

  auto* equiv = app.add_subcommand("equiv", "Decide symbolic equivalence of two programs");
  equiv->add_option("a", c.program, "First program")->required();
  equiv->add_option("b", c.program_b, "Second program")->required();
  equiv->add_option("--oracle", c.oracle_trials, "Also run the random-evaluation check with this many trials");
  equiv->add_option("--seed", c.seed, "Seed for the random-evaluation check");
  add_json(equiv);

  auto* mask = app.add_subcommand("mask-trace", "Print the valid next tokens at each decoding position");
  mask->add_option("program", c.program, "Partial or complete program text")->required();
  mask->add_option("--vocab", c.vocab_path, "Vocabulary JSON {numbers, constants, rows, memory}");
  add_json(mask);

  auto* eval = app.add_subcommand("eval", "Execution and program accuracy of a predictions file");
  eval->add_option("--dataset", c.dataset_path, "Dataset file")->required();
  eval->add_option("--predictions", c.predictions_path, "Predictions file [{id, program}]")->required();
  eval->add_option("--output", c.output_path, "Write the JSON report here");
  add_tolerances(eval);
  add_json(eval);

  auto* self = app.add_subcommand("self-check", "Execute gold programs and compare with stored answers");
  self->add_option("--dataset", c.dataset_path, "Dataset file")->required();
  add_tolerances(self);
  add_json(self);

  auto* fret = app.add_subcommand("fuse-retriever", "Average retriever score files and rank facts");
  fret->add_option("--scores", c.score_paths, "Score files {model, scores}")->required();
  fret->add_option("--top-k", c.top_k, "Number of facts to keep")->check(CLI::PositiveNumber);
  fret->add_option("--gold", c.gold, "Gold fact ids for recall")->delimiter(',');
  fret->add_option("--dataset", c.dataset_path, "Dataset file supplying gold facts");
  fret->add_option("--id", c.record_id, "Record id within --dataset");
  add_json(fret);

  auto* neg = app.add_subcommand("sample-negatives", "Draw non-gold facts at a negative-sample ratio");
  neg->add_option("--facts", c.facts, "All fact ids")->delimiter(',');
  neg->add_option("--gold", c.gold, "Gold fact ids")->delimiter(',');
  neg->add_option("--dataset", c.dataset_path, "Dataset file supplying facts and gold");
  neg->add_option("--id", c.record_id, "Record id within --dataset");
  neg->add_option("--neg-rate", c.neg_rate, "Negatives per gold fact")->check(CLI::PositiveNumber);
  neg->add_option("--seed", c.seed, "Sampling seed");
  add_json(neg);

  auto* fgen = app.add_subcommand("fuse-generator", "Pick a program by weighted fusion of model scores");
  fgen->add_option("--candidates", c.candidates_path, "Candidates [{program, scores}]")->required();
  fgen->add_option("--weights", c.weights_path, "JSON list of per-model weights (default uniform)");
  add_json(fgen);

  auto* attn = app.add_subcommand("attn-check", "Finite-difference gradient checks of the attention kernels");
  attn->add_option("--seed", c.seed, "Seed for the random inputs");
  attn->add_option("--tol", c.grad_tol, "Maximum relative error")->check(CLI::PositiveNumber);
  attn->add_option("--n", c.attn_n, "Sequence length")->check(CLI::PositiveNumber);
  attn->add_option("--d", c.attn_d, "Hidden size")->check(CLI::PositiveNumber);
  attn->add_option("--k", c.attn_k, "Maximum relative distance")->check(CLI::PositiveNumber);
  add_json(attn);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (parse->parsed()) return detail::cmd_parse(c, out);
    if (exec->parsed()) return detail::cmd_exec(c, out);
    if (equiv->parsed()) return detail::cmd_equiv(c, out);
    if (mask->parsed()) return detail::cmd_mask_trace(c, out, err);
    if (eval->parsed()) return detail::cmd_eval(c, out);
    if (self->parsed()) return detail::cmd_self_check(c, out);
    if (fret->parsed()) return detail::cmd_fuse_retriever(c, out);
    if (neg->parsed()) return detail::cmd_sample_negatives(c, out);
    if (fgen->parsed()) return detail::cmd_fuse_generator(c, out);
    if (attn->parsed()) return detail::cmd_attn_check(c, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace finqa::cli
