#pragma once

// Dataset ingestion (public FinQA record layout) and the two accuracy metrics.
//
// Record layout:
//   { "id": str, "pre_text": [str], "post_text": [str], "table": [[str]],
//     "qa": { "question": str, "program": str, "exe_ans": number | str, "gold_inds": {id: str} | [id] } }
//
// The first table row is the header. Fact ids: "text_<i>" over pre_text then post_text,
// "table_<r>" over the raw table rows (header is table_0).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "finqa/dsl.hpp"
#include "finqa/equivalence.hpp"
#include "finqa/error.hpp"
#include "finqa/executor.hpp"

namespace finqa {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct DatasetRecord {
  std::string id;
  std::vector<std::string> pre_text;
  std::vector<std::string> post_text;
  std::vector<std::vector<std::string>> raw_table;
  FinTable table;
  std::string question;
  std::string gold_program_text;
  Program gold_program;
  std::string exe_ans_text;
  Answer exe_ans;
  std::set<std::string> gold_inds;
};

struct PredictionRecord {
  std::string id;
  std::string program;
};

inline FinTable table_from_rows(const std::vector<std::vector<std::string>>& rows) {
  FinTable t;
  if (rows.empty()) return t;
  t.header = rows.front();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].empty()) continue;
    t.rows.push_back({rows[r].front(), {rows[r].begin() + 1, rows[r].end()}});
  }
  return t;
}

/// Every fact id a record offers to a retriever, in document order.
inline std::vector<std::string> fact_ids(const DatasetRecord& rec) {
  std::vector<std::string> out;
  const std::size_t sentences = rec.pre_text.size() + rec.post_text.size();
  for (std::size_t i = 0; i < sentences; ++i) out.push_back("text_" + std::to_string(i));
  for (std::size_t r = 0; r < rec.raw_table.size(); ++r) out.push_back("table_" + std::to_string(r));
  return out;
}

namespace detail {

inline std::string json_scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  throw Error(Errc::SchemaError, "expected a number or string");
}

inline std::vector<std::string> string_list(const json& obj, const char* field) {
  if (!obj.contains(field)) return {};
  const json& v = obj.at(field);
  if (!v.is_array()) throw Error(Errc::SchemaError, std::string("'") + field + "' must be an array");
  std::vector<std::string> out;
  for (const auto& s : v) out.push_back(json_scalar_text(s));
  return out;
}

inline DatasetRecord record_from_json(const json& j) {
  if (!j.is_object()) throw Error(Errc::SchemaError, "record is not an object");
  DatasetRecord rec;
  if (!j.contains("id") || !j.at("id").is_string()) throw Error(Errc::SchemaError, "missing string 'id'");
  rec.id = j.at("id").get<std::string>();
  rec.pre_text = string_list(j, "pre_text");
  rec.post_text = string_list(j, "post_text");
  if (j.contains("table")) {
    const json& t = j.at("table");
    if (!t.is_array()) throw Error(Errc::SchemaError, "'table' must be an array of rows");
    for (const auto& row : t) {
      if (!row.is_array()) throw Error(Errc::SchemaError, "table row is not an array");
      std::vector<std::string> cells;
      for (const auto& c : row) cells.push_back(json_scalar_text(c));
      rec.raw_table.push_back(std::move(cells));
    }
  }
  rec.table = table_from_rows(rec.raw_table);

  if (!j.contains("qa") || !j.at("qa").is_object()) throw Error(Errc::SchemaError, "missing 'qa' block");
  const json& qa = j.at("qa");
  if (qa.contains("question")) rec.question = json_scalar_text(qa.at("question"));
  if (!qa.contains("program") || !qa.at("program").is_string()) throw Error(Errc::SchemaError, "missing 'qa.program'");
  rec.gold_program_text = qa.at("program").get<std::string>();
  try {
    rec.gold_program = parse_program(rec.gold_program_text);
  } catch (const Error& e) {
    throw Error(Errc::SchemaError, std::string("gold program does not parse (") + e.what() + ")");
  }
  if (!qa.contains("exe_ans")) throw Error(Errc::SchemaError, "missing 'qa.exe_ans'");
  rec.exe_ans_text = json_scalar_text(qa.at("exe_ans"));
  try {
    rec.exe_ans = qa.at("exe_ans").is_number() ? Answer{qa.at("exe_ans").get<double>()}
                                               : parse_gold_answer(rec.exe_ans_text);
  } catch (const Error& e) {
    throw Error(Errc::SchemaError, std::string("unreadable exe_ans (") + e.what() + ")");
  }
  if (qa.contains("gold_inds")) {
    const json& g = qa.at("gold_inds");
    if (g.is_object()) {
      for (const auto& item : g.items()) rec.gold_inds.insert(item.key());
    } else if (g.is_array()) {
      for (const auto& f : g) rec.gold_inds.insert(json_scalar_text(f));
    } else {
      throw Error(Errc::SchemaError, "'qa.gold_inds' must be an object or array");
    }
  }
  return rec;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::IoError, "'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace detail

inline std::vector<DatasetRecord> parse_dataset(const json& j) {
  if (!j.is_array()) throw Error(Errc::SchemaError, "dataset must be a JSON array");
  std::vector<DatasetRecord> out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < j.size(); ++i) {
    try {
      out.push_back(detail::record_from_json(j[i]));
    } catch (const Error& e) {
      throw Error(Errc::SchemaError, "record " + std::to_string(i) + ": " + e.what());
    } catch (const json::exception& e) {
      throw Error(Errc::SchemaError, "record " + std::to_string(i) + ": " + e.what());
    }
    if (!ids.insert(out.back().id).second) {
      throw Error(Errc::SchemaError, "record " + std::to_string(i) + ": duplicate id '" + out.back().id + "'");
    }
  }
  return out;
}

inline std::vector<DatasetRecord> load_dataset(const std::string& path) {
  return parse_dataset(detail::read_json_file(path));
}

inline std::vector<PredictionRecord> parse_predictions(const json& j) {
  if (!j.is_array()) throw Error(Errc::SchemaError, "predictions must be a JSON array");
  std::vector<PredictionRecord> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& p = j[i];
    if (!p.is_object() || !p.contains("id") || !p.at("id").is_string() || !p.contains("program") ||
        !p.at("program").is_string()) {
      throw Error(Errc::SchemaError, "prediction " + std::to_string(i) + ": needs string 'id' and 'program'");
    }
    out.push_back({p.at("id").get<std::string>(), p.at("program").get<std::string>()});
  }
  return out;
}

inline std::vector<PredictionRecord> load_predictions(const std::string& path) {
  return parse_predictions(detail::read_json_file(path));
}

// ---------------------------------------------------------------------------
// Evaluation

struct RecordVerdict {
  std::string id;
  bool exec_correct = false;
  bool prog_correct = false;
  std::string predicted;  // executed answer, empty when execution failed
  std::string error_note;
};

struct EvalReport {
  double execution_accuracy = 0.0;
  double program_accuracy = 0.0;
  Tolerances tolerances;
  std::vector<RecordVerdict> records;
};

inline RecordVerdict evaluate_record(const DatasetRecord& rec, const std::string* prediction, const Tolerances& tol) {
  RecordVerdict v;
  v.id = rec.id;
  if (!prediction) {
    v.error_note = "missing prediction";
    return v;
  }
  Program pred;
  try {
    pred = parse_program(*prediction);
  } catch (const Error& e) {
    v.error_note = std::string("parse: ") + e.what();
    return v;
  }
  v.prog_correct = programs_equivalent(pred, rec.gold_program);
  try {
    Answer a = execute_program(pred, rec.table);
    v.predicted = to_string(a);
    v.exec_correct = compare_answers(a, rec.exe_ans, tol);
  } catch (const Error& e) {
    v.error_note = std::string("exec: ") + e.what();
  }
  return v;
}

/// Both accuracies are over all dataset records; a record without a prediction is wrong.
inline EvalReport evaluate(const std::vector<DatasetRecord>& dataset, const std::vector<PredictionRecord>& predictions,
                           const Tolerances& tol = {}) {
  std::map<std::string, const std::string*> by_id;
  for (const auto& p : predictions) by_id.try_emplace(p.id, &p.program);

  EvalReport report;
  report.tolerances = tol;
  std::size_t exec_ok = 0, prog_ok = 0;
  for (const auto& rec : dataset) {
    auto it = by_id.find(rec.id);
    report.records.push_back(evaluate_record(rec, it == by_id.end() ? nullptr : it->second, tol));
    exec_ok += report.records.back().exec_correct;
    prog_ok += report.records.back().prog_correct;
  }
  if (!dataset.empty()) {
    report.execution_accuracy = static_cast<double>(exec_ok) / static_cast<double>(dataset.size());
    report.program_accuracy = static_cast<double>(prog_ok) / static_cast<double>(dataset.size());
  }
  return report;
}

struct SelfCheckMismatch {
  std::string id;
  std::string computed;
  std::string expected;
};

struct SelfCheckReport {
  double fraction = 0.0;
  std::size_t matched = 0;
  std::size_t total = 0;
  std::vector<SelfCheckMismatch> mismatches;
};

/// Executes every gold program and compares with the stored answer.
inline SelfCheckReport gold_self_check(const std::vector<DatasetRecord>& dataset, const Tolerances& tol = {}) {
  SelfCheckReport r;
  r.total = dataset.size();
  for (const auto& rec : dataset) {
    std::string computed;
    bool ok = false;
    try {
      Answer a = execute_program(rec.gold_program, rec.table);
      computed = to_string(a);
      ok = compare_answers(a, rec.exe_ans, tol);
    } catch (const Error& e) {
      computed = e.what();
    }
    if (ok) {
      ++r.matched;
    } else {
      r.mismatches.push_back({rec.id, computed, rec.exe_ans_text});
    }
  }
  if (r.total) r.fraction = static_cast<double>(r.matched) / static_cast<double>(r.total);
  return r;
}

// ---------------------------------------------------------------------------
// Report formatting

inline double round6(double x) { return std::round(x * 1e6) / 1e6; }

inline ordered_json report_to_json(const EvalReport& r) {
  ordered_json j;
  j["execution_accuracy"] = round6(r.execution_accuracy);
  j["program_accuracy"] = round6(r.program_accuracy);
  j["tolerances"] = {{"abs_tol", r.tolerances.abs_tol},
                     {"rel_tol", r.tolerances.rel_tol},
                     {"percent_lenient", r.tolerances.percent_lenient}};
  ordered_json records = ordered_json::array();
  for (const auto& v : r.records) {
    records.push_back({{"id", v.id},
                       {"exec_correct", v.exec_correct},
                       {"prog_correct", v.prog_correct},
                       {"predicted", v.predicted},
                       {"error_note", v.error_note}});
  }
  j["records"] = std::move(records);
  return j;
}

inline std::string format_summary(const EvalReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "records: %zu\nexecution_accuracy: %.6f\nprogram_accuracy: %.6f\ntolerances: abs=%g rel=%g%s\n",
                r.records.size(), r.execution_accuracy, r.program_accuracy, r.tolerances.abs_tol, r.tolerances.rel_tol,
                r.tolerances.percent_lenient ? " percent-lenient" : "");
  return buf;
}

}  // namespace finqa
