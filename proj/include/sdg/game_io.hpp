#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sdg/error.hpp"
#include "sdg/game_model.hpp"

// Game files are JSON objects:
//
//   states    array of names
//   signals   array of names
//   partition {state: signal}          (partition games)
//   general   true                     (general games, instead of partition)
//   actions1  {signal: [names]} for partition games, [names] for general ones
//   actions2  same shape as actions1
//   payoff    {action1: {action2: {state: number}}}, missing entries are 0
//   dynamics  {"kind": "kernel" | "transition" | "general",
//              "entries": {state: {action1: {action2: {state': x}}}}}
//             where x is a number, or {signal: number} for "general".
//   name      optional string
//
// Unknown keys are rejected anywhere in the document.

namespace sdg {

using AnyGame = std::variant<PartitionSignalGame, GeneralSignalGame>;
using Json = nlohmann::ordered_json;

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& msg) { fail(ErrorCode::kParseError, msg); }

inline void only_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) parse_fail(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) parse_fail("unknown field '" + it.key() + "' in " + where);
  }
}

inline const Json& need(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) parse_fail("missing field '" + std::string(key) + "' in " + where);
  return *it;
}

inline std::vector<std::string> name_list(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) parse_fail(where + " must be a nonempty array of names");
  std::vector<std::string> out;
  for (const Json& x : j) {
    if (!x.is_string()) parse_fail(where + " must hold strings");
    const std::string s = x.get<std::string>();
    for (const std::string& prev : out)
      if (prev == s) parse_fail("duplicate name '" + s + "' in " + where);
    out.push_back(s);
  }
  return out;
}

inline std::size_t lookup(const std::vector<std::string>& names, const std::string& key, const std::string& where) {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == key) return k;
  parse_fail("unknown name '" + key + "' in " + where);
}

inline double number(const Json& j, const std::string& where) {
  if (!j.is_number()) parse_fail(where + " must be a number");
  return j.get<double>();
}

inline const Json& object(const Json& j, const std::string& where) {
  if (!j.is_object()) parse_fail(where + " must be an object");
  return j;
}

inline PartitionSignalGame parse_partition(const Json& doc) {
  const auto states = name_list(need(doc, "states", "game"), "states");
  const auto signals = name_list(need(doc, "signals", "game"), "signals");
  const Json& part = object(need(doc, "partition", "game"), "partition");
  std::vector<std::size_t> partition(states.size(), signals.size());
  for (auto it = part.begin(); it != part.end(); ++it) {
    if (!it.value().is_string()) parse_fail("partition values must be signal names");
    partition[lookup(states, it.key(), "partition")] = lookup(signals, it.value().get<std::string>(), "partition");
  }
  for (std::size_t w = 0; w < states.size(); ++w)
    if (partition[w] == signals.size()) parse_fail("partition misses state '" + states[w] + "'");
  auto per_signal = [&](const char* key) {
    const Json& a = object(need(doc, key, "game"), key);
    std::vector<std::vector<std::string>> out(signals.size());
    for (auto it = a.begin(); it != a.end(); ++it)
      out[lookup(signals, it.key(), key)] = name_list(it.value(), std::string(key) + "." + it.key());
    for (std::size_t s = 0; s < signals.size(); ++s)
      if (out[s].empty()) parse_fail(std::string(key) + " misses signal '" + signals[s] + "'");
    return out;
  };
  auto actions1 = per_signal("actions1");
  auto actions2 = per_signal("actions2");
  const Json& dyn = need(doc, "dynamics", "game");
  only_keys(dyn, {"kind", "entries"}, "dynamics");
  const Json& kind_j = need(dyn, "kind", "dynamics");
  if (!kind_j.is_string()) parse_fail("dynamics.kind must be a string");
  const std::string kind_s = kind_j.get<std::string>();
  DynamicsKind kind;
  if (kind_s == "kernel") kind = DynamicsKind::kKernel;
  else if (kind_s == "transition") kind = DynamicsKind::kTransition;
  else parse_fail("dynamics.kind must be kernel or transition for partition games");
  PartitionSignalGame g = PartitionSignalGame::create(states, signals, partition, actions1, actions2, kind);
  // create() fills identity rows for transitions; files list every entry.
  for (auto& d : g.dynamics) std::fill(d.begin(), d.end(), 0.0);

  const Json& pay = object(need(doc, "payoff", "game"), "payoff");
  for (auto i = pay.begin(); i != pay.end(); ++i)
    for (auto j = object(i.value(), "payoff." + i.key()).begin(); j != i.value().end(); ++j)
      for (auto w = object(j.value(), "payoff." + i.key() + "." + j.key()).begin(); w != j.value().end(); ++w) {
        const std::size_t ws = lookup(states, w.key(), "payoff");
        const std::size_t cls = partition[ws];
        const std::string where = "payoff." + i.key() + "." + j.key() + "." + w.key();
        g.g(ws, lookup(actions1[cls], i.key(), where), lookup(actions2[cls], j.key(), where)) = number(w.value(), where);
      }
  const Json& entries = object(need(dyn, "entries", "dynamics"), "dynamics.entries");
  for (auto w = entries.begin(); w != entries.end(); ++w) {
    const std::size_t ws = lookup(states, w.key(), "dynamics.entries");
    const std::size_t cls = partition[ws];
    for (auto i = object(w.value(), "entries." + w.key()).begin(); i != w.value().end(); ++i)
      for (auto j = object(i.value(), "entries." + w.key() + "." + i.key()).begin(); j != i.value().end(); ++j) {
        const std::string where = "entries." + w.key() + "." + i.key() + "." + j.key();
        auto row = g.row(ws, lookup(actions1[cls], i.key(), where), lookup(actions2[cls], j.key(), where));
        for (auto v = object(j.value(), where).begin(); v != j.value().end(); ++v)
          row[lookup(states, v.key(), where)] = number(v.value(), where + "." + v.key());
      }
  }
  return g;
}

inline GeneralSignalGame parse_general(const Json& doc) {
  const auto states = name_list(need(doc, "states", "game"), "states");
  const auto signals = name_list(need(doc, "signals", "game"), "signals");
  const auto actions1 = name_list(need(doc, "actions1", "game"), "actions1");
  const auto actions2 = name_list(need(doc, "actions2", "game"), "actions2");
  GeneralSignalGame g = GeneralSignalGame::create(states, signals, actions1, actions2);
  const Json& dyn = need(doc, "dynamics", "game");
  only_keys(dyn, {"kind", "entries"}, "dynamics");
  const Json& kind_j = need(dyn, "kind", "dynamics");
  if (!kind_j.is_string() || kind_j.get<std::string>() != "general")
    parse_fail("dynamics.kind must be general for general games");
  const Json& pay = object(need(doc, "payoff", "game"), "payoff");
  for (auto i = pay.begin(); i != pay.end(); ++i)
    for (auto j = object(i.value(), "payoff." + i.key()).begin(); j != i.value().end(); ++j)
      for (auto w = object(j.value(), "payoff." + i.key() + "." + j.key()).begin(); w != j.value().end(); ++w) {
        const std::string where = "payoff." + i.key() + "." + j.key() + "." + w.key();
        g.g(lookup(states, w.key(), where), lookup(actions1, i.key(), where), lookup(actions2, j.key(), where)) =
            number(w.value(), where);
      }
  for (auto& per_state : g.transitions)
    for (auto& outs : per_state) outs.clear();
  const Json& entries = object(need(dyn, "entries", "dynamics"), "dynamics.entries");
  for (auto w = entries.begin(); w != entries.end(); ++w) {
    const std::size_t ws = lookup(states, w.key(), "dynamics.entries");
    for (auto i = object(w.value(), "entries." + w.key()).begin(); i != w.value().end(); ++i)
      for (auto j = object(i.value(), "entries." + w.key() + "." + i.key()).begin(); j != i.value().end(); ++j) {
        const std::string where = "entries." + w.key() + "." + i.key() + "." + j.key();
        auto& outs = g.outcomes(ws, lookup(actions1, i.key(), where), lookup(actions2, j.key(), where));
        for (auto v = object(j.value(), where).begin(); v != j.value().end(); ++v)
          for (auto a = object(v.value(), where + "." + v.key()).begin(); a != v.value().end(); ++a) {
            const std::string at = where + "." + v.key() + "." + a.key();
            const double prob = number(a.value(), at);
            if (prob != 0.0) outs.push_back({lookup(states, v.key(), at), lookup(signals, a.key(), at), prob});
          }
      }
  }
  canonicalize(g);
  return g;
}

}  // namespace detail

// Parses and validates; ParseError for schema problems, InvalidGame for
// games that parse but violate the model invariants.
inline AnyGame parse_game(const Json& doc) {
  if (!doc.is_object()) detail::parse_fail("game document must be an object");
  const bool general = doc.contains("general");
  if (general) {
    detail::only_keys(doc, {"name", "general", "states", "signals", "actions1", "actions2", "payoff", "dynamics"},
                      "game");
    const Json& flag = doc["general"];
    if (!flag.is_boolean() || !flag.get<bool>()) detail::parse_fail("'general' must be true when present");
    GeneralSignalGame g = detail::parse_general(doc);
    require_valid(g);
    return g;
  }
  detail::only_keys(doc, {"name", "states", "signals", "partition", "actions1", "actions2", "payoff", "dynamics"},
                    "game");
  PartitionSignalGame g = detail::parse_partition(doc);
  require_valid(g);
  return g;
}

inline AnyGame parse_game(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    detail::parse_fail(std::string("malformed JSON: ") + e.what());
  }
  return parse_game(doc);
}

inline AnyGame load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) detail::parse_fail("cannot open game file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_game(ss.str());
}

inline Json to_json(const PartitionSignalGame& g, const std::string& name = "") {
  Json doc;
  if (!name.empty()) doc["name"] = name;
  doc["states"] = g.states;
  doc["signals"] = g.signals;
  Json part = Json::object();
  for (std::size_t w = 0; w < g.num_states(); ++w) part[g.states[w]] = g.signals[g.partition[w]];
  doc["partition"] = part;
  Json a1 = Json::object(), a2 = Json::object();
  for (std::size_t s = 0; s < g.num_signals(); ++s) {
    a1[g.signals[s]] = g.actions1[s];
    a2[g.signals[s]] = g.actions2[s];
  }
  doc["actions1"] = a1;
  doc["actions2"] = a2;
  Json pay = Json::object();
  for (std::size_t w = 0; w < g.num_states(); ++w) {
    const std::size_t cls = g.partition[w];
    for (std::size_t i = 0; i < g.rows(w); ++i)
      for (std::size_t j = 0; j < g.cols(w); ++j)
        pay[g.actions1[cls][i]][g.actions2[cls][j]][g.states[w]] = g.g(w, i, j);
  }
  doc["payoff"] = pay;
  Json entries = Json::object();
  for (std::size_t w = 0; w < g.num_states(); ++w) {
    const std::size_t cls = g.partition[w];
    for (std::size_t i = 0; i < g.rows(w); ++i)
      for (std::size_t j = 0; j < g.cols(w); ++j) {
        Json row = Json::object();
        auto r = g.row(w, i, j);
        for (std::size_t v = 0; v < g.num_states(); ++v)
          if (r[v] != 0.0) row[g.states[v]] = r[v];
        entries[g.states[w]][g.actions1[cls][i]][g.actions2[cls][j]] = row;
      }
  }
  doc["dynamics"] = {{"kind", g.kind == DynamicsKind::kKernel ? "kernel" : "transition"}, {"entries", entries}};
  return doc;
}

inline Json to_json(const GeneralSignalGame& g, const std::string& name = "") {
  Json doc;
  if (!name.empty()) doc["name"] = name;
  doc["general"] = true;
  doc["states"] = g.states;
  doc["signals"] = g.signals;
  doc["actions1"] = g.actions1;
  doc["actions2"] = g.actions2;
  Json pay = Json::object();
  for (std::size_t w = 0; w < g.num_states(); ++w)
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j) pay[g.actions1[i]][g.actions2[j]][g.states[w]] = g.g(w, i, j);
  doc["payoff"] = pay;
  Json entries = Json::object();
  for (std::size_t w = 0; w < g.num_states(); ++w)
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j) {
        Json row = Json::object();
        for (const Outcome& o : g.outcomes(w, i, j)) row[g.states[o.state]][g.signals[o.signal]] = o.prob;
        entries[g.states[w]][g.actions1[i]][g.actions2[j]] = row;
      }
  doc["dynamics"] = {{"kind", "general"}, {"entries", entries}};
  return doc;
}

inline Json to_json(const AnyGame& g, const std::string& name = "") {
  return std::visit([&](const auto& x) { return to_json(x, name); }, g);
}

inline void save_game(const AnyGame& g, const std::string& path, const std::string& name = "") {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kInvalidArgument, "cannot write " + path);
  out << to_json(g, name).dump(2) << '\n';
}

}  // namespace sdg
