#include "privmdp/mdp_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <unordered_map>

namespace privmdp {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string pair_key(const std::string& s, const std::string& a) { return s + "|" + a; }

[[noreturn]] void format_error(const std::string& what) { throw InvalidInput("MDP file: " + what); }

const json& member(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) format_error(std::string("missing \"") + key + "\"");
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) format_error("expected a number at " + where);
  return v.get<double>();
}

}  // namespace

std::string mdp_to_json(const Mdp& m) {
  ordered_json doc;
  doc["states"] = m.states();
  ordered_json actions = ordered_json::object();
  ordered_json rewards = ordered_json::object();
  ordered_json kernel = ordered_json::object();
  for (Index s = 0; s < m.num_states(); ++s) {
    const auto& name = m.states()[static_cast<std::size_t>(s)];
    actions[name] = m.actions(s);
    for (Index a = 0; a < m.num_actions(s); ++a) {
      const Index sa = m.pair(s, a);
      const auto key = pair_key(name, m.actions(s)[static_cast<std::size_t>(a)]);
      rewards[key] = m.rewards()[sa];
      std::vector<double> row(static_cast<std::size_t>(m.kernel().cols()));
      for (Index j = 0; j < m.kernel().cols(); ++j) row[static_cast<std::size_t>(j)] = m.kernel()(sa, j);
      kernel[key] = row;
    }
  }
  doc["actions"] = std::move(actions);
  doc["rewards"] = std::move(rewards);
  doc["kernel"] = std::move(kernel);
  if (m.horizon().is_finite())
    doc["horizon"] = ordered_json{{"finite", m.horizon().steps()}};
  else
    doc["horizon"] = "infinite";
  doc["discount"] = m.discount();
  if (m.horizon().is_finite()) {
    ordered_json terminal = ordered_json::object();
    for (Index s = 0; s < m.num_states(); ++s) terminal[m.states()[static_cast<std::size_t>(s)]] = m.terminal()[s];
    doc["terminal"] = std::move(terminal);
  }
  return doc.dump(2) + "\n";
}

Mdp mdp_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    format_error(std::string("parse error: ") + e.what());
  }

  const json& states_json = member(doc, "states");
  if (!states_json.is_array() || states_json.empty()) format_error("\"states\" must be a non-empty array");
  std::vector<std::string> states;
  std::unordered_map<std::string, Index> state_index;
  for (const auto& s : states_json) {
    if (!s.is_string()) format_error("state identifiers must be strings");
    const auto name = s.get<std::string>();
    if (!state_index.emplace(name, static_cast<Index>(states.size())).second) format_error("duplicate state " + name);
    states.push_back(name);
  }
  const auto n = static_cast<Index>(states.size());

  const json& actions_json = member(doc, "actions");
  std::vector<std::vector<std::string>> actions;
  for (const auto& s : states) {
    if (!actions_json.contains(s)) format_error("no action list for state " + s);
    const json& list = actions_json.at(s);
    if (!list.is_array()) format_error("action list of " + s + " must be an array");
    std::vector<std::string> names;
    for (const auto& a : list) {
      if (!a.is_string()) format_error("action identifiers must be strings");
      names.push_back(a.get<std::string>());
    }
    actions.push_back(std::move(names));
  }

  Index pairs = 0;
  for (const auto& list : actions) pairs += static_cast<Index>(list.size());
  VectorXd rewards(pairs);
  MatrixXd kernel(pairs, n);
  const json& rewards_json = member(doc, "rewards");
  const json& kernel_json = member(doc, "kernel");
  Index sa = 0;
  for (std::size_t s = 0; s < states.size(); ++s) {
    for (const auto& a : actions[s]) {
      const auto key = pair_key(states[s], a);
      if (!rewards_json.contains(key)) format_error("no reward for " + key);
      rewards[sa] = number(rewards_json.at(key), "rewards." + key);
      if (!kernel_json.contains(key)) format_error("no kernel row for " + key);
      const json& row = kernel_json.at(key);
      if (!row.is_array() || static_cast<Index>(row.size()) != n)
        format_error("kernel row " + key + " must list one probability per state");
      for (Index j = 0; j < n; ++j) kernel(sa, j) = number(row.at(static_cast<std::size_t>(j)), "kernel." + key);
      ++sa;
    }
  }

  const json& horizon_json = member(doc, "horizon");
  Horizon horizon = Horizon::infinite();
  if (horizon_json.is_object() && horizon_json.contains("finite") && horizon_json.at("finite").is_number_integer()) {
    horizon = Horizon::finite(horizon_json.at("finite").get<int>());
  } else if (!(horizon_json.is_string() && horizon_json.get<std::string>() == "infinite")) {
    format_error("\"horizon\" must be {\"finite\": T} or \"infinite\"");
  }
  const double discount = number(member(doc, "discount"), "discount");

  VectorXd terminal = VectorXd::Zero(n);
  if (doc.contains("terminal")) {
    const json& terminal_json = doc.at("terminal");
    for (Index s = 0; s < n; ++s) {
      const auto& name = states[static_cast<std::size_t>(s)];
      if (terminal_json.contains(name)) terminal[s] = number(terminal_json.at(name), "terminal." + name);
      else if (horizon.is_finite()) format_error("no terminal reward for state " + name);
    }
  } else if (horizon.is_finite()) {
    format_error("finite-horizon models need \"terminal\"");
  }
  return Mdp(std::move(states), std::move(actions), std::move(rewards), std::move(kernel), horizon, discount,
             std::move(terminal));
}

Mdp load_mdp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return mdp_from_json(buffer.str());
}

void save_mdp(const Mdp& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << mdp_to_json(m);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace privmdp
