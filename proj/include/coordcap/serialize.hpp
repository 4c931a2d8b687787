// JSON serialization for pmfs and kernels.
//
// Schema (shared by both):
//   {"variables":[{"name":"X","symbols":["0","1"]},...],
//    "mass":[{"tuple":["0","1"],"p":0.25},...]}
// Tuples are symbol labels in variable order; omitted tuples carry zero
// mass. For a kernel the last variable is the output and "p" holds the
// conditional probability of that output given the preceding inputs.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "coordcap/joint_pmf.hpp"

namespace coordcap {

using json = nlohmann::json;

inline json to_json(const Alphabet& a) {
  return json{{"name", a.name()}, {"symbols", a.symbols()}};
}

inline Alphabet alphabet_from_json(const json& j) {
  return Alphabet(j.at("name").get<std::string>(),
                  j.at("symbols").get<std::vector<std::string>>());
}

inline json to_json(const JointPmf& p) {
  json vars = json::array();
  for (const auto& v : p.variables()) vars.push_back(to_json(v));
  json mass = json::array();
  std::vector<SymIdx> tuple;
  for (std::size_t cell = 0; cell < p.size(); ++cell) {
    if (p.mass(cell) == 0.0) continue;
    p.decode(cell, tuple);
    json labels = json::array();
    for (std::size_t i = 0; i < tuple.size(); ++i)
      labels.push_back(p.variables()[i].symbol(tuple[i]));
    mass.push_back(json{{"tuple", labels}, {"p", p.mass(cell)}});
  }
  return json{{"variables", vars}, {"mass", mass}};
}

inline JointPmf joint_pmf_from_json(const json& j) {
  std::vector<Alphabet> vars;
  for (const auto& v : j.at("variables")) vars.push_back(alphabet_from_json(v));
  std::size_t cells = 1;
  for (const auto& v : vars) cells *= v.size();
  std::vector<double> mass(cells, 0.0);
  std::vector<std::size_t> strides(vars.size());
  std::size_t s = 1;
  for (std::size_t i = vars.size(); i-- > 0;) {
    strides[i] = s;
    s *= vars[i].size();
  }
  for (const auto& entry : j.at("mass")) {
    const auto& labels = entry.at("tuple");
    if (labels.size() != vars.size())
      throw std::invalid_argument("pmf json: tuple arity mismatch");
    std::size_t cell = 0;
    for (std::size_t i = 0; i < vars.size(); ++i)
      cell += vars[i].index_of(labels[i].get<std::string>()) * strides[i];
    mass[cell] = entry.at("p").get<double>();
  }
  return JointPmf(std::move(vars), std::move(mass));
}

inline json to_json(const Kernel& k) {
  json vars = json::array();
  for (const auto& v : k.inputs()) vars.push_back(to_json(v));
  vars.push_back(to_json(k.output()));
  json mass = json::array();
  const std::size_t out_n = k.output().size();
  std::vector<SymIdx> in_tuple(k.inputs().size());
  for (std::size_t r = 0; r < k.input_cells(); ++r) {
    std::size_t rem = r;
    for (std::size_t i = k.inputs().size(); i-- > 0;) {
      in_tuple[i] = static_cast<SymIdx>(rem % k.inputs()[i].size());
      rem /= k.inputs()[i].size();
    }
    const auto row = k.row(r);
    for (std::size_t o = 0; o < out_n; ++o) {
      if (row[o] == 0.0) continue;
      json labels = json::array();
      for (std::size_t i = 0; i < in_tuple.size(); ++i)
        labels.push_back(k.inputs()[i].symbol(in_tuple[i]));
      labels.push_back(k.output().symbol(static_cast<SymIdx>(o)));
      mass.push_back(json{{"tuple", labels}, {"p", row[o]}});
    }
  }
  return json{{"variables", vars}, {"mass", mass}};
}

inline Kernel kernel_from_json(const json& j) {
  std::vector<Alphabet> vars;
  for (const auto& v : j.at("variables")) vars.push_back(alphabet_from_json(v));
  if (vars.size() < 2) throw std::invalid_argument("kernel json: needs inputs and an output");
  Alphabet output = vars.back();
  vars.pop_back();
  std::size_t cells = 1;
  for (const auto& v : vars) cells *= v.size();
  std::vector<double> rows(cells * output.size(), 0.0);
  for (const auto& entry : j.at("mass")) {
    const auto& labels = entry.at("tuple");
    if (labels.size() != vars.size() + 1)
      throw std::invalid_argument("kernel json: tuple arity mismatch");
    std::size_t cell = 0;
    for (std::size_t i = 0; i < vars.size(); ++i)
      cell = cell * vars[i].size() + vars[i].index_of(labels[i].get<std::string>());
    const SymIdx o = output.index_of(labels[vars.size()].get<std::string>());
    rows[cell * output.size() + o] = entry.at("p").get<double>();
  }
  return Kernel(std::move(vars), std::move(output), std::move(rows));
}

}  // namespace coordcap
