#pragma once

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lorgh/core.hpp"

namespace lorgh {

using json = nlohmann::json;

inline json to_json(const FiniteLorentzSpace& s) {
  const std::size_t n = s.size();
  json j;
  j["points"] = s.points.empty() ? default_ids(n) : s.points;
  json sig = json::array();
  for (Index i = 0; i < n; ++i) sig.push_back(std::vector<double>(s.sigma.row(i).begin(), s.sigma.row(i).end()));
  j["sigma"] = std::move(sig);
  if (s.causal) {
    json c = json::array();
    for (Index i = 0; i < n; ++i) {
      std::vector<bool> r(n);
      for (Index k = 0; k < n; ++k) r[k] = s.causal->test(i, k);
      c.push_back(r);
    }
    j["causal"] = std::move(c);
  }
  if (s.mu) j["mu"] = *s.mu;
  if (s.labels) j["labels"] = *s.labels;
  return j;
}

inline BitMatrix bool_matrix_from_json(const json& rows, std::size_t n, const char* what) {
  if (!rows.is_array() || rows.size() != n) throw MalformedInput(std::string(what) + " is not " + std::to_string(n) + " rows");
  BitMatrix m(n);
  for (Index i = 0; i < n; ++i) {
    if (!rows[i].is_array() || rows[i].size() != n) throw MalformedInput(std::string(what) + " is not square");
    for (Index k = 0; k < n; ++k) {
      const json& v = rows[i][k];
      const bool b = v.is_boolean() ? v.get<bool>() : v.get<int>() != 0;
      if (b) m.set(i, k);
    }
  }
  return m;
}

inline FiniteLorentzSpace space_from_json(const json& j) {
  try {
    FiniteLorentzSpace s;
    const json& sig = j.at("sigma");
    if (!sig.is_array()) throw MalformedInput("sigma must be an array");
    const std::size_t n = sig.size();
    s.sigma = SquareMatrix<double>(n);
    for (Index i = 0; i < n; ++i) {
      if (!sig[i].is_array() || sig[i].size() != n) throw MalformedInput("sigma is not square");
      for (Index k = 0; k < n; ++k) {
        if (!sig[i][k].is_number()) throw MalformedInput("sigma has a non-numeric entry");
        s.sigma(i, k) = sig[i][k].get<double>();
      }
    }
    if (j.contains("points")) {
      for (const auto& p : j["points"]) s.points.push_back(p.is_string() ? p.get<std::string>() : p.dump());
    } else {
      s.points = default_ids(n);
    }
    if (j.contains("causal") && !j["causal"].is_null()) s.causal = bool_matrix_from_json(j["causal"], n, "causal");
    if (j.contains("mu") && !j["mu"].is_null()) s.mu = j["mu"].get<std::vector<double>>();
    if (j.contains("labels") && !j["labels"].is_null()) s.labels = j["labels"].get<std::vector<Coords>>();
    check_shape(s);
    return s;
  } catch (const json::exception& e) {
    throw MalformedInput(std::string("space json: ") + e.what());
  }
}

// A POM file uses the space format: "causal" is the order (derived from sigma
// when absent) and "mu" the weights (unit weights when absent).
inline FinitePOM pom_from_json(const json& j) {
  FinitePOM p;
  if (j.contains("sigma")) {
    FiniteLorentzSpace s = space_from_json(j);
    p.points = s.points;
    p.leq = derived_causal(s);
    p.mu = s.mu ? *s.mu : std::vector<double>(s.size(), 1.0);
  } else {
    const std::size_t n = j.at("causal").size();
    p.leq = bool_matrix_from_json(j["causal"], n, "causal");
    p.points = j.contains("points") ? j["points"].get<std::vector<std::string>>() : default_ids(n);
    p.mu = j.contains("mu") ? j["mu"].get<std::vector<double>>() : std::vector<double>(n, 1.0);
  }
  check_pom(p);
  return p;
}

inline json to_json(const FiniteMetricSpace& m) {
  json j;
  j["points"] = m.points.empty() ? default_ids(m.size()) : m.points;
  json d = json::array();
  for (Index i = 0; i < m.size(); ++i) {
    json r = json::array();
    for (double v : m.d.row(i)) r.push_back(std::isinf(v) ? json(nullptr) : json(v));
    d.push_back(std::move(r));
  }
  j["d"] = std::move(d);
  return j;
}

// null entries stand for the +infinity sentinel
inline FiniteMetricSpace metric_from_json(const json& j) {
  try {
    FiniteMetricSpace m;
    const json& d = j.at("d");
    const std::size_t n = d.size();
    m.d = SquareMatrix<double>(n);
    for (Index i = 0; i < n; ++i) {
      if (d[i].size() != n) throw MalformedInput("metric is not square");
      for (Index k = 0; k < n; ++k) m.d(i, k) = d[i][k].is_null() ? kInf : d[i][k].get<double>();
    }
    m.points = j.contains("points") ? j["points"].get<std::vector<std::string>>() : default_ids(n);
    check_metric(m);
    return m;
  } catch (const json::exception& e) {
    throw MalformedInput(std::string("metric json: ") + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw MalformedInput(path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << text;
}

inline std::string matrix_csv(const SquareMatrix<double>& m, const std::vector<std::string>& ids) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "id";
  for (const auto& id : ids) os << ',' << id;
  os << '\n';
  for (Index i = 0; i < m.size(); ++i) {
    os << ids[i];
    for (double v : m.row(i)) {
      os << ',';
      if (std::isinf(v)) os << "inf";
      else os << v;
    }
    os << '\n';
  }
  return os.str();
}

inline std::string relation_csv(const BitMatrix& m, const std::vector<std::string>& ids) {
  std::ostringstream os;
  os << "id";
  for (const auto& id : ids) os << ',' << id;
  os << '\n';
  for (Index i = 0; i < m.size(); ++i) {
    os << ids[i];
    for (Index k = 0; k < m.size(); ++k) os << ',' << (m.test(i, k) ? 1 : 0);
    os << '\n';
  }
  return os.str();
}

}  // namespace lorgh
