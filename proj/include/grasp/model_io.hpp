#pragma once

// JSON form of a fitted one-versus-rest CSP+LDA model.

#include <Eigen/Dense>

#include <vector>

#include <json.hpp>

#include "grasp/error.hpp"
#include "grasp/lda.hpp"

namespace grasp {

namespace detail {

inline nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
    rows.push_back(row);
  }
  return rows;
}

inline Eigen::MatrixXd matrix_from(const nlohmann::json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) return {};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) fail(ErrorKind::SchemaError, "ragged matrix");
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  return m;
}

inline nlohmann::json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline Eigen::VectorXd vector_from(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace detail

inline nlohmann::json to_json(const OvrModel& m) {
  nlohmann::json j;
  j["class_ids"] = m.class_ids;
  auto& per = j["per_class"] = nlohmann::json::array();
  for (const auto& p : m.per_class)
    per.push_back({{"csp",
                    {{"filters", detail::matrix_json(p.csp.filters)},
                     {"eigenvalues", detail::vector_json(p.csp.eigenvalues)},
                     {"m", p.csp.m},
                     {"log_epsilon", p.csp.log_epsilon}}},
                   {"lda", {{"w", detail::vector_json(p.lda.w)}, {"b", p.lda.b}}}});
  return j;
}

inline OvrModel ovr_model_from_json(const nlohmann::json& j) {
  try {
    OvrModel m;
    m.class_ids = j.at("class_ids").get<std::vector<int>>();
    for (const auto& p : j.at("per_class")) {
      OvrModel::Pair pair;
      pair.csp.filters = detail::matrix_from(p.at("csp").at("filters"));
      pair.csp.eigenvalues = detail::vector_from(p.at("csp").at("eigenvalues"));
      pair.csp.m = p.at("csp").at("m").get<int>();
      pair.csp.log_epsilon = p.at("csp").at("log_epsilon").get<double>();
      pair.lda.w = detail::vector_from(p.at("lda").at("w"));
      pair.lda.b = p.at("lda").at("b").get<double>();
      m.per_class.push_back(std::move(pair));
    }
    if (m.per_class.size() != m.class_ids.size()) fail(ErrorKind::SchemaError, "class_ids and per_class differ in length");
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::SchemaError, std::string("model: ") + e.what());
  }
}

}  // namespace grasp
