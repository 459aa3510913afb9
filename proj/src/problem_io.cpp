#include "contact/problem_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace contact {

using nlohmann::json;

nlohmann::json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error &e) {
    // byte is 1-based and points one past the offending character
    const std::size_t offset =
        e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError("malformed JSON at line " + std::to_string(line) +
                         ", column " + std::to_string(column) + ": " +
                         e.what(),
                     line, column);
  }
}

nlohmann::json read_json_file(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x + 0.0); // no "-0"
  return buf;
}

std::string format_vector(const Eigen::VectorXd &v) {
  std::string out = "[";
  for (long i = 0; i < v.size(); ++i) {
    if (i)
      out += ", ";
    out += format_double(v[i]);
  }
  return out + "]";
}

Eigen::VectorXd vector_from_json(const nlohmann::json &j,
                                 const std::string &key) {
  const json &arr = j.is_array() ? j : j.at(key);
  const auto values = arr.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<long>(values.size()));
}

ContactProblem problem_from_json(const nlohmann::json &j) {
  try {
    const long nc = j.at("n_c").get<long>();
    const long n = 3 * nc;
    Eigen::VectorXd g = vector_from_json(j.at("g"), "g");
    Eigen::VectorXd mu = vector_from_json(j.at("mu"), "mu");
    Eigen::VectorXd R = j.contains("R_diag")
                            ? vector_from_json(j.at("R_diag"), "R_diag")
                            : Eigen::VectorXd::Zero(n);
    if (mu.size() != nc)
      throw std::invalid_argument("problem: mu must have n_c entries");
    const json &G = j.at("G");
    ContactProblem problem;
    if (G.contains("dense")) {
      const auto values = G.at("dense").get<std::vector<double>>();
      if (static_cast<long>(values.size()) != n * n)
        throw std::invalid_argument("problem: dense G must have (3 n_c)^2 "
                                    "entries");
      Eigen::MatrixXd dense =
          Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                         Eigen::RowMajor>>(values.data(), n, n);
      problem = ContactProblem(std::move(dense), g, mu, R);
    } else if (G.contains("sparse")) {
      std::vector<Eigen::Triplet<double>> triplets;
      for (const auto &t : G.at("sparse")) {
        const long i = t.at(0).get<long>(), k = t.at(1).get<long>();
        if (i < 0 || k < 0 || i >= n || k >= n)
          throw std::invalid_argument("problem: sparse G index out of range");
        triplets.emplace_back(i, k, t.at(2).get<double>());
      }
      SparseMatrix sparse(n, n);
      sparse.setFromTriplets(triplets.begin(), triplets.end());
      problem = ContactProblem(sparse, g, mu, R);
    } else {
      throw std::invalid_argument("problem: G needs a \"dense\" or \"sparse\" "
                                  "member");
    }
    if (j.contains("warm_start"))
      problem.set_warm_start(vector_from_json(j.at("warm_start"),
                                              "warm_start"));
    return problem;
  } catch (const json::exception &e) {
    throw std::invalid_argument(std::string("problem: ") + e.what());
  }
}

Eigen::MatrixXd matrix_from_json(const json &rows) {
  const auto data = rows.get<std::vector<std::vector<double>>>();
  const long r = static_cast<long>(data.size());
  const long c = r ? static_cast<long>(data[0].size()) : 0;
  Eigen::MatrixXd out(r, c);
  for (long i = 0; i < r; ++i) {
    if (static_cast<long>(data[i].size()) != c)
      throw std::invalid_argument("matrix rows must have equal length");
    for (long k = 0; k < c; ++k)
      out(i, k) = data[i][k];
  }
  return out;
}

IdCase id_case_from_json(const json &j) {
  try {
    IdCase out;
    IdProblem &p = out.problem;
    p.v_ref = vector_from_json(j.at("v_ref"), "v_ref");
    p.mu = vector_from_json(j.at("mu"), "mu");
    const long n = 3 * p.mu.size();
    p.J = j.at("J").empty() ? Eigen::MatrixXd(0, p.v_ref.size())
                            : matrix_from_json(j.at("J"));
    p.gamma = j.contains("gamma") ? vector_from_json(j.at("gamma"), "gamma")
                                  : Eigen::VectorXd::Zero(n);
    p.R_diag = j.contains("R_diag")
                   ? vector_from_json(j.at("R_diag"), "R_diag")
                   : Eigen::VectorXd::Zero(n);
    p.rho = j.value("rho", p.rho);
    p.validate();
    if (j.contains("M")) {
      out.has_dynamics = true;
      out.M = matrix_from_json(j.at("M"));
      const long nv = p.v_ref.size();
      out.b = j.contains("b") ? vector_from_json(j.at("b"), "b")
                              : Eigen::VectorXd::Zero(nv);
      out.v = j.contains("v") ? vector_from_json(j.at("v"), "v")
                              : Eigen::VectorXd::Zero(nv);
      out.dt = j.value("dt", out.dt);
      if (out.M.rows() != nv || out.M.cols() != nv || out.b.size() != nv ||
          out.v.size() != nv || !(out.dt > 0.0))
        throw std::invalid_argument("id: M, b, v must match v_ref and dt "
                                    "must be > 0");
    }
    return out;
  } catch (const json::exception &e) {
    throw std::invalid_argument(std::string("id: ") + e.what());
  }
}

ContactProblem read_problem(const std::filesystem::path &path) {
  return problem_from_json(read_json_file(path));
}

std::string problem_to_json(const ContactProblem &problem) {
  std::string out = "{\n  \"n_c\": " + std::to_string(problem.num_contacts()) +
                    ",\n  \"G\": {";
  if (problem.is_sparse()) {
    const SparseMatrix G = problem.sparse_delassus();
    out += "\"sparse\": [";
    bool first = true;
    for (int k = 0; k < G.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(G, k); it; ++it) {
        out += first ? "" : ", ";
        first = false;
        out += "[" + std::to_string(it.row()) + ", " +
               std::to_string(it.col()) + ", " + format_double(it.value()) +
               "]";
      }
    out += "]";
  } else {
    const Eigen::MatrixXd G = problem.dense_delassus();
    Eigen::VectorXd row_major(G.size());
    for (long i = 0; i < G.rows(); ++i)
      for (long k = 0; k < G.cols(); ++k)
        row_major[i * G.cols() + k] = G(i, k);
    out += "\"dense\": " + format_vector(row_major);
  }
  out += "},\n  \"g\": " + format_vector(problem.g());
  out += ",\n  \"mu\": " + format_vector(problem.mu());
  out += ",\n  \"R_diag\": " + format_vector(problem.R_diag());
  if (problem.warm_start())
    out += ",\n  \"warm_start\": " + format_vector(*problem.warm_start());
  return out + "\n}\n";
}

void write_problem(const std::filesystem::path &path,
                   const ContactProblem &problem) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << problem_to_json(problem);
}

} // namespace contact
