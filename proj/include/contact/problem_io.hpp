#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "contact/inverse_dynamics.hpp"
#include "contact/problem.hpp"

namespace contact {

/// Malformed JSON text. Line and column are 1-based.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string &what, std::size_t line, std::size_t column)
      : std::runtime_error(what), line_(line), column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

nlohmann::json parse_json(std::string_view text);
nlohmann::json read_json_file(const std::filesystem::path &path);

/// Shortest text with 17 significant digits ("%.17g").
std::string format_double(double x);
std::string format_vector(const Eigen::VectorXd &v);

/// Problem file schema:
///   { "n_c": int,
///     "G": {"dense": [row-major]} | {"sparse": [[i, j, v], ...]},
///     "g": [...], "mu": [...], "R_diag": [...], "warm_start": [...]? }
ContactProblem problem_from_json(const nlohmann::json &j);
ContactProblem read_problem(const std::filesystem::path &path);
std::string problem_to_json(const ContactProblem &problem);
void write_problem(const std::filesystem::path &path,
                   const ContactProblem &problem);

/// Inverse-dynamics file. The torque block is optional.
///   { "v_ref": [...], "J": [[row], ...], "gamma": [...]?, "R_diag": [...]?,
///     "mu": [...], "rho": 1e-8?,
///     "M": [[row], ...]?, "b": [...]?, "v": [...]?, "dt": 1e-3? }
struct IdCase {
  IdProblem problem;
  bool has_dynamics = false;
  MatrixXd M;
  VectorXd b;
  VectorXd v;
  double dt = 1e-3;
};

IdCase id_case_from_json(const nlohmann::json &j);

/// Array of rows.
Eigen::MatrixXd matrix_from_json(const nlohmann::json &rows);

/// Reads a vector stored either as a bare array or under `key`.
Eigen::VectorXd vector_from_json(const nlohmann::json &j,
                                 const std::string &key);

} // namespace contact
