#include "rhobound/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rhobound/errors.hpp"
#include "rhobound/sym_matrix.hpp"

namespace rhobound {

namespace {

std::vector<double> parse_row(const std::string& line, const std::string& path,
                              long row) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::string field = line.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    const char* begin = field.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    while (end && *end == ' ') ++end;
    if (end == begin || (end && *end != '\0'))
      throw ConfigError(path + ": row " + std::to_string(row) +
                        " has a non-numeric field '" + field + "'");
    out.push_back(value);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format_entry(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

Eigen::MatrixXd load_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::vector<std::vector<double>> rows;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(parse_row(line, path, lineno));
    if (rows.back().size() != rows.front().size())
      throw ConfigError(path + ": row " + std::to_string(lineno) + " has " +
                        std::to_string(rows.back().size()) +
                        " fields, expected " +
                        std::to_string(rows.front().size()));
  }
  if (rows.empty()) throw ConfigError(path + ": no data rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

void save_csv_matrix(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw ConfigError(path + ": cannot open for writing");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_entry(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw ConfigError(path + ": write failed");
}

ProbitLoad load_probit_csv(const std::string& path_X,
                           const std::string& path_y,
                           const std::string& path_Q,
                           const std::string& path_v) {
  ProbitLoad load;
  load.data.X = load_csv_matrix(path_X);
  const Eigen::Index n = load.data.X.rows();
  const Eigen::Index p = load.data.X.cols();

  const Eigen::MatrixXd ymat = load_csv_matrix(path_y);
  if (ymat.cols() != 1 || ymat.rows() != n)
    throw ConfigError(path_y + ": expected a single column of length " +
                      std::to_string(n));
  load.data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double yi = ymat(i, 0);
    if (yi != 0.0 && yi != 1.0)
      throw ConfigError(path_y + ": row " + std::to_string(i + 1) +
                        " has y value " + format_entry(yi) +
                        ", responses must be 0 or 1");
    load.data.y(i) = yi == 1.0 ? 1 : 0;
  }

  if (path_Q.empty()) {
    load.data.Q = Eigen::MatrixXd::Zero(p, p);
  } else {
    load.data.Q = load_csv_matrix(path_Q);
    if (load.data.Q.rows() != p || load.data.Q.cols() != p)
      throw ConfigError(path_Q + ": expected a " + std::to_string(p) + "x" +
                        std::to_string(p) + " matrix");
  }
  if (path_v.empty()) {
    load.data.v = Eigen::VectorXd::Zero(p);
  } else {
    const Eigen::MatrixXd vmat = load_csv_matrix(path_v);
    if (vmat.cols() != 1 || vmat.rows() != p)
      throw ConfigError(path_v + ": expected a single column of length " +
                        std::to_string(p));
    load.data.v = vmat.col(0);
  }

  const Eigen::MatrixXd sigma =
      load.data.X.transpose() * load.data.X + load.data.Q;
  const EigExtremes ext = eig_extremes(sigma);
  if (!(ext.min > p * 1e-12 * std::max(ext.max, 0.0)))
    load.warnings.push_back(
        "X'X + Q is numerically singular (lambda_min=" + format_entry(ext.min) +
        "); a positive-definite prior precision would repair it");
  return load;
}

void save_probit_csv(const ProbitData& data, const std::string& path_X,
                     const std::string& path_y, const std::string& path_Q,
                     const std::string& path_v) {
  save_csv_matrix(path_X, data.X);
  save_csv_matrix(path_y, data.y.cast<double>());
  save_csv_matrix(path_Q, data.Q);
  save_csv_matrix(path_v, data.v);
}

std::string report_json(const std::vector<AssumptionReport>& reports) {
  nlohmann::ordered_json root;
  root["schema"] = 1;
  root["reports"] = nlohmann::ordered_json::array();
  for (const AssumptionReport& rep : reports) {
    nlohmann::ordered_json item;
    item["assumption"] = assumption_name(rep.which);
    item["statistic"] = rep.statistic;
    item["se"] = rep.se;
    item["flag"] = flag_name(rep.flag);
    item["note"] = rep.note;
    root["reports"].push_back(item);
  }
  return root.dump(2) + "\n";
}

void save_report(const std::string& path,
                 const std::vector<AssumptionReport>& reports) {
  std::ofstream out(path);
  if (!out) throw ConfigError(path + ": cannot open for writing");
  out << report_json(reports);
  if (!out) throw ConfigError(path + ": write failed");
}

}  // namespace rhobound
