#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "rhobound/chains.hpp"
#include "rhobound/datagen.hpp"

namespace rhobound {

// Headerless numeric CSV -> matrix.  Ragged or non-numeric rows are rejected
// with the offending row index in the message.
Eigen::MatrixXd load_csv_matrix(const std::string& path);

// Writes with enough digits that load_csv_matrix restores every entry
// bit-for-bit.
void save_csv_matrix(const std::string& path, const Eigen::MatrixXd& m);

struct ProbitLoad {
  ProbitData data;
  std::vector<std::string> warnings;
};

// Assembles a probit instance from CSV files.  y must be a single 0/1
// column matching X's row count.  Omitted Q (empty path) means a flat prior;
// omitted v means a zero prior mean.  A singular X'X + Q is reported as a
// warning, not an error, since a caller may still swap in a stronger prior.
ProbitLoad load_probit_csv(const std::string& path_X,
                           const std::string& path_y,
                           const std::string& path_Q = "",
                           const std::string& path_v = "");

void save_probit_csv(const ProbitData& data, const std::string& path_X,
                     const std::string& path_y, const std::string& path_Q,
                     const std::string& path_v);

// Serializes check results as stable, diff-friendly JSON.
void save_report(const std::string& path,
                 const std::vector<AssumptionReport>& reports);

std::string report_json(const std::vector<AssumptionReport>& reports);

}  // namespace rhobound
