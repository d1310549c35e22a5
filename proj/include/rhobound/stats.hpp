#pragma once

#include <vector>

namespace rhobound {

struct LinearFit {
  double slope;
  double intercept;
  double r2;
};

// Ordinary least squares y ~ slope*x + intercept.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Two-sample Kolmogorov-Smirnov test; asymptotic p-value with the
// small-sample correction of Stephens. Inputs need not be sorted.
double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b);

struct MeanSe {
  double mean;
  double se;
};

MeanSe mean_se(const std::vector<double>& xs);

}  // namespace rhobound
