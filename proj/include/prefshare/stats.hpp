#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prefshare/core.hpp"

namespace prefshare::stats {

// Regularized incomplete beta I_x(a,b) and regularized incomplete gamma
// P(a,x)/Q(a,x), series + continued-fraction evaluation, relative error
// well under 1e-10 over the tested range.
double reg_inc_beta(double a, double b, double x);
double reg_lower_gamma(double a, double x);
double reg_upper_gamma(double a, double x);

// Two-sided tail probability of Student's t with (possibly fractional) df.
double student_t_two_sided_p(double t, double df);
// Survival function of the chi-square distribution.
double chi_square_sf(double x, double df);

struct SampleSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation, n-1 denominator

  void validate() const;  // n >= 2, sd >= 0
};

SampleSummary summarize(const std::vector<double>& xs);

enum class TTestVariant { Welch, Pooled, Paired };

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p_two_sided = 1.0;
  double p_one_sided = 0.5;  // upper tail, P(T >= t)
  TTestVariant variant = TTestVariant::Welch;
  bool infinite_t = false;   // zero variance with nonzero mean difference
};

// Unpaired t-test with the Welch-Satterthwaite df.
TTestResult welch_t_from_summary(const SampleSummary& a, const SampleSummary& b);

// t = mean(d) / (sd(d)/sqrt(n)), df = n-1. Both tails are reported.
TTestResult paired_t(const std::vector<double>& differences);

// (mean_a - mean_b) / pooled sd.
double cohens_d(const SampleSummary& a, const SampleSummary& b);

double pearson_corr(const std::vector<double>& xs, const std::vector<double>& ys);

// One observation of the rating model: rating ~ condition + random intercepts
// for participant and item.
struct RatingRow {
  double rating = 0.0;
  UserId participant;
  ItemId item;
  int condition = 0;  // 0/1
};

struct LmmFit {
  double beta_intercept = 0.0;
  std::optional<double> beta_condition;  // absent in the null model
  double sigma2_participant = 0.0;
  double sigma2_item = 0.0;
  double sigma2_residual = 0.0;
  double log_likelihood = 0.0;  // maximized ML log-likelihood
  bool converged = false;
  std::uint64_t data_fingerprint = 0;
};

class LmmNonConvergence : public std::runtime_error {
 public:
  LmmNonConvergence(std::string msg, LmmFit best) : std::runtime_error(std::move(msg)), best_fit(std::move(best)) {}
  LmmFit best_fit;
};

// Maximum-likelihood fit of the crossed random-intercepts Gaussian model
//   rating = b0 [+ b1*condition] + u_participant + v_item + eps.
// beta and the residual variance are profiled out analytically; the two
// variance ratios are optimized over log-parameters (Nelder-Mead with
// boundary candidates), converging when the log-likelihood improves by
// less than 1e-8.
LmmFit fit_lmm(const std::vector<RatingRow>& data, bool include_condition);

struct LrtResult {
  double chi_square = 0.0;
  int df = 1;
  double p = 1.0;
};

// 2*(l_full - l_null), clamped at zero, against chi-square with df 1.
// Both fits must carry the same data fingerprint.
LrtResult likelihood_ratio_test(const LmmFit& full, const LmmFit& null_fit);

}  // namespace prefshare::stats
