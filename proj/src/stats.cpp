#include "prefshare/stats.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "prefshare/rng.hpp"

namespace prefshare::stats {

namespace {

constexpr double kEps = 3e-15;
constexpr double kFpMin = 1e-300;

// Continued fraction for the incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw ContractError("incomplete beta continued fraction failed to converge");
}

// Series for the regularized lower incomplete gamma.
double gamma_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 1; n <= 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps)
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw ContractError("incomplete gamma series failed to converge");
}

// Continued fraction for the regularized upper incomplete gamma.
double gamma_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kFpMin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = b + an / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps)
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw ContractError("incomplete gamma continued fraction failed to converge");
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw ContractError("reg_inc_beta requires a,b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double reg_lower_gamma(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw ContractError("reg_lower_gamma domain error");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_series(a, x);
  return 1.0 - gamma_cf(a, x);
}

double reg_upper_gamma(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw ContractError("reg_upper_gamma domain error");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_series(a, x);
  return gamma_cf(a, x);
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw ContractError("t-distribution requires df > 0");
  if (t == 0.0) return 1.0;
  return reg_inc_beta(df / 2.0, 0.5, df / (df + t * t));
}

double chi_square_sf(double x, double df) {
  if (!(df > 0.0) || x < 0.0) throw ContractError("chi-square domain error");
  return reg_upper_gamma(df / 2.0, x / 2.0);
}

void SampleSummary::validate() const {
  if (n < 2) throw ValidationError("sample summary requires n >= 2");
  if (sd < 0.0) throw ValidationError("sample summary requires sd >= 0");
}

SampleSummary summarize(const std::vector<double>& xs) {
  if (xs.size() < 2) throw ValidationError("summarize requires n >= 2");
  SampleSummary s;
  s.n = xs.size();
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(s.n);
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  return s;
}

namespace {

void fill_tails(TTestResult& r) {
  r.p_two_sided = student_t_two_sided_p(r.t, r.df);
  r.p_one_sided = r.t >= 0.0 ? r.p_two_sided / 2.0 : 1.0 - r.p_two_sided / 2.0;
}

}  // namespace

TTestResult welch_t_from_summary(const SampleSummary& a, const SampleSummary& b) {
  a.validate();
  b.validate();
  if (a.sd == 0.0 && b.sd == 0.0)
    throw ValidationError("degenerate samples: both standard deviations are zero");
  const double va = a.sd * a.sd / static_cast<double>(a.n);
  const double vb = b.sd * b.sd / static_cast<double>(b.n);
  TTestResult r;
  r.variant = TTestVariant::Welch;
  r.t = (a.mean - b.mean) / std::sqrt(va + vb);
  r.df = (va + vb) * (va + vb) /
         (va * va / static_cast<double>(a.n - 1) + vb * vb / static_cast<double>(b.n - 1));
  fill_tails(r);
  return r;
}

TTestResult paired_t(const std::vector<double>& differences) {
  auto s = summarize(differences);
  TTestResult r;
  r.variant = TTestVariant::Paired;
  r.df = static_cast<double>(s.n - 1);
  if (s.sd == 0.0) {
    if (s.mean == 0.0) {
      r.t = 0.0;
      r.p_two_sided = 1.0;
      r.p_one_sided = 0.5;
      return r;
    }
    r.infinite_t = true;
    r.t = s.mean > 0.0 ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
    r.p_two_sided = 0.0;
    r.p_one_sided = s.mean > 0.0 ? 0.0 : 1.0;
    return r;
  }
  r.t = s.mean / (s.sd / std::sqrt(static_cast<double>(s.n)));
  fill_tails(r);
  return r;
}

double cohens_d(const SampleSummary& a, const SampleSummary& b) {
  a.validate();
  b.validate();
  const double na = static_cast<double>(a.n), nb = static_cast<double>(b.n);
  const double pooled =
      std::sqrt(((na - 1.0) * a.sd * a.sd + (nb - 1.0) * b.sd * b.sd) / (na + nb - 2.0));
  if (pooled == 0.0) throw ValidationError("degenerate samples: pooled sd is zero");
  return (a.mean - b.mean) / pooled;
}

double pearson_corr(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw ContractError("pearson_corr: length mismatch");
  if (xs.size() < 2) throw ContractError("pearson_corr requires n >= 2");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0)
    throw ValidationError("correlation undefined: a variable has zero variance");
  double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

// ---------------------------------------------------------------------------
// Linear mixed model with crossed random intercepts.
//
// Marginally y ~ N(X beta, sigma_e^2 * W) with
//   W = I + g_p Zp Zp' + g_m Zm Zm',   g = sigma^2 / sigma_e^2.
// Writing Z = [Zp Zm] and G = diag(g_p I_P, g_m I_M), Woodbury gives
//   W^-1 = I - Z G^1/2 (I + G^1/2 Z'Z G^1/2)^-1 G^1/2 Z'
//   log|W| = log|I + G^1/2 Z'Z G^1/2|
// so each likelihood evaluation only factors a (P+M) x (P+M) matrix, and
// beta and sigma_e^2 have closed forms given (g_p, g_m).
// ---------------------------------------------------------------------------

namespace {

struct LmmWork {
  int n = 0, p = 0, P = 0, M = 0;
  Eigen::MatrixXd ZtZ;  // (P+M) x (P+M)
  Eigen::MatrixXd ZtX;  // (P+M) x p
  Eigen::VectorXd Zty;  // P+M
  Eigen::MatrixXd XtX;  // p x p
  Eigen::VectorXd Xty;  // p
  double yty = 0.0;
  std::uint64_t fingerprint = 0;
};

struct LmmEval {
  double loglik = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd beta;
  double sigma2_e = 0.0;
};

LmmWork build_work(const std::vector<RatingRow>& data, bool include_condition) {
  if (data.empty()) throw ValidationError("fit_lmm requires data");
  std::map<UserId, int> pidx;
  std::map<ItemId, int> midx;
  for (const auto& row : data) {
    pidx.emplace(row.participant, 0);
    midx.emplace(row.item, 0);
  }
  if (pidx.size() < 2 || midx.size() < 2)
    throw ValidationError("fit_lmm requires at least 2 participants and 2 items");
  int next = 0;
  for (auto& [k, v] : pidx) v = next++;
  next = 0;
  for (auto& [k, v] : midx) v = next++;

  LmmWork w;
  w.n = static_cast<int>(data.size());
  w.p = include_condition ? 2 : 1;
  w.P = static_cast<int>(pidx.size());
  w.M = static_cast<int>(midx.size());
  const int q = w.P + w.M;
  w.ZtZ = Eigen::MatrixXd::Zero(q, q);
  w.ZtX = Eigen::MatrixXd::Zero(q, w.p);
  w.Zty = Eigen::VectorXd::Zero(q);
  w.XtX = Eigen::MatrixXd::Zero(w.p, w.p);
  w.Xty = Eigen::VectorXd::Zero(w.p);

  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& row : data) {
    if (row.condition != 0 && row.condition != 1)
      throw ValidationError("condition must be 0 or 1");
    if (!std::isfinite(row.rating)) throw ValidationError("non-finite rating");
    const int a = pidx.at(row.participant);
    const int b = w.P + midx.at(row.item);
    Eigen::VectorXd x(w.p);
    x(0) = 1.0;
    if (w.p == 2) x(1) = row.condition;

    w.ZtZ(a, a) += 1.0;
    w.ZtZ(b, b) += 1.0;
    w.ZtZ(a, b) += 1.0;
    w.ZtZ(b, a) += 1.0;
    w.ZtX.row(a) += x.transpose();
    w.ZtX.row(b) += x.transpose();
    w.Zty(a) += row.rating;
    w.Zty(b) += row.rating;
    w.XtX += x * x.transpose();
    w.Xty += x * row.rating;
    w.yty += row.rating * row.rating;

    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(row.rating));
    std::memcpy(&bits, &row.rating, sizeof(bits));
    h = mix64(h ^ bits);
    h = hash_str(row.participant, h);
    h = hash_str(row.item, h);
    h = mix64(h ^ static_cast<std::uint64_t>(row.condition));
  }
  w.fingerprint = h;
  return w;
}

// Profiled log-likelihood at variance ratios (g_p, g_m) >= 0.
LmmEval evaluate(const LmmWork& w, double g_p, double g_m) {
  const int q = w.P + w.M;
  Eigen::VectorXd root(q);
  for (int i = 0; i < q; ++i) root(i) = std::sqrt(i < w.P ? g_p : g_m);

  Eigen::MatrixXd Mq = root.asDiagonal() * w.ZtZ * root.asDiagonal();
  Mq += Eigen::MatrixXd::Identity(q, q);
  Eigen::LLT<Eigen::MatrixXd> llt(Mq);
  if (llt.info() != Eigen::Success) return {};

  double logdet = 0.0;
  const auto& L = llt.matrixLLT();
  for (int i = 0; i < q; ++i) logdet += 2.0 * std::log(L(i, i));

  const Eigen::MatrixXd Gx = root.asDiagonal() * w.ZtX;  // q x p
  const Eigen::VectorXd Gy = root.asDiagonal() * w.Zty;  // q
  const Eigen::MatrixXd MinvGx = llt.solve(Gx);
  const Eigen::VectorXd MinvGy = llt.solve(Gy);

  const Eigen::MatrixXd A = w.XtX - Gx.transpose() * MinvGx;       // X' W^-1 X
  const Eigen::VectorXd bvec = w.Xty - Gx.transpose() * MinvGy;    // X' W^-1 y
  const double yWy = w.yty - Gy.dot(MinvGy);                       // y' W^-1 y

  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  if (ldlt.info() != Eigen::Success) return {};
  LmmEval ev;
  ev.beta = ldlt.solve(bvec);
  double quad = yWy - 2.0 * ev.beta.dot(bvec) + ev.beta.dot(A * ev.beta);
  quad = std::max(quad, 1e-10);  // perfect fits would send log sigma2 to -inf
  ev.sigma2_e = quad / w.n;
  ev.loglik = -0.5 * (w.n * std::log(2.0 * M_PI * ev.sigma2_e) + logdet + w.n);
  return ev;
}

}  // namespace

LmmFit fit_lmm(const std::vector<RatingRow>& data, bool include_condition) {
  const LmmWork w = build_work(data, include_condition);

  // Objective over unconstrained theta = log(g); the boundary g = 0 is
  // checked separately since log-space cannot reach it.
  auto obj = [&w](double t1, double t2) { return evaluate(w, std::exp(t1), std::exp(t2)); };

  struct Point {
    double t1, t2;
    double val;
  };
  auto eval_pt = [&](double t1, double t2) { return Point{t1, t2, obj(t1, t2).loglik}; };

  Point best{0.0, 0.0, -std::numeric_limits<double>::infinity()};
  bool converged = false;
  const double starts[] = {-4.0, -1.0, 1.5};
  for (double s1 : starts) {
    for (double s2 : starts) {
      // Nelder-Mead on 2 parameters.
      std::vector<Point> simplex = {eval_pt(s1, s2), eval_pt(s1 + 0.7, s2), eval_pt(s1, s2 + 0.7)};
      auto order = [&] {
        std::sort(simplex.begin(), simplex.end(),
                  [](const Point& a, const Point& b) { return a.val > b.val; });
      };
      order();
      for (int iter = 0; iter < 400; ++iter) {
        if (simplex[0].val - simplex[2].val < 1e-8) {
          converged = true;
          break;
        }
        const double c1 = (simplex[0].t1 + simplex[1].t1) / 2.0;
        const double c2 = (simplex[0].t2 + simplex[1].t2) / 2.0;
        Point refl = eval_pt(c1 + (c1 - simplex[2].t1), c2 + (c2 - simplex[2].t2));
        if (refl.val > simplex[0].val) {
          Point exp_pt = eval_pt(c1 + 2.0 * (c1 - simplex[2].t1), c2 + 2.0 * (c2 - simplex[2].t2));
          simplex[2] = exp_pt.val > refl.val ? exp_pt : refl;
        } else if (refl.val > simplex[1].val) {
          simplex[2] = refl;
        } else {
          Point contr = eval_pt(c1 + 0.5 * (simplex[2].t1 - c1), c2 + 0.5 * (simplex[2].t2 - c2));
          if (contr.val > simplex[2].val) {
            simplex[2] = contr;
          } else {
            for (int i = 1; i < 3; ++i)
              simplex[i] = eval_pt((simplex[i].t1 + simplex[0].t1) / 2.0,
                                   (simplex[i].t2 + simplex[0].t2) / 2.0);
          }
        }
        order();
      }
      if (simplex[0].val > best.val) best = simplex[0];
    }
  }

  // Boundary candidates: either or both variance components exactly zero.
  double g1 = std::exp(best.t1), g2 = std::exp(best.t2);
  LmmEval chosen = evaluate(w, g1, g2);
  const std::pair<double, double> boundary[] = {{0.0, g2}, {g1, 0.0}, {0.0, 0.0}};
  for (auto [bp, bm] : boundary) {
    LmmEval ev = evaluate(w, bp, bm);
    if (ev.loglik > chosen.loglik) {
      chosen = ev;
      g1 = bp;
      g2 = bm;
    }
  }

  LmmFit fit;
  fit.beta_intercept = chosen.beta(0);
  if (include_condition) fit.beta_condition = chosen.beta(1);
  fit.sigma2_residual = chosen.sigma2_e;
  fit.sigma2_participant = g1 * chosen.sigma2_e;
  fit.sigma2_item = g2 * chosen.sigma2_e;
  fit.log_likelihood = chosen.loglik;
  fit.converged = converged;
  fit.data_fingerprint = w.fingerprint;
  if (!std::isfinite(fit.log_likelihood))
    throw LmmNonConvergence("fit_lmm: likelihood not finite at optimum", fit);
  if (!converged) throw LmmNonConvergence("fit_lmm: iteration budget exhausted", fit);
  return fit;
}

LrtResult likelihood_ratio_test(const LmmFit& full, const LmmFit& null_fit) {
  if (full.data_fingerprint != null_fit.data_fingerprint)
    throw ContractError("likelihood_ratio_test: fits come from different data");
  if (!full.beta_condition.has_value() || null_fit.beta_condition.has_value())
    throw ContractError("likelihood_ratio_test: expected condition model vs null model");
  LrtResult r;
  r.chi_square = std::max(0.0, 2.0 * (full.log_likelihood - null_fit.log_likelihood));
  r.df = 1;
  r.p = chi_square_sf(r.chi_square, 1.0);
  return r;
}

}  // namespace prefshare::stats
