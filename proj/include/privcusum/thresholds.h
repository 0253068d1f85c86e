//
// Copyright 2026 The privcusum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef PRIVCUSUM_THRESHOLDS_H_
#define PRIVCUSUM_THRESHOLDS_H_

#include <cstdint>
#include <limits>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace privcusum {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct ThresholdParams {
  double gamma = 0.05;         // target false-alarm probability
  double alpha = 1.0;          // privacy budget
  double truncation_m = 1.0;   // response clamp level M
  double m0_bound = 1.0;       // sup-norm bound M0 on regression functions
  double sigma = 1.0;          // sub-Gaussian noise parameter
  double c_lip = 1.0;          // Lipschitz constant
  double c_min = 1.0;          // density floor
  double bin_width = 0.25;     // h
  int dim = 1;                 // d

  // Positivity and range checks shared by every schedule. sigma and c_lip
  // may be zero.
  absl::Status Validate() const;
};

// b_{s,t} for the privatised regression detector. Infinite unless
//   s(t-s)/t * c_min^2 h^(2d) alpha^2 >= 64 log(72 t^3 / (gamma c_min h^d)),
// otherwise
//   2 sqrt(s(t-s)/t) {2(M-M0) exp(-(M-M0)^2/(2 sigma^2)) + C_Lip sqrt(d) h}
//     + M / (c_min h^d alpha) sqrt(log(72 t^3 / (gamma c_min h^d))).
class PrivateThreshold {
 public:
  // Fails when M < M0 or the shared checks fail.
  static absl::StatusOr<PrivateThreshold> Create(const ThresholdParams& params);

  bool Active(int64_t s, int64_t t) const;
  double operator()(int64_t s, int64_t t) const;

  // Smallest t at which some split is active.
  int64_t FirstActiveTime() const;

  const ThresholdParams& params() const { return params_; }

 private:
  explicit PrivateThreshold(const ThresholdParams& params);
  double LogTerm(int64_t t) const;

  ThresholdParams params_;
  double cell_mass_;        // c_min h^d
  double activation_rate_;  // c_min^2 h^(2d) alpha^2
  double bias_;             // 2(M-M0)e^{...} + C_Lip sqrt(d) h
  double noise_coef_;       // M / (c_min h^d alpha)
};

// 2 sqrt(s(t-s)/t) C_Lip sqrt(d) h
//   + 4 sigma / sqrt(c_min h^d) sqrt(5 log t + log(32/gamma)).
class NonprivateThreshold {
 public:
  static absl::StatusOr<NonprivateThreshold> Create(const ThresholdParams& params);
  double operator()(int64_t s, int64_t t) const;

 private:
  NonprivateThreshold(double bias, double noise_coef, double gamma)
      : bias_(bias), noise_coef_(noise_coef), gamma_(gamma) {}

  double bias_;
  double noise_coef_;
  double gamma_;
};

// b_t = 2^{3/2} sqrt(sigma^2 + 4 (L/alpha)^2) sqrt(log(t / gamma)), t >= 2.
// L is the channel's interval length; L = 1 gives the textbook form.
class UnivariateThreshold {
 public:
  static absl::StatusOr<UnivariateThreshold> Create(double gamma, double sigma,
                                                    double alpha,
                                                    double interval_length = 1.0);
  double operator()(int64_t t) const;
  double operator()(int64_t /*s*/, int64_t t) const { return (*this)(t); }

 private:
  UnivariateThreshold(double coef, double gamma) : coef_(coef), gamma_(gamma) {}

  double coef_;
  double gamma_;
};

// Checked one-shot forms.
absl::StatusOr<double> ThresholdPrivate(int64_t s, int64_t t,
                                        const ThresholdParams& params);
absl::StatusOr<double> ThresholdNonprivate(int64_t s, int64_t t,
                                           const ThresholdParams& params);
absl::StatusOr<double> ThresholdUnivariate(int64_t t, double gamma,
                                           double sigma, double alpha);

// M1 = M0 + sigma sqrt(2 log(2 + sigma/h) + log log(2 + sigma/h)).
double M1TruncationFloor(double m0, double sigma, double h);

enum class DetectorKind { kPrivate, kNonprivate, kUnivariate };

struct SnrResult {
  bool pass;
  double ratio;  // lhs / (c_snr * log term)
  double lhs;
  double log_term;
};

// Signal-to-noise conditions:
//   private:    kappa^2 h^(2d) alpha^2 Delta / max(sigma^2, M0^2)
//                 >= C log(Delta / (c_min h^(2d) gamma))
//   nonprivate: kappa^2 h^d Delta / sigma^2 >= C log(Delta / (gamma h^d))
//   univariate: Delta kappa^2 / (sigma^2 + 4/alpha^2) >= C log(Delta / gamma)
absl::StatusOr<SnrResult> SnrCheck(DetectorKind kind, double kappa,
                                   double delta, const ThresholdParams& params,
                                   double c_snr);

// Theoretical detection-delay order, without its absolute constant:
//   private     M^2 / (kappa^2 h^{2d} alpha^2) * log(Delta / (h^{2d} c_min gamma))
//   nonprivate  sigma^2 / (kappa^2 h^d) * log(Delta / gamma)
//   univariate  (sigma^2 + 4 L^2 / alpha^2) * log(Delta / gamma) / kappa^2
// Multiply by C_eps (or C_d) to obtain a delay budget.
absl::StatusOr<double> DelayOrder(DetectorKind kind, double kappa, double delta,
                                  const ThresholdParams& params,
                                  double interval_length = 1.0);

}  // namespace privcusum

#endif  // PRIVCUSUM_THRESHOLDS_H_
