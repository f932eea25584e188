#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sraug/error.hpp"
#include "sraug/spectral.hpp"

// Training objectives of a CVAE voice-conversion model with GAN training.
// Everything here is forward-only math over Eigen values; no autodiff.

namespace sraug {

/// Diagonal Gaussian N(mean, exp(log_std)^2).
template <typename Scalar = double>
struct BasicDiagGaussian {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mean;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> log_std;

  Index dim() const noexcept { return mean.size(); }
};
using DiagGaussian = BasicDiagGaussian<double>;

/// KL(q || p) for diagonal Gaussians, summed over dimensions:
///   sum_i ln s_p - ln s_q + (s_q^2 + (m_q - m_p)^2) / (2 s_p^2) - 1/2
/// clamped at zero against rounding.
///
/// The prior is taken as already pushed through the volume-preserving flow;
/// the flow's log-determinant is zero and contributes nothing. Passing
/// pre-flow prior parameters gives a well-defined but wrong number.
template <typename Scalar>
Scalar kl_diag_gaussian(const BasicDiagGaussian<Scalar>& q, const BasicDiagGaussian<Scalar>& p) {
  if (q.mean.size() != q.log_std.size() || p.mean.size() != p.log_std.size() ||
      q.mean.size() != p.mean.size()) {
    throw Error(ErrorCode::DimensionMismatch, "kl_diag_gaussian: mean/log_std lengths differ");
  }
  const auto log_ratio = q.log_std.array() - p.log_std.array();
  const auto var_ratio = (Scalar(2) * log_ratio).exp();
  const auto inv_var_p = (Scalar(-2) * p.log_std.array()).exp();
  const auto terms = -log_ratio + Scalar(0.5) * (var_ratio + (q.mean.array() - p.mean.array()).square() * inv_var_p) -
                     Scalar(0.5);
  return std::max(terms.sum(), Scalar(0));
}

/// Mean absolute difference.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar recon_l1(const Eigen::MatrixBase<DerivedA>& target,
                                   const Eigen::MatrixBase<DerivedB>& pred) {
  if (target.rows() != pred.rows() || target.cols() != pred.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "recon_l1: shapes differ");
  }
  if (target.size() == 0) return 0;
  return (target - pred).cwiseAbs().mean();
}

double recon_l1(const MelSpectrogram& target, const MelSpectrogram& pred);

/// Discriminator outputs, one matrix per sub-discriminator.
template <typename Scalar = double>
using BasicScoreSet = std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>;
using ScoreSet = BasicScoreSet<double>;

/// Intermediate discriminator activations, one matrix per layer.
template <typename Scalar = double>
using BasicFeatureSet = std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>;
using FeatureSet = BasicFeatureSet<double>;

template <typename Scalar>
struct AdversarialLosses {
  Scalar discriminator;
  Scalar generator;
};

/// Least-squares GAN losses summed over sub-discriminators:
///   D: mean((real - 1)^2) + mean(fake^2)     G: mean((fake - 1)^2)
/// Real and fake scores of one scale may differ in shape.
template <typename Scalar>
AdversarialLosses<Scalar> lsgan_losses(const BasicScoreSet<Scalar>& real,
                                       const BasicScoreSet<Scalar>& fake) {
  if (real.empty() || real.size() != fake.size()) {
    throw Error(ErrorCode::DimensionMismatch, "lsgan_losses: scale counts differ or are zero");
  }
  AdversarialLosses<Scalar> out{0, 0};
  for (std::size_t s = 0; s < real.size(); ++s) {
    if (real[s].size() == 0 || fake[s].size() == 0) {
      throw Error(ErrorCode::DimensionMismatch, "lsgan_losses: empty score matrix");
    }
    out.discriminator += (real[s].array() - Scalar(1)).square().mean() + fake[s].array().square().mean();
    out.generator += (fake[s].array() - Scalar(1)).square().mean();
  }
  return out;
}

inline constexpr double kFeatureMatchingWeight = 2.0;

/// kFeatureMatchingWeight * (sum over layers of mean|real - fake|) / n_layers.
template <typename Scalar>
Scalar feature_matching(const BasicFeatureSet<Scalar>& real, const BasicFeatureSet<Scalar>& fake) {
  if (real.empty() || real.size() != fake.size()) {
    throw Error(ErrorCode::DimensionMismatch, "feature_matching: layer counts differ or are zero");
  }
  Scalar total = 0;
  for (std::size_t l = 0; l < real.size(); ++l) {
    total += recon_l1(real[l], fake[l]);
  }
  return Scalar(kFeatureMatchingWeight) * total / static_cast<Scalar>(real.size());
}

/// Per-term weights of the generator objective. The defaults give the plain
/// unweighted sum; `conventional()` gives the reconstruction weight of 45
/// common in HiFi-GAN-style training (feature matching already carries its
/// factor of 2).
struct LossWeights {
  double rec = 1.0;
  double kl = 1.0;
  double adv = 1.0;
  double fm = 1.0;

  static constexpr LossWeights conventional() { return {45.0, 1.0, 1.0, 1.0}; }
};

/// L(G) = w_rec L_rec + w_kl L_kl + w_adv L_adv(G) + w_fm L_fm(G).
/// Throws NonFinite when any term or weight is not finite.
double generator_total(double l_rec, double l_kl, double l_adv_g, double l_fm,
                       const LossWeights& weights = {});

/// L(D) = L_adv(D).
inline double discriminator_total(double l_adv_d) { return l_adv_d; }

}  // namespace sraug
