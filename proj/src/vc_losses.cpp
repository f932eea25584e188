#include "sraug/vc_losses.hpp"

namespace sraug {

double recon_l1(const MelSpectrogram& target, const MelSpectrogram& pred) {
  return recon_l1(target.logmels, pred.logmels);
}

double generator_total(double l_rec, double l_kl, double l_adv_g, double l_fm, const LossWeights& weights) {
  for (double v : {l_rec, l_kl, l_adv_g, l_fm, weights.rec, weights.kl, weights.adv, weights.fm}) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "generator loss term or weight is not finite");
  }
  return weights.rec * l_rec + weights.kl * l_kl + weights.adv * l_adv_g + weights.fm * l_fm;
}

}  // namespace sraug
