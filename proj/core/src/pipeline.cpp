#include "dst/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dst/error.hpp"

namespace dst {

namespace {

template <class Fn>
auto in_stage(const char* stage, const char* channel, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw e.with_context(stage, channel ? channel : "");
  }
}

void clamp_unit(RgbImage& img) {
  for (auto& c : img.ch)
    for (double& v : c) v = std::clamp(v, 0.0, 1.0);
}

Plane luminance_in(const RgbImage& linear, const std::optional<CropRect>& crop) {
  Plane y = luminance(linear);
  return crop ? crop_plane(y, *crop) : y;
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

bool TransferRecipe::is_identity() const {
  return illuminant_scale == Rgb{1.0, 1.0, 1.0} && !kernel &&
         std::all_of(channels.begin(), channels.end(), [](const MomentRecipe& r) { return r.map.empty(); });
}

void TransferRecipe::validate() const {
  for (std::size_t c = 0; c < 3; ++c) {
    if (!finite(illuminant_scale[c]) || !(illuminant_scale[c] > 0.0)) {
      raise(ErrorKind::RecipeIncomplete, std::string("illuminant scale of channel ") + std::to_string(c) +
                                             " is missing or not positive");
    }
    if (!channels[c].map.all_finite()) {
      raise(ErrorKind::RecipeIncomplete, std::string("map of channel ") + kOpponentChannelNames[c] +
                                             " has non-finite parameters");
    }
  }
  if (kernel) {
    bool ok = finite(kernel->ac_gain) && finite(kernel->dc_gain);
    for (double e : kernel->exponents) ok = ok && finite(e);
    if (!ok) raise(ErrorKind::RecipeIncomplete, "kernel has non-finite parameters");
  }
  if (!(gamma > 0.0) || !(space.exponent > 0.0)) {
    raise(ErrorKind::RecipeIncomplete, "gamma or opponent exponent missing");
  }
}

TransferRecipe identity_recipe() { return TransferRecipe{}; }

RgbImage apply_recipe(const RgbImage& img, const TransferRecipe& recipe, bool with_kernel) {
  recipe.validate();
  if (recipe.is_identity()) return img;

  RgbImage out = img;
  out.encoding = Encoding::Gamma;
  const double inv_gamma = 1.0 / recipe.gamma;
  const bool reject = recipe.negatives == NegativePolicy::Reject;
  auto power = [&](double v, double p) {
    if (v < 0.0) {
      if (reject) raise(ErrorKind::NegativeInput, "negative value " + std::to_string(v) + " under the reject policy");
      return -std::pow(-v, p);
    }
    return std::pow(v, p);
  };

  in_stage("decode", nullptr, [&] {
    for (std::size_t c = 0; c < 3; ++c)
      for (double& v : out.ch[c]) v = power(v, recipe.gamma) * recipe.illuminant_scale[c];
  });
  out.encoding = Encoding::Linear;

  if (with_kernel && recipe.kernel) {
    out = in_stage("spectral", nullptr, [&] { return apply_kernel_rgb(out, *recipe.kernel); });
  }

  out = rgb_to_opponent(out, recipe.space);
  for (std::size_t c = 0; c < 3; ++c) {
    in_stage("moments", kOpponentChannelNames[c], [&] { recipe.channels[c].map.apply(out.ch[c]); });
  }
  out = opponent_to_rgb(out, recipe.space);

  in_stage("encode", nullptr, [&] {
    for (auto& ch : out.ch)
      for (double& v : ch) v = power(v, inv_gamma);
  });
  out.encoding = Encoding::Gamma;
  if (recipe.clamp == ClampPolicy::Clamp) clamp_unit(out);
  return out;
}

StyleTransfer transfer_style(const RgbImage& src, const RgbImage& tgt, const TransferConfig& cfg) {
  for (int c = 0; c < 3; ++c) {
    const int k = cfg.orders[static_cast<std::size_t>(c)];
    if (k < 0 || k > 4) {
      raise(ErrorKind::OrderGap, std::string("channel ") + kOpponentChannelNames[static_cast<std::size_t>(c)] +
                                     ": order count " + std::to_string(k) + " outside [0, 4]");
    }
  }
  if (cfg.src_crop) validate_crop(*cfg.src_crop, src.width, src.height);
  if (cfg.tgt_crop) validate_crop(*cfg.tgt_crop, tgt.width, tgt.height);

  TransferRecipe recipe;
  recipe.clamp = cfg.clamp;
  recipe.negatives = cfg.negatives;

  const RgbImage src_lin = in_stage("decode", "source", [&] { return gamma_decode(src, cfg.negatives); });
  const RgbImage tgt_lin = in_stage("decode", "target", [&] { return gamma_decode(tgt, cfg.negatives); });

  in_stage("gray-world", nullptr, [&] {
    recipe.source_illuminant = measure_illuminant(crop_view(src_lin, cfg.src_crop));
    recipe.target_illuminant = measure_illuminant(crop_view(tgt_lin, cfg.tgt_crop));
  });
  for (std::size_t c = 0; c < 3; ++c) {
    recipe.illuminant_scale[c] = recipe.target_illuminant.rgb[c] / recipe.source_illuminant.rgb[c];
  }
  RgbImage work = scale_channels(src_lin, recipe.illuminant_scale);

  if (cfg.spectral) {
    // Band shape only: the moment stage that follows owns mean and variance.
    recipe.kernel = in_stage("spectral", "Y", [&] {
      const Plane s = luminance_in(work, cfg.src_crop);
      const Plane t = luminance_in(tgt_lin, cfg.tgt_crop);
      const FilterBank tbank(t.width, t.height);
      const SpectralFeatures target = decoupled_spectral_features(t, tbank, SpectralReference::for_grid(tbank));
      const FilterBank sbank(s.width, s.height);
      EquivalentKernel k = spectral_transfer(s, target, sbank, SpectralReference::for_grid(sbank)).kernel;
      k.ac_gain = 1.0;
      k.dc_gain = 1.0;
      return k;
    });
    work = in_stage("spectral", nullptr, [&] { return apply_kernel_rgb(work, *recipe.kernel); });
  }

  const RgbImage src_opp = rgb_to_opponent(work, recipe.space);
  const RgbImage tgt_opp = rgb_to_opponent(tgt_lin, recipe.space);
  const ImageView sv = crop_view(src_opp, cfg.src_crop);
  const ImageView tv = crop_view(tgt_opp, cfg.tgt_crop);

  TransferOptions options;
  options.perturbation = cfg.perturbation;
  for (std::size_t c = 0; c < 3; ++c) {
    const int k = cfg.orders[c];
    if (k == 0) continue;
    recipe.channels[c] = in_stage("moments", kOpponentChannelNames[c], [&] {
      const MomentFeatures target = analyze_moments(tv.channel(static_cast<int>(c)), k);
      Sample sample{sv.channel(static_cast<int>(c)), {}};
      return transfer_moments(sample, target, MomentOrders::prefix(k), options).recipe;
    });
  }

  // Replaying the frozen recipe is the definition of the result.
  StyleTransfer out;
  out.image = apply_recipe(src, recipe);
  out.recipe = std::move(recipe);
  return out;
}

OpticsTransfer transfer_optics(const RgbImage& src, const RgbImage& t_reference, const RgbImage& t_diffused,
                               const std::optional<CropRect>& diff_crop) {
  if (t_reference.width != t_diffused.width || t_reference.height != t_diffused.height) {
    raise(ErrorKind::DimensionMismatch, "T and T' must have the same size");
  }
  if (diff_crop) validate_crop(*diff_crop, t_reference.width, t_reference.height);
  const RgbImage src_lin = in_stage("decode", "source", [&] { return gamma_decode(src); });
  OpticsTransfer out;
  out.kernel = in_stage("spectral", "Y", [&] {
    const Plane ref = luminance_in(gamma_decode(t_reference), diff_crop);
    const Plane dif = luminance_in(gamma_decode(t_diffused), diff_crop);
    return extract_diffusion_kernel(ref, dif);
  });
  out.image = gamma_encode(in_stage("spectral", nullptr, [&] { return apply_kernel_rgb(src_lin, out.kernel); }));
  return out;
}

}  // namespace dst
