#include "sesr/model.hpp"

namespace sesr {

std::string to_string(BlockKind k) { return k == BlockKind::se ? "se" : "plain"; }

BlockKind block_kind_from_string(const std::string& s) {
  if (s == "se") return BlockKind::se;
  if (s == "plain") return BlockKind::plain;
  throw config_error("unknown block kind '" + s + "' (expected 'se' or 'plain')");
}

void ModelConfig::validate() const {
  if (recursion_depth < 1) throw config_error("recursion_depth must be >= 1");
  if (base_channels < 1 || expansion < 1) throw config_error("channel widths must be >= 1");
  if (se_bottleneck < 1 || se_bottleneck >= expanded_channels())
    throw config_error("se_bottleneck must be in [1, base_channels*expansion)");
  if (scales != std::vector<int>{2, 4})
    throw config_error("the pyramid is fixed at scales [2, 4]");
  if (!(leaky_slope >= 0.0 && leaky_slope < 1.0))
    throw config_error("leaky_slope must be in [0, 1)");
}

template <typename T>
ParamStore<T> SESRModel<T>::params() {
  ParamStore<T> store;
  store.push_back({"entry.w", &entry_w});
  store.push_back({"entry.b", &entry_b});
  collect_params(branch2, "branch2", store);
  collect_params(branch4, "branch4", store);
  return store;
}

namespace {

template <typename T>
void init_branch(BranchParams<T>& b, const ModelConfig& cfg, std::uint64_t seed,
                 const std::string& prefix) {
  const int base = cfg.base_channels;
  fill_he_normal(b.block.conv1_w.value, base * 9, cfg.leaky_slope, seed, prefix + ".conv1");
  fill_he_normal(b.block.conv2_w.value, base * 9, cfg.leaky_slope, seed, prefix + ".conv2");
  fill_he_normal(b.block.conv3_w.value, base * 9, cfg.leaky_slope, seed, prefix + ".conv3");
  if (b.block.se) {
    fill_he_normal(b.block.se->down_w.value, cfg.expanded_channels(), cfg.leaky_slope, seed,
                   prefix + ".se.down");
    fill_he_normal(b.block.se->up_w.value, cfg.se_bottleneck, cfg.leaky_slope, seed,
                   prefix + ".se.up");
  }
  fill_he_normal(b.block.trans_w.value, cfg.expanded_channels(), cfg.leaky_slope, seed,
                 prefix + ".trans");
  fill_he_normal(b.feat_deconv_w.value, base * 16, cfg.leaky_slope, seed,
                 prefix + ".feat_deconv");
  fill_he_normal(b.res_conv_w.value, base * 9, cfg.leaky_slope, seed, prefix + ".residual_conv");
  fill_bilinear_upsample(b.img_deconv_w.value);
}

}  // namespace

template <typename T>
SESRModel<T> build_model(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  const std::optional<int> bottleneck =
      config.block_kind == BlockKind::se ? std::optional<int>(config.se_bottleneck)
                                         : std::nullopt;
  SESRModel<T> m;
  m.config = config;
  m.seed = seed;
  m.entry_w = Param<T>(Shape4{config.base_channels, 1, 3, 3});
  m.entry_b = Param<T>(Shape4{1, config.base_channels, 1, 1});
  m.branch2 = BranchParams<T>(config.base_channels, config.expanded_channels(), bottleneck);
  m.branch4 = BranchParams<T>(config.base_channels, config.expanded_channels(), bottleneck);
  fill_he_normal(m.entry_w.value, 9, config.leaky_slope, seed, "entry");
  init_branch(m.branch2, config, seed, "branch2");
  init_branch(m.branch4, config, seed, "branch4");
  return m;
}

template <typename To, typename From>
Tensor4<To> cast_tensor(const Tensor4<From>& t) {
  return cast<To>(t);
}

template <typename To, typename From>
SESRModel<To> cast_model(const SESRModel<From>& m) {
  SESRModel<To> out = build_model<To>(m.config, m.seed);
  SESRModel<From>& src = const_cast<SESRModel<From>&>(m);
  auto sp = src.params();
  auto dp = out.params();
  for (std::size_t i = 0; i < sp.size(); ++i)
    dp[i].param->value = cast<To>(sp[i].param->value);
  return out;
}

template <typename T>
PyramidOut<T> forward_pyramid(const SESRModel<T>& model, const Tensor4<T>& lr_y,
                              PyramidCache<T>* cache) {
  if (lr_y.c() != 1)
    throw shape_error("forward_pyramid: expected a single-channel input, got " +
                      lr_y.shape().str());
  if (lr_y.h() < 8 || lr_y.w() < 8)
    throw shape_error("forward_pyramid: input " + lr_y.shape().str() +
                      " is undersized; spatial dims must be >= 8");
  const BlockOptions opt = model.config.block_options();
  const int depth = model.config.recursion_depth;
  Tensor4<T> f0 =
      conv2d(lr_y, model.entry_w.value, model.entry_b.value.flat(), model.entry_spec());
  BranchOut<T> b2 = branch_reconstruct(f0, lr_y, model.branch2, depth, opt,
                                       cache ? &cache->b2 : nullptr);
  BranchOut<T> b4 = branch_reconstruct(b2.hr_features, b2.hr_image, model.branch4, depth, opt,
                                       cache ? &cache->b4 : nullptr);
  if (cache) {
    cache->lr = lr_y;
    cache->f0 = std::move(f0);
  }
  return {std::move(b2.hr_image), std::move(b4.hr_image)};
}

template <typename T>
Tensor4<T> pyramid_backward(SESRModel<T>& model, const PyramidCache<T>& cache,
                            const Tensor4<T>& grad_sr2, const Tensor4<T>& grad_sr4) {
  const BlockOptions opt = model.config.block_options();
  // The x4 branch consumed the x2 branch's features and image.
  BranchGrads<T> g4 = branch_backward(cache.b4, model.branch4, opt, grad_sr4, nullptr);
  Tensor4<T> g_sr2_total = add(grad_sr2, g4.lr_image);
  BranchGrads<T> g2 =
      branch_backward(cache.b2, model.branch2, opt, g_sr2_total, &g4.features);
  ConvGrads<T> eg = conv2d_backward(cache.lr, model.entry_w.value, model.entry_spec(),
                                    g2.features, true);
  add_inplace(model.entry_w.grad, eg.weights);
  {
    auto gb = model.entry_b.grad.flat();
    for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += eg.bias[i];
  }
  return add(eg.input, g2.lr_image);
}

template <typename T>
ParamCount count_params(SESRModel<T>& model) {
  ParamCount out;
  for (const auto& ref : model.params()) {
    out.by_group[ref.name] = ref.param->value.numel();
    out.total += ref.param->value.numel();
  }
  return out;
}

#define SESR_INSTANTIATE_MODEL(T)                                                      \
  template struct SESRModel<T>;                                                        \
  template SESRModel<T> build_model<T>(const ModelConfig&, std::uint64_t);             \
  template PyramidOut<T> forward_pyramid<T>(const SESRModel<T>&, const Tensor4<T>&,    \
                                            PyramidCache<T>*);                         \
  template Tensor4<T> pyramid_backward<T>(SESRModel<T>&, const PyramidCache<T>&,       \
                                          const Tensor4<T>&, const Tensor4<T>&);       \
  template ParamCount count_params<T>(SESRModel<T>&);

SESR_INSTANTIATE_MODEL(float)
SESR_INSTANTIATE_MODEL(double)

template SESRModel<double> cast_model<double, float>(const SESRModel<float>&);
template SESRModel<float> cast_model<float, double>(const SESRModel<double>&);

}  // namespace sesr
