#include "sesr/layers.hpp"

namespace sesr {

template <typename T>
SEModuleParams<T>::SEModuleParams(int channels_, int bottleneck_)
    : channels(channels_),
      bottleneck(bottleneck_),
      down_w(Shape4{bottleneck_, channels_, 1, 1}),
      down_b(Shape4{1, bottleneck_, 1, 1}),
      up_w(Shape4{channels_, bottleneck_, 1, 1}),
      up_b(Shape4{1, channels_, 1, 1}) {
  if (bottleneck_ < 1 || bottleneck_ >= channels_)
    throw config_error("SE bottleneck must be in [1, channels)");
}

template <typename T>
SEResBlockParams<T>::SEResBlockParams(int base_, int expanded_, std::optional<int> se_bottleneck)
    : base(base_),
      expanded(expanded_),
      conv1_w(Shape4{base_, base_, 3, 3}),
      conv1_b(Shape4{1, base_, 1, 1}),
      conv2_w(Shape4{base_, base_, 3, 3}),
      conv2_b(Shape4{1, base_, 1, 1}),
      conv3_w(Shape4{expanded_, base_, 3, 3}),
      conv3_b(Shape4{1, expanded_, 1, 1}),
      trans_w(Shape4{base_, expanded_, 1, 1}),
      trans_b(Shape4{1, base_, 1, 1}) {
  if (se_bottleneck) se.emplace(expanded_, *se_bottleneck);
}

template <typename T>
BranchParams<T>::BranchParams(int base, int expanded, std::optional<int> se_bottleneck)
    : block(base, expanded, se_bottleneck),
      feat_deconv_w(Shape4{base, base, 4, 4}),
      feat_deconv_b(Shape4{1, base, 1, 1}),
      res_conv_w(Shape4{1, base, 3, 3}),
      res_conv_b(Shape4{1, 1, 1, 1}),
      img_deconv_w(Shape4{1, 1, 4, 4}),
      img_deconv_b(Shape4{1, 1, 1, 1}) {}

namespace {

template <typename T>
std::span<const T> bias_span(const Param<T>& b) {
  return b.value.flat();
}

template <typename T>
void accumulate_conv_grads(Param<T>& w, Param<T>& b, const ConvGrads<T>& g) {
  add_inplace(w.grad, g.weights);
  auto gb = b.grad.flat();
  for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g.bias[i];
}

}  // namespace

template <typename T>
Tensor4<T> se_forward(const Tensor4<T>& u, const SEModuleParams<T>& p, const BlockOptions& opt,
                      SECache<T>* cache) {
  if (u.c() != p.channels)
    throw shape_error("se_forward: input has " + std::to_string(u.c()) + " channels, expected " +
                      std::to_string(p.channels));
  Tensor4<T> pooled = global_avg_pool(u);
  Tensor4<T> down_pre = conv2d(pooled, p.down_w.value, bias_span(p.down_b), p.down_spec());
  Tensor4<T> down_post =
      opt.se_inner_activation ? leaky_relu(down_pre, T(opt.leaky_slope)) : down_pre;
  Tensor4<T> up = conv2d(down_post, p.up_w.value, bias_span(p.up_b), p.up_spec());
  Tensor4<T> gains = sigmoid(up);
  if (cache) {
    cache->input_shape = u.shape();
    cache->pooled = std::move(pooled);
    cache->down_pre = std::move(down_pre);
    cache->down_post = std::move(down_post);
    cache->gains = gains;
  }
  return gains;
}

template <typename T>
Tensor4<T> se_backward(const SECache<T>& cache, SEModuleParams<T>& p, const BlockOptions& opt,
                       const Tensor4<T>& grad_gains) {
  Tensor4<T> g_up = sigmoid_backward(cache.gains, grad_gains);
  ConvGrads<T> up_g = conv2d_backward(cache.down_post, p.up_w.value, p.up_spec(), g_up, true);
  accumulate_conv_grads(p.up_w, p.up_b, up_g);
  Tensor4<T> g_down = opt.se_inner_activation
                          ? leaky_relu_backward(cache.down_pre, up_g.input, T(opt.leaky_slope))
                          : std::move(up_g.input);
  ConvGrads<T> down_g =
      conv2d_backward(cache.pooled, p.down_w.value, p.down_spec(), g_down, true);
  accumulate_conv_grads(p.down_w, p.down_b, down_g);
  return global_avg_pool_backward(cache.input_shape, down_g.input);
}

template <typename T>
Tensor4<T> se_resblock_forward(const Tensor4<T>& x, const SEResBlockParams<T>& p,
                               const BlockOptions& opt, BlockCache<T>* cache) {
  if (x.c() != p.base)
    throw shape_error("se_resblock_forward: input has " + std::to_string(x.c()) +
                      " channels, expected " + std::to_string(p.base));
  const T slope = T(opt.leaky_slope);
  Tensor4<T> a1 = conv2d(x, p.conv1_w.value, bias_span(p.conv1_b), p.conv1_spec());
  Tensor4<T> z1 = leaky_relu(a1, slope);
  Tensor4<T> a2 = conv2d(z1, p.conv2_w.value, bias_span(p.conv2_b), p.conv2_spec());
  Tensor4<T> z2 = leaky_relu(a2, slope);
  Tensor4<T> r = conv2d(z2, p.conv3_w.value, bias_span(p.conv3_b), p.conv3_spec());
  Tensor4<T> scaled;
  if (p.se) {
    Tensor4<T> gains = se_forward(r, *p.se, opt, cache ? &cache->se : nullptr);
    scaled = channel_scale(r, gains);
  } else {
    scaled = r;
  }
  Tensor4<T> t = conv2d(scaled, p.trans_w.value, bias_span(p.trans_b), p.trans_spec());
  Tensor4<T> out = add(x, t);
  if (cache) {
    cache->x = x;
    cache->a1 = std::move(a1);
    cache->z1 = std::move(z1);
    cache->a2 = std::move(a2);
    cache->z2 = std::move(z2);
    cache->r = std::move(r);
    cache->scaled = std::move(scaled);
  }
  return out;
}

template <typename T>
Tensor4<T> se_resblock_backward(const BlockCache<T>& cache, SEResBlockParams<T>& p,
                                const BlockOptions& opt, const Tensor4<T>& grad_out) {
  const T slope = T(opt.leaky_slope);
  ConvGrads<T> tg =
      conv2d_backward(cache.scaled, p.trans_w.value, p.trans_spec(), grad_out, true);
  accumulate_conv_grads(p.trans_w, p.trans_b, tg);

  Tensor4<T> g_r;
  if (p.se) {
    ChannelScaleGrads<T> sg = channel_scale_backward(cache.r, cache.se.gains, tg.input);
    Tensor4<T> g_r_from_se = se_backward(cache.se, *p.se, opt, sg.gains);
    g_r = add(sg.input, g_r_from_se);
  } else {
    g_r = std::move(tg.input);
  }

  ConvGrads<T> c3 = conv2d_backward(cache.z2, p.conv3_w.value, p.conv3_spec(), g_r, true);
  accumulate_conv_grads(p.conv3_w, p.conv3_b, c3);
  Tensor4<T> g_a2 = leaky_relu_backward(cache.a2, c3.input, slope);
  ConvGrads<T> c2 = conv2d_backward(cache.z1, p.conv2_w.value, p.conv2_spec(), g_a2, true);
  accumulate_conv_grads(p.conv2_w, p.conv2_b, c2);
  Tensor4<T> g_a1 = leaky_relu_backward(cache.a1, c2.input, slope);
  ConvGrads<T> c1 = conv2d_backward(cache.x, p.conv1_w.value, p.conv1_spec(), g_a1, true);
  accumulate_conv_grads(p.conv1_w, p.conv1_b, c1);

  return add(grad_out, c1.input);  // skip connection plus the conv path
}

template <typename T>
Tensor4<T> recursive_unit_forward(const Tensor4<T>& x, const SEResBlockParams<T>& p, int depth,
                                  const BlockOptions& opt, std::vector<BlockCache<T>>* caches) {
  if (depth < 1) throw config_error("recursive_unit: depth must be >= 1");
  if (caches) {
    caches->clear();
    caches->resize(depth);
  }
  Tensor4<T> cur = x;
  for (int d = 0; d < depth; ++d)
    cur = se_resblock_forward(cur, p, opt, caches ? &(*caches)[d] : nullptr);
  return cur;
}

template <typename T>
Tensor4<T> recursive_unit_backward(const std::vector<BlockCache<T>>& caches,
                                   SEResBlockParams<T>& p, const BlockOptions& opt,
                                   const Tensor4<T>& grad_out) {
  Tensor4<T> g = grad_out;
  for (auto it = caches.rbegin(); it != caches.rend(); ++it)
    g = se_resblock_backward(*it, p, opt, g);
  return g;
}

template <typename T>
BranchOut<T> branch_reconstruct(const Tensor4<T>& features, const Tensor4<T>& lr_image,
                                const BranchParams<T>& p, int depth, const BlockOptions& opt,
                                BranchCache<T>* cache) {
  if (features.h() != lr_image.h() || features.w() != lr_image.w())
    throw shape_error("branch_reconstruct: features " + features.shape().str() +
                      " and image " + lr_image.shape().str() + " disagree spatially");
  Tensor4<T> f =
      recursive_unit_forward(features, p.block, depth, opt, cache ? &cache->unit : nullptr);
  Tensor4<T> hr_features =
      conv_transpose2d(f, p.feat_deconv_w.value, bias_span(p.feat_deconv_b),
                       p.feat_deconv_spec());
  Tensor4<T> residual =
      conv2d(hr_features, p.res_conv_w.value, bias_span(p.res_conv_b), p.res_conv_spec());
  Tensor4<T> upsampled = conv_transpose2d(lr_image, p.img_deconv_w.value,
                                          bias_span(p.img_deconv_b), p.img_deconv_spec());
  Tensor4<T> hr_image = add(upsampled, residual);
  if (cache) {
    cache->unit_out = std::move(f);
    cache->hr_features = hr_features;
    cache->lr_image = lr_image;
  }
  return {std::move(hr_image), std::move(hr_features)};
}

template <typename T>
BranchGrads<T> branch_backward(const BranchCache<T>& cache, BranchParams<T>& p,
                               const BlockOptions& opt, const Tensor4<T>& grad_hr_image,
                               const Tensor4<T>* grad_hr_features) {
  // hr_image = img_deconv(lr) + res_conv(hr_features)
  ConvGrads<T> ig = conv_transpose2d_backward(cache.lr_image, p.img_deconv_w.value,
                                              p.img_deconv_spec(), grad_hr_image, true);
  accumulate_conv_grads(p.img_deconv_w, p.img_deconv_b, ig);

  ConvGrads<T> rg = conv2d_backward(cache.hr_features, p.res_conv_w.value, p.res_conv_spec(),
                                    grad_hr_image, true);
  accumulate_conv_grads(p.res_conv_w, p.res_conv_b, rg);

  Tensor4<T> g_hrf =
      grad_hr_features ? add(rg.input, *grad_hr_features) : std::move(rg.input);

  ConvGrads<T> fg = conv_transpose2d_backward(cache.unit_out, p.feat_deconv_w.value,
                                              p.feat_deconv_spec(), g_hrf, true);
  accumulate_conv_grads(p.feat_deconv_w, p.feat_deconv_b, fg);

  Tensor4<T> g_features = recursive_unit_backward(cache.unit, p.block, opt, fg.input);
  return {std::move(g_features), std::move(ig.input)};
}

template <typename T>
void collect_params(SEResBlockParams<T>& p, const std::string& prefix, ParamStore<T>& out) {
  out.push_back({prefix + ".conv1.w", &p.conv1_w});
  out.push_back({prefix + ".conv1.b", &p.conv1_b});
  out.push_back({prefix + ".conv2.w", &p.conv2_w});
  out.push_back({prefix + ".conv2.b", &p.conv2_b});
  out.push_back({prefix + ".conv3.w", &p.conv3_w});
  out.push_back({prefix + ".conv3.b", &p.conv3_b});
  if (p.se) {
    out.push_back({prefix + ".se.down.w", &p.se->down_w});
    out.push_back({prefix + ".se.down.b", &p.se->down_b});
    out.push_back({prefix + ".se.up.w", &p.se->up_w});
    out.push_back({prefix + ".se.up.b", &p.se->up_b});
  }
  out.push_back({prefix + ".trans.w", &p.trans_w});
  out.push_back({prefix + ".trans.b", &p.trans_b});
}

template <typename T>
void collect_params(BranchParams<T>& p, const std::string& prefix, ParamStore<T>& out) {
  collect_params(p.block, prefix + ".block", out);
  out.push_back({prefix + ".feat_deconv.w", &p.feat_deconv_w});
  out.push_back({prefix + ".feat_deconv.b", &p.feat_deconv_b});
  out.push_back({prefix + ".residual_conv.w", &p.res_conv_w});
  out.push_back({prefix + ".residual_conv.b", &p.res_conv_b});
  out.push_back({prefix + ".image_deconv.w", &p.img_deconv_w});
  out.push_back({prefix + ".image_deconv.b", &p.img_deconv_b});
}

#define SESR_INSTANTIATE_LAYERS(T)                                                            \
  template struct SEModuleParams<T>;                                                          \
  template struct SEResBlockParams<T>;                                                        \
  template struct BranchParams<T>;                                                            \
  template Tensor4<T> se_forward<T>(const Tensor4<T>&, const SEModuleParams<T>&,              \
                                    const BlockOptions&, SECache<T>*);                        \
  template Tensor4<T> se_backward<T>(const SECache<T>&, SEModuleParams<T>&,                   \
                                     const BlockOptions&, const Tensor4<T>&);                 \
  template Tensor4<T> se_resblock_forward<T>(const Tensor4<T>&, const SEResBlockParams<T>&,   \
                                             const BlockOptions&, BlockCache<T>*);            \
  template Tensor4<T> se_resblock_backward<T>(const BlockCache<T>&, SEResBlockParams<T>&,     \
                                              const BlockOptions&, const Tensor4<T>&);        \
  template Tensor4<T> recursive_unit_forward<T>(const Tensor4<T>&, const SEResBlockParams<T>&,\
                                                int, const BlockOptions&,                     \
                                                std::vector<BlockCache<T>>*);                 \
  template Tensor4<T> recursive_unit_backward<T>(const std::vector<BlockCache<T>>&,           \
                                                 SEResBlockParams<T>&, const BlockOptions&,   \
                                                 const Tensor4<T>&);                          \
  template BranchOut<T> branch_reconstruct<T>(const Tensor4<T>&, const Tensor4<T>&,           \
                                              const BranchParams<T>&, int,                    \
                                              const BlockOptions&, BranchCache<T>*);          \
  template BranchGrads<T> branch_backward<T>(const BranchCache<T>&, BranchParams<T>&,         \
                                             const BlockOptions&, const Tensor4<T>&,          \
                                             const Tensor4<T>*);                              \
  template void collect_params<T>(SEResBlockParams<T>&, const std::string&, ParamStore<T>&);  \
  template void collect_params<T>(BranchParams<T>&, const std::string&, ParamStore<T>&);

SESR_INSTANTIATE_LAYERS(float)
SESR_INSTANTIATE_LAYERS(double)

}  // namespace sesr
