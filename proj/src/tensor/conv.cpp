#include <Eigen/Core>

#include "ppocr/tensor/ops.hpp"

namespace ppocr {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ConvGeometry {
  std::size_t n, c, h, w;      // input
  std::size_t o, kh, kw;       // kernel
  std::size_t oh, ow;          // output
  std::size_t groups, cg, og;  // channels per group (in / out)
  int sh, sw, ph, pw;
};

ConvGeometry conv_geometry(const Shape& in, const Shape& k, IntPair stride, IntPair pad,
                           int groups) {
  auto fail = [&](const std::string& why) {
    return ShapeError("conv2d: " + why + " (input " + to_string(in) + ", kernel " +
                      to_string(k) + ")");
  };
  if (in.size() != 4 || k.size() != 4) throw fail("expected NCHW input and OIHW kernel");
  if (groups < 1 || stride.h < 1 || stride.w < 1 || pad.h < 0 || pad.w < 0) {
    throw fail("groups and strides must be positive, padding non-negative");
  }
  ConvGeometry g{};
  g.n = in[0];
  g.c = in[1];
  g.h = in[2];
  g.w = in[3];
  g.o = k[0];
  g.kh = k[2];
  g.kw = k[3];
  g.groups = static_cast<std::size_t>(groups);
  if (g.c % g.groups != 0 || g.o % g.groups != 0) throw fail("channels not divisible by groups");
  g.cg = g.c / g.groups;
  g.og = g.o / g.groups;
  if (k[1] != g.cg) throw fail("kernel input channels do not match channels per group");
  g.sh = stride.h;
  g.sw = stride.w;
  g.ph = pad.h;
  g.pw = pad.w;
  const std::size_t padded_h = g.h + 2 * static_cast<std::size_t>(pad.h);
  const std::size_t padded_w = g.w + 2 * static_cast<std::size_t>(pad.w);
  if (g.kh == 0 || g.kw == 0 || g.kh > padded_h || g.kw > padded_w) {
    throw fail("kernel larger than padded input");
  }
  g.oh = (padded_h - g.kh) / static_cast<std::size_t>(stride.h) + 1;
  g.ow = (padded_w - g.kw) / static_cast<std::size_t>(stride.w) + 1;
  return g;
}

// Unfolds one group of one image into a [cg*kh*kw, oh*ow] matrix.
template <typename T>
void im2col(const T* img, const ConvGeometry& g, T* cols) {
  const std::size_t spatial = g.oh * g.ow;
  for (std::size_t ci = 0; ci < g.cg; ++ci)
    for (std::size_t ky = 0; ky < g.kh; ++ky)
      for (std::size_t kx = 0; kx < g.kw; ++kx) {
        T* row = cols + ((ci * g.kh + ky) * g.kw + kx) * spatial;
        for (std::size_t oy = 0; oy < g.oh; ++oy) {
          const long iy = static_cast<long>(oy) * g.sh - g.ph + static_cast<long>(ky);
          T* dst = row + oy * g.ow;
          if (iy < 0 || iy >= static_cast<long>(g.h)) {
            std::fill(dst, dst + g.ow, T{0});
            continue;
          }
          const T* src = img + (ci * g.h + static_cast<std::size_t>(iy)) * g.w;
          for (std::size_t ox = 0; ox < g.ow; ++ox) {
            const long ix = static_cast<long>(ox) * g.sw - g.pw + static_cast<long>(kx);
            dst[ox] = (ix < 0 || ix >= static_cast<long>(g.w)) ? T{0}
                                                              : src[static_cast<std::size_t>(ix)];
          }
        }
      }
}

template <typename T>
void col2im(const T* cols, const ConvGeometry& g, T* img_grad) {
  const std::size_t spatial = g.oh * g.ow;
  for (std::size_t ci = 0; ci < g.cg; ++ci)
    for (std::size_t ky = 0; ky < g.kh; ++ky)
      for (std::size_t kx = 0; kx < g.kw; ++kx) {
        const T* row = cols + ((ci * g.kh + ky) * g.kw + kx) * spatial;
        for (std::size_t oy = 0; oy < g.oh; ++oy) {
          const long iy = static_cast<long>(oy) * g.sh - g.ph + static_cast<long>(ky);
          if (iy < 0 || iy >= static_cast<long>(g.h)) continue;
          T* dst = img_grad + (ci * g.h + static_cast<std::size_t>(iy)) * g.w;
          for (std::size_t ox = 0; ox < g.ow; ++ox) {
            const long ix = static_cast<long>(ox) * g.sw - g.pw + static_cast<long>(kx);
            if (ix >= 0 && ix < static_cast<long>(g.w)) dst[ix] += row[oy * g.ow + ox];
          }
        }
      }
}

// One input channel per group: direct loops beat a 1-row GEMM.
template <typename T>
void depthwise_forward(const T* x, const T* k, const ConvGeometry& g, T* out) {
  for (std::size_t n = 0; n < g.n; ++n)
    for (std::size_t oc = 0; oc < g.o; ++oc) {
      const std::size_t ic = oc / g.og;
      const T* img = x + (n * g.c + ic) * g.h * g.w;
      const T* ker = k + oc * g.kh * g.kw;
      T* dst = out + (n * g.o + oc) * g.oh * g.ow;
      for (std::size_t oy = 0; oy < g.oh; ++oy)
        for (std::size_t ox = 0; ox < g.ow; ++ox) {
          T acc{0};
          for (std::size_t ky = 0; ky < g.kh; ++ky) {
            const long iy = static_cast<long>(oy) * g.sh - g.ph + static_cast<long>(ky);
            if (iy < 0 || iy >= static_cast<long>(g.h)) continue;
            for (std::size_t kx = 0; kx < g.kw; ++kx) {
              const long ix = static_cast<long>(ox) * g.sw - g.pw + static_cast<long>(kx);
              if (ix < 0 || ix >= static_cast<long>(g.w)) continue;
              acc += img[static_cast<std::size_t>(iy) * g.w + static_cast<std::size_t>(ix)] *
                     ker[ky * g.kw + kx];
            }
          }
          dst[oy * g.ow + ox] = acc;
        }
    }
}

template <typename T>
void depthwise_backward(const T* x, const T* k, const T* gout, const ConvGeometry& g, T* gx,
                        T* gk) {
  for (std::size_t n = 0; n < g.n; ++n)
    for (std::size_t oc = 0; oc < g.o; ++oc) {
      const std::size_t ic = oc / g.og;
      const T* img = x + (n * g.c + ic) * g.h * g.w;
      T* img_grad = gx ? gx + (n * g.c + ic) * g.h * g.w : nullptr;
      const T* ker = k + oc * g.kh * g.kw;
      T* ker_grad = gk ? gk + oc * g.kh * g.kw : nullptr;
      const T* go = gout + (n * g.o + oc) * g.oh * g.ow;
      for (std::size_t oy = 0; oy < g.oh; ++oy)
        for (std::size_t ox = 0; ox < g.ow; ++ox) {
          const T gv = go[oy * g.ow + ox];
          if (gv == T{0}) continue;
          for (std::size_t ky = 0; ky < g.kh; ++ky) {
            const long iy = static_cast<long>(oy) * g.sh - g.ph + static_cast<long>(ky);
            if (iy < 0 || iy >= static_cast<long>(g.h)) continue;
            for (std::size_t kx = 0; kx < g.kw; ++kx) {
              const long ix = static_cast<long>(ox) * g.sw - g.pw + static_cast<long>(kx);
              if (ix < 0 || ix >= static_cast<long>(g.w)) continue;
              const std::size_t p = static_cast<std::size_t>(iy) * g.w + static_cast<std::size_t>(ix);
              if (img_grad) img_grad[p] += gv * ker[ky * g.kw + kx];
              if (ker_grad) ker_grad[ky * g.kw + kx] += gv * img[p];
            }
          }
        }
    }
}

}  // namespace

template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& kernel, IntPair stride, IntPair padding,
                 int groups) {
  const ConvGeometry g = conv_geometry(input.shape(), kernel.shape(), stride, padding, groups);
  std::vector<T> out(g.n * g.o * g.oh * g.ow);
  const std::size_t spatial = g.oh * g.ow;
  const std::size_t patch = g.cg * g.kh * g.kw;
  const T* x = input.data().data();
  const T* k = kernel.data().data();

  if (g.cg == 1) {
    depthwise_forward(x, k, g, out.data());
  } else {
    std::vector<T> cols(patch * spatial);
    for (std::size_t n = 0; n < g.n; ++n)
      for (std::size_t gi = 0; gi < g.groups; ++gi) {
        im2col(x + (n * g.c + gi * g.cg) * g.h * g.w, g, cols.data());
        Eigen::Map<RowMat<T>> dst(out.data() + (n * g.o + gi * g.og) * spatial,
                                  static_cast<Eigen::Index>(g.og),
                                  static_cast<Eigen::Index>(spatial));
        Eigen::Map<const RowMat<T>> w(k + gi * g.og * patch, static_cast<Eigen::Index>(g.og),
                                      static_cast<Eigen::Index>(patch));
        Eigen::Map<const RowMat<T>> c(cols.data(), static_cast<Eigen::Index>(patch),
                                      static_cast<Eigen::Index>(spatial));
        dst.noalias() = w * c;
      }
  }

  return record_op<T>(
      "conv2d", Shape{g.n, g.o, g.oh, g.ow}, std::move(out), {input, kernel},
      [input, kernel, g, spatial, patch](std::span<const T> gout) mutable {
        const T* x = input.data().data();
        const T* k = kernel.data().data();
        T* gx = input.requires_grad() ? input.grad_buffer().data() : nullptr;
        T* gk = kernel.requires_grad() ? kernel.grad_buffer().data() : nullptr;
        if (g.cg == 1) {
          depthwise_backward(x, k, gout.data(), g, gx, gk);
          return;
        }
        std::vector<T> cols(patch * spatial);
        std::vector<T> dcols(gx ? patch * spatial : 0);
        for (std::size_t n = 0; n < g.n; ++n)
          for (std::size_t gi = 0; gi < g.groups; ++gi) {
            Eigen::Map<const RowMat<T>> go(gout.data() + (n * g.o + gi * g.og) * spatial,
                                           static_cast<Eigen::Index>(g.og),
                                           static_cast<Eigen::Index>(spatial));
            if (gk) {
              im2col(x + (n * g.c + gi * g.cg) * g.h * g.w, g, cols.data());
              Eigen::Map<const RowMat<T>> c(cols.data(), static_cast<Eigen::Index>(patch),
                                            static_cast<Eigen::Index>(spatial));
              Eigen::Map<RowMat<T>> dw(gk + gi * g.og * patch, static_cast<Eigen::Index>(g.og),
                                       static_cast<Eigen::Index>(patch));
              dw.noalias() += go * c.transpose();
            }
            if (gx) {
              Eigen::Map<const RowMat<T>> w(k + gi * g.og * patch,
                                            static_cast<Eigen::Index>(g.og),
                                            static_cast<Eigen::Index>(patch));
              Eigen::Map<RowMat<T>> dc(dcols.data(), static_cast<Eigen::Index>(patch),
                                       static_cast<Eigen::Index>(spatial));
              dc.noalias() = w.transpose() * go;
              col2im(dcols.data(), g, gx + (n * g.c + gi * g.cg) * g.h * g.w);
            }
          }
      });
}

template Tensor<float> conv2d(const Tensor<float>&, const Tensor<float>&, IntPair, IntPair, int);
template Tensor<double> conv2d(const Tensor<double>&, const Tensor<double>&, IntPair, IntPair,
                               int);

}  // namespace ppocr
