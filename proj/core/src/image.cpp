#include "sesr/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace sesr {

void clamp_to_range(ImagePlane& p) {
  for (double& v : p.values) v = std::clamp(v, 0.0, p.range);
}

namespace {

std::uint8_t quantize(double v) {
  return std::uint8_t(std::clamp(std::lround(v), 0l, 255l));
}

Image8 read_png(const std::string& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw io_error("cannot read PNG '" + path + "': " + image.message);
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  Image8 out;
  out.rows = int(image.height);
  out.cols = int(image.width);
  out.channels = color ? 3 : 1;
  out.pixels.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
    png_image_free(&image);
    throw io_error("cannot decode PNG '" + path + "': " + image.message);
  }
  return out;
}

void write_png(const Image8& img, const std::string& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = png_uint_32(img.cols);
  image.height = png_uint_32(img.rows);
  image.format = img.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, img.pixels.data(), 0, nullptr))
    throw io_error("cannot write PNG '" + path + "': " + image.message);
}

Image8 read_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::string magic;
  in >> magic;
  if (magic != "P5" && magic != "P6")
    throw io_error("'" + path + "' is not a binary PGM/PPM file");
  auto next_int = [&in, &path]() {
    // Skip whitespace and '#' comment lines between header fields.
    int c = in.get();
    while (c != EOF && (std::isspace(c) || c == '#')) {
      if (c == '#')
        while (c != EOF && c != '\n') c = in.get();
      c = in.get();
    }
    int value = 0;
    bool any = false;
    while (c != EOF && std::isdigit(c)) {
      value = value * 10 + (c - '0');
      any = true;
      c = in.get();
    }
    if (!any) throw io_error("malformed PNM header in '" + path + "'");
    return value;
  };
  Image8 out;
  out.cols = next_int();
  out.rows = next_int();
  const int maxval = next_int();
  if (maxval != 255) throw io_error("'" + path + "': only maxval 255 PNM is supported");
  out.channels = magic == "P6" ? 3 : 1;
  out.pixels.resize(std::size_t(out.rows) * out.cols * out.channels);
  in.read(reinterpret_cast<char*>(out.pixels.data()), std::streamsize(out.pixels.size()));
  if (std::size_t(in.gcount()) != out.pixels.size())
    throw io_error("'" + path + "' is truncated");
  return out;
}

void write_pnm(const Image8& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << (img.channels == 3 ? "P6" : "P5") << "\n"
      << img.cols << " " << img.rows << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            std::streamsize(img.pixels.size()));
  if (!out) throw io_error("failed writing '" + path + "'");
}

bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(),
                                                suffix) == 0;
}

}  // namespace

Image8 read_image(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw io_error("cannot open '" + path + "'");
  unsigned char sig[2] = {0, 0};
  probe.read(reinterpret_cast<char*>(sig), 2);
  probe.close();
  if (sig[0] == 0x89 && sig[1] == 'P') return read_png(path);
  if (sig[0] == 'P' && (sig[1] == '5' || sig[1] == '6')) return read_pnm(path);
  throw io_error("'" + path + "': unsupported image format");
}

void write_image(const Image8& img, const std::string& path) {
  if (img.channels != 1 && img.channels != 3)
    throw io_error("write_image: channels must be 1 or 3");
  if (has_suffix(path, ".png")) return write_png(img, path);
  if (has_suffix(path, ".ppm") || has_suffix(path, ".pgm")) return write_pnm(img, path);
  throw io_error("write_image: unknown extension in '" + path + "'");
}

YCbCrPlanes rgb_to_ycbcr(const Image8& rgb, bool full_range) {
  if (rgb.channels != 3) throw io_error("rgb_to_ycbcr: expected a 3-channel image");
  YCbCrPlanes out{ImagePlane(rgb.rows, rgb.cols), ImagePlane(rgb.rows, rgb.cols),
                  ImagePlane(rgb.rows, rgb.cols)};
  for (int i = 0; i < rgb.rows; ++i)
    for (int j = 0; j < rgb.cols; ++j) {
      const double r = rgb.at(i, j, 0), g = rgb.at(i, j, 1), b = rgb.at(i, j, 2);
      if (full_range) {
        out.y.at(i, j) = 0.299 * r + 0.587 * g + 0.114 * b;
        out.cb.at(i, j) = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b;
        out.cr.at(i, j) = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b;
      } else {
        out.y.at(i, j) = 16.0 + (65.481 * r + 128.553 * g + 24.966 * b) / 255.0;
        out.cb.at(i, j) = 128.0 + (-37.797 * r - 74.203 * g + 112.0 * b) / 255.0;
        out.cr.at(i, j) = 128.0 + (112.0 * r - 93.786 * g - 18.214 * b) / 255.0;
      }
    }
  return out;
}

Image8 ycbcr_to_rgb(const ImagePlane& y, const ImagePlane& cb, const ImagePlane& cr,
                    bool full_range) {
  if (y.rows != cb.rows || y.rows != cr.rows || y.cols != cb.cols || y.cols != cr.cols)
    throw io_error("ycbcr_to_rgb: plane sizes differ");
  Image8 out;
  out.rows = y.rows;
  out.cols = y.cols;
  out.channels = 3;
  out.pixels.resize(std::size_t(y.rows) * y.cols * 3);
  for (int i = 0; i < y.rows; ++i)
    for (int j = 0; j < y.cols; ++j) {
      double r, g, b;
      if (full_range) {
        const double yy = y.at(i, j), u = cb.at(i, j) - 128.0, v = cr.at(i, j) - 128.0;
        r = yy + 1.402 * v;
        g = yy - 0.344136 * u - 0.714136 * v;
        b = yy + 1.772 * u;
      } else {
        const double yy = y.at(i, j) - 16.0, u = cb.at(i, j) - 128.0, v = cr.at(i, j) - 128.0;
        r = (255.0 / 219.0) * yy + (255.0 / 112.0) * 0.701 * v;
        g = (255.0 / 219.0) * yy - (255.0 / 112.0) * 0.886 * 0.114 / 0.587 * u -
            (255.0 / 112.0) * 0.701 * 0.299 / 0.587 * v;
        b = (255.0 / 219.0) * yy + (255.0 / 112.0) * 0.886 * u;
      }
      out.at(i, j, 0) = quantize(r);
      out.at(i, j, 1) = quantize(g);
      out.at(i, j, 2) = quantize(b);
    }
  return out;
}

ImagePlane luma_plane(const Image8& img, bool full_range) {
  if (img.channels == 1) return plane_from_gray(img);
  return rgb_to_ycbcr(img, full_range).y;
}

ImagePlane plane_from_gray(const Image8& gray) {
  if (gray.channels != 1) throw io_error("plane_from_gray: expected a 1-channel image");
  ImagePlane p(gray.rows, gray.cols);
  for (int i = 0; i < gray.rows; ++i)
    for (int j = 0; j < gray.cols; ++j) p.at(i, j) = gray.at(i, j, 0);
  return p;
}

Image8 gray_from_plane(const ImagePlane& p) {
  Image8 out;
  out.rows = p.rows;
  out.cols = p.cols;
  out.channels = 1;
  out.pixels.resize(std::size_t(p.rows) * p.cols);
  const double s = p.range > 0 ? 255.0 / p.range : 1.0;
  for (int i = 0; i < p.rows; ++i)
    for (int j = 0; j < p.cols; ++j) out.at(i, j, 0) = quantize(p.at(i, j) * s);
  return out;
}

}  // namespace sesr
