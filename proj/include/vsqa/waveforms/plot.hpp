#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "vsqa/waveforms/png.hpp"
#include "vsqa/waveforms/raster.hpp"
#include "vsqa/waveforms/synthesize.hpp"

namespace vsqa::waveforms {

struct PlotStyle {
  int width = 336;
  int height = 336;
  int margin_left = 44;
  int margin_right = 8;
  int margin_top = 14;
  int margin_bottom = 26;
  bool axes = true;
  bool labels = true;
  raster::Color background = raster::kWhite;
  raster::Color axis = raster::kBlack;
  raster::Color trace = raster::kBlue;
};

/// Maps (time, amplitude) onto the plotting rectangle.
class PlotLayout {
 public:
  PlotLayout(const Waveform& w, const PlotStyle& style) {
    if (w.samples.empty()) throw std::invalid_argument("cannot plot an empty waveform");
    left_ = style.margin_left;
    right_ = style.width - 1 - style.margin_right;
    top_ = style.margin_top;
    bottom_ = style.height - 1 - style.margin_bottom;
    if (right_ <= left_ || bottom_ <= top_) throw std::invalid_argument("plot style leaves no drawing area");

    for (double v : w.samples) {
      if (!std::isfinite(v)) throw std::invalid_argument("cannot plot non-finite samples");
    }
    const auto [lo, hi] = std::minmax_element(w.samples.begin(), w.samples.end());
    vmin_ = *lo;
    vmax_ = *hi;
    if (vmax_ - vmin_ < 1e-12) {
      vmin_ -= 1.0;
      vmax_ += 1.0;
    } else {
      const double pad = 0.05 * (vmax_ - vmin_);
      vmin_ -= pad;
      vmax_ += pad;
    }
    t_end_ = w.sampling.time_at(w.samples.size() > 1 ? w.samples.size() - 1 : 1);
  }

  int column_for(double t) const {
    return left_ + static_cast<int>(std::lround(t / t_end_ * (right_ - left_)));
  }

  int row_for(double v) const {
    return bottom_ - static_cast<int>(std::lround((v - vmin_) / (vmax_ - vmin_) * (bottom_ - top_)));
  }

  int left() const { return left_; }
  int right() const { return right_; }
  int top() const { return top_; }
  int bottom() const { return bottom_; }
  double vmin() const { return vmin_; }
  double vmax() const { return vmax_; }
  double t_end() const { return t_end_; }

 private:
  int left_, right_, top_, bottom_;
  double vmin_, vmax_, t_end_;
};

namespace detail {

inline std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

}  // namespace detail

/// Time-domain line plot: seconds on x, volts on y.
inline RgbImage render_image(const Waveform& w, const PlotStyle& style = {}) {
  const PlotLayout layout(w, style);
  RgbImage img(style.width, style.height, style.background);

  if (style.axes) {
    raster::draw_line(img, layout.left() - 1, layout.top(), layout.left() - 1, layout.bottom() + 1, style.axis);
    raster::draw_line(img, layout.left() - 1, layout.bottom() + 1, layout.right(), layout.bottom() + 1, style.axis);
  }
  if (style.labels) {
    using raster::draw_text;
    using raster::text_width;
    const std::string vmax = detail::fixed2(layout.vmax());
    const std::string vmin = detail::fixed2(layout.vmin());
    draw_text(img, layout.left() - 3 - text_width(vmax), layout.top(), vmax, style.axis);
    draw_text(img, layout.left() - 3 - text_width(vmin), layout.bottom() - raster::kGlyphHeight + 1, vmin,
              style.axis);
    draw_text(img, 2, 3, "AMPLITUDE (V)", style.axis);

    const int label_y = layout.bottom() + 4;
    draw_text(img, layout.left(), label_y, "0.00", style.axis);
    const std::string t_end = detail::fixed2(layout.t_end());
    draw_text(img, layout.right() - text_width(t_end), label_y, t_end, style.axis);
    const std::string title = "TIME (S)";
    draw_text(img, (layout.left() + layout.right() - text_width(title)) / 2, label_y + raster::kGlyphHeight + 3,
              title, style.axis);
  }

  int px = layout.column_for(0.0);
  int py = layout.row_for(w.samples.front());
  img.set(px, py, style.trace);
  for (std::size_t n = 1; n < w.samples.size(); ++n) {
    const int x = layout.column_for(w.sampling.time_at(n));
    const int y = layout.row_for(w.samples[n]);
    raster::draw_line(img, px, py, x, y, style.trace);
    px = x;
    py = y;
  }
  return img;
}

/// PNG bytes of render_image; identical input gives identical bytes.
inline std::vector<std::uint8_t> render_plot(const Waveform& w, const PlotStyle& style = {}) {
  return encode_png(render_image(w, style));
}

}  // namespace vsqa::waveforms
