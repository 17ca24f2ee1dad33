#include "svg.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "error.hpp"

namespace deepvox::svg {

namespace {

constexpr int kSize = 640;
constexpr int kMargin = 40;

constexpr std::array<const char*, 10> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::ofstream open_svg(const std::filesystem::path& path, int width, int height) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::io, "cannot open '", path.string(), "' for writing");
  out << std::setprecision(10);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";
  return out;
}

struct Scale {
  double lo, hi;
  double map(double v, double out_lo, double out_hi) const {
    double span = hi - lo;
    double t = span > 0.0 ? (v - lo) / span : 0.5;
    return out_lo + t * (out_hi - out_lo);
  }
};

std::string diverging_color(double v, double vmax) {
  // blue (negative) -> white (zero) -> red (positive)
  double t = vmax > 0.0 ? std::clamp(v / vmax, -1.0, 1.0) : 0.0;
  int r, g, b;
  if (t >= 0.0) {
    r = 255 + static_cast<int>(std::lround(t * (180 - 255)));
    g = 255 + static_cast<int>(std::lround(t * (4 - 255)));
    b = 255 + static_cast<int>(std::lround(t * (38 - 255)));
  } else {
    r = 255 + static_cast<int>(std::lround(-t * (59 - 255)));
    g = 255 + static_cast<int>(std::lround(-t * (76 - 255)));
    b = 255 + static_cast<int>(std::lround(-t * (192 - 255)));
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

void write_scatter(const Mat& positions, const Mat* labels, const std::filesystem::path& path) {
  if (positions.cols() != 2) raise(ErrorCode::invalid_argument, "scatter positions must be n x 2");
  if (labels) {
    if (labels->rows() != positions.rows())
      raise(ErrorCode::dimension_mismatch, "label rows must match position rows");
    if (labels->cols() < 1 || labels->cols() > 2)
      raise(ErrorCode::invalid_argument, "labels must have 1 or 2 columns");
  }

  Scale sx{positions.col(0).minCoeff(), positions.col(0).maxCoeff()};
  Scale sy{positions.col(1).minCoeff(), positions.col(1).maxCoeff()};

  auto out = open_svg(path, kSize, kSize);
  for (int64_t i = 0; i < positions.rows(); ++i) {
    double x = sx.map(positions(i, 0), kMargin, kSize - kMargin);
    // y axis points up
    double y = sy.map(positions(i, 1), kSize - kMargin, kMargin);
    const char* fill = kPalette[0];
    bool outlined = false;
    if (labels) {
      auto cls = static_cast<int64_t>(std::llround((*labels)(i, 0)));
      fill = kPalette[static_cast<size_t>(((cls % 10) + 10) % 10)];
      if (labels->cols() == 2) outlined = (*labels)(i, 1) != 0.0;
    }
    out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"3\" fill=\"" << fill << "\"";
    if (outlined) out << " stroke=\"#000000\" stroke-width=\"1\"";
    out << "/>\n";
  }
  out << "</svg>\n";
  if (!out) raise(ErrorCode::io, "write failed for '", path.string(), "'");
}

void write_heatmap(const Mat& m, const std::filesystem::path& path) {
  const int64_t rows = m.rows(), cols = m.cols();
  double vmax = m.cwiseAbs().maxCoeff();
  double cell = static_cast<double>(kSize - 2 * kMargin) / static_cast<double>(std::max(rows, cols));

  auto out = open_svg(path, kSize, kSize);
  for (int64_t i = 0; i < rows; ++i)
    for (int64_t j = 0; j < cols; ++j) {
      double x = kMargin + static_cast<double>(j) * cell;
      double y = kMargin + static_cast<double>(i) * cell;
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
          << "\" fill=\"" << diverging_color(m(i, j), vmax) << "\"/>\n";
    }
  out << "</svg>\n";
  if (!out) raise(ErrorCode::io, "write failed for '", path.string(), "'");
}

void write_curves(const Mat& xy, const std::filesystem::path& path) {
  if (xy.cols() < 2) raise(ErrorCode::invalid_argument, "curve matrix needs an x column and a series");
  Scale sx{xy.col(0).minCoeff(), xy.col(0).maxCoeff()};
  Scale sy{xy.rightCols(xy.cols() - 1).minCoeff(), xy.rightCols(xy.cols() - 1).maxCoeff()};

  auto out = open_svg(path, kSize, kSize);
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kSize - kMargin << "\" x2=\"" << kSize - kMargin
      << "\" y2=\"" << kSize - kMargin << "\" stroke=\"#333333\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kSize - kMargin << "\" x2=\"" << kMargin
      << "\" y2=\"" << kMargin << "\" stroke=\"#333333\"/>\n";
  for (int64_t s = 1; s < xy.cols(); ++s) {
    out << "<polyline fill=\"none\" stroke=\"" << kPalette[static_cast<size_t>((s - 1) % 10)]
        << "\" stroke-width=\"2\" points=\"";
    for (int64_t i = 0; i < xy.rows(); ++i) {
      double x = sx.map(xy(i, 0), kMargin, kSize - kMargin);
      double y = sy.map(xy(i, s), kSize - kMargin, kMargin);
      out << (i ? " " : "") << x << "," << y;
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
  if (!out) raise(ErrorCode::io, "write failed for '", path.string(), "'");
}

}  // namespace deepvox::svg
