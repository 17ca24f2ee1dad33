#include "matrix.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "error.hpp"

namespace deepvox {

namespace {

constexpr const char* kMagic = "DVMX";
constexpr int kVersion = 1;

void write_f32_le(std::ostream& out, const double* src, int64_t count) {
  std::vector<unsigned char> buf(static_cast<size_t>(count) * 4);
  for (int64_t i = 0; i < count; ++i) {
    double d = src[i];
    float f = static_cast<float>(d);
    if (std::isfinite(d) && !std::isfinite(f))
      raise(ErrorCode::non_finite, "save_matrix: value ", d, " is not representable as float32");
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    buf[i * 4 + 0] = static_cast<unsigned char>(bits & 0xff);
    buf[i * 4 + 1] = static_cast<unsigned char>((bits >> 8) & 0xff);
    buf[i * 4 + 2] = static_cast<unsigned char>((bits >> 16) & 0xff);
    buf[i * 4 + 3] = static_cast<unsigned char>((bits >> 24) & 0xff);
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

std::string read_header_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) raise(ErrorCode::format, "load_matrix: truncated header, expected ", what);
  return line;
}

}  // namespace

void validate(const SampleMatrix& m) {
  if (m.rows() < 1 || m.cols() < 1)
    raise(ErrorCode::invalid_argument, "matrix must have at least one row and one column, got ",
          m.rows(), "x", m.cols());
  if (!m.values.allFinite()) raise(ErrorCode::non_finite, "matrix contains non-finite values");
  if (m.geometry) {
    const auto& g = *m.geometry;
    if (g.dims[0] < 1 || g.dims[1] < 1 || g.dims[2] < 1)
      raise(ErrorCode::invalid_argument, "geometry dims must be positive");
    if (static_cast<int64_t>(g.mask.size()) != m.cols())
      raise(ErrorCode::invalid_argument, "geometry mask length ", g.mask.size(),
            " does not match column count ", m.cols());
    int64_t limit = g.dims[0] * g.dims[1] * g.dims[2];
    int64_t prev = -1;
    for (int64_t idx : g.mask) {
      if (idx <= prev) raise(ErrorCode::invalid_argument, "geometry mask indices must be strictly increasing");
      if (idx >= limit) raise(ErrorCode::invalid_argument, "geometry mask index ", idx, " exceeds grid size ", limit);
      prev = idx;
    }
  }
}

void save_matrix(const SampleMatrix& m, const std::filesystem::path& path) {
  validate(m);
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::io, "cannot open '", path.string(), "' for writing");
  out << kMagic << " " << kVersion << "\n";
  out << "rows " << m.rows() << "\n";
  out << "cols " << m.cols() << "\n";
  out << "dtype f32\n";
  out << "geom " << (m.geometry ? 1 : 0) << "\n";
  if (m.geometry) {
    const auto& g = *m.geometry;
    out << "dims " << g.dims[0] << " " << g.dims[1] << " " << g.dims[2] << "\n";
    out << "mask " << g.mask.size();
    for (int64_t idx : g.mask) out << " " << idx;
    out << "\n";
  }
  out << "data\n";
  write_f32_le(out, m.values.data(), m.rows() * m.cols());
  if (!out) raise(ErrorCode::io, "write failed for '", path.string(), "'");
}

SampleMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::io, "cannot open '", path.string(), "' for reading");

  {
    std::istringstream first(read_header_line(in, "magic"));
    std::string magic;
    int version = 0;
    first >> magic >> version;
    if (magic != kMagic) raise(ErrorCode::format, "'", path.string(), "' is not a matrix file (bad magic)");
    if (version != kVersion) raise(ErrorCode::format, "unsupported matrix format version ", version);
  }

  auto read_kv = [&](const char* key) -> std::istringstream {
    std::istringstream ls(read_header_line(in, key));
    std::string k;
    ls >> k;
    if (k != key) raise(ErrorCode::format, "expected header key '", key, "', got '", k, "'");
    return ls;
  };

  int64_t rows = 0, cols = 0;
  read_kv("rows") >> rows;
  read_kv("cols") >> cols;
  if (rows < 1 || cols < 1) raise(ErrorCode::format, "invalid shape ", rows, "x", cols);
  {
    std::string dtype;
    read_kv("dtype") >> dtype;
    if (dtype != "f32") raise(ErrorCode::format, "unsupported dtype '", dtype, "'");
  }
  int geom_flag = -1;
  read_kv("geom") >> geom_flag;
  if (geom_flag != 0 && geom_flag != 1) raise(ErrorCode::format, "invalid geom flag");

  std::optional<VolumeGeometry> geometry;
  if (geom_flag == 1) {
    VolumeGeometry g;
    auto ds = read_kv("dims");
    ds >> g.dims[0] >> g.dims[1] >> g.dims[2];
    if (!ds) raise(ErrorCode::format, "malformed dims line");
    auto ms = read_kv("mask");
    int64_t count = -1;
    ms >> count;
    if (!ms || count != cols) raise(ErrorCode::format, "mask count must equal cols");
    g.mask.resize(static_cast<size_t>(count));
    for (int64_t i = 0; i < count; ++i) {
      ms >> g.mask[static_cast<size_t>(i)];
      if (!ms) raise(ErrorCode::format, "malformed mask line");
    }
    geometry = std::move(g);
  }
  {
    std::string sentinel = read_header_line(in, "data sentinel");
    if (sentinel != "data") raise(ErrorCode::format, "expected 'data' sentinel, got '", sentinel, "'");
  }

  int64_t count = rows * cols;
  std::vector<unsigned char> buf(static_cast<size_t>(count) * 4);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size()))
    raise(ErrorCode::size_mismatch, "payload holds ", in.gcount() / 4, " values, header promises ", count);
  char extra;
  if (in.read(&extra, 1))
    raise(ErrorCode::size_mismatch, "payload longer than rows*cols values");

  SampleMatrix m;
  m.values.resize(rows, cols);
  for (int64_t i = 0; i < count; ++i) {
    uint32_t bits = static_cast<uint32_t>(buf[i * 4 + 0]) |
                    (static_cast<uint32_t>(buf[i * 4 + 1]) << 8) |
                    (static_cast<uint32_t>(buf[i * 4 + 2]) << 16) |
                    (static_cast<uint32_t>(buf[i * 4 + 3]) << 24);
    float f;
    std::memcpy(&f, &bits, 4);
    m.values.data()[i] = static_cast<double>(f);
  }
  if (!m.values.allFinite()) raise(ErrorCode::non_finite, "'", path.string(), "' contains non-finite values");
  m.geometry = std::move(geometry);
  validate(m);
  return m;
}

MaskResult mask_below_mean(const SampleMatrix& m) {
  validate(m);
  Vec col_means = m.values.colwise().mean();
  double grand_mean = col_means.mean();

  std::vector<int64_t> retained;
  retained.reserve(static_cast<size_t>(m.cols()));
  for (int64_t j = 0; j < m.cols(); ++j)
    if (col_means[j] >= grand_mean) retained.push_back(j);
  if (retained.empty()) raise(ErrorCode::numeric, "mask_below_mean removed every column");

  MaskResult out;
  out.matrix.values.resize(m.rows(), static_cast<int64_t>(retained.size()));
  for (size_t j = 0; j < retained.size(); ++j)
    out.matrix.values.col(static_cast<int64_t>(j)) = m.values.col(retained[j]);
  if (m.geometry) {
    VolumeGeometry g;
    g.dims = m.geometry->dims;
    g.mask.reserve(retained.size());
    for (int64_t j : retained) g.mask.push_back(m.geometry->mask[static_cast<size_t>(j)]);
    out.matrix.geometry = std::move(g);
  }
  out.retained = std::move(retained);
  return out;
}

SampleMatrix remove_mean_image(const SampleMatrix& m) {
  validate(m);
  SampleMatrix out;
  out.values = m.values.rowwise() - m.values.colwise().mean();
  out.geometry = m.geometry;
  return out;
}

SampleMatrix zscore_voxels(const SampleMatrix& m) {
  validate(m);
  if (m.rows() < 2) raise(ErrorCode::invalid_argument, "zscore_voxels needs at least 2 rows, got ", m.rows());
  SampleMatrix out;
  out.values = m.values.rowwise() - m.values.colwise().mean();
  // population convention: divide by n
  Vec sd = (out.values.array().square().colwise().mean()).sqrt();
  for (int64_t j = 0; j < m.cols(); ++j) {
    if (sd[j] > 0.0)
      out.values.col(j) /= sd[j];
    else
      out.values.col(j).setZero();
  }
  out.geometry = m.geometry;
  return out;
}

}  // namespace deepvox
