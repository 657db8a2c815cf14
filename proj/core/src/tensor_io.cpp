#include "mra/tensor_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace mra {

namespace {

constexpr char kMagic[4] = {'M', 'R', 'T', '1'};
constexpr std::size_t kHeaderBytes = 8 + 2 * 8;
constexpr std::size_t kMaxCsvEntries = 1000000;

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::uint64_t load_u64_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

void store_u64_le(std::uint64_t v, unsigned char* p) {
  for (int i = 0; i < 8; ++i) {
    p[i] = static_cast<unsigned char>(v & 0xFF);
    v >>= 8;
  }
}

DenseMatrix read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TensorIoError(TensorIoCode::io_failure, "cannot open " + path);
  std::vector<double> values;
  std::size_t rows = 0, cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t row_cols = 0;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t pos = 0;
      double v;
      try {
        v = std::stod(cell, &pos);
      } catch (const std::exception&) {
        throw TensorIoError(TensorIoCode::csv_parse, "bad CSV cell '" + cell + "' in " + path);
      }
      values.push_back(v);
      ++row_cols;
      if (values.size() > kMaxCsvEntries)
        throw TensorIoError(TensorIoCode::csv_too_large, "CSV exceeds 1e6 entries: " + path);
    }
    if (rows == 0) {
      cols = row_cols;
    } else if (row_cols != cols) {
      throw TensorIoError(TensorIoCode::csv_parse, "ragged CSV rows in " + path);
    }
    ++rows;
  }
  if (rows == 0 || cols == 0)
    throw TensorIoError(TensorIoCode::csv_parse, "empty CSV: " + path);
  DenseMatrix m(rows, cols, Dtype::f64);
  m.data = std::move(values);
  for (double v : m.data)
    if (!std::isfinite(v))
      throw TensorIoError(TensorIoCode::non_finite, "non-finite value in " + path);
  return m;
}

}  // namespace

DenseMatrix read_tensor(const std::string& path) {
  if (ends_with(path, ".csv")) return read_csv(path);

  std::ifstream in(path, std::ios::binary);
  if (!in) throw TensorIoError(TensorIoCode::io_failure, "cannot open " + path);

  unsigned char header[kHeaderBytes];
  in.read(reinterpret_cast<char*>(header), kHeaderBytes);
  if (in.gcount() != static_cast<std::streamsize>(kHeaderBytes))
    throw TensorIoError(TensorIoCode::truncated_header, "truncated header in " + path);
  if (std::memcmp(header, kMagic, 4) != 0)
    throw TensorIoError(TensorIoCode::bad_magic, "bad magic in " + path);

  const unsigned dtype_code = header[4];
  if (dtype_code != 1 && dtype_code != 2)
    throw TensorIoError(TensorIoCode::bad_dtype, "unknown dtype code in " + path);
  const Dtype dtype = dtype_code == 1 ? Dtype::f32 : Dtype::f64;
  if (header[5] != 2)
    throw TensorIoError(TensorIoCode::bad_ndim, "ndim != 2 in " + path);

  const std::uint64_t rows = load_u64_le(header + 8);
  const std::uint64_t cols = load_u64_le(header + 16);
  if (rows == 0 || cols == 0)
    throw TensorIoError(TensorIoCode::dims_overflow, "zero dimension in " + path);
  // Reject payloads whose byte size cannot be represented.
  const std::uint64_t elem_bytes = dtype == Dtype::f32 ? 4 : 8;
  if (rows > std::numeric_limits<std::uint64_t>::max() / cols ||
      rows * cols > std::numeric_limits<std::uint64_t>::max() / elem_bytes ||
      rows * cols > static_cast<std::uint64_t>(std::numeric_limits<std::size_t>::max() / 8))
    throw TensorIoError(TensorIoCode::dims_overflow, "dims overflow in " + path);

  const std::size_t count = static_cast<std::size_t>(rows * cols);
  DenseMatrix m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols), dtype);
  if (dtype == Dtype::f32) {
    std::vector<float> buf(count);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(count * 4));
    if (in.gcount() != static_cast<std::streamsize>(count * 4))
      throw TensorIoError(TensorIoCode::truncated_payload, "truncated payload in " + path);
    for (std::size_t i = 0; i < count; ++i) m.data[i] = static_cast<double>(buf[i]);
  } else {
    in.read(reinterpret_cast<char*>(m.data.data()), static_cast<std::streamsize>(count * 8));
    if (in.gcount() != static_cast<std::streamsize>(count * 8))
      throw TensorIoError(TensorIoCode::truncated_payload, "truncated payload in " + path);
  }
  for (double v : m.data)
    if (!std::isfinite(v))
      throw TensorIoError(TensorIoCode::non_finite, "non-finite value in " + path);
  return m;
}

void write_tensor(const DenseMatrix& m, const std::string& path) {
  if (ends_with(path, ".csv")) {
    if (m.size() > kMaxCsvEntries)
      throw TensorIoError(TensorIoCode::csv_too_large, "matrix too large for CSV: " + path);
    std::ofstream out(path);
    if (!out) throw TensorIoError(TensorIoCode::io_failure, "cannot open " + path + " for write");
    out.precision(17);
    for (std::size_t i = 0; i < m.rows; ++i) {
      for (std::size_t j = 0; j < m.cols; ++j) {
        if (j) out << ',';
        out << m.at(i, j);
      }
      out << '\n';
    }
    if (!out) throw TensorIoError(TensorIoCode::io_failure, "write failed: " + path);
    return;
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw TensorIoError(TensorIoCode::io_failure, "cannot open " + path + " for write");
  unsigned char header[kHeaderBytes] = {};
  std::memcpy(header, kMagic, 4);
  header[4] = m.dtype == Dtype::f32 ? 1 : 2;
  header[5] = 2;
  store_u64_le(m.rows, header + 8);
  store_u64_le(m.cols, header + 16);
  out.write(reinterpret_cast<const char*>(header), kHeaderBytes);
  if (m.dtype == Dtype::f32) {
    std::vector<float> buf(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) buf[i] = static_cast<float>(m.data[i]);
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 4));
  } else {
    out.write(reinterpret_cast<const char*>(m.data.data()),
              static_cast<std::streamsize>(m.size() * 8));
  }
  if (!out) throw TensorIoError(TensorIoCode::io_failure, "write failed: " + path);
}

}  // namespace mra
