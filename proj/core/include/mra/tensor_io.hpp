#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "mra/dense_matrix.hpp"

namespace mra {

enum class TensorIoCode {
  bad_magic,
  bad_dtype,
  bad_ndim,
  dims_overflow,
  truncated_header,
  truncated_payload,
  non_finite,
  io_failure,
  csv_parse,
  csv_too_large,
};

class TensorIoError : public std::runtime_error {
 public:
  TensorIoError(TensorIoCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  TensorIoCode code() const { return code_; }

 private:
  TensorIoCode code_;
};

/// Binary "MRT1" format:
///   bytes 0-3   magic ASCII "MRT1"
///   byte  4     dtype code (1 = f32, 2 = f64)
///   byte  5     ndim (always 2)
///   bytes 6-7   zero padding
///   2 x u64     dims, little endian
///   payload     row-major, little-endian IEEE-754
///
/// Paths ending in ".csv" are parsed as headerless comma-separated rows;
/// CSV is a debugging convenience capped at 1e6 entries.
DenseMatrix read_tensor(const std::string& path);

void write_tensor(const DenseMatrix& m, const std::string& path);

}  // namespace mra
