#pragma once

// TOF1 binary tensor files.
//
//   bytes 0-3   magic "TOF1"
//   byte  4     order m (u8)
//   next 4*m    dims, u32 little-endian
//   payload     prod(dims) f64 little-endian, row-major
//
// A sample of n observations of dims (p_1, ..., p_m) is stored as one TOF1
// tensor of order m + 1 with dims (n, p_1, ..., p_m).

#include <filesystem>
#include <iosfwd>

#include "tensorord/spectral.hpp"
#include "tensorord/tensor.hpp"

namespace tensorord {

void write_tof1(std::ostream& out, const Tensor& t);
Tensor read_tof1(std::istream& in);

void save_tensor(const std::filesystem::path& path, const Tensor& t);
Tensor load_tensor(const std::filesystem::path& path);

Tensor stack_sample(const TensorSample& sample);
TensorSample unstack_sample(const Tensor& stacked);

void save_sample(const std::filesystem::path& path, const TensorSample& sample);
TensorSample load_sample(const std::filesystem::path& path);

}  // namespace tensorord
