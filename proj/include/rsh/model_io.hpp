#pragma once

#include <string>
#include <string_view>

#include "rsh/core.hpp"

namespace rsh {

// Model file layout (all integers and floats little-endian):
//
//   "RSHMODEL"            8-byte magic
//   u32 version           currently 1
//   u64 K, u64 L, u64 d
//   f64 rho, f64 lambda, f64 eta, u64 epochs, f64 tol, u64 seed, f64 eps_min
//   u8  has_weights       0 or 1
//   f64 x (L*K*d)         projections, bit by bit, each K x d row-major
//   f64 x L               theta weights, only when has_weights == 1
inline constexpr std::string_view kModelMagic = "RSHMODEL";
inline constexpr std::uint32_t kModelVersion = 1;

std::string save_model(const HashModel& model);
HashModel load_model(std::string_view bytes);

void save_model_file(const HashModel& model, const std::string& path);
HashModel load_model_file(const std::string& path);

}  // namespace rsh
