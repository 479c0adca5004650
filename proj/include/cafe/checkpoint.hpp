#pragma once

#include <string>

#include "cafe/causal.hpp"
#include "cafe/config.hpp"
#include "cafe/model.hpp"

namespace cafe {

// Versioned binary container for a finished (or in-progress) run. All
// multi-byte values are little-endian regardless of host; doubles travel as
// their IEEE-754 bit patterns. Layout:
//
//   bytes 0-7    magic "CAFECKPT"
//   u32          format version (currently 1)
//   u32          byte-order probe 0x01020304
//   u8           method
//   u32          round index
//   model config u32 input_dim, u32 hidden count, u32 widths...,
//                u32 feature_dim, u32 num_classes, u8 activation
//   parameters   u64 count, f64 values (flat layout of ModelParams)
//   drift dirs   u32 classes, u32 dim, then per class u8 valid + f64 row
//   calibration  f64 tau, gamma, alpha, beta
//   rng state    u32 length, ascii bytes (engine serialization)
struct Checkpoint {
  ModelConfig model_config;
  ModelParams params;
  DriftDirections global_dirs;
  CalibrationParams calibration;
  Method method = Method::Cafe;
  int round = 0;
  std::string rng_state;

  InferenceHead inference_head() const;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace cafe
