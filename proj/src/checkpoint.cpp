#include "cafe/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "cafe/errors.hpp"

namespace cafe {

namespace {

constexpr char kMagic[8] = {'C', 'A', 'F', 'E', 'C', 'K', 'P', 'T'};
constexpr uint32_t kVersion = 1;
constexpr uint32_t kOrderProbe = 0x01020304u;

void put_u32(std::ostream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<char*>(b), 4);
}

void put_u64(std::ostream& out, uint64_t v) {
  put_u32(out, static_cast<uint32_t>(v));
  put_u32(out, static_cast<uint32_t>(v >> 32));
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<uint64_t>(v)); }

uint32_t get_u32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw IoError(path + ": truncated checkpoint");
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

uint64_t get_u64(std::istream& in, const std::string& path) {
  uint64_t lo = get_u32(in, path);
  uint64_t hi = get_u32(in, path);
  return lo | (hi << 32);
}

double get_f64(std::istream& in, const std::string& path) {
  return std::bit_cast<double>(get_u64(in, path));
}

}  // namespace

InferenceHead Checkpoint::inference_head() const {
  InferenceHead head;
  head.classifier = params.classifier_matrix();
  head.global_dirs = global_dirs;
  head.tau = calibration.tau;
  head.gamma = calibration.gamma;
  head.alpha = calibration.alpha;
  return head;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path);
  out.write(kMagic, sizeof kMagic);
  put_u32(out, kVersion);
  put_u32(out, kOrderProbe);
  out.put(static_cast<char>(ckpt.method));
  put_u32(out, static_cast<uint32_t>(ckpt.round));

  const ModelConfig& mc = ckpt.model_config;
  put_u32(out, static_cast<uint32_t>(mc.input_dim));
  put_u32(out, static_cast<uint32_t>(mc.hidden_dims.size()));
  for (int hdim : mc.hidden_dims) put_u32(out, static_cast<uint32_t>(hdim));
  put_u32(out, static_cast<uint32_t>(mc.feature_dim));
  put_u32(out, static_cast<uint32_t>(mc.num_classes));
  out.put(static_cast<char>(mc.activation));

  put_u64(out, ckpt.params.values.size());
  for (double v : ckpt.params.values) put_f64(out, v);

  put_u32(out, static_cast<uint32_t>(ckpt.global_dirs.dirs.rows));
  put_u32(out, static_cast<uint32_t>(ckpt.global_dirs.dirs.cols));
  for (int c = 0; c < ckpt.global_dirs.dirs.rows; ++c) {
    out.put(ckpt.global_dirs.class_valid(c) ? '\1' : '\0');
    for (double v : ckpt.global_dirs.dirs.row(c)) put_f64(out, v);
  }

  put_f64(out, ckpt.calibration.tau);
  put_f64(out, ckpt.calibration.gamma);
  put_f64(out, ckpt.calibration.alpha);
  put_f64(out, ckpt.calibration.beta);

  put_u32(out, static_cast<uint32_t>(ckpt.rng_state.size()));
  out.write(ckpt.rng_state.data(), static_cast<std::streamsize>(ckpt.rng_state.size()));
  if (!out) throw IoError("failed while writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw IoError(path + ": bad checkpoint magic at offset 0");
  uint32_t version = get_u32(in, path);
  if (version != kVersion)
    throw IoError(path + ": unsupported checkpoint version " + std::to_string(version));
  uint32_t probe = get_u32(in, path);
  if (probe != kOrderProbe) throw IoError(path + ": byte-order probe mismatch");

  Checkpoint ckpt;
  int method_byte = in.get();
  if (method_byte < 0 || method_byte > 3) throw IoError(path + ": bad method tag");
  ckpt.method = static_cast<Method>(method_byte);
  ckpt.round = static_cast<int>(get_u32(in, path));

  ModelConfig mc;
  mc.input_dim = static_cast<int>(get_u32(in, path));
  uint32_t num_hidden = get_u32(in, path);
  for (uint32_t i = 0; i < num_hidden; ++i)
    mc.hidden_dims.push_back(static_cast<int>(get_u32(in, path)));
  mc.feature_dim = static_cast<int>(get_u32(in, path));
  mc.num_classes = static_cast<int>(get_u32(in, path));
  int act = in.get();
  if (act < 0 || act > 2) throw IoError(path + ": bad activation tag");
  mc.activation = static_cast<Activation>(act);
  ckpt.model_config = mc;

  ckpt.params = ModelParams(mc);
  uint64_t count = get_u64(in, path);
  if (count != ckpt.params.values.size())
    throw IoError(path + ": parameter count " + std::to_string(count) +
                  " does not match model config (" + std::to_string(ckpt.params.values.size()) +
                  ")");
  for (double& v : ckpt.params.values) v = get_f64(in, path);

  int classes = static_cast<int>(get_u32(in, path));
  int dim = static_cast<int>(get_u32(in, path));
  ckpt.global_dirs = DriftDirections(classes, dim);
  for (int c = 0; c < classes; ++c) {
    int flag = in.get();
    if (flag < 0) throw IoError(path + ": truncated checkpoint");
    ckpt.global_dirs.valid[static_cast<size_t>(c)] = flag ? 1 : 0;
    for (double& v : ckpt.global_dirs.dirs.row(c)) v = get_f64(in, path);
  }

  ckpt.calibration.tau = get_f64(in, path);
  ckpt.calibration.gamma = get_f64(in, path);
  ckpt.calibration.alpha = get_f64(in, path);
  ckpt.calibration.beta = get_f64(in, path);

  uint32_t rng_len = get_u32(in, path);
  ckpt.rng_state.resize(rng_len);
  if (rng_len > 0 && !in.read(ckpt.rng_state.data(), rng_len))
    throw IoError(path + ": truncated checkpoint");
  return ckpt;
}

}  // namespace cafe
