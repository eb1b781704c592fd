#include <chrono>
#include <fstream>
#include <set>
#include <thread>

#include "rfanogan/anomaly.hpp"
#include "rfanogan/error.hpp"
#include "rfanogan/harness.hpp"

namespace rfanogan::harness {

std::string hardware_description() {
  std::string model;
  std::size_t logical = 0;
  std::ifstream cpuinfo("/proc/cpuinfo");
  for (std::string line; std::getline(cpuinfo, line);) {
    if (line.rfind("processor", 0) == 0) ++logical;
    if (model.empty() && line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) model = line.substr(line.find_first_not_of(' ', colon + 1));
    }
  }
  if (model.empty()) model = "unknown CPU";
  if (logical == 0) logical = std::thread::hardware_concurrency();
  return model + ", " + std::to_string(logical) + " logical CPUs, torch threads " +
         std::to_string(torch::get_num_threads());
}

Timing benchmark_inference(models::Network& generator, models::Network& encoder, models::Network& critic,
                           const torch::Tensor& frames, std::size_t n_samples, std::size_t warmup, double kappa) {
  if (n_samples < 1) throw Error("benchmark: n_samples must be >= 1");
  if (warmup >= n_samples) throw Error("no timed samples");
  if (!frames.defined() || frames.dim() != 4 || frames.size(0) == 0) {
    throw Error("benchmark: need a nonempty (N, 1, 2, W) frame batch");
  }
  const auto n_frames = static_cast<std::size_t>(frames.size(0));
  double total = 0.0;
  for (std::size_t n = 0; n < n_samples; ++n) {
    const auto x = frames.slice(0, static_cast<std::int64_t>(n % n_frames), static_cast<std::int64_t>(n % n_frames) + 1);
    const auto start = std::chrono::steady_clock::now();
    const auto score = anomaly::fanogan_scores(x, generator, encoder, critic, kappa);
    const auto stop = std::chrono::steady_clock::now();
    if (score.size() != 1) throw Error("benchmark: unexpected score count");
    if (n >= warmup) total += std::chrono::duration<double>(stop - start).count();
  }
  Timing t;
  t.n_timed = n_samples - warmup;
  t.mean_latency_s = total / static_cast<double>(t.n_timed);
  t.throughput = 1.0 / t.mean_latency_s;
  t.hardware = hardware_description();
  return t;
}

}  // namespace rfanogan::harness
