#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "tplab/experiments.hpp"

namespace tplab::detail {

/// results[i] = fn(i), computed on up to `jobs` threads.
template <class T, class Fn>
std::vector<T> parallel_map(int count, int jobs, Fn fn) {
  std::vector<T> out(count);
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex mu;
  auto worker = [&]() {
    for (int i = next++; i < count; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min(jobs, count); ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
  return out;
}

void check(ExperimentResult& r, const std::string& name, double value, const std::string& rel, double threshold);

double param_num(const ExperimentConfig& c, const char* key, double dflt);
std::vector<double> param_list(const ExperimentConfig& c, const char* key, std::vector<double> dflt);
std::string param_str(const ExperimentConfig& c, const char* key, const std::string& dflt);
json problem_or_throw(const ExperimentConfig& c);
SpaceTimeFn expr_from_json(const json& e, int n, std::uint64_t seed, const std::string& key);

ExperimentResult run_solve(const ExperimentConfig& c, int jobs);
ExperimentResult run_decomposition(const ExperimentConfig& c, int jobs);
ExperimentResult run_max_principle(const ExperimentConfig& c, int jobs);
ExperimentResult run_perron(const ExperimentConfig& c, int jobs);
ExperimentResult run_abp(const ExperimentConfig& c, int jobs);
ExperimentResult run_harnack(const ExperimentConfig& c, int jobs);
ExperimentResult run_osc_decay(const ExperimentConfig& c, int jobs);
ExperimentResult run_holder(const ExperimentConfig& c, int jobs);
ExperimentResult run_c1alpha(const ExperimentConfig& c, int jobs);
ExperimentResult run_stability(const ExperimentConfig& c, int jobs);
ExperimentResult run_envelope(const ExperimentConfig& c, int jobs);
ExperimentResult run_eps_envelope(const ExperimentConfig& c, int jobs);
ExperimentResult run_hopf(const ExperimentConfig& c, int jobs);
ExperimentResult run_hopf_recursion(const ExperimentConfig& c, int jobs);
ExperimentResult run_determinism(const ExperimentConfig& c, int jobs);

}  // namespace tplab::detail
