#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "depauw/density.hpp"
#include "depauw/path.hpp"
#include "depauw/path_measures.hpp"

namespace depauw {

// FNV-1a over the canonical (sorted-key, compact) config dump; embedded in
// every output file so artifacts are traceable to their configuration.
uint64_t fnv1a64(std::string_view s);
std::string hash_hex(uint64_t h);

// Compact binary ensemble format (little-endian):
//   magic "DPWENS1\0", u32 version=1, u32 reserved,
//   u64 seed, u64 config_hash, u64 n_paths,
//   f64 eps, f64 step, f64 t_start, f64 t_end, i32 depth, u32 descr_len,
//   descr bytes (field + start distribution description),
// then per path: u64 n_samples, f64 weight, f64 times[n], f64 x[n], f64 y[n].
void write_ensemble_binary(const std::string& path, const PathEnsemble& e, uint64_t config_hash);
PathEnsemble read_ensemble_binary(const std::string& path);

// CSV exports; the first line is a comment embedding config hash and seed.
void write_ensemble_csv(const std::string& path, const PathEnsemble& e, uint64_t config_hash);
void write_conditional_csv(const std::string& path, const ConditionalHistogram& cond,
                           uint64_t config_hash, uint64_t seed);
void write_density_csv(const std::string& path, const DensityTrajectory& traj,
                       uint64_t config_hash, uint64_t seed);
// Heatmap matrices (one per checkpoint) as plain JSON arrays.
void write_density_heatmaps(const std::string& path, const DensityTrajectory& traj,
                            uint64_t config_hash, uint64_t seed);

}  // namespace depauw
