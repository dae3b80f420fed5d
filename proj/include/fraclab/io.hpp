#ifndef FRACLAB_IO_HPP
#define FRACLAB_IO_HPP

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

#include "fraclab/barrier.hpp"
#include "fraclab/flowmap.hpp"
#include "fraclab/regularity.hpp"

namespace fraclab {

using json = nlohmann::json;

// Binary field container (little-endian):
//   magic "FLF1", then f64 period, u64 n_points, u64 n_times, f64 s,
//   n_times f64 time stamps, then row-major f64 values (time x space).
void write_field_bin(const Field& u, FractionalOrder s, const std::filesystem::path& path);
struct LoadedField {
  Field field;
  FractionalOrder order;
};
LoadedField read_field_bin(const std::filesystem::path& path);

// CSV with columns t, x, u
void write_field_csv(const Field& u, const std::filesystem::path& path);

// CSV with columns t, A, residual (midpoint residual per segment, 0 for the last)
void write_flowpath_csv(const FlowPath& path, const std::filesystem::path& file);

// CSV with columns k, r^k, osc, bound r^{alpha k}, verdict
void write_decay_csv(const DecaySequence& seq, double alpha, const std::filesystem::path& file);

json kit_to_json(const BarrierKit& kit, FractionalOrder s);
BarrierKit kit_from_json(const json& j);

void write_json(const json& j, const std::filesystem::path& path);
json read_json(const std::filesystem::path& path);

}  // namespace fraclab

#endif
